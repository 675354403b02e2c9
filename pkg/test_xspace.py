"""Points of X, step functions and measures on the partition."""
from django.test import SimpleTestCase

from dynamics.exceptions import AmbiguousPointError, MapSpecError, UnsupportedMapError
from dynamics.maps import build_map, tent_map
from dynamics.scalars import ONE, ZERO, Scalar
from dynamics.xspace import (
    MeasureWeights,
    OrderInterval,
    Side,
    StepFunction,
    XPoint,
    sigma_apply,
    step_integrate,
    step_normalize,
    step_supnorm,
    step_var,
)

HALF = Scalar("1/2")
THIRD = Scalar("1/3")
SKEW_TENT = {
    "type": "explicit",
    "breakpoints": ["0", "1/3", "1"],
    "branches": [{"slope": "3", "intercept": "0"}, {"slope": "-3/2", "intercept": "3/2"}],
}


class XPointTests(SimpleTestCase):
    def test_side_order(self):
        self.assertLess(XPoint.minus(HALF), XPoint(HALF))
        self.assertLess(XPoint(HALF), XPoint.plus(HALF))
        self.assertLess(XPoint.plus(Scalar("1/3")), XPoint.minus(HALF))

    def test_endpoints_are_plain(self):
        self.assertIs(XPoint.minus(ZERO).side, Side.PLAIN)
        self.assertIs(XPoint.plus(ONE).side, Side.PLAIN)

    def test_outside_unit_interval(self):
        with self.assertRaises(ValueError):
            XPoint(Scalar(2))

    def test_clopen_interval(self):
        interval = OrderInterval.between("1/4", "1/2")
        self.assertTrue(interval.contains(XPoint.plus("1/4")))
        self.assertTrue(interval.contains(XPoint.minus(HALF)))
        self.assertFalse(interval.contains(XPoint.plus(HALF)))


class SigmaTests(SimpleTestCase):
    def test_decreasing_branch_swaps_sides(self):
        tau = tent_map(2)
        self.assertEqual(sigma_apply(tau, XPoint.plus("3/4")), XPoint.minus(HALF))
        self.assertEqual(sigma_apply(tau, XPoint.plus("1/4")), XPoint.plus(HALF))

    def test_breakpoint_needs_a_side(self):
        tau = tent_map(2)
        with self.assertRaises(AmbiguousPointError):
            sigma_apply(tau, XPoint(HALF))
        self.assertEqual(sigma_apply(tau, XPoint.minus(HALF)), XPoint(ONE))


class StepFunctionTests(SimpleTestCase):
    def test_pieces_merge_equal_values(self):
        f = StepFunction.from_pieces([(ZERO, HALF, ONE), (HALF, ONE, ONE)])
        self.assertEqual(f, StepFunction.constant(1))
        self.assertEqual(f.cuts, ())

    def test_arithmetic(self):
        f = StepFunction.indicator(0, "1/2", 3)
        g = StepFunction.indicator("1/4", 1, 1)
        total = f + g
        self.assertEqual(total.cuts, (Scalar("1/4"), HALF))
        self.assertEqual(total.values, (Scalar(3), Scalar(4), ONE))
        self.assertTrue((f - f).is_zero())
        self.assertEqual(step_supnorm(total), Scalar(4))
        self.assertEqual(step_var(total), Scalar(4))

    def test_evaluate_on_cuts(self):
        f = StepFunction.indicator(0, "1/2", 2)
        self.assertEqual(f.evaluate(XPoint.minus(HALF)), Scalar(2))
        self.assertEqual(f.evaluate(XPoint.plus(HALF)), ZERO)
        with self.assertRaises(AmbiguousPointError):
            f.evaluate(XPoint(HALF))

    def test_build_rejects_unsorted_cuts(self):
        with self.assertRaises(ValueError):
            StepFunction.build(["1/2", "1/4"], [1, 2, 3])

    def test_literal_validation(self):
        with self.assertRaises(MapSpecError):
            StepFunction.from_literal({"cuts": ["0", "1/2"], "values": ["1", "2"]})

    def test_restrict_to_interval_set(self):
        from dynamics.maps import IntervalSet

        f = StepFunction.constant(5).restrict(IntervalSet.of([("1/4", "1/2")]))
        self.assertEqual(f, StepFunction.indicator("1/4", "1/2", 5))

    def test_normalize_drops_redundant_cuts(self):
        f = StepFunction((Scalar("1/4"), HALF, Scalar("3/4")), (ONE, ONE, Scalar(2), Scalar(2)))
        self.assertEqual(step_normalize(f), StepFunction((HALF,), (ONE, Scalar(2))))
        g = StepFunction.indicator(0, "1/2")
        self.assertIs(step_normalize(g), g)


class MeasureTests(SimpleTestCase):
    def test_lebesgue_integral(self):
        f = StepFunction.indicator("1/4", "3/4", 2)
        self.assertEqual(step_integrate(f, MeasureWeights.lebesgue()), ONE)

    def test_cdf_is_linear_inside_cells(self):
        mu = MeasureWeights((ZERO, HALF, ONE), (Scalar("3/4"), Scalar("1/4")))
        self.assertEqual(mu.cdf("1/4"), Scalar("3/8"))
        self.assertEqual(mu.measure("1/4", "3/4"), Scalar("1/2"))
        self.assertFalse(mu.is_lebesgue)
        self.assertTrue(mu.full_support)

    def test_masses_must_sum_to_one(self):
        with self.assertRaises(ValueError):
            MeasureWeights((ZERO, HALF, ONE), (HALF, HALF / 2))


class ScalingWeightsTests(SimpleTestCase):
    """Skew tent with slopes 3 and -3/2: conjugate to the full tent, s = 2."""

    def setUp(self):
        self.tau = build_map(SKEW_TENT)
        self.mu = MeasureWeights.scaling((ZERO, THIRD, ONE), (HALF, HALF), self.tau, 2)

    def test_preimages_of_cuts(self):
        self.assertEqual(self.mu.measure(0, "1/9"), Scalar("1/4"))
        self.assertEqual(self.mu.cdf("1/27"), Scalar("1/8"))
        self.assertEqual(self.mu.cdf("7/9"), Scalar("3/4"))
        self.assertFalse(self.mu.is_lebesgue)

    def test_fixed_point_closes_the_orbit(self):
        # tau(3/5) = 3/5 on the decreasing branch
        self.assertEqual(self.mu.cdf("3/5"), Scalar("2/3"))
        linear = MeasureWeights((ZERO, THIRD, ONE), (HALF, HALF))
        self.assertEqual(linear.cdf("3/5"), Scalar("7/10"))

    def test_image_measure_scales(self):
        J = StepFunction.indicator(0, "1/9")
        image = StepFunction.indicator(0, THIRD)
        self.assertEqual(step_integrate(image, self.mu), 2 * step_integrate(J, self.mu))

    def test_orbit_bound(self):
        mu = MeasureWeights.scaling((ZERO, THIRD, ONE), (HALF, HALF), self.tau, 2, bound=1)
        with self.assertRaises(UnsupportedMapError):
            mu.cdf("1/27")
        self.assertEqual(mu.cdf("1/9"), Scalar("1/4"))

    def test_cuts_must_be_markov(self):
        mu = MeasureWeights.scaling((ZERO, HALF, ONE), (HALF, HALF), self.tau, 2)
        with self.assertRaises(ValueError):
            mu.cdf("3/4")
        with self.assertRaises(ValueError):
            MeasureWeights((ZERO, ONE), (ONE,), self.tau)
