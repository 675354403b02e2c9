"""The transfer operator L and equivalence in the dimension group."""
from django.test import SimpleTestCase

from dynamics.maps import build_map, tent_map
from dynamics.markov import detect_markov
from dynamics.scalars import Scalar
from dynamics.transfer import TransferContext, dg_equivalent, pf_apply, transfer_apply, transfer_power
from dynamics.xspace import MeasureWeights, StepFunction, step_integrate

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}


class TransferApplyTests(SimpleTestCase):
    def setUp(self):
        self.ctx = TransferContext.of(tent_map(2))

    def test_constant_counts_preimages(self):
        self.assertEqual(transfer_apply(self.ctx, StepFunction.constant(1)), StepFunction.constant(2))
        self.assertEqual(transfer_power(self.ctx, StepFunction.constant(1), 3), StepFunction.constant(8))

    def test_lap_indicator_maps_onto_image(self):
        chi = StepFunction.indicator(0, "1/2")
        self.assertEqual(transfer_apply(self.ctx, chi), StepFunction.constant(1))
        chi = StepFunction.indicator(0, "1/4")
        self.assertEqual(transfer_apply(self.ctx, chi), StepFunction.indicator(0, "1/2"))

    def test_normalized_operator_fixes_lebesgue_density(self):
        self.assertEqual(pf_apply(self.ctx, StepFunction.constant(1), 2), StepFunction.constant(1))
        with self.assertRaises(ValueError):
            pf_apply(self.ctx, StepFunction.constant(1), 0)

    def test_markov_cells_follow_incidence_matrix(self):
        tau = build_map({"type": "tent", "s": SQRT2})
        markov = detect_markov(tau)
        ctx = TransferContext.of(tau)
        for j, cell in enumerate(markov.cells):
            image = transfer_apply(ctx, StepFunction.indicator(cell.lo, cell.hi))
            self.assertEqual(markov.vector_of(image), [Scalar(a) for a in markov.incidence[j]])


class EquivalenceTests(SimpleTestCase):
    def setUp(self):
        self.tau = tent_map(2)
        self.ctx = TransferContext.of(self.tau)

    def test_laps_become_equal_after_one_step(self):
        f = StepFunction.indicator(0, "1/2")
        g = StepFunction.indicator("1/2", 1)
        result = dg_equivalent(self.ctx, f, g)
        self.assertEqual(result.verdict, "equal")
        self.assertEqual(result.steps, 1)

    def test_state_certifies_distinct(self):
        lebesgue = MeasureWeights.lebesgue()
        result = dg_equivalent(
            self.ctx, StepFunction.constant(1), StepFunction.zero(), state=lambda h: step_integrate(h, lebesgue)
        )
        self.assertEqual(result.verdict, "distinct")
        self.assertEqual(result.certificate, "state")
        self.assertFalse(result.infinitesimal)

    def test_markov_kernel_certifies_distinct(self):
        result = dg_equivalent(
            self.ctx, StepFunction.constant(1), StepFunction.zero(), markov=detect_markov(self.tau)
        )
        self.assertEqual(result.verdict, "distinct")
        self.assertEqual(result.certificate, "markov_kernel")

    def test_bound_exhausted(self):
        result = dg_equivalent(self.ctx, StepFunction.constant(1), StepFunction.zero(), bound=4)
        self.assertEqual(result.verdict, "undetermined")
        self.assertEqual(result.to_dict(), {"verdict": "undetermined", "bound": 4})

    def test_rejects_non_integer_functions(self):
        with self.assertRaises(ValueError):
            dg_equivalent(self.ctx, StepFunction.constant("1/2"), StepFunction.zero())

    def test_decreasing_lap_reverses_orientation(self):
        image = transfer_apply(self.ctx, StepFunction.indicator("1/2", "3/4", 2))
        self.assertEqual(image, StepFunction.indicator("1/2", 1, 2))


class LaurentCertificateTests(SimpleTestCase):
    """Tent map of slope 3/2: the orbit of 1 never closes, so DG is free on the powers of L."""

    def setUp(self):
        self.ctx = TransferContext.of(tent_map("3/2"))
        # 2 L1 - 3 has state 2 * 3/2 - 3 = 0
        self.h = transfer_apply(self.ctx, StepFunction.constant(1)).scale(2) - StepFunction.constant(3)

    def test_infinitesimal_is_nonzero(self):
        lebesgue = MeasureWeights.lebesgue()
        result = dg_equivalent(
            self.ctx, self.h, StepFunction.zero(), bound=64, state=lambda h: step_integrate(h, lebesgue)
        )
        self.assertEqual(result.verdict, "distinct")
        self.assertEqual(result.certificate, "laurent_cyclic")
        self.assertTrue(result.infinitesimal)

    def test_degree_zero_is_respected(self):
        result = dg_equivalent(self.ctx, self.h, StepFunction.zero(), bound=16, laurent_degree=0)
        self.assertEqual(result.verdict, "undetermined")
        result = dg_equivalent(self.ctx, self.h, StepFunction.zero(), bound=16, laurent_degree=None)
        self.assertEqual(result.verdict, "undetermined")

    def test_skipped_when_not_cyclic(self):
        # every orbit of the full tent closes, so no polynomial identity is trusted
        ctx = TransferContext.of(tent_map(2))
        with self.assertLogs("dynamics.transfer", "INFO") as logs:
            result = dg_equivalent(ctx, StepFunction.constant(1), StepFunction.zero(), bound=4, laurent_degree=3)
        self.assertEqual(result.verdict, "undetermined")
        self.assertTrue(any("Laurent certificate skipped" in line for line in logs.output))
