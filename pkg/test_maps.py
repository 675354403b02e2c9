"""Map specifications, validation and the multivalued extension."""
from django.test import SimpleTestCase

from dynamics.exceptions import MapSpecError
from dynamics.maps import (
    Interval,
    IntervalSet,
    build_map,
    classify,
    flip_conjugate,
    hat_image_point,
    hat_image_set,
    hat_preimage_set,
    tent_map,
)
from dynamics.scalars import ONE, ZERO, Scalar

GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}


class BuildMapTests(SimpleTestCase):
    def test_tent_map(self):
        tau = build_map({"type": "tent", "s": "2"})
        self.assertEqual(tau.breakpoints, (ZERO, Scalar("1/2"), ONE))
        self.assertEqual(tau.value(Scalar("1/2")), ONE)
        self.assertEqual(tau.value(ONE), ZERO)
        self.assertEqual(tau.uniform_slope(), Scalar(2))

    def test_restricted_tent_starts_above_zero(self):
        tau = build_map({"type": "tent", "s": "6/5"})
        self.assertEqual(tau.value(ZERO), Scalar("4/5"))
        self.assertEqual(tau.breakpoints[1], Scalar("1/6"))

    def test_uniform_pl_matches_tent(self):
        tau = build_map({
            "type": "uniform_pl",
            "s": "2",
            "breakpoints": ["0", "1/2", "1"],
            "directions": ["+", "-"],
            "anchor": {"x": "0", "y": "0", "branch": 0},
        })
        self.assertEqual(tau, tent_map(2))

    def test_beta_golden(self):
        phi = Scalar.from_literal(GOLDEN)
        tau = build_map({"type": "beta", "beta": GOLDEN})
        self.assertEqual(tau.n, 2)
        self.assertEqual(tau.breakpoints[1], ONE / phi)
        # right-continuous at the breakpoint, left limit at 1
        self.assertEqual(tau.value(ONE / phi), ZERO)
        self.assertEqual(tau.value(ONE), phi - 1)

    def test_integer_beta_has_full_branches_only(self):
        tau = build_map({"type": "beta", "beta": "3"})
        self.assertEqual(tau.breakpoints, (ZERO, Scalar("1/3"), Scalar("2/3"), ONE))
        self.assertEqual([b.intercept for b in tau.branches], [ZERO, Scalar(-1), Scalar(-2)])


class SpecValidationTests(SimpleTestCase):
    def assertFieldError(self, spec, field):
        with self.assertRaises(MapSpecError) as ctx:
            build_map(spec)
        self.assertEqual(ctx.exception.field, field)

    def test_unknown_type(self):
        self.assertFieldError({"type": "logistic"}, "type")

    def test_tent_parameter_range(self):
        self.assertFieldError({"type": "tent", "s": "3"}, "s")
        self.assertFieldError({"type": "tent", "s": "1"}, "s")

    def test_breakpoint_count(self):
        spec = {"type": "explicit", "breakpoints": ["0", "1/2", "1"], "branches": [{"slope": "1", "intercept": "0"}]}
        self.assertFieldError(spec, "breakpoints")

    def test_branch_image_escapes(self):
        spec = {
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "3", "intercept": "0"}, {"slope": "-2", "intercept": "2"}],
        }
        self.assertFieldError(spec, "branches[0]")

    def test_direction_must_match_slope(self):
        spec = {
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [
                {"slope": "2", "intercept": "0", "direction": "-"},
                {"slope": "-2", "intercept": "2"},
            ],
        }
        self.assertFieldError(spec, "branches[0].direction")

    def test_bad_number_points_at_slope(self):
        spec = {
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "2", "intercept": "0"}, {"slope": "two", "intercept": "2"}],
        }
        self.assertFieldError(spec, "branches[1].slope")

    def test_continuing_branches_must_be_merged(self):
        spec = {
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "1", "intercept": "0"}, {"slope": "1", "intercept": "0"}],
        }
        self.assertFieldError(spec, "branches[1]")


class ClassificationTests(SimpleTestCase):
    def test_tent_is_continuous_and_surjective(self):
        result = classify(tent_map(2))
        self.assertTrue(result.continuous)
        self.assertTrue(result.surjective_hat)
        self.assertFalse(result.essentially_injective)

    def test_rotation_is_essentially_injective(self):
        tau = build_map({
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "1", "intercept": "1/2"}, {"slope": "1", "intercept": "-1/2"}],
        })
        result = classify(tau)
        self.assertFalse(result.continuous)
        self.assertTrue(result.essentially_injective)


class MultivaluedImageTests(SimpleTestCase):
    def test_point_image_at_a_jump(self):
        tau = build_map({"type": "beta", "beta": GOLDEN})
        self.assertEqual(hat_image_point(tau, tau.breakpoints[1]), (ZERO, ONE))
        self.assertEqual(hat_image_point(tau, ZERO), (ZERO,))

    def test_set_images_and_preimages(self):
        tau = tent_map(2)
        left = IntervalSet.of([("0", "1/4")])
        self.assertEqual(hat_image_set(tau, left), IntervalSet.of([("0", "1/2")]))
        self.assertEqual(
            hat_preimage_set(tau, IntervalSet.of([("0", "1/2")])),
            IntervalSet.of([("0", "1/4"), ("3/4", "1")]),
        )

    def test_interval_sets_merge(self):
        merged = IntervalSet.of([("1/2", "1"), ("0", "1/4"), ("1/4", "1/2")])
        self.assertTrue(merged.is_full)
        self.assertEqual(IntervalSet.of([Interval(ZERO, Scalar("1/3"))]).complement(), IntervalSet.of([("1/3", "1")]))


class FlipTests(SimpleTestCase):
    def test_flip_conjugate_of_a_tent(self):
        flipped = flip_conjugate(tent_map("3/2"))
        expected = build_map({
            "type": "explicit",
            "breakpoints": ["0", "2/3", "1"],
            "branches": [{"slope": "-3/2", "intercept": "1"}, {"slope": "3/2", "intercept": "-1"}],
        })
        self.assertEqual(flipped, expected)
        self.assertFalse(flipped.branches[0].increasing)
