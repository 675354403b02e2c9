"""Transitivity, mixing and the cyclic decomposition into exact pieces."""
from django.test import SimpleTestCase

from dynamics.decomposition import (
    exact_decomposition,
    exactness_check,
    mixing_check,
    seed_points,
    transitivity_check,
    verify_decomposition,
)
from dynamics.exceptions import NotTransitiveError, UnsupportedMapError
from dynamics.maps import IntervalSet, build_map, hat_image_set, tent_map
from dynamics.scalars import ONE, ZERO, Scalar

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}
GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}


class TransitivityTests(SimpleTestCase):
    def test_tent2_is_transitive(self):
        verdict = transitivity_check(tent_map(2))
        self.assertEqual(verdict.status, "transitive")
        self.assertEqual(verdict.certificate, "seed_cover")

    def test_restricted_tent_leaves_a_set_invariant(self):
        tau = tent_map("6/5")
        verdict = transitivity_check(tau)
        self.assertEqual(verdict.status, "not_transitive")
        witness = verdict.witness
        self.assertFalse(witness.is_full)
        self.assertTrue(hat_image_set(tau, witness).issubset(witness))
        self.assertIn("witness", verdict.to_dict())

    def test_bound_must_be_positive(self):
        with self.assertRaises(ValueError):
            transitivity_check(tent_map(2), bound=0)

    def test_seed_points_follow_breakpoint_images(self):
        r2 = Scalar.from_literal(SQRT2)
        points = seed_points(build_map({"type": "tent", "s": SQRT2}))
        self.assertEqual(points, [ZERO, ONE - ONE / r2, 2 - r2, ONE])


class MixingTests(SimpleTestCase):
    def test_full_branch_maps_mix(self):
        self.assertEqual(mixing_check(tent_map(2)).status, "mixing")
        self.assertEqual(mixing_check(build_map({"type": "beta", "beta": GOLDEN})).status, "mixing")

    def test_period_two_tent_is_not_mixing(self):
        verdict = mixing_check(build_map({"type": "tent", "s": SQRT2}))
        self.assertEqual(verdict.status, "not_mixing")
        self.assertEqual(len(verdict.witness), 2)


class ExactDecompositionTests(SimpleTestCase):
    def test_tent2_is_one_exact_piece(self):
        decomposition = exact_decomposition(tent_map(2))
        self.assertEqual(decomposition.N, 1)
        self.assertTrue(decomposition.certified)
        self.assertEqual(decomposition.parts, (IntervalSet.full(),))
        self.assertEqual(exactness_check(tent_map(2)).status, "exact")

    def test_tent_sqrt2_has_two_pieces(self):
        r2 = Scalar.from_literal(SQRT2)
        tau = build_map({"type": "tent", "s": SQRT2})
        decomposition = exact_decomposition(tau)
        self.assertEqual(decomposition.N, 2)
        self.assertEqual(decomposition.route, "markov")
        self.assertTrue(decomposition.certified)
        self.assertEqual(
            decomposition.parts,
            (IntervalSet.of([(ZERO, 2 - r2)]), IntervalSet.of([(2 - r2, ONE)])),
        )
        self.assertEqual(decomposition.cycle, (1, 0))
        self.assertEqual(len(decomposition.clopen_parts()), 2)

        verdict = exactness_check(tau, decomposition=decomposition)
        self.assertEqual((verdict.status, verdict.N), ("not_exact", 2))

    def test_not_transitive_maps_have_no_decomposition(self):
        with self.assertRaises(NotTransitiveError):
            exact_decomposition(tent_map("6/5"))

    def test_essentially_injective_maps_are_rejected(self):
        rotation = build_map({
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "1", "intercept": "1/2"}, {"slope": "1", "intercept": "-1/2"}],
        })
        with self.assertRaises(UnsupportedMapError):
            exact_decomposition(rotation)


class VerifyDecompositionTests(SimpleTestCase):
    def test_halves_are_not_cyclic_for_tent2(self):
        checks = verify_decomposition(
            tent_map(2), [IntervalSet.of([("0", "1/2")]), IntervalSet.of([("1/2", "1")])]
        )
        self.assertEqual(checks, {"cover": True, "disjoint": True, "cyclic": False, "exact": False})

    def test_overlapping_parts(self):
        checks = verify_decomposition(
            tent_map(2), [IntervalSet.of([("0", "3/4")]), IntervalSet.of([("1/2", "1")])]
        )
        self.assertFalse(checks["disjoint"])
