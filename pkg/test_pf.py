"""Perron-Frobenius iteration, exact eigenfunctions and their cycle."""
import dataclasses
from fractions import Fraction

from django.test import SimpleTestCase

from dynamics.maps import build_map, tent_map
from dynamics.markov import detect_markov, scaling_measure
from dynamics.pf import (
    coarsen,
    pf_eigenfunctions,
    pf_exact_report,
    pf_fixed_point_exact,
    pf_limit,
    pf_verify_cycle,
)
from dynamics.scalars import ONE, ZERO, Scalar
from dynamics.transfer import TransferContext, pf_apply
from dynamics.xspace import MeasureWeights, StepFunction, step_integrate, step_supnorm

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}
GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}
SKEW_TENT = {
    "type": "explicit",
    "breakpoints": ["0", "1/3", "1"],
    "branches": [{"slope": "3", "intercept": "0"}, {"slope": "-3/2", "intercept": "3/2"}],
}


class PFLimitTests(SimpleTestCase):
    def test_lap_indicator_flattens_in_one_step(self):
        limit, report = pf_limit(tent_map(2), StepFunction.indicator(0, "1/2"))
        self.assertEqual(limit, StepFunction.constant("1/2"))
        self.assertTrue(report.converged)
        self.assertEqual(report.error_trace, (Fraction(1, 2), Fraction(0)))
        self.assertTrue(report.mass_preserved)
        self.assertEqual(report.coarsening_error, 0)

    def test_skew_tent_preserves_scaling_mass(self):
        # mu[0, 1/9] = 1/4 for the scaling measure of slopes 3 and -3/2
        limit, report = pf_limit(build_map(SKEW_TENT), StepFunction.indicator(0, "1/9", 9))
        self.assertEqual(limit, StepFunction.constant("9/4"))
        self.assertTrue(report.converged)
        self.assertEqual(report.error_trace, (Fraction(9, 2), Fraction(9, 4), Fraction(0)))
        self.assertTrue(report.mass_preserved)

    def test_zero_function(self):
        limit, report = pf_limit(tent_map(2), StepFunction.zero())
        self.assertTrue(limit.is_zero())
        self.assertTrue(report.exact)

    def test_support_must_sit_in_one_part(self):
        with self.assertRaises(ValueError):
            pf_limit(build_map({"type": "tent", "s": SQRT2}), StepFunction.constant(1))

    def test_negative_tolerance(self):
        with self.assertRaises(ValueError):
            pf_limit(tent_map(2), StepFunction.constant(1), tol=-1)

    def test_eigenfunctions_of_tent2(self):
        report = pf_eigenfunctions(tent_map(2))
        self.assertEqual(report.phi, (StepFunction.constant(1),))
        self.assertEqual(report.iterations, (1,))
        self.assertTrue(pf_verify_cycle(tent_map(2), report).passed)


class ExactFixedPointTests(SimpleTestCase):
    def test_golden_mean_density(self):
        phi = Scalar.from_literal(GOLDEN)
        tau = build_map({"type": "beta", "beta": GOLDEN})
        report = pf_exact_report(tau)
        # (5 + 3 sqrt5)/10 and (5 + sqrt5)/10 written in phi
        expected = StepFunction.from_pieces([
            (ZERO, ONE / phi, (1 + 3 * phi) / 5),
            (ONE / phi, ONE, (2 + phi) / 5),
        ])
        self.assertEqual(report.phi, (expected,))
        self.assertTrue(report.exact)
        self.assertEqual(step_integrate(report.phi[0], MeasureWeights.lebesgue()), ONE)
        self.assertTrue(pf_verify_cycle(tau, report, 0).passed)

    def test_tent_sqrt2_cycles_two_eigenfunctions(self):
        tau = build_map({"type": "tent", "s": SQRT2})
        report = pf_exact_report(tau)
        self.assertEqual(report.N, 2)
        verdict = pf_verify_cycle(tau, report, 0)
        self.assertTrue(verdict.passed, verdict.failures)
        self.assertEqual(verdict.checks, {"count": True, "cycle": True, "support": True, "positivity": True})

    def test_iterated_golden_density(self):
        phi = Scalar.from_literal(GOLDEN)
        tau = build_map({"type": "beta", "beta": GOLDEN})
        expected = StepFunction.from_pieces([
            (ZERO, ONE / phi, (1 + 3 * phi) / 5),
            (ONE / phi, ONE, (2 + phi) / 5),
        ])
        self.assertEqual(pf_apply(TransferContext.of(tau), expected, phi), expected)

        limit, report = pf_limit(tau, StepFunction.constant(1))
        self.assertTrue(report.converged)
        self.assertTrue(report.mass_preserved)
        self.assertEqual(limit.cuts, (ONE / phi,))
        self.assertLess(step_supnorm(limit - expected), Scalar("1/100000"))
        # errors contract by 1/phi^2
        trace = report.error_trace
        self.assertGreater(len(trace), 2)
        for before, after in zip(trace, trace[1:]):
            self.assertLess(after, Fraction(7, 10) * before)

    def test_iterated_tent_sqrt2_cycle(self):
        tau = build_map({"type": "tent", "s": SQRT2})
        report = pf_eigenfunctions(tau)
        self.assertTrue(report.converged)
        self.assertEqual(report.N, 2)
        verdict = pf_verify_cycle(tau, report, "1/1000000")
        self.assertTrue(verdict.passed, verdict.failures)

    def test_scaling_factor_must_match(self):
        tau = tent_map(2)
        with self.assertRaises(ValueError):
            pf_fixed_point_exact(detect_markov(tau), scaling_measure(tau), 3)


class CycleFailureTests(SimpleTestCase):
    def setUp(self):
        self.tau = tent_map(2)
        self.report = pf_exact_report(self.tau)

    def test_wrong_eigenfunction(self):
        bad = dataclasses.replace(self.report, phi=(StepFunction.indicator(0, "1/2"),))
        verdict = pf_verify_cycle(self.tau, bad, 0)
        self.assertFalse(verdict.passed)
        self.assertFalse(verdict.checks["cycle"])
        self.assertFalse(verdict.checks["support"])

    def test_wrong_count(self):
        bad = dataclasses.replace(self.report, phi=self.report.phi * 2)
        verdict = pf_verify_cycle(self.tau, bad)
        self.assertEqual(verdict.checks, {"count": False})


class CoarsenTests(SimpleTestCase):
    def test_merged_cells_keep_the_integral(self):
        f = StepFunction.from_pieces([
            (ZERO, Scalar("1/4"), Scalar(1)),
            (Scalar("1/4"), Scalar("1/2"), Scalar(2)),
            (Scalar("1/2"), Scalar("3/4"), Scalar(3)),
            (Scalar("3/4"), ONE, Scalar(4)),
        ])
        lebesgue = MeasureWeights.lebesgue()
        coarse, error = coarsen(f, lebesgue, 1)
        self.assertEqual(coarse, StepFunction.from_pieces([
            (ZERO, Scalar("3/4"), Scalar(2)),
            (Scalar("3/4"), ONE, Scalar(4)),
        ]))
        self.assertEqual(error, Fraction(1))
        self.assertEqual(step_integrate(coarse, lebesgue), step_integrate(f, lebesgue))

    def test_below_cap_is_untouched(self):
        f = StepFunction.indicator(0, "1/2")
        self.assertEqual(coarsen(f, MeasureWeights.lebesgue(), 4), (f, Fraction(0)))
