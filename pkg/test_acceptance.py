"""End-to-end runs of the analysis commands on the fixture maps."""
import io
import json
from pathlib import Path
from unittest import mock

from django.test import SimpleTestCase

from analysis.cli import run
from dynamics.exceptions import CertificateError

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


class CommandRunMixin:
    def invoke(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = run(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def report(self, *argv):
        code, out, err = self.invoke(*argv)
        self.assertEqual(code, 0, err)
        return json.loads(out)


class AnalyzeTests(CommandRunMixin, SimpleTestCase):
    def test_tent2_pipeline(self):
        report = self.report("analyze", "--map", fixture("tent2"))
        self.assertEqual(report["command"], "analyze")
        self.assertEqual(report["name"], "tent2")
        self.assertEqual(report["markov"]["incidence"], [[1, 1], [1, 1]])
        self.assertEqual(report["decomposition"]["decomposition"]["N"], 1)
        self.assertEqual(report["decomposition"]["exactness"]["status"], "exact")
        self.assertFalse(report["dimension"]["infinitesimals"])
        self.assertEqual(report["dimension"]["state_range"]["description"], "Z[1/2]")
        self.assertNotIn("pf", report)

    def test_output_is_deterministic(self):
        first = self.invoke("analyze", "--map", fixture("tent_sqrt2"), "--pf")
        second = self.invoke("analyze", "--map", fixture("tent_sqrt2"), "--pf")
        self.assertEqual(first[0], 0, first[2])
        self.assertEqual(first[1], second[1])

    def test_pf_section_on_request(self):
        report = self.report("analyze", "--map", fixture("tent_sqrt2"), "--pf")
        self.assertEqual(report["pf"]["report"]["N"], 2)
        self.assertTrue(report["pf"]["exact_cycle"]["passed"])

    def test_timing_wraps_the_report(self):
        payload = self.report("entropy", "--map", fixture("tent2"), "--timing")
        self.assertEqual(set(payload), {"report", "timing"})
        self.assertGreaterEqual(payload["timing"]["seconds"], 0)
        self.assertEqual(payload["report"]["command"], "entropy")

    def test_not_transitive_sections_are_recorded(self):
        report = self.report("analyze", "--map", fixture("tent_6_5"), "--maxiter", "40")
        self.assertEqual(report["decomposition"]["status"], "unsupported")
        self.assertEqual(report["scaling_measure"]["status"], "unsupported")

    def test_text_format_marks_approximations(self):
        code, out, err = self.invoke("markov", "--map", fixture("tent_sqrt2"), "--format", "text")
        self.assertEqual(code, 0, err)
        self.assertIn("≈", out)
        self.assertIn("period: 2", out)


class SubcommandTests(CommandRunMixin, SimpleTestCase):
    def test_entropy_methods(self):
        report = self.report("entropy", "--map", fixture("tent_sqrt2"), "--depth", "6")
        methods = {entry["method"]: entry for entry in report["entropy"]}
        self.assertEqual(set(methods), {"markov_exact", "power_iteration", "cylinder_count"})
        self.assertTrue(methods["markov_exact"]["certified"])
        self.assertEqual(len(methods["cylinder_count"]["cylinder_counts"]), 6)

    def test_markov_period(self):
        report = self.report("markov", "--map", fixture("tent_sqrt2"))
        self.assertEqual(report["markov"]["incidence"], [[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        self.assertEqual(report["markov"]["period"], 2)
        self.assertEqual(report["scaling_measure"]["route"], "uniform")

    def test_beta_dimension(self):
        report = self.report("dimension", "--map", fixture("beta_golden"))
        beta = report["dimension"]["beta"]
        self.assertEqual(beta["case"], "iii")
        self.assertEqual(beta["m"], [-1, -1, 1])
        self.assertEqual(beta["B"], [[0, 1], [1, 1]])
        self.assertEqual(report["dimension"]["state_range"]["backend"], "unit_lattice")
        self.assertFalse(report["dimension"]["infinitesimals"])

    def test_generic_scaling_factor(self):
        report = self.report("dimension", "--map", fixture("tent2"), "--generic-s")
        self.assertTrue(report["options"]["generic"])
        self.assertEqual(report["dimension"]["presentation"]["kind"], "laurent_cyclic")
        self.assertEqual(report["dimension"]["state_range"]["backend"], "generic_symbolic")

    def test_decompose_period_two(self):
        report = self.report("decompose", "--map", fixture("tent_sqrt2"))
        self.assertEqual(report["decomposition"]["N"], 2)
        self.assertEqual(report["exactness"], {"status": "not_exact", "N": 2})
        self.assertEqual(report["mixing"]["status"], "not_mixing")

    def test_pf_on_golden_beta(self):
        report = self.report("pf", "--map", fixture("beta_golden"))
        self.assertTrue(report["pf"]["report"]["converged"])
        self.assertTrue(report["pf"]["cycle"]["passed"])
        self.assertTrue(report["pf"]["exact"]["exact"])

    def test_compare_orientation(self):
        args = ("compare", "--map", fixture("unimodal_3_2"), "--map2", fixture("unimodal_3_2_flipped"))
        report = self.report(*args)
        self.assertEqual(report["conjugacy"]["verdict"], "not_conjugate")
        self.assertEqual(report["conjugacy"]["reason"], "first-interval direction")
        report = self.report(*args, "--allow-decreasing")
        self.assertEqual(report["conjugacy"]["verdict"], "conjugate_decreasing")


class OracleTests(CommandRunMixin, SimpleTestCase):
    def test_ga_search(self):
        report = self.report("oracle", "ga-search", "--max-q", "2")
        self.assertTrue(report["agrees"])
        self.assertEqual(report["mismatches"], [])

    def test_pf_solve(self):
        report = self.report("oracle", "pf-solve", "--map", fixture("beta_golden"))
        self.assertTrue(report["incidence_agrees"])
        self.assertTrue(report["agrees"])

    def test_cylinders(self):
        report = self.report("oracle", "cylinders", "--map", fixture("tent2"), "--depth", "4")
        self.assertEqual(report["counts"], [2, 4, 8, 16])

    def test_map_required_for_map_checks(self):
        code, _, err = self.invoke("oracle", "pf-solve")
        self.assertEqual(code, 2)
        self.assertIn("--map", err)


class ExitCodeTests(CommandRunMixin, SimpleTestCase):
    def test_invalid_spec_names_the_field(self):
        code, out, err = self.invoke("analyze", "--map", fixture("bad_slope"))
        self.assertEqual(code, 2)
        self.assertIn("branches[1].slope", err)
        self.assertEqual(out, "")

    def test_missing_file(self):
        code, _, err = self.invoke("entropy", "--map", str(FIXTURES / "missing.json"))
        self.assertEqual(code, 2)
        self.assertIn("not found", err)

    def test_invalid_tolerance(self):
        code, _, _ = self.invoke("pf", "--map", fixture("tent2"), "--tol", "0")
        self.assertEqual(code, 2)

    def test_unsupported_analyses(self):
        self.assertEqual(self.invoke("decompose", "--map", fixture("rotation"))[0], 3)
        self.assertEqual(self.invoke("pf", "--map", fixture("tent_6_5"))[0], 3)

    def test_usage_errors(self):
        self.assertEqual(self.invoke("simulate", "--map", fixture("tent2"))[0], 2)
        self.assertEqual(self.invoke()[0], 2)
        self.assertEqual(self.invoke("analyze")[0], 2)
        self.assertEqual(self.invoke("analyze", "--map", fixture("tent2"), "--format", "yaml")[0], 2)

    @mock.patch("analysis.services.beta_presentation", side_effect=CertificateError("Beta expansion failed verification"))
    def test_failed_self_check_is_not_a_traceback(self, _):
        code, out, err = self.invoke("dimension", "--map", fixture("beta_golden"))
        self.assertEqual(code, 3)
        self.assertEqual(out, "")
        self.assertIn("Beta expansion failed verification", err)
        self.assertNotIn("Traceback", err)

        report = self.report("analyze", "--map", fixture("beta_golden"))
        self.assertEqual(report["dimension"]["status"], "unsupported")
        self.assertEqual(report["dimension"]["reason"], "Beta expansion failed verification")
