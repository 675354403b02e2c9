from fractions import Fraction

from django.test import SimpleTestCase, TestCase, override_settings

from dynamics.exceptions import MapSpecError, UnsupportedMapError
from dynamics.maps import build_map, tent_map
from map_library.models import IntervalMap

from .models import AnalysisRun
from .oracles import cylinders, ga_search, pf_solve, zero_one_matrices
from .services import build_report, create_analysis_run, get_option, record_report, render_text

GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}


class OptionTests(SimpleTestCase):
    @override_settings(DYNAMICS={"ORBIT_BOUND": 32, "TOLERANCE": "1/1000"})
    def test_settings_supply_defaults(self):
        self.assertEqual(get_option("ORBIT_BOUND"), 32)
        self.assertEqual(get_option("TOLERANCE"), Fraction(1, 1000))
        self.assertEqual(get_option("ORBIT_BOUND", 8), 8)
        self.assertEqual(get_option("MAXITER"), 500)

    def test_invalid_values_name_the_option(self):
        with self.assertRaises(MapSpecError) as ctx:
            get_option("ORBIT_BOUND", 0)
        self.assertEqual(ctx.exception.field, "orbit_bound")
        with self.assertRaises(MapSpecError):
            get_option("TOLERANCE", "abc")


class ReportTests(SimpleTestCase):
    def test_unknown_command(self):
        with self.assertRaises(ValueError):
            build_report("simulate", {"type": "tent", "s": "2"})

    def test_compare_needs_second_map(self):
        with self.assertRaises(MapSpecError) as ctx:
            build_report("compare", {"type": "tent", "s": "2"})
        self.assertEqual(ctx.exception.field, "map2")

    def test_unsupported_command_raises(self):
        with self.assertRaises(UnsupportedMapError):
            build_report("pf", {"type": "tent", "s": "6/5"})

    def test_text_rendering(self):
        text = render_text({"s": GOLDEN, "entropy": {"lower": "0.48", "upper": "0.49"}, "laps": [2, 4]})
        self.assertIn("entropy: ≈[0.48, 0.49]", text)
        self.assertIn("laps: [2, 4]", text)
        self.assertIn("s: ≈1.618034", text)


class OracleTests(SimpleTestCase):
    def test_only_irreducible_matrices(self):
        matrices = [A.tolist() for A in zero_one_matrices(2)]
        self.assertIn([[1, 1], [1, 1]], matrices)
        self.assertIn([[0, 1], [1, 0]], matrices)
        self.assertNotIn([[1, 1], [0, 1]], matrices)

    def test_ga_search_agrees_with_the_size_rule(self):
        report = ga_search(max_q=2)
        self.assertTrue(report["agrees"])
        self.assertGreater(report["equal_pairs"], 0)
        with self.assertRaises(ValueError):
            ga_search(max_q=4)

    def test_ga_search_orders_like_the_witnesses(self):
        report = ga_search(max_q=2)
        self.assertEqual(report["sign_mismatches"], [])
        self.assertGreater(report["signs"]["positive"], 0)
        self.assertGreater(report["signs"]["negative"], 0)
        self.assertGreater(report["signs"]["zero"], 0)

    def test_ga_search_three_by_three(self):
        report = ga_search(max_q=3, max_entries=6)
        self.assertTrue(report["agrees"])
        self.assertEqual(report["mismatches"], [])
        self.assertEqual(report["sign_mismatches"], [])
        ordered = sum(3**q * len(list(zero_one_matrices(q, 6))) for q in (1, 2, 3))
        self.assertEqual(sum(report["signs"].values()), ordered)

    def test_pf_solve_golden(self):
        report = pf_solve(build_map({"type": "beta", "beta": GOLDEN}))
        self.assertTrue(report["incidence_agrees"])
        self.assertTrue(report["agrees"])

    def test_pf_solve_needs_markov(self):
        with self.assertRaises(UnsupportedMapError):
            pf_solve(build_map({"type": "beta", "beta": "3/2"}), 32)

    def test_cylinders(self):
        report = cylinders(tent_map(2), 5)
        self.assertEqual(report["counts"], [2, 4, 8, 16, 32])
        self.assertEqual(report["entropy"]["growth"]["upper"], "2")


class AnalysisRunTests(TestCase):
    def test_create_run_for_stored_map(self):
        interval_map = IntervalMap.objects.create(name="tent2", map_type="tent", spec={"type": "tent", "s": "2"})
        run = create_analysis_run(interval_map, "markov", bound=64)
        self.assertEqual(run.command, "markov")
        self.assertEqual(run.options["bound"], 64)
        self.assertEqual(run.report["markov"]["incidence"], [[1, 1], [1, 1]])
        self.assertEqual(str(run), "markov of tent2")

    def test_failed_run_is_not_stored(self):
        interval_map = IntervalMap.objects.create(name="tent_6_5", map_type="tent", spec={"type": "tent", "s": "6/5"})
        with self.assertRaises(RuntimeError):
            create_analysis_run(interval_map, "pf")
        self.assertFalse(AnalysisRun.objects.exists())

    def test_record_report_reuses_map_by_name(self):
        spec = {"name": "tent2", "type": "tent", "s": "2"}
        first = record_report(spec, build_report("entropy", spec))
        second = record_report(spec, build_report("markov", spec))
        self.assertEqual(first.interval_map, second.interval_map)
        self.assertEqual(IntervalMap.objects.count(), 1)
        self.assertEqual(first.interval_map.map_type, "tent")
