import json

from django.test import TestCase, override_settings
from django.urls import reverse

from .models import IntervalMap
from .services import process_interval_map

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}


class ProcessIntervalMapTests(TestCase):
    def test_tent2_properties(self):
        interval_map = IntervalMap.objects.create(name="tent2", map_type="tent", spec={"type": "tent", "s": "2"})
        process_interval_map(interval_map)
        interval_map.refresh_from_db()
        self.assertTrue(interval_map.is_processed)
        self.assertEqual(interval_map.branch_count, 2)
        self.assertTrue(interval_map.is_continuous)
        self.assertTrue(interval_map.is_markov)
        self.assertEqual(interval_map.slope_factor, "2")
        self.assertTrue(interval_map.entropy_lower.startswith("0.693147"))
        self.assertEqual(interval_map.period_n, 1)
        self.assertFalse(interval_map.has_infinitesimals)

    def test_period_two_tent(self):
        interval_map = IntervalMap.objects.create(name="tent_sqrt2", map_type="tent", spec={"type": "tent", "s": SQRT2})
        process_interval_map(interval_map)
        self.assertEqual(interval_map.period_n, 2)
        self.assertEqual(interval_map.slope_factor["minpoly"], [-2, 0, 1])

    @override_settings(DYNAMICS={"MAXITER": 40})
    def test_not_transitive_map_keeps_partial_properties(self):
        interval_map = IntervalMap.objects.create(name="tent_6_5", map_type="tent", spec={"type": "tent", "s": "6/5"})
        process_interval_map(interval_map)
        self.assertEqual(interval_map.branch_count, 2)
        self.assertIsNone(interval_map.period_n)
        self.assertIsNone(interval_map.has_infinitesimals)

    def test_invalid_spec(self):
        interval_map = IntervalMap.objects.create(name="broken", spec={"type": "tent", "s": "5"})
        with self.assertRaises(RuntimeError):
            process_interval_map(interval_map)
        self.assertFalse(IntervalMap.objects.get(pk=interval_map.pk).is_processed)

    def test_missing_spec(self):
        interval_map = IntervalMap.objects.create(name="empty")
        with self.assertRaises(RuntimeError):
            process_interval_map(interval_map)


class MapLibraryApiTests(TestCase):
    def setUp(self):
        IntervalMap.objects.create(name="tent2", map_type="tent", spec={"type": "tent", "s": "2"})
        IntervalMap.objects.create(name="beta2", map_type="beta", spec={"type": "beta", "beta": "2"})

    def test_list_and_filter(self):
        response = self.client.get(reverse("map_library:get_map_library"))
        self.assertEqual(response.status_code, 200)
        self.assertEqual([m["name"] for m in response.json()["maps"]], ["beta2", "tent2"])

        response = self.client.get(reverse("map_library:get_map_library"), {"map_type": "tent"})
        self.assertEqual([m["name"] for m in response.json()["maps"]], ["tent2"])
        self.assertEqual(response.json()["maps"][0]["entropy"], "Not computed")


class AnalyzeApiTests(TestCase):
    def post(self, payload):
        return self.client.post(
            reverse("map_library:analyze_map"), data=json.dumps(payload), content_type="application/json"
        )

    def test_entropy_report(self):
        response = self.post({"command": "entropy", "map": {"type": "tent", "s": "2"}, "options": {"depth": 4}})
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertTrue(body["success"])
        self.assertEqual(body["report"]["options"]["depth"], 4)

    def test_invalid_spec_points_at_field(self):
        spec = {
            "type": "explicit",
            "breakpoints": ["0", "1/2", "1"],
            "branches": [{"slope": "2", "intercept": "0"}, {"slope": "two", "intercept": "2"}],
        }
        response = self.post({"command": "markov", "map": spec})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.json()["field"], "branches[1].slope")

    def test_unknown_command(self):
        response = self.post({"command": "simulate", "map": {"type": "tent", "s": "2"}})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.json()["field"], "command")

    def test_missing_map(self):
        self.assertEqual(self.post({"command": "analyze"}).json()["field"], "map")

    def test_bad_json(self):
        response = self.client.post(
            reverse("map_library:analyze_map"), data="{", content_type="application/json"
        )
        self.assertEqual(response.status_code, 400)

    def test_unsupported_map(self):
        response = self.post({"command": "pf", "map": {"type": "tent", "s": "6/5"}})
        self.assertEqual(response.status_code, 422)

    def test_get_not_allowed(self):
        self.assertEqual(self.client.get(reverse("map_library:analyze_map")).status_code, 405)
