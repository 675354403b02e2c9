"""Shared flags, error mapping and output for the analysis management commands."""
from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from dynamics.exceptions import MapSpecError, UnsupportedMapError

from .services import build_report, load_map_spec, record_report, render_text

logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_UNSUPPORTED = 3


class AnalysisCommand(BaseCommand):
    """Base for commands that read map files and print a deterministic report."""

    requires_map = True

    def add_arguments(self, parser):
        parser.add_argument("--map", required=self.requires_map, help="JSON map specification")
        parser.add_argument("--bound", type=int, help="Orbit and equivalence bound")
        parser.add_argument("--tol", help="Tolerance as an exact rational, e.g. 1/1000000")
        parser.add_argument("--maxiter", type=int, help="Iteration cap for power and PF iteration")
        parser.add_argument("--depth", type=int, help="Cylinder depth for lap counting")
        parser.add_argument("--format", choices=("json", "text"), default="json")
        parser.add_argument("--timing", action="store_true", help="Wrap the report with the elapsed time")

    def overrides(self, options: dict) -> dict:
        keys = ("bound", "tol", "maxiter", "depth")
        out = {key: options[key] for key in keys if options.get(key) is not None}
        for flag, key in (("generic_s", "generic"), ("allow_decreasing", "allow_decreasing"), ("pf", "pf")):
            if options.get(flag):
                out[key] = True
        return out

    @contextmanager
    def exit_codes(self):
        """Map specification errors to exit 2 and inapplicable analyses to exit 3."""
        try:
            yield
        except MapSpecError as e:
            raise CommandError(f"Invalid map specification: {e}", returncode=EXIT_INVALID)
        except UnsupportedMapError as e:
            raise CommandError(f"Unsupported map: {e}", returncode=EXIT_UNSUPPORTED)
        except ValueError as e:
            raise CommandError(str(e), returncode=EXIT_INVALID)

    def emit(self, report: Any, options: dict, started: float) -> None:
        payload = report
        if options.get("timing"):
            payload = {"report": report, "timing": {"seconds": round(time.perf_counter() - started, 6)}}
        if options.get("format") == "text":
            self.stdout.write(render_text(payload))
        else:
            self.stdout.write(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False))


class MapReportCommand(AnalysisCommand):
    """A command backed by one entry of ``analysis.services.COMMANDS``."""

    command_name = ""

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--generic-s", action="store_true", help="Treat the scaling factor as transcendental")
        parser.add_argument("--record", action="store_true", help="Store the report as an analysis run")

    def handle(self, *args, **options):
        started = time.perf_counter()
        with self.exit_codes():
            spec = load_map_spec(options["map"])
            spec2 = load_map_spec(options["map2"]) if options.get("map2") else None
            report = build_report(self.command_name, spec, spec2, **self.overrides(options))
        if options.get("record"):
            run = record_report(spec, report)
            logger.info("Stored analysis run %s", run.pk)
        self.emit(report, options, started)
