import time

from django.core.management.base import CommandError

from analysis.command_base import EXIT_INVALID, AnalysisCommand
from analysis.oracles import cylinders, ga_search, pf_solve
from analysis.services import build_named_map, get_option, load_map_spec


class Command(AnalysisCommand):
    help = "Brute-force checks: ga-search (inductive-limit equality), pf-solve (fixed point by linear solve), cylinders (lap counts)"
    requires_map = False

    def add_arguments(self, parser):
        parser.add_argument("check", choices=("ga-search", "pf-solve", "cylinders"))
        super().add_arguments(parser)
        parser.add_argument("--max-q", type=int, default=2, help="Largest matrix size for ga-search")
        parser.add_argument("--max-entries", type=int, help="Largest number of ones per matrix for ga-search")

    def handle(self, *args, **options):
        started = time.perf_counter()
        check = options["check"]
        with self.exit_codes():
            if check == "ga-search":
                report = ga_search(options["max_q"], options["max_entries"])
            else:
                if not options.get("map"):
                    raise CommandError(f"{check} needs --map", returncode=EXIT_INVALID)
                tau = build_named_map(load_map_spec(options["map"]), "map")
                if check == "pf-solve":
                    report = pf_solve(tau, get_option("ORBIT_BOUND", options.get("bound")))
                else:
                    report = cylinders(tau, get_option("CYLINDER_DEPTH", options.get("depth")))
        self.emit(report, options, started)
