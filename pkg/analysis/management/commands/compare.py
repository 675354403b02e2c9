from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Conjugacy invariants of two maps compared in their dimension triples"
    command_name = "compare"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--map2", required=True, help="Second JSON map specification")
        parser.add_argument("--allow-decreasing", action="store_true", help="Also compare with the flipped map")
