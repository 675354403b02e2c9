from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Run the full pipeline on a map: classification, Markov data, entropy, decomposition and dimension group"
    command_name = "analyze"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--pf", action="store_true", help="Include the Perron-Frobenius eigenfunctions")
