from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Transitivity, exactness decomposition and mixing checks"
    command_name = "decompose"
