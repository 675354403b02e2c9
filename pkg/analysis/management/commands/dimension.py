from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Presentation of the dimension group with its state range and infinitesimals"
    command_name = "dimension"
