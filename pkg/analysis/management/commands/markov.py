from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Critical orbits, Markov partition, incidence matrix, Perron data and scaling measure"
    command_name = "markov"
