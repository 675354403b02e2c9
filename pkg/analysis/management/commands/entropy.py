from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Entropy brackets by Markov eigenvalue, power iteration and lap counting"
    command_name = "entropy"
