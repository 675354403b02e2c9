from analysis.command_base import MapReportCommand


class Command(MapReportCommand):
    help = "Perron-Frobenius eigenfunctions of each exact piece and their cyclic permutation"
    command_name = "pf"
