"""Default bounds shared by the analysis modules.

These mirror ``settings.DYNAMICS`` so that the library can be used without
a configured Django project.
"""
from fractions import Fraction

ORBIT_BOUND = 256
EQUIVALENCE_BOUND = 256
TOLERANCE = Fraction(1, 10**6)
MAXITER = 500
CYLINDER_DEPTH = 12
POSITIVITY_ITERATIONS = 50
TRANSITIVITY_BOUND = 1024
INTERVAL_SET_CAP = 4096
SEED_LEVEL = 4
MAX_PERIOD = 16
PF_CUT_CAP = 2048
LAURENT_DEGREE = 12
# Finest root bracket, in bits, tried when deciding the sign of an algebraic scalar.
# Values still straddling zero there raise PrecisionLimitError. Not a DYNAMICS setting.
SIGN_MAX_BITS = 4096
