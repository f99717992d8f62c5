from enum import Enum


class SchemeKind(str, Enum):
    IMEX_FOURIER = "imex_fourier"
    BACKWARD_EULER = "backward_euler"


class NonlinearityPreset(str, Enum):
    HEAT = "heat"
    LINEAR = "linear"
    CUBIC = "cubic"
    EIGEN_PUMP = "eigen_pump"
    RADIAL_WEIGHTED = "radial_weighted"
    PERIODIC = "periodic"
    PERIODIC_FORCED = "periodic_forced"


class InitialPreset(str, Enum):
    EIGENFUNCTION = "eigenfunction"
    BUMP = "bump"
    RADIAL = "radial"
    MODES = "modes"


class RadialProfile(str, Enum):
    BESSEL = "bessel"
    PARABOLA = "parabola"

BESSEL_ROOT_TOL = 1e-10
BESSEL_SCAN_STEP = 0.1

# imex_fourier runs open with this many steps taken as two backward-Euler half steps each
IMEX_STARTUP_STEPS = 2
