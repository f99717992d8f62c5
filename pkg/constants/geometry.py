from enum import Enum


class DomainKind(str, Enum):
    DISK = "disk"
    ANNULUS = "annulus"

# |x·e| below this fraction of r_outer counts as lying on H(e)
ON_PLANE_TOL = 1e-12
