import logging

import numpy as np
from scipy.optimize import bisect
from scipy.special import jv

from constants.geometry import DomainKind
from constants.solver import BESSEL_ROOT_TOL, BESSEL_SCAN_STEP
from schemas.geometry import RadialDomain, PolarGrid, Field
from schemas.solver import Eigenpair

logger = logging.getLogger(__name__)


class EigenService:
    """Dirichlet eigenpairs of the disk from zeros of Bessel functions J_m."""

    @staticmethod
    def bessel_zero(m: int, k: int) -> float:
        if m < 0 or k < 1:
            raise ValueError(f"Invalid Bessel zero request m={m}, k={k}")

        def j_m(x: float) -> float:
            return float(jv(m, x))

        found = 0
        # J_m has no positive zero below m, start the sign scan just above the origin
        left = max(float(m), BESSEL_SCAN_STEP)
        f_left = j_m(left)
        while True:
            right = left + BESSEL_SCAN_STEP
            f_right = j_m(right)
            if f_left == 0.0:
                found += 1
                if found == k:
                    return left
            elif f_left * f_right < 0:
                found += 1
                if found == k:
                    return bisect(j_m, left, right, xtol=BESSEL_ROOT_TOL, maxiter=200)
            left, f_left = right, f_right

    def eigenpair_oracle(self, domain: RadialDomain, grid: PolarGrid, m: int, k: int) -> Eigenpair:
        if domain.kind != DomainKind.DISK:
            logger.error("Eigenpair oracle requested for a %s domain", domain.kind.value)
            raise ValueError("The eigenpair oracle only supports disk domains")
        if grid.domain != domain:
            raise ValueError("Grid does not discretise the requested domain")

        zero = self.bessel_zero(m, k)
        eigenvalue = (zero / domain.r_outer) ** 2

        r, phi = grid.mesh()
        values = jv(m, zero * r / domain.r_outer) * np.cos(m * phi)
        logger.info("Eigenpair (m=%d, k=%d): j=%.10f lambda=%.10f", m, k, zero, eigenvalue)

        return Eigenpair(
            eigenvalue=eigenvalue,
            bessel_zero=zero,
            m=m,
            k=k,
            field=Field(grid=grid, values=values, t=0.0),
        )

    def second_eigenvalue(self, domain: RadialDomain) -> float:
        if domain.kind != DomainKind.DISK:
            raise ValueError("The closed-form second eigenvalue only exists for disk domains")
        return (self.bessel_zero(1, 1) / domain.r_outer) ** 2


def get_eigen_service() -> EigenService:
    return EigenService()
