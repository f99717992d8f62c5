import logging
import math
from typing import Optional

import numpy as np

from constants.geometry import ON_PLANE_TOL
from schemas.geometry import RadialDomain, PolarGrid, Direction, Field

logger = logging.getLogger(__name__)


class GeometryService:
    """Polar grids on radial planar domains, reflections across H(e) and grid rotations."""

    @staticmethod
    def build_grid(domain: RadialDomain, nr: int, ntheta: int) -> PolarGrid:
        try:
            grid = PolarGrid(domain=domain, nr=nr, ntheta=ntheta)
            if nr < 4:
                logger.warning("Radial resolution nr=%d is below the recommended minimum of 4", nr)

            logger.debug("Built %s grid nr=%d ntheta=%d dr=%.4g", domain.kind.value, nr, ntheta, grid.dr)
            return grid
        except ValueError as e:
            logger.error("Invalid grid request (nr=%s, ntheta=%s): %s", nr, ntheta, e)
            raise

    @staticmethod
    def direction_from_index(ntheta: int, k: int) -> Direction:
        return Direction(angle=math.pi * (k % (2 * ntheta)) / ntheta)

    @staticmethod
    def reflection_permutation(ntheta: int, k: int) -> np.ndarray:
        """Angular index map of sigma_e for the lattice direction e_k: j -> (k + ntheta/2 - j) mod ntheta."""
        return (k + ntheta // 2 - np.arange(ntheta)) % ntheta

    @staticmethod
    def axis_permutation(ntheta: int, k: int) -> np.ndarray:
        """Angular index map of the reflection across the line R e_k: j -> (k - j) mod ntheta."""
        return (k - np.arange(ntheta)) % ntheta

    def reflect_field(self, field: Field, e: Direction) -> Field:
        grid = field.grid
        k = e.lattice_index(grid.ntheta)
        if k is not None:
            return field.with_values(field.values[:, self.reflection_permutation(grid.ntheta, k)])

        # Off-lattice: periodic linear interpolation in phi, radius untouched.
        target = (2.0 * e.angle + math.pi - grid.phi) / grid.dphi
        lower = np.floor(target)
        weight = target - lower
        j0 = lower.astype(int) % grid.ntheta
        j1 = (j0 + 1) % grid.ntheta
        values = (1.0 - weight) * field.values[:, j0] + weight * field.values[:, j1]
        return field.with_values(values)

    @staticmethod
    def projection(grid: PolarGrid, e: Direction) -> np.ndarray:
        """x . e at every cell centre."""
        r, phi = grid.mesh()
        ex, ey = e.vector
        return r * np.cos(phi) * ex + r * np.sin(phi) * ey

    @staticmethod
    def boundary_distance(grid: PolarGrid) -> np.ndarray:
        r, _ = grid.mesh()
        distance = grid.domain.r_outer - r
        if grid.domain.r_inner > 0:
            distance = np.minimum(distance, r - grid.domain.r_inner)
        return distance

    def half_domain_mask(self, grid: PolarGrid, e: Direction) -> np.ndarray:
        return self.projection(grid, e) > ON_PLANE_TOL * grid.domain.r_outer

    def on_plane_mask(self, grid: PolarGrid, e: Direction) -> np.ndarray:
        return np.abs(self.projection(grid, e)) <= ON_PLANE_TOL * grid.domain.r_outer

    @staticmethod
    def rotate_field(field: Field, steps: int) -> Field:
        return field.with_values(np.roll(field.values, steps, axis=1))

    @staticmethod
    def sup_distance(a: Field, b: Field) -> float:
        if a.grid != b.grid:
            raise ValueError("Fields live on different grids")
        return float(np.max(np.abs(a.values - b.values)))

    @staticmethod
    def cartesian_sample(grid: PolarGrid, x: float, y: float) -> Optional[tuple[int, int]]:
        """Nearest cell for the Cartesian point (x, y), or None outside the domain."""
        radius = math.hypot(x, y)
        if radius > grid.domain.r_outer or radius < grid.domain.r_inner:
            return None
        i = min(int((radius - grid.domain.r_inner) / grid.dr), grid.nr - 1)
        angle = math.atan2(y, x) % (2.0 * math.pi)
        j = int(math.floor(angle / grid.dphi + 0.5)) % grid.ntheta
        return i, j


def get_geometry_service() -> GeometryService:
    return GeometryService()
