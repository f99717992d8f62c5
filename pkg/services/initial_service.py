import logging
import math
from typing import List

import numpy as np
from scipy.special import jv

from constants.solver import InitialPreset, RadialProfile
from schemas.geometry import PolarGrid, Field
from schemas.scenario import InitialConditionConfig, ModeTerm
from services.eigen_service import get_eigen_service

logger = logging.getLogger(__name__)


class InitialService:
    """Initial data u0 on a polar grid, built from the scenario presets."""

    def __init__(self, grid: PolarGrid):
        self.grid = grid
        self.eigen_service = get_eigen_service()
        self.r, self.phi = grid.mesh()

    def _radial_part(self, m: int, k: int) -> np.ndarray:
        zero = self.eigen_service.bessel_zero(m, k)
        return jv(m, zero * self.r / self.grid.domain.r_outer)

    def eigenfunction(self, m: int, k: int, amplitude: float = 1.0, angle: float = 0.0) -> np.ndarray:
        return amplitude * self._radial_part(m, k) * np.cos(m * (self.phi - angle))

    def modes(self, terms: List[ModeTerm]) -> np.ndarray:
        values = np.zeros(self.grid.shape)
        for term in terms:
            values = values + self.eigenfunction(term.m, term.k, term.amplitude, term.angle)
        return values

    def radial_bump(self, amplitude: float = 1.0) -> np.ndarray:
        """Positive radial profile vanishing at the boundary (first Dirichlet mode for disks)."""
        domain = self.grid.domain
        s = (self.r - domain.r_inner) / (domain.r_outer - domain.r_inner)
        if domain.r_inner == 0:
            return amplitude * self._radial_part(0, 1)
        return amplitude * np.sin(math.pi * s)

    def radial(self, profile: RadialProfile, amplitude: float = 1.0) -> np.ndarray:
        if profile == RadialProfile.BESSEL:
            return self.radial_bump(amplitude)
        domain = self.grid.domain
        return amplitude * (domain.r_outer ** 2 - self.r ** 2) * (self.r ** 2 - domain.r_inner ** 2)

    def bump(self, center: float, width: float, radius: float, amplitude: float = 1.0) -> np.ndarray:
        """Gaussian bump centred at (radius, center) in polar coordinates, tapered to the boundary."""
        if width <= 0:
            raise ValueError("Bump width must be positive")
        x = self.r * np.cos(self.phi) - radius * math.cos(center)
        y = self.r * np.sin(self.phi) - radius * math.sin(center)
        taper = self.radial_bump(1.0)
        return amplitude * np.exp(-(x ** 2 + y ** 2) / (2.0 * width ** 2)) * np.clip(taper, 0.0, None)

    def build(self, config: InitialConditionConfig) -> Field:
        if config.preset == InitialPreset.EIGENFUNCTION:
            values = self.eigenfunction(config.m, config.k, config.amplitude, config.angle)
        elif config.preset == InitialPreset.BUMP:
            values = self.bump(config.center, config.width, config.radius, config.amplitude)
        elif config.preset == InitialPreset.RADIAL:
            values = self.radial(config.profile, config.amplitude)
        elif config.preset == InitialPreset.MODES:
            values = self.modes(config.terms)
        else:
            raise ValueError(f"Unknown initial condition preset: {config.preset}")

        if config.radial_bump:
            values = values + self.radial_bump(config.radial_bump)

        logger.info("Initial condition %s built, sup-norm %.6g", config.preset.value, float(np.max(np.abs(values))))
        return Field(grid=self.grid, values=values, t=0.0)


def get_initial_service(grid: PolarGrid) -> InitialService:
    return InitialService(grid)
