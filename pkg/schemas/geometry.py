import math
from typing import Optional

from typing_extensions import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator, model_validator

from constants.geometry import DomainKind

LATTICE_SNAP_TOL = 1e-9


class RadialDomain(BaseModel):
    kind: DomainKind = PydanticField(..., description="Disk or annulus")
    r_inner: float = PydanticField(0.0, ge=0, description="Inner radius, 0 for the disk")
    r_outer: float = PydanticField(..., gt=0, description="Outer radius")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def validate_radii(self) -> Self:
        if self.r_inner >= self.r_outer:
            raise ValueError(f"r_inner ({self.r_inner}) must be smaller than r_outer ({self.r_outer})")
        if self.kind == DomainKind.DISK and self.r_inner != 0:
            raise ValueError("A disk must have r_inner = 0")
        if self.kind == DomainKind.ANNULUS and self.r_inner == 0:
            raise ValueError("An annulus must have r_inner > 0")
        return self

    @classmethod
    def disk(cls, r_outer: float = 1.0) -> "RadialDomain":
        return cls(kind=DomainKind.DISK, r_inner=0.0, r_outer=r_outer)

    @classmethod
    def annulus(cls, r_inner: float, r_outer: float) -> "RadialDomain":
        return cls(kind=DomainKind.ANNULUS, r_inner=r_inner, r_outer=r_outer)


class PolarGrid(BaseModel):
    """Cell-centred (r, phi) grid; r_i = r_inner + (i + 1/2) dr, phi_j = 2 pi j / ntheta."""

    domain: RadialDomain
    nr: int = PydanticField(..., ge=2, description="Number of radial cells")
    ntheta: int = PydanticField(..., ge=8, description="Number of angular cells (even)")

    model_config = ConfigDict(frozen=True)

    @field_validator("ntheta")
    @classmethod
    def validate_ntheta(cls, v: int) -> int:
        if v % 2 != 0:
            raise ValueError(f"ntheta must be even, got {v}")
        return v

    @property
    def shape(self) -> tuple[int, int]:
        return self.nr, self.ntheta

    @property
    def dr(self) -> float:
        return (self.domain.r_outer - self.domain.r_inner) / self.nr

    @property
    def dphi(self) -> float:
        return 2.0 * math.pi / self.ntheta

    @property
    def r(self) -> np.ndarray:
        return self.domain.r_inner + (np.arange(self.nr) + 0.5) * self.dr

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.ntheta) / self.ntheta

    @property
    def lattice_size(self) -> int:
        return 2 * self.ntheta

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r, self.phi, indexing="ij")


class Direction(BaseModel):
    angle: float = PydanticField(..., description="Angle alpha in radians, normalised to [0, 2 pi)")

    model_config = ConfigDict(frozen=True)

    @field_validator("angle")
    @classmethod
    def normalize_angle(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("Direction angle must be finite")
        v = math.fmod(v, 2.0 * math.pi)
        if v < 0:
            v += 2.0 * math.pi
        if v >= 2.0 * math.pi:
            v = 0.0
        return v

    @property
    def vector(self) -> tuple[float, float]:
        return math.cos(self.angle), math.sin(self.angle)

    @property
    def degrees(self) -> float:
        return math.degrees(self.angle)

    def lattice_index(self, ntheta: int) -> Optional[int]:
        """Index k with angle = pi k / ntheta, or None when off the half-angle lattice."""
        position = self.angle * ntheta / math.pi
        k = round(position)
        if abs(position - k) > LATTICE_SNAP_TOL:
            return None
        return k % (2 * ntheta)

    def opposite(self) -> "Direction":
        return Direction(angle=self.angle + math.pi)


class Field(BaseModel):
    grid: PolarGrid
    values: np.ndarray
    t: float = PydanticField(0.0, ge=0, description="Time tag")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v) -> np.ndarray:
        array = np.array(v, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode='after')
    def validate_shape(self) -> Self:
        if self.values.shape != self.grid.shape:
            raise ValueError(f"Field values have shape {self.values.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Field values must be finite")
        return self

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray, t: Optional[float] = None) -> "Field":
        return Field(grid=self.grid, values=values, t=self.t if t is None else t)
