from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field as PydanticField

from constants.symmetry import Classification
from schemas.geometry import Direction


class ReflectionReport(BaseModel):
    direction: Direction
    lattice_index: int = PydanticField(..., ge=0)
    w_min: float = PydanticField(..., description="Minimum of w_e over B(e) across all fields")
    w_max: float = PydanticField(..., description="Maximum of w_e over B(e) across all fields")
    margin: float = PydanticField(
        ...,
        description="Minimum of w_e / ((x . e) d(x)) over B(e), d the distance to the boundary; bounded away from 0 under strict dominance",
    )
    classification: Classification
    tol: float = PydanticField(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def in_m(self) -> bool:
        return self.classification in (Classification.DOMINANT_PLUS, Classification.SYMMETRIC)


class Arc(BaseModel):
    start_index: int = PydanticField(..., ge=0)
    end_index: int = PydanticField(..., ge=0, description="Inclusive, counted counter-clockwise from start")
    length: int = PydanticField(..., ge=1, description="Number of lattice directions in the arc")
    start_angle: float
    end_angle: float

    model_config = ConfigDict(frozen=True)

    def contains(self, k: int, lattice_size: int) -> bool:
        return (k - self.start_index) % lattice_size < self.length

    def indices(self, lattice_size: int) -> List[int]:
        return [(self.start_index + offset) % lattice_size for offset in range(self.length)]


class DirectionSet(BaseModel):
    ntheta: int = PydanticField(..., ge=8)
    members: List[bool] = PydanticField(..., description="Membership per half-angle lattice direction")
    arcs: List[Arc]
    reports: List[ReflectionReport] = PydanticField(default_factory=list)
    tol: float = PydanticField(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def lattice_size(self) -> int:
        return 2 * self.ntheta

    @property
    def is_full(self) -> bool:
        return all(self.members)

    @property
    def largest_arc(self) -> Optional[Arc]:
        if not self.arcs:
            return None
        return max(self.arcs, key=lambda arc: (arc.length, -min(arc.indices(self.lattice_size))))


class FssReport(BaseModel):
    axis: Direction
    axial_deficit: float = PydanticField(..., ge=0)
    mono_deficit: float = PydanticField(..., ge=0)
    tol: float = PydanticField(..., ge=0)
    verdict: bool
    enumeration_fixed_point: bool = PydanticField(..., description="Rings already nonincreasing along the symmetrisation order")

    model_config = ConfigDict(frozen=True)


class EvenProfileVerdict(BaseModel):
    hypothesis_holds: bool
    witnesses: List[float] = PydanticField(default_factory=list, description="Lattice angles eta where one-sided reflection dominance holds")
    reflection_points: List[float]
    holds: bool

    model_config = ConfigDict(frozen=True)


class AxisResult(BaseModel):
    condition_holds: bool = PydanticField(..., description="Every lattice direction or its antipode lies in M")
    radial: bool = False
    axis: Optional[Direction] = None
    certified: bool = False
    fss_reports: List[FssReport] = PydanticField(default_factory=list)
    missing_pairs: List[int] = PydanticField(default_factory=list, description="Lattice indices k with neither e_k nor -e_k in M")

    model_config = ConfigDict(frozen=True)


class SweepResult(BaseModel):
    start: Direction
    theta_1: float = PydanticField(..., description="Largest counter-clockwise rotation keeping membership")
    theta_2: float = PydanticField(..., description="Largest clockwise rotation keeping membership (negative)")
    boundary_plus: Optional[ReflectionReport] = None
    boundary_minus: Optional[ReflectionReport] = None
    boundary_symmetric: bool
    full_symmetry: bool
    arc_start: float
    arc_end: float

    model_config = ConfigDict(frozen=True)

    @property
    def span(self) -> float:
        return self.theta_1 - self.theta_2


class HalfCircleCertificate(BaseModel):
    arc: Optional[Arc] = None
    symmetric_indices: List[int] = PydanticField(default_factory=list)
    applicable: bool = PydanticField(..., description="An arc of M holds two distinct symmetric directions")
    contains_half_circle: bool

    model_config = ConfigDict(frozen=True)
