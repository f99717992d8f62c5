import math
from typing import Dict, List, Optional

from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator, model_validator

from constants.geometry import DomainKind
from constants.solver import SchemeKind, NonlinearityPreset, InitialPreset, RadialProfile
from schemas.geometry import RadialDomain, Direction
from schemas.solver import NonlinearitySpec, Scheme
from schemas.symmetry import Arc, FssReport


class DomainConfig(BaseModel):
    kind: DomainKind = PydanticField(DomainKind.DISK, description="disk or annulus")
    r_inner: float = PydanticField(0.0, ge=0)
    r_outer: float = PydanticField(1.0, gt=0)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_radii(self) -> Self:
        self.to_domain()
        return self

    def to_domain(self) -> RadialDomain:
        return RadialDomain(kind=self.kind, r_inner=self.r_inner, r_outer=self.r_outer)


class GridConfig(BaseModel):
    nr: int = PydanticField(..., ge=2)
    ntheta: int = PydanticField(..., ge=8)

    model_config = ConfigDict(extra="forbid")

    @field_validator("ntheta")
    @classmethod
    def validate_ntheta(cls, v: int) -> int:
        if v % 2 != 0:
            raise ValueError(f"ntheta must be even, got {v}")
        return v


class SchemeConfig(BaseModel):
    kind: SchemeKind = PydanticField(SchemeKind.IMEX_FOURIER)
    dt: float = PydanticField(..., gt=0, description="Time step")
    reaction_order: int = PydanticField(2, ge=1, le=2)
    linear_tol: Optional[float] = PydanticField(None, gt=0)
    max_linear_iterations: Optional[int] = PydanticField(None, gt=0)

    model_config = ConfigDict(extra="forbid")

    def to_scheme(self) -> Scheme:
        return Scheme(**self.model_dump())


class NonlinearityConfig(BaseModel):
    """`nonlinearity.id` names the preset; every other key in the section is a real parameter."""

    id: NonlinearityPreset
    params: Dict[str, float] = PydanticField(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def collect_params(cls, data):
        if not isinstance(data, dict) or "params" in data:
            return data
        data = dict(data)
        preset = data.pop("id", None)
        return {"id": preset, "params": data}

    def to_spec(self) -> NonlinearitySpec:
        return NonlinearitySpec(id=self.id, params=self.params)


class ModeTerm(BaseModel):
    m: int = PydanticField(..., ge=0)
    k: int = PydanticField(..., ge=1)
    amplitude: float = 1.0
    angle: float = 0.0


class InitialConditionConfig(BaseModel):
    preset: InitialPreset
    m: int = PydanticField(1, ge=0)
    k: int = PydanticField(1, ge=1)
    amplitude: float = 1.0
    angle: float = 0.0
    center: float = PydanticField(0.0, description="Bump centre angle")
    width: float = PydanticField(0.25, gt=0)
    radius: float = PydanticField(0.5, ge=0, description="Bump centre radius")
    profile: RadialProfile = RadialProfile.BESSEL
    terms: List[ModeTerm] = PydanticField(default_factory=list)
    radial_bump: float = PydanticField(0.0, description="Amplitude of an added positive radial bump")

    model_config = ConfigDict(extra="forbid")

    @field_validator("terms", mode="before")
    @classmethod
    def parse_terms(cls, v):
        """Accepts 'm:k:amplitude[:angle], ...' as written in scenario files."""
        if not isinstance(v, str):
            return v
        terms = []
        for chunk in filter(None, (part.strip() for part in v.split(","))):
            parts = chunk.split(":")
            if len(parts) not in (3, 4):
                raise ValueError(f"Mode term '{chunk}' must read m:k:amplitude[:angle]")
            term = {"m": int(parts[0]), "k": int(parts[1]), "amplitude": float(parts[2])}
            if len(parts) == 4:
                term["angle"] = float(parts[3])
            terms.append(term)
        return terms

    @model_validator(mode="after")
    def validate_modes(self) -> Self:
        if self.preset == InitialPreset.MODES and not self.terms:
            raise ValueError("The modes preset needs at least one term")
        return self


class TimeConfig(BaseModel):
    t_end: float = PydanticField(..., gt=0)
    snapshot_every: float = PydanticField(..., gt=0)

    model_config = ConfigDict(extra="forbid")


class AnalysisConfig(BaseModel):
    tol: Optional[float] = PydanticField(None, ge=0, description="Scenario tolerance, defaults to SCENARIO_TOL")
    window_fraction: Optional[float] = PydanticField(None, gt=0, le=1)
    e_start: float = PydanticField(0.0, description="Sweep start angle in radians")
    poincare_period: Optional[float] = PydanticField(None, gt=0)

    model_config = ConfigDict(extra="forbid")


class OutputConfig(BaseModel):
    directory: str = "runs/scenario"
    snapshots: bool = True
    heatmaps: bool = True
    omega: bool = True

    model_config = ConfigDict(extra="forbid")


class ScenarioConfig(BaseModel):
    domain: DomainConfig = PydanticField(default_factory=DomainConfig)
    grid: GridConfig
    scheme: SchemeConfig
    nonlinearity: NonlinearityConfig
    initial: InitialConditionConfig
    time: TimeConfig
    analysis: AnalysisConfig = PydanticField(default_factory=AnalysisConfig)
    output: OutputConfig = PydanticField(default_factory=OutputConfig)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_e_start(self) -> Self:
        if Direction(angle=self.analysis.e_start).lattice_index(self.grid.ntheta) is None:
            step = 180.0 / self.grid.ntheta
            raise ValueError(
                f"analysis.e_start must be a multiple of pi/ntheta ({step:.6g} deg), got {math.degrees(self.analysis.e_start):.6g} deg"
            )
        return self


class OmegaSummary(BaseModel):
    window: List[float]
    snapshot_count: int
    representative_count: int
    diameter: float


class SweepSummary(BaseModel):
    theta_1: float
    theta_2: float
    boundary_symmetric: bool
    full_symmetry: bool


class RunSummary(BaseModel):
    e_start_deg: float
    u1_holds: Optional[bool] = PydanticField(None, description="(U1) at t=0 for e_start, None when no t=0 field was analysed")
    max_sup_norm: float
    steps: int = 0
    snapshot_count: int
    omega: OmegaSummary
    m_member_count: int
    m_arcs: List[Arc]
    condition_holds: bool
    radial: bool
    axis_deg: Optional[float] = None
    certified: bool
    fss_reports: List[FssReport]
    sweep: Optional[SweepSummary] = None
    sweep_error: Optional[str] = None
    half_circle: Optional[bool] = PydanticField(None, description="Half-circle claim, None when no arc holds two symmetric directions")
    artifacts: List[str] = PydanticField(default_factory=list)
    wall_clock_seconds: Optional[float] = PydanticField(None, exclude=True)

    @property
    def all_fss(self) -> bool:
        return self.radial or (self.certified and bool(self.fss_reports))
