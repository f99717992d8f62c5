from typing import Dict, List, Optional

from typing_extensions import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator

from constants.solver import SchemeKind, NonlinearityPreset
from schemas.geometry import Field


class NonlinearitySpec(BaseModel):
    id: NonlinearityPreset = PydanticField(..., description="Preset name")
    params: Dict[str, float] = PydanticField(default_factory=dict, description="Named real parameters")

    model_config = ConfigDict(frozen=True)


class Scheme(BaseModel):
    kind: SchemeKind = PydanticField(SchemeKind.IMEX_FOURIER, description="Time integration scheme")
    dt: float = PydanticField(..., gt=0, description="Time step")
    reaction_order: int = PydanticField(2, ge=1, le=2, description="1 = IMEX Euler, 2 = IMEX midpoint")
    linear_tol: Optional[float] = PydanticField(None, gt=0, description="Relative residual tolerance for iterative solves")
    max_linear_iterations: Optional[int] = PydanticField(None, gt=0, description="Iteration cap for iterative solves")

    model_config = ConfigDict(frozen=True)


class Trajectory(BaseModel):
    snapshots: List[Field] = PydanticField(..., description="Snapshots at strictly increasing times")
    sup_times: np.ndarray = PydanticField(..., description="Times of the per-step sup-norm history")
    sup_norms: np.ndarray = PydanticField(..., description="Sup-norm after every step")
    steps: int = PydanticField(..., ge=0, description="Number of time steps taken")
    metadata: Dict[str, str] = PydanticField(default_factory=dict)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode='after')
    def validate_snapshots(self) -> Self:
        if not self.snapshots:
            raise ValueError("A trajectory needs at least one snapshot")
        grid = self.snapshots[0].grid
        for previous, current in zip(self.snapshots, self.snapshots[1:]):
            if current.t <= previous.t:
                raise ValueError(f"Snapshot times must increase strictly ({previous.t} -> {current.t})")
            if current.grid != grid:
                raise ValueError("All snapshots of a trajectory must share one grid")
        return self

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def t_end(self) -> float:
        return self.snapshots[-1].t

    @property
    def max_sup_norm(self) -> float:
        history = [snapshot.sup_norm for snapshot in self.snapshots]
        if self.sup_norms.size:
            history.append(float(np.max(self.sup_norms)))
        return max(history)


class EquilibriumResult(BaseModel):
    field: Field
    residual: float = PydanticField(..., ge=0, description="Sup-norm of Laplacian(u) + f(|x|, u)")
    converged: bool
    steps: int = PydanticField(..., ge=0)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Eigenpair(BaseModel):
    eigenvalue: float = PydanticField(..., gt=0)
    bessel_zero: float = PydanticField(..., gt=0, description="k-th positive zero of J_m")
    m: int = PydanticField(..., ge=0)
    k: int = PydanticField(..., ge=1)
    field: Field

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
