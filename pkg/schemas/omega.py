from typing import List

from typing_extensions import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator

from schemas.geometry import Field


class OmegaEstimate(BaseModel):
    """Finite tol-net of late snapshots standing in for the omega limit set."""

    window: List[float] = PydanticField(..., min_length=2, max_length=2, description="[t_lo, t_hi]")
    snapshots: List[Field]
    distances: np.ndarray = PydanticField(..., description="Pairwise sup-distances between window snapshots")
    diameter: float = PydanticField(..., ge=0)
    representatives: List[Field]
    representative_indices: List[int] = PydanticField(..., description="Positions of the representatives in snapshots")
    tol: float = PydanticField(..., ge=0)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode='after')
    def validate_estimate(self) -> Self:
        if self.snapshots and not self.representatives:
            raise ValueError("A non-empty window needs at least one representative")
        if self.distances.shape != (len(self.snapshots), len(self.snapshots)):
            raise ValueError("Distance matrix does not match the snapshot count")
        return self

    @property
    def grid(self):
        return self.snapshots[0].grid
