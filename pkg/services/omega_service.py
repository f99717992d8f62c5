import logging
from typing import List, Optional

import numpy as np

from core.config import settings
from schemas.geometry import Field
from schemas.omega import OmegaEstimate
from schemas.solver import Trajectory
from services.geometry_service import get_geometry_service

logger = logging.getLogger(__name__)


class OmegaService:

    def __init__(self, min_window_snapshots: Optional[int] = None):
        self.min_window_snapshots = min_window_snapshots or settings.MIN_WINDOW_SNAPSHOTS
        self.geometry = get_geometry_service()

    @staticmethod
    def _pairwise_distances(fields: List[Field]) -> np.ndarray:
        flat = np.stack([field.values.ravel() for field in fields]) if fields else np.zeros((0, 0))
        distances = np.zeros((len(fields), len(fields)))
        for i in range(len(fields)):
            distances[i] = np.max(np.abs(flat - flat[i]), axis=1)
        return distances

    def _estimate(self, window: List[float], fields: List[Field], tol: float) -> OmegaEstimate:
        distances = self._pairwise_distances(fields)

        # latest snapshot first, so the final state is always a representative
        chosen: List[int] = []
        for index in reversed(range(len(fields))):
            if all(distances[index, other] > tol for other in chosen):
                chosen.append(index)
        chosen.sort()

        diameter = float(distances.max()) if distances.size else 0.0
        logger.info(
            "Omega estimate on [%.4g, %.4g]: %d snapshots, %d representatives, diameter %.3e",
            window[0], window[1], len(fields), len(chosen), diameter,
        )
        return OmegaEstimate(
            window=window,
            snapshots=fields,
            distances=distances,
            diameter=diameter,
            representatives=[fields[i] for i in chosen],
            representative_indices=chosen,
            tol=tol,
        )

    def collect_omega(self, traj: Trajectory, window_fraction: Optional[float] = None, tol: Optional[float] = None) -> OmegaEstimate:
        window_fraction = settings.WINDOW_FRACTION if window_fraction is None else window_fraction
        tol = settings.SCENARIO_TOL if tol is None else tol
        if not 0 < window_fraction <= 1:
            raise ValueError(f"window_fraction must lie in (0, 1], got {window_fraction}")
        if tol < 0:
            raise ValueError("Tolerance must be non-negative")

        t_start, t_end = traj.snapshots[0].t, traj.t_end
        t_lo = t_end - window_fraction * (t_end - t_start)
        start = next((i for i, snapshot in enumerate(traj.snapshots) if snapshot.t >= t_lo - 1e-12), len(traj.snapshots))

        # widen backwards to the minimum sample count
        start = min(start, max(0, len(traj.snapshots) - self.min_window_snapshots))
        fields = traj.snapshots[start:]
        if not fields:
            logger.error("No snapshots in the omega window starting at t=%.4g", t_lo)
            raise ValueError("The omega window holds no snapshots")
        if len(fields) < 2:
            logger.warning("Omega window holds a single snapshot, the estimate is a point")

        return self._estimate([fields[0].t, fields[-1].t], fields, tol)

    def collect_poincare(
            self,
            traj: Trajectory,
            period: float,
            tol: Optional[float] = None,
            periods: Optional[int] = None,
            window_fraction: Optional[float] = None,
    ) -> OmegaEstimate:
        """
        Samples at t_end - n * period, taking the nearest snapshot within half a snapshot
        spacing. Without `periods` the samples cover the omega window.
        """
        if period <= 0:
            raise ValueError("Poincare period must be positive")
        tol = settings.SCENARIO_TOL if tol is None else tol
        window_fraction = settings.WINDOW_FRACTION if window_fraction is None else window_fraction

        times = np.array([snapshot.t for snapshot in traj.snapshots])
        spacing = float(np.median(np.diff(times))) if times.size > 1 else period
        t_start, t_end = times[0], times[-1]
        if periods is None:
            horizon = t_end - window_fraction * (t_end - t_start)
            periods = max(int(np.floor((t_end - horizon) / period + 1e-9)) + 1, 2)

        fields: List[Field] = []
        for n in range(periods):
            target = t_end - n * period
            if target < t_start - 0.5 * spacing:
                break
            index = int(np.argmin(np.abs(times - target)))
            if abs(times[index] - target) > 0.5 * spacing + 1e-12:
                logger.warning("No snapshot within half a spacing of t=%.4g, Poincare sample skipped", target)
                continue
            if not fields or fields[0] is not traj.snapshots[index]:
                fields.insert(0, traj.snapshots[index])

        if not fields:
            logger.error("No Poincare samples for period %.4g", period)
            raise ValueError("The Poincare window holds no snapshots")

        return self._estimate([fields[0].t, fields[-1].t], fields, tol)

    def dist_to_estimate(self, field: Field, est: OmegaEstimate) -> float:
        return min(self.geometry.sup_distance(field, representative) for representative in est.representatives)


def get_omega_service(min_window_snapshots: Optional[int] = None) -> OmegaService:
    return OmegaService(min_window_snapshots)
