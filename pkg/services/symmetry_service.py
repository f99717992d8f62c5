import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from constants.symmetry import Classification
from schemas.geometry import Direction, Field, PolarGrid
from schemas.symmetry import (
    ReflectionReport, Arc, DirectionSet, FssReport, EvenProfileVerdict, AxisResult, SweepResult, HalfCircleCertificate,
)
from services.geometry_service import get_geometry_service

logger = logging.getLogger(__name__)


class SymmetryService:
    """
    Reflection dominance on the half-angle direction lattice alpha_k = pi k / ntheta,
    the dominance sets M, foliated Schwarz certification and the rotating-plane sweep.
    """

    def __init__(self, tol: float):
        if tol < 0:
            raise ValueError("Tolerance must be non-negative")
        self.tol = tol
        self.geometry = get_geometry_service()

    @staticmethod
    def relative_tol(fields: Sequence[Field], factor: float) -> float:
        sup = max((field.sup_norm for field in fields), default=0.0)
        return factor * max(sup, 1.0)

    @staticmethod
    def _common_grid(fields: Sequence[Field]) -> PolarGrid:
        if not fields:
            raise ValueError("At least one field is required")
        grid = fields[0].grid
        if any(field.grid != grid for field in fields[1:]):
            raise ValueError("All fields must share one grid")
        return grid

    @staticmethod
    def _lattice_index(direction: Direction, ntheta: int) -> int:
        k = direction.lattice_index(ntheta)
        if k is None:
            raise ValueError(f"Direction at {direction.degrees:.6f} deg is not on the half-angle lattice")
        return k

    def _classify(self, w_min: float, w_max: float) -> Classification:
        if max(abs(w_min), abs(w_max)) <= self.tol:
            return Classification.SYMMETRIC
        if w_min >= -self.tol and w_max > self.tol:
            return Classification.DOMINANT_PLUS
        if w_max <= self.tol and w_min < -self.tol:
            return Classification.DOMINANT_MINUS
        return Classification.MIXED

    # ------------------------------------------------------------------ reflection dominance

    def reflection_report(self, fields: Sequence[Field], e: Direction) -> ReflectionReport:
        grid = self._common_grid(fields)
        k = self._lattice_index(e, grid.ntheta)
        permutation = self.geometry.reflection_permutation(grid.ntheta, k)
        mask = self.geometry.half_domain_mask(grid, e)
        # w_e vanishes on H(e) and on the boundary, so scale by both distances
        scale = (self.geometry.projection(grid, e) * self.geometry.boundary_distance(grid))[mask]

        w_min, w_max, margin = math.inf, -math.inf, math.inf
        for field in fields:
            w = field.values - field.values[:, permutation]
            on_half = w[mask]
            w_min = min(w_min, float(on_half.min()))
            w_max = max(w_max, float(on_half.max()))
            margin = min(margin, float(np.min(on_half / scale)))

        return ReflectionReport(
            direction=e,
            lattice_index=k,
            w_min=w_min,
            w_max=w_max,
            margin=margin,
            classification=self._classify(w_min, w_max),
            tol=self.tol,
        )

    def check_U1(self, u0: Field, e: Direction) -> bool:
        report = self.reflection_report([u0], e)
        logger.debug("U1 check at %.3f deg: %s", e.degrees, report.classification)
        return report.classification == Classification.DOMINANT_PLUS

    @staticmethod
    def _arcs(members: List[bool], ntheta: int) -> List[Arc]:
        size = len(members)
        if all(members):
            return [Arc(start_index=0, end_index=size - 1, length=size, start_angle=0.0,
                        end_angle=math.pi * (size - 1) / ntheta)]

        arcs = []
        # start scanning right after a non-member so wrapping arcs stay whole
        first_gap = members.index(False)
        offset = 1
        while offset <= size:
            k = (first_gap + offset) % size
            if members[k]:
                length = 0
                while members[(k + length) % size]:
                    length += 1
                end = (k + length - 1) % size
                arcs.append(Arc(
                    start_index=k,
                    end_index=end,
                    length=length,
                    start_angle=math.pi * k / ntheta,
                    end_angle=math.pi * end / ntheta,
                ))
                offset += length
            else:
                offset += 1
        return sorted(arcs, key=lambda arc: arc.start_index)

    def compute_M(self, fields: Sequence[Field]) -> DirectionSet:
        grid = self._common_grid(fields)
        reports = [
            self.reflection_report(fields, self.geometry.direction_from_index(grid.ntheta, k))
            for k in range(grid.lattice_size)
        ]
        members = [report.in_m for report in reports]
        arcs = self._arcs(members, grid.ntheta)
        logger.debug("M has %d of %d lattice directions in %d arcs", sum(members), len(members), len(arcs))
        return DirectionSet(ntheta=grid.ntheta, members=members, arcs=arcs, reports=reports, tol=self.tol)

    # ------------------------------------------------------------------ one-dimensional machinery

    def reflection_points(self, v: np.ndarray) -> List[float]:
        """Lattice half-angles eta at which v is reflection symmetric within tol."""
        v = np.asarray(v, dtype=float)
        n = v.size
        points = []
        for k in range(2 * n):
            mirrored = v[(k - np.arange(n)) % n]
            if float(np.max(np.abs(v - mirrored))) <= self.tol:
                points.append(math.pi * k / n)
        return points

    def _geo4_differences(self, v: np.ndarray, k: int) -> np.ndarray:
        """v(eta + phi) - v(eta - phi) for lattice phi in [0, pi], eta = pi k / n."""
        n = v.size
        d = np.arange(k % 2, n + 1, 2)
        j = ((k + d) // 2) % n
        return v[j] - v[(k - j) % n]

    def check_geo4(self, v: np.ndarray, eta: float) -> bool:
        v = np.asarray(v, dtype=float)
        k = self._lattice_index(Direction(angle=eta), v.size)
        differences = self._geo4_differences(v, k)
        return bool(np.all(differences >= -self.tol) and np.any(differences > self.tol))

    def lemma1_conclusion(self, v: np.ndarray) -> EvenProfileVerdict:
        v = np.asarray(v, dtype=float)
        n = v.size
        if float(np.max(np.abs(v - v[(-np.arange(n)) % n]))) > self.tol:
            raise ValueError("Reflection-point conclusion expects v to be even about 0")

        witnesses = []
        for k in range(2 * n):
            differences = self._geo4_differences(v, k)
            if np.all(differences >= -self.tol) and np.any(differences > self.tol):
                witnesses.append(math.pi * k / n)

        points = self.reflection_points(v)
        hypothesis = bool(witnesses)
        allowed = (0.0, math.pi)
        holds = not hypothesis or all(any(math.isclose(p, a, abs_tol=1e-12) for a in allowed) for p in points)
        if hypothesis and not holds:
            logger.warning("Reflection points %s outside {0, pi} although dominance holds at %s", points, witnesses)

        return EvenProfileVerdict(hypothesis_holds=hypothesis, witnesses=witnesses, reflection_points=points, holds=holds)

    # ------------------------------------------------------------------ foliated Schwarz symmetry

    @staticmethod
    def _signed_offsets(ntheta: int, k: int) -> np.ndarray:
        """Angular offset of each cell from the axis e_k in half-steps, in (-ntheta, ntheta]."""
        d = (2 * np.arange(ntheta) - k) % (2 * ntheta)
        return np.where(d > ntheta, d - 2 * ntheta, d)

    def _enumeration(self, ntheta: int, k: int) -> np.ndarray:
        d = self._signed_offsets(ntheta, k)
        # sort by |theta|, +theta before -theta
        return np.lexsort((d < 0, np.abs(d)))

    def fss_symmetrize(self, field: Field, p: Direction) -> Field:
        grid = field.grid
        order = self._enumeration(grid.ntheta, self._lattice_index(p, grid.ntheta))
        values = np.empty_like(field.values)
        values[:, order] = -np.sort(-field.values, axis=1)
        return field.with_values(values)

    def fss_deficit(self, field: Field, p: Direction) -> FssReport:
        grid = field.grid
        k = self._lattice_index(p, grid.ntheta)
        u = field.values

        axial = float(np.max(np.abs(u - u[:, self.geometry.axis_permutation(grid.ntheta, k)])))

        d = self._signed_offsets(grid.ntheta, k)
        upper = np.flatnonzero(d >= 0)
        upper = upper[np.argsort(d[upper])]
        ring_sequence = u[:, upper]
        running_min = np.minimum.accumulate(ring_sequence, axis=1)
        mono = float(max(0.0, np.max(ring_sequence - running_min)))

        enumerated = u[:, self._enumeration(grid.ntheta, k)]
        fixed_point = bool(np.all(np.diff(enumerated, axis=1) <= 0))

        return FssReport(
            axis=p,
            axial_deficit=axial,
            mono_deficit=mono,
            tol=self.tol,
            verdict=axial <= self.tol and mono <= self.tol,
            enumeration_fixed_point=fixed_point,
        )

    def detect_axis(self, M: DirectionSet, fields: Sequence[Field]) -> AxisResult:
        size = M.lattice_size
        missing = [k for k in range(M.ntheta) if not M.members[k] and not M.members[(k + M.ntheta) % size]]
        if missing:
            logger.warning("Condition S = M u -M fails at %d lattice directions", len(missing))
            return AxisResult(condition_holds=False, missing_pairs=missing)

        if M.is_full:
            logger.info("M is the full lattice, fields are radial")
            return AxisResult(condition_holds=True, radial=True, certified=True)

        arc = M.largest_arc
        midpoint = (arc.start_index + (arc.length - 1) // 2) % size
        axis = self.geometry.direction_from_index(M.ntheta, midpoint)
        reports = [self.fss_deficit(field, axis) for field in fields]
        certified = all(report.verdict for report in reports)
        logger.info("Axis candidate at %.3f deg, certified=%s", axis.degrees, certified)

        return AxisResult(condition_holds=True, axis=axis, certified=certified, fss_reports=reports)

    def rotating_plane_sweep(self, fields: Sequence[Field], e_start: Direction, M: Optional[DirectionSet] = None) -> SweepResult:
        grid = self._common_grid(fields)
        k0 = self._lattice_index(e_start, grid.ntheta)
        if M is None:
            M = self.compute_M(fields)
        size = M.lattice_size
        step = math.pi / grid.ntheta

        if not M.members[k0]:
            logger.error("Sweep start %.3f deg is not in M (%s)", e_start.degrees, M.reports[k0].classification)
            raise ValueError(f"e_start at {e_start.degrees:.3f} deg is not in the dominance set")

        if M.is_full:
            return SweepResult(
                start=e_start, theta_1=math.pi, theta_2=-math.pi,
                boundary_plus=M.reports[k0], boundary_minus=M.reports[k0],
                boundary_symmetric=M.reports[k0].classification == Classification.SYMMETRIC,
                full_symmetry=True, arc_start=e_start.angle - math.pi, arc_end=e_start.angle + math.pi,
            )

        forward = 0
        while M.members[(k0 + forward + 1) % size]:
            forward += 1
        backward = 0
        while M.members[(k0 - backward - 1) % size]:
            backward += 1

        plus = M.reports[(k0 + forward) % size]
        minus = M.reports[(k0 - backward) % size]
        theta_1, theta_2 = forward * step, -backward * step
        symmetric = plus.classification == Classification.SYMMETRIC and minus.classification == Classification.SYMMETRIC
        logger.info(
            "Rotating plane sweep from %.3f deg: theta_1=%.4f theta_2=%.4f boundary symmetric=%s",
            e_start.degrees, theta_1, theta_2, symmetric,
        )

        return SweepResult(
            start=e_start,
            theta_1=theta_1,
            theta_2=theta_2,
            boundary_plus=plus,
            boundary_minus=minus,
            boundary_symmetric=symmetric,
            full_symmetry=theta_1 - theta_2 >= 2.0 * math.pi,
            arc_start=e_start.angle + theta_2,
            arc_end=e_start.angle + theta_1,
        )

    def half_circle_certificate(self, M: DirectionSet) -> HalfCircleCertificate:
        size = M.lattice_size
        for arc in sorted(M.arcs, key=lambda a: (-a.length, a.start_index)):
            symmetric = [
                k for k in arc.indices(size)
                if M.reports and M.reports[k].classification == Classification.SYMMETRIC
            ]
            if len(symmetric) >= 2:
                return HalfCircleCertificate(
                    arc=arc,
                    symmetric_indices=symmetric,
                    applicable=True,
                    contains_half_circle=arc.length >= M.ntheta + 1,
                )
        return HalfCircleCertificate(applicable=False, contains_half_circle=False)


def get_symmetry_service(tol: float) -> SymmetryService:
    return SymmetryService(tol)
