import csv
import json
import logging
import math
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from constants.output import METRICS_COLUMNS
from core.config import settings
from core.logging import attach_run_log, detach_run_log
from core.exceptions import SolverAbortError
from schemas.geometry import Direction, Field
from schemas.omega import OmegaEstimate
from schemas.scenario import ScenarioConfig, RunSummary, OmegaSummary, SweepSummary
from schemas.solver import Trajectory
from schemas.symmetry import DirectionSet, AxisResult
from services.geometry_service import get_geometry_service
from services.initial_service import get_initial_service
from services.omega_service import get_omega_service
from services.reaction_service import get_reaction_service
from services.render_service import get_render_service
from services.snapshot_service import get_snapshot_service
from services.solver_service import get_solver_service
from services.symmetry_service import get_symmetry_service, SymmetryService

logger = logging.getLogger(__name__)


class ScenarioService:
    """End-to-end scenario runs: integrate, estimate omega, run the symmetry pipeline, write artifacts."""

    def __init__(self, render_size: Optional[int] = None):
        self.geometry = get_geometry_service()
        self.omega_service = get_omega_service()
        self.snapshot_service = get_snapshot_service()
        self.render_service = get_render_service(render_size)

    @staticmethod
    def resolve_output_dir(config: ScenarioConfig, override: Optional[Union[str, Path]] = None) -> Path:
        if override:
            return Path(override)
        if settings.OUTPUT_DIR:
            return Path(settings.OUTPUT_DIR)
        return Path(config.output.directory)

    # ------------------------------------------------------------------ analysis

    def _estimate_omega(
            self,
            traj: Trajectory,
            tol: float,
            window_fraction: Optional[float],
            poincare_period: Optional[float],
    ) -> OmegaEstimate:
        if poincare_period:
            return self.omega_service.collect_poincare(traj, poincare_period, tol, window_fraction=window_fraction)
        return self.omega_service.collect_omega(traj, window_fraction, tol)

    @staticmethod
    def _largest_arc_deg(M: DirectionSet) -> float:
        if M.is_full:
            return 360.0
        arc = M.largest_arc
        if arc is None:
            return 0.0
        return (arc.length - 1) * 180.0 / M.ntheta

    def _metrics_rows(
            self,
            symmetry: SymmetryService,
            traj: Trajectory,
            estimate: OmegaEstimate,
            e_start: Direction,
            axis_result: AxisResult,
    ) -> List[Dict[str, str]]:
        axis = axis_result.axis or e_start
        rows = []
        for snapshot in traj.snapshots:
            M = symmetry.compute_M([snapshot])
            report = symmetry.fss_deficit(snapshot, axis)
            rows.append({
                "t": f"{snapshot.t:.10g}",
                "sup_norm": f"{snapshot.sup_norm:.10g}",
                "u1_holds": str(symmetry.check_U1(snapshot, e_start)).lower(),
                "m_arc_count": str(len(M.arcs)),
                "largest_arc_deg": f"{self._largest_arc_deg(M):.10g}",
                "axis_deg": f"{axis_result.axis.degrees:.10g}" if axis_result.axis else "",
                "axial_deficit": f"{report.axial_deficit:.10g}",
                "mono_deficit": f"{report.mono_deficit:.10g}",
                "dist_to_omega": f"{self.omega_service.dist_to_estimate(snapshot, estimate):.10g}",
            })
        return rows

    def summarize(
            self,
            traj: Trajectory,
            tol: float,
            e_start: Direction,
            window_fraction: Optional[float] = None,
            poincare_period: Optional[float] = None,
    ) -> tuple[RunSummary, OmegaEstimate, List[Dict[str, str]]]:
        symmetry = get_symmetry_service(tol)
        initial = traj.snapshots[0]
        u1_holds = symmetry.check_U1(initial, e_start) if initial.t == 0 else None
        if u1_holds is False:
            logger.warning("(U1) does not hold at t=0 for e_start=%.3f deg", e_start.degrees)
            opposite = e_start.opposite()
            if symmetry.check_U1(initial, opposite):
                logger.warning("(U1) holds for the opposite direction %.3f deg", opposite.degrees)

        estimate = self._estimate_omega(traj, tol, window_fraction, poincare_period)
        representatives = estimate.representatives

        M = symmetry.compute_M(representatives)
        axis_result = symmetry.detect_axis(M, representatives)

        sweep, sweep_error = None, None
        try:
            result = symmetry.rotating_plane_sweep(representatives, e_start, M)
            sweep = SweepSummary(
                theta_1=result.theta_1,
                theta_2=result.theta_2,
                boundary_symmetric=result.boundary_symmetric,
                full_symmetry=result.full_symmetry,
            )
        except ValueError as e:
            logger.warning("Rotating plane sweep skipped: %s", e)
            sweep_error = str(e)

        certificate = symmetry.half_circle_certificate(M)
        summary = RunSummary(
            e_start_deg=e_start.degrees,
            u1_holds=u1_holds,
            max_sup_norm=traj.max_sup_norm,
            steps=traj.steps,
            snapshot_count=len(traj.snapshots),
            omega=OmegaSummary(
                window=estimate.window,
                snapshot_count=len(estimate.snapshots),
                representative_count=len(representatives),
                diameter=estimate.diameter,
            ),
            m_member_count=sum(M.members),
            m_arcs=M.arcs,
            condition_holds=axis_result.condition_holds,
            radial=axis_result.radial,
            axis_deg=axis_result.axis.degrees if axis_result.axis else None,
            certified=axis_result.certified,
            fss_reports=axis_result.fss_reports,
            sweep=sweep,
            sweep_error=sweep_error,
            half_circle=certificate.contains_half_circle if certificate.applicable else None,
        )
        rows = self._metrics_rows(symmetry, traj, estimate, e_start, axis_result)
        return summary, estimate, rows

    # ------------------------------------------------------------------ artifacts

    @staticmethod
    def _write_metrics(rows: List[Dict[str, str]], path: Path) -> Path:
        with path.open("w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=METRICS_COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return path

    @staticmethod
    def _write_json(payload: Dict, path: Path) -> Path:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path

    def _write_snapshots(self, traj: Trajectory, directory: Path) -> List[Path]:
        return [
            self.snapshot_service.write(snapshot, directory / f"snapshot_{index:05d}.txt")
            for index, snapshot in enumerate(traj.snapshots)
        ]

    def write_summary(self, summary: RunSummary, out_dir: Path) -> Path:
        return self._write_json(summary.model_dump(mode="json"), out_dir / "summary.json")

    def run(self, config: ScenarioConfig, output_dir: Optional[Union[str, Path]] = None) -> RunSummary:
        out_dir = self.resolve_output_dir(config, output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        handler = attach_run_log(out_dir / "run.log")
        try:
            return self._run(config, out_dir)
        finally:
            detach_run_log(handler)

    def _run(self, config: ScenarioConfig, out_dir: Path) -> RunSummary:
        started = time.perf_counter()

        domain = config.domain.to_domain()
        grid = self.geometry.build_grid(domain, config.grid.nr, config.grid.ntheta)
        nonlinearity = get_reaction_service(domain).build(config.nonlinearity.to_spec())
        solver = get_solver_service(grid, nonlinearity, config.scheme.to_scheme())
        u0 = get_initial_service(grid).build(config.initial)
        tol = settings.SCENARIO_TOL if config.analysis.tol is None else config.analysis.tol
        e_start = Direction(angle=config.analysis.e_start)
        logger.info("Scenario run started, writing to %s", out_dir)

        artifacts: List[Path] = [out_dir / "run.log"]
        try:
            traj = solver.integrate(u0, config.time.t_end, config.time.snapshot_every)
        except SolverAbortError as e:
            logger.error("Solver aborted: %s", e)
            partial: Optional[Trajectory] = getattr(e, "partial", None)
            if partial is not None and config.output.snapshots:
                self._write_snapshots(partial, out_dir / "snapshots")
            (out_dir / "partial.flag").write_text(f"{type(e).__name__}: {e}\n")
            self._write_json({"total_seconds": time.perf_counter() - started, "status": "aborted"}, out_dir / "timing.json")
            raise
        integrated = time.perf_counter()

        poincare_period = config.analysis.poincare_period or nonlinearity.period
        summary, estimate, rows = self.summarize(traj, tol, e_start, config.analysis.window_fraction, poincare_period)
        analysed = time.perf_counter()

        artifacts.append(self._write_metrics(rows, out_dir / "metrics.csv"))
        if config.output.snapshots:
            artifacts.extend(self._write_snapshots(traj, out_dir / "snapshots"))
        if config.output.omega:
            for index, representative in enumerate(estimate.representatives):
                artifacts.append(self.snapshot_service.write(representative, out_dir / "omega" / f"representative_{index:03d}.txt"))
        if config.output.heatmaps:
            heatmaps = out_dir / "heatmaps"
            artifacts.append(self.render_service.write(traj.snapshots[0], heatmaps / "initial.pgm"))
            artifacts.append(self.render_service.write(traj.snapshots[-1], heatmaps / "final.pgm"))
            for index, representative in enumerate(estimate.representatives):
                artifacts.append(self.render_service.write(representative, heatmaps / f"representative_{index:03d}.pgm"))

        timing_path = out_dir / "timing.json"
        artifacts.append(timing_path)
        summary = summary.model_copy(update={
            "artifacts": sorted(str(path.relative_to(out_dir)) for path in artifacts),
            "wall_clock_seconds": time.perf_counter() - started,
        })
        self.write_summary(summary, out_dir)
        self._write_json({
            "integrate_seconds": integrated - started,
            "analysis_seconds": analysed - integrated,
            "total_seconds": summary.wall_clock_seconds,
            "steps": traj.steps,
        }, timing_path)

        logger.info(
            "Scenario finished in %.2fs: axis=%s certified=%s radial=%s",
            summary.wall_clock_seconds, summary.axis_deg, summary.certified, summary.radial,
        )
        return summary

    def analyze(
            self,
            fields: Sequence[Field],
            tol: Optional[float] = None,
            e_start: float = 0.0,
            window_fraction: Optional[float] = None,
            poincare_period: Optional[float] = None,
    ) -> RunSummary:
        if not fields:
            raise ValueError("No fields to analyse")
        tol = settings.SCENARIO_TOL if tol is None else tol
        direction = Direction(angle=e_start)
        if direction.lattice_index(fields[0].grid.ntheta) is None:
            raise ValueError(f"e_start at {math.degrees(e_start):.6g} deg is not on the half-angle lattice")

        ordered = sorted(fields, key=lambda field: field.t)
        if any(a.t == b.t for a, b in zip(ordered, ordered[1:])):
            # repeated time tags: keep file order, spacing carries no meaning
            ordered = [field.with_values(field.values, t=float(index + 1)) for index, field in enumerate(fields)]
        traj = Trajectory(
            snapshots=ordered,
            sup_times=np.array([]),
            sup_norms=np.array([]),
            steps=0,
            metadata={"status": "analysed"},
        )
        summary, _, _ = self.summarize(traj, tol, direction, window_fraction, poincare_period)
        return summary


def get_scenario_service(render_size: Optional[int] = None) -> ScenarioService:
    return ScenarioService(render_size)
