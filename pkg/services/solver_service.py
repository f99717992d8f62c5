import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from constants.geometry import DomainKind
from constants.solver import SchemeKind, IMEX_STARTUP_STEPS
from core.config import settings
from core.exceptions import SolverAbortError, LinearSolveError, BlowUpError
from schemas.geometry import PolarGrid, Field
from schemas.solver import Scheme, Trajectory, EquilibriumResult
from services.reaction_service import Nonlinearity

logger = logging.getLogger(__name__)


class SolverService:
    """
    Time integration of u_t = Laplacian(u) + f(t, |x|, u) with u = 0 on the boundary.

    Spatial operator: second-order central differences for u_rr + u_r / r + u_phiphi / r^2
    on the cell-centred polar grid. Ghost values are -u across r_outer (and r_inner for
    annuli); the disk closes at the origin through the antipodal cell of the first ring.
    Every stencil sum is evaluated in the same order at every cell, so grid rotations and
    lattice reflections commute with the operator bit for bit.
    """

    def __init__(self, grid: PolarGrid, nonlinearity: Nonlinearity, scheme: Scheme, blowup_guard: Optional[float] = None):
        self.grid = grid
        self.nonlinearity = nonlinearity
        self.scheme = scheme
        self.blowup_guard = blowup_guard if blowup_guard is not None else settings.BLOWUP_GUARD
        self.linear_tol = scheme.linear_tol or settings.LINEAR_TOL
        self.max_linear_iterations = scheme.max_linear_iterations or settings.MAX_LINEAR_ITERATIONS

        self.is_disk = grid.domain.kind == DomainKind.DISK
        self.r_col = grid.r[:, None]

        h = grid.dr
        self.c_out = 1.0 / h ** 2 + 1.0 / (2.0 * self.r_col * h)
        self.c_in = 1.0 / h ** 2 - 1.0 / (2.0 * self.r_col * h)
        self.c_ang = 1.0 / (self.r_col ** 2 * grid.dphi ** 2)
        self.c_center = -2.0 / h ** 2 - 2.0 * self.c_ang

        # Dirichlet ghosts (-u) folded into the diagonal
        self.c_center_folded = self.c_center.copy()
        self.c_center_folded[-1] -= self.c_out[-1]
        if not self.is_disk:
            self.c_center_folded[0] -= self.c_in[0]

        self._banded_cache: Dict[float, List[np.ndarray]] = {}

    # ------------------------------------------------------------------ operator

    def _ghost_rows(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        outer = -u[-1:]
        if self.is_disk:
            inner = np.roll(u[:1], self.grid.ntheta // 2, axis=1)
        else:
            inner = -u[:1]
        return inner, outer

    def _laplacian(self, u: np.ndarray) -> np.ndarray:
        inner, outer = self._ghost_rows(u)
        u_up = np.concatenate((u[1:], outer), axis=0)
        u_down = np.concatenate((inner, u[:-1]), axis=0)
        angular = np.roll(u, 1, axis=1) + np.roll(u, -1, axis=1)
        return self.c_out * u_up + self.c_in * u_down + self.c_ang * angular + self.c_center * u

    def laplacian_apply(self, field: Field) -> Field:
        if field.grid != self.grid:
            raise ValueError("Field does not live on the solver grid")
        return field.with_values(self._laplacian(field.values))

    def _reaction(self, t: float, u: np.ndarray) -> np.ndarray:
        return self.nonlinearity.f(t, self.r_col, u)

    def residual(self, field: Field) -> float:
        """Sup-norm of Laplacian(u) + f(t, |x|, u)."""
        values = self._laplacian(field.values) + self._reaction(field.t, field.values)
        return float(np.max(np.abs(values)))

    # ------------------------------------------------------------------ imex_fourier

    def _banded_matrices(self, theta: float) -> List[np.ndarray]:
        """Banded forms of I - theta * L_m for every angular mode m of the real DFT."""
        cached = self._banded_cache.get(theta)
        if cached is not None:
            return cached

        nr = self.grid.nr
        c_out = self.c_out[:, 0]
        c_in = self.c_in[:, 0]
        c_ang = self.c_ang[:, 0]
        matrices = []
        for m in range(self.grid.ntheta // 2 + 1):
            diagonal = -2.0 / self.grid.dr ** 2 + c_ang * (2.0 * math.cos(m * self.grid.dphi) - 2.0)
            diagonal[-1] -= c_out[-1]
            if self.is_disk:
                diagonal[0] += (-1.0) ** m * c_in[0]
            else:
                diagonal[0] -= c_in[0]

            ab = np.zeros((3, nr))
            ab[0, 1:] = -theta * c_out[:-1]
            ab[1, :] = 1.0 - theta * diagonal
            ab[2, :-1] = -theta * c_in[1:]
            matrices.append(ab)

        self._banded_cache[theta] = matrices
        return matrices

    def _solve_modes(self, theta: float, rhs: np.ndarray) -> np.ndarray:
        matrices = self._banded_matrices(theta)
        spectrum = np.fft.rfft(rhs, axis=1)
        for m, ab in enumerate(matrices):
            spectrum[:, m] = solve_banded((1, 1), ab, spectrum[:, m])
        return np.fft.irfft(spectrum, n=self.grid.ntheta, axis=1)

    def _imex_step(self, u: np.ndarray, t: float, dt: float) -> np.ndarray:
        theta = 0.5 * dt
        if self.scheme.reaction_order == 1:
            reaction = self._reaction(t, u)
        else:
            u_half = self._solve_modes(theta, u + theta * self._reaction(t, u))
            reaction = self._reaction(t + theta, u_half)

        rhs = u + theta * self._laplacian(u) + dt * reaction
        return self._solve_modes(theta, rhs)

    def _damped_step(self, u: np.ndarray, t: float, dt: float) -> np.ndarray:
        """Two backward-Euler half steps on the Crank-Nicolson matrices; damps the stiff modes of rough data."""
        half = 0.5 * dt
        u_half = self._solve_modes(half, u + half * self._reaction(t, u))
        return self._solve_modes(half, u_half + half * self._reaction(t + half, u_half))

    # ------------------------------------------------------------------ backward_euler

    def _off_diagonal(self, x: np.ndarray) -> np.ndarray:
        if self.is_disk:
            inner = np.roll(x[:1], self.grid.ntheta // 2, axis=1)
        else:
            inner = np.zeros_like(x[:1])
        x_up = np.concatenate((x[1:], np.zeros_like(x[:1])), axis=0)
        x_down = np.concatenate((inner, x[:-1]), axis=0)
        angular = np.roll(x, 1, axis=1) + np.roll(x, -1, axis=1)
        return self.c_out * x_up + self.c_in * x_down + self.c_ang * angular

    def _jacobi_solve(self, rhs: np.ndarray, guess: np.ndarray, dt: float, t: float) -> np.ndarray:
        """Jacobi iteration for (I - dt L) x = rhs, stopped on the sup-norm residual."""
        diagonal = 1.0 - dt * self.c_center_folded
        threshold = self.linear_tol * max(1.0, float(np.max(np.abs(rhs))))
        x = guess
        residual_norm = math.inf
        for iteration in range(1, self.max_linear_iterations + 1):
            coupled = rhs + dt * self._off_diagonal(x)
            residual = coupled - diagonal * x
            residual_norm = float(np.max(np.abs(residual)))
            if residual_norm <= threshold:
                logger.debug("Jacobi converged in %d iterations (residual %.3e)", iteration, residual_norm)
                return x
            x = coupled / diagonal

        logger.error("Jacobi solve stalled at t=%.6g with residual %.3e", t, residual_norm)
        raise LinearSolveError(t=t, residual=residual_norm, iterations=self.max_linear_iterations)

    def _backward_euler_step(self, u: np.ndarray, t: float, dt: float) -> np.ndarray:
        rhs = u + dt * self._reaction(t, u)
        return self._jacobi_solve(rhs, u, dt, t + dt)

    # ------------------------------------------------------------------ public API

    def _advance(self, u: np.ndarray, t: float, dt: float, startup: bool = False) -> np.ndarray:
        if self.scheme.kind == SchemeKind.IMEX_FOURIER:
            u_new = self._damped_step(u, t, dt) if startup else self._imex_step(u, t, dt)
        else:
            u_new = self._backward_euler_step(u, t, dt)

        if not np.all(np.isfinite(u_new)):
            logger.error("Non-finite values produced at t=%.6g", t + dt)
            raise SolverAbortError("Non-finite values in solution", t + dt)
        return u_new

    def step(self, field: Field, dt: Optional[float] = None) -> Field:
        if field.grid != self.grid:
            raise ValueError("Field does not live on the solver grid")
        h = self.scheme.dt if dt is None else dt
        if h <= 0:
            raise ValueError("Time step must be positive")
        return Field(grid=self.grid, values=self._advance(field.values, field.t, h), t=field.t + h)

    def integrate(self, u0: Field, t_end: float, snapshot_every: float) -> Trajectory:
        if t_end <= 0:
            raise ValueError("t_end must be positive")
        if snapshot_every <= 0:
            raise ValueError("snapshot_every must be positive")
        if u0.grid != self.grid:
            raise ValueError("Initial field does not live on the solver grid")

        dt = self.scheme.dt
        n_steps = max(1, math.ceil(t_end / dt - 1e-9))
        logger.info(
            "Integrating %s with %s: dt=%g, t_end=%g, %d steps",
            self.nonlinearity, self.scheme.kind.value, dt, t_end, n_steps,
        )

        t0 = u0.t
        u = np.array(u0.values)
        snapshots = [Field(grid=self.grid, values=u, t=t0)]
        sup_times: List[float] = []
        sup_norms: List[float] = []
        next_snapshot = t0 + snapshot_every
        time_eps = 1e-9 * dt

        def partial(steps_done: int) -> Trajectory:
            return Trajectory(
                snapshots=snapshots,
                sup_times=np.array(sup_times),
                sup_norms=np.array(sup_norms),
                steps=steps_done,
                metadata={"status": "aborted"},
            )

        for n in range(1, n_steps + 1):
            t_prev = t0 + (n - 1) * dt
            t_new = t0 + t_end if n == n_steps else t0 + n * dt
            try:
                u = self._advance(u, t_prev, t_new - t_prev, startup=n <= IMEX_STARTUP_STEPS)
            except SolverAbortError as e:
                e.partial = partial(n - 1)
                raise

            sup = float(np.max(np.abs(u)))
            sup_times.append(t_new)
            sup_norms.append(sup)
            if sup > self.blowup_guard:
                logger.error("Sup-norm %.3e exceeded the blow-up guard at t=%.6g", sup, t_new)
                error = BlowUpError(t=t_new, sup_norm=sup, guard=self.blowup_guard)
                error.partial = partial(n)
                raise error

            if n == n_steps or t_new >= next_snapshot - time_eps:
                snapshots.append(Field(grid=self.grid, values=u, t=t_new))
                while next_snapshot <= t_new + time_eps:
                    next_snapshot += snapshot_every

        logger.info("Integration finished: %d snapshots, max sup-norm %.6g", len(snapshots), max(sup_norms))
        return Trajectory(
            snapshots=snapshots,
            sup_times=np.array(sup_times),
            sup_norms=np.array(sup_norms),
            steps=n_steps,
            metadata={
                "status": "completed",
                "nonlinearity": self.nonlinearity.id.value,
                "scheme": self.scheme.kind.value,
            },
        )

    def equilibrium_solve(
            self,
            u0: Field,
            residual_tol: float,
            max_steps: int = 100000,
            check_every: int = 10,
    ) -> EquilibriumResult:
        if not self.nonlinearity.autonomous:
            raise ValueError("Equilibrium solve requires an autonomous nonlinearity")
        if residual_tol <= 0:
            raise ValueError("residual_tol must be positive")

        dt = self.scheme.dt
        field = u0
        best, best_residual = field, self.residual(field)
        steps = 0
        logger.info("Equilibrium solve started: initial residual %.3e, tol %.3e", best_residual, residual_tol)

        while best_residual >= residual_tol and steps < max_steps:
            for _ in range(min(check_every, max_steps - steps)):
                values = self._advance(field.values, field.t, dt, startup=steps < IMEX_STARTUP_STEPS)
                field = Field(grid=self.grid, values=values, t=field.t + dt)
                steps += 1
            if field.sup_norm > self.blowup_guard:
                raise BlowUpError(t=field.t, sup_norm=field.sup_norm, guard=self.blowup_guard)

            current = self.residual(field)
            if current < best_residual:
                best, best_residual = field, current

        converged = best_residual < residual_tol
        if converged:
            logger.info("Equilibrium reached after %d steps, residual %.3e", steps, best_residual)
        else:
            logger.warning("Equilibrium solve exhausted %d steps, best residual %.3e", steps, best_residual)

        return EquilibriumResult(field=best, residual=best_residual, converged=converged, steps=steps)


def get_solver_service(grid: PolarGrid, nonlinearity: Nonlinearity, scheme: Scheme) -> SolverService:
    return SolverService(grid, nonlinearity, scheme)
