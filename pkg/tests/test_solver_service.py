import math

import numpy as np
import pytest
from scipy.special import jv

from constants.solver import NonlinearityPreset, SchemeKind
from core.exceptions import BlowUpError, LinearSolveError
from schemas.geometry import RadialDomain, PolarGrid, Field
from schemas.solver import NonlinearitySpec, Scheme
from services.eigen_service import EigenService
from services.geometry_service import GeometryService
from services.reaction_service import ReactionService
from services.solver_service import SolverService
from services.symmetry_service import SymmetryService


def build_solver(grid: PolarGrid, preset: NonlinearityPreset, params=None, **scheme_kwargs) -> SolverService:
    nonlinearity = ReactionService(grid.domain).build(NonlinearitySpec(id=preset, params=params or {}))
    scheme_kwargs.setdefault("dt", 1e-3)
    return SolverService(grid, nonlinearity, Scheme(**scheme_kwargs))


def gaussian_bump(grid: PolarGrid, x0: float = 0.3, y0: float = 0.1, width: float = 0.2) -> Field:
    r, phi = grid.mesh()
    x, y = r * np.cos(phi), r * np.sin(phi)
    taper = np.clip(grid.domain.r_outer - r, 0.0, None)
    values = np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / (2 * width ** 2)) * taper
    return Field(grid=grid, values=values, t=0.0)


class TestLaplacian:

    def test_second_order_convergence(self):
        errors = []
        for n in (32, 64, 128):
            grid = PolarGrid(domain=RadialDomain.disk(1.0), nr=n, ntheta=n)
            solver = build_solver(grid, NonlinearityPreset.HEAT)
            r, phi = grid.mesh()
            field = Field(grid=grid, values=r ** 3 * np.cos(2 * phi))

            approx = solver.laplacian_apply(field).values
            exact = 5.0 * r * np.cos(2 * phi)
            band = (r >= 0.25) & (r <= 0.75)
            errors.append(float(np.max(np.abs(approx - exact)[band])))

        orders = [math.log2(coarse / fine) for coarse, fine in zip(errors, errors[1:])]

        assert min(orders) >= 1.9

    def test_constant_ring_has_zero_angular_part(self, annulus_grid):
        solver = build_solver(annulus_grid, NonlinearityPreset.HEAT)
        r, _ = annulus_grid.mesh()
        field = Field(grid=annulus_grid, values=np.sin(math.pi * (r - 0.5) / 0.5))

        lap = solver.laplacian_apply(field).values

        assert np.allclose(lap, lap[:, :1], atol=1e-9)

    def test_foreign_field_rejected(self, disk_grid, annulus_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT)

        with pytest.raises(ValueError):
            solver.laplacian_apply(Field(grid=annulus_grid, values=np.zeros(annulus_grid.shape)))


class TestIntegrate:

    def test_first_eigenvalue_decay_rate(self):
        grid = PolarGrid(domain=RadialDomain.disk(1.0), nr=64, ntheta=128)
        solver = build_solver(grid, NonlinearityPreset.HEAT, dt=1e-3)
        u0 = EigenService().eigenpair_oracle(grid.domain, grid, 0, 1).field

        traj = solver.integrate(u0, t_end=0.5, snapshot_every=0.1)
        late = traj.sup_times >= 0.1
        slope = np.polyfit(traj.sup_times[late], np.log(traj.sup_norms[late]), 1)[0]

        assert -slope == pytest.approx(5.783186, rel=0.01)

    def test_second_eigenfunction_is_stationary(self):
        grid = PolarGrid(domain=RadialDomain.disk(1.0), nr=48, ntheta=96)
        eigen = EigenService()
        lam = eigen.second_eigenvalue(grid.domain)
        solver = build_solver(grid, NonlinearityPreset.LINEAR, {"c": lam}, dt=2e-3)
        u0 = eigen.eigenpair_oracle(grid.domain, grid, 1, 1).field

        traj = solver.integrate(u0, t_end=1.0, snapshot_every=0.1)
        drift = np.max(np.abs(traj.sup_norms / u0.sup_norm - 1.0))

        assert drift < 0.02

    def test_snapshot_cadence_and_final_time(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=0.01)

        traj = solver.integrate(gaussian_bump(disk_grid), t_end=0.1, snapshot_every=0.03)

        assert [round(s.t, 10) for s in traj.snapshots] == [0.0, 0.03, 0.06, 0.09, 0.1]
        assert traj.steps == 10
        assert traj.sup_norms.size == 10

    def test_last_step_lands_on_t_end(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=0.01)

        traj = solver.integrate(gaussian_bump(disk_grid), t_end=0.105, snapshot_every=1.0)

        assert traj.steps == 11
        assert traj.t_end == pytest.approx(0.105, abs=1e-15)
        assert len(traj.snapshots) == 2

    def test_heat_decays_on_annulus_for_both_schemes(self, annulus_grid):
        u0 = gaussian_bump(annulus_grid, x0=0.0, y0=0.75, width=0.15)
        finals = []
        for kind in (SchemeKind.IMEX_FOURIER, SchemeKind.BACKWARD_EULER):
            solver = build_solver(annulus_grid, NonlinearityPreset.HEAT, dt=1e-3, kind=kind)
            traj = solver.integrate(u0, t_end=0.05, snapshot_every=0.05)
            assert traj.snapshots[-1].sup_norm < u0.sup_norm
            finals.append(traj.snapshots[-1].values)

        assert np.max(np.abs(finals[0] - finals[1])) < 5e-2 * u0.sup_norm

    def test_blow_up_guard_aborts_with_partial_trajectory(self, disk_grid):
        nonlinearity = ReactionService(disk_grid.domain).build(
            NonlinearitySpec(id=NonlinearityPreset.CUBIC, params={"a": 1.0, "b": -1.0})
        )
        solver = SolverService(disk_grid, nonlinearity, Scheme(dt=1e-3), blowup_guard=100.0)
        u0 = gaussian_bump(disk_grid, x0=0.0, y0=0.0, width=0.4)
        u0 = u0.with_values(20.0 * u0.values)

        with pytest.raises(BlowUpError) as error:
            solver.integrate(u0, t_end=1.0, snapshot_every=0.01)

        assert error.value.sup_norm > 100.0
        assert error.value.partial.metadata["status"] == "aborted"
        assert error.value.partial.snapshots[0].t == 0.0

    @pytest.mark.parametrize("kind", [SchemeKind.IMEX_FOURIER, SchemeKind.BACKWARD_EULER])
    def test_heat_sup_norm_strictly_decreases(self, disk_grid, kind):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=1e-3, kind=kind)

        traj = solver.integrate(gaussian_bump(disk_grid), t_end=0.5, snapshot_every=0.05)
        sups = [snapshot.sup_norm for snapshot in traj.snapshots]

        assert len(sups) == 11
        assert np.all(np.diff(sups) < 0)

    def test_imex_damps_rough_data(self, disk_grid, rng):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=1e-2)
        u0 = Field(grid=disk_grid, values=rng.uniform(-1, 1, disk_grid.shape))

        traj = solver.integrate(u0, t_end=2.0, snapshot_every=0.5)
        final = traj.snapshots[-1]

        assert final.sup_norm < 1e-4
        assert SymmetryService(1e-3).compute_M([final]).is_full

    def test_periodic_forcing_from_rest_stays_bounded_and_radial(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.PERIODIC_FORCED, {"eps": 0.1, "T": 0.5}, dt=2.5e-3)
        u0 = Field(grid=disk_grid, values=np.zeros(disk_grid.shape))

        traj = solver.integrate(u0, t_end=2.0, snapshot_every=0.1)
        final = traj.snapshots[-1]

        assert traj.metadata["status"] == "completed"
        assert traj.t_end == pytest.approx(2.0)
        assert final.sup_norm > 0
        assert traj.max_sup_norm < math.sqrt(EigenService().second_eigenvalue(disk_grid.domain)) + 1.0
        assert np.max(np.ptp(final.values, axis=1)) < 1e-10

    def test_invalid_arguments(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT)

        with pytest.raises(ValueError):
            solver.integrate(gaussian_bump(disk_grid), t_end=0.0, snapshot_every=0.1)
        with pytest.raises(ValueError):
            solver.integrate(gaussian_bump(disk_grid), t_end=1.0, snapshot_every=0.0)


class TestBackwardEuler:

    def test_comparison_principle(self, disk_grid, rng):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=1e-3, kind=SchemeKind.BACKWARD_EULER)
        v = Field(grid=disk_grid, values=rng.uniform(-1, 1, disk_grid.shape))
        u = v.with_values(v.values + rng.uniform(0, 0.5, disk_grid.shape))

        assert np.all(solver.step(u).values >= solver.step(v).values - 1e-9)

    @pytest.mark.parametrize("c", [-3.0, 3.0])
    def test_comparison_principle_with_linear_reaction(self, disk_grid, rng, c):
        solver = build_solver(disk_grid, NonlinearityPreset.LINEAR, {"c": c}, dt=1e-2, kind=SchemeKind.BACKWARD_EULER)
        v = Field(grid=disk_grid, values=rng.uniform(-1, 1, disk_grid.shape))
        u = v.with_values(v.values + rng.uniform(0, 0.5, disk_grid.shape))

        assert np.all(solver.step(u).values >= solver.step(v).values - 1e-9)

    def test_maximum_principle(self, disk_grid, rng):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=1e-2, kind=SchemeKind.BACKWARD_EULER)
        u = Field(grid=disk_grid, values=rng.uniform(0, 1, disk_grid.shape))

        stepped = solver.step(u)

        assert stepped.values.min() >= -1e-9
        assert stepped.sup_norm <= u.sup_norm + 1e-9

    def test_linear_solve_exhaustion(self, disk_grid):
        solver = build_solver(
            disk_grid, NonlinearityPreset.HEAT, dt=1e-2, kind=SchemeKind.BACKWARD_EULER, max_linear_iterations=1,
        )

        with pytest.raises(LinearSolveError) as error:
            solver.step(gaussian_bump(disk_grid))

        assert error.value.iterations == 1
        assert error.value.residual > 0


class TestEquivariance:

    @pytest.fixture(autouse=True)
    def setup_fields(self, disk_grid, rng):
        self.grid = disk_grid
        self.geometry = GeometryService()
        self.field = Field(grid=disk_grid, values=rng.uniform(-1, 1, disk_grid.shape))

    def test_backward_euler_rotation_bit_exact(self):
        solver = build_solver(self.grid, NonlinearityPreset.CUBIC, {"a": 3.0, "b": 1.0}, kind=SchemeKind.BACKWARD_EULER)

        for steps in (1, 5, self.grid.ntheta // 2):
            rotated_then_stepped = solver.step(self.geometry.rotate_field(self.field, steps))
            stepped_then_rotated = self.geometry.rotate_field(solver.step(self.field), steps)
            assert np.array_equal(rotated_then_stepped.values, stepped_then_rotated.values)

    def test_backward_euler_reflection_bit_exact(self):
        solver = build_solver(self.grid, NonlinearityPreset.CUBIC, {"a": 3.0, "b": 1.0}, kind=SchemeKind.BACKWARD_EULER)

        for k in (0, 3, 8):
            e = self.geometry.direction_from_index(self.grid.ntheta, k)
            left = solver.step(self.geometry.reflect_field(self.field, e))
            right = self.geometry.reflect_field(solver.step(self.field), e)
            assert np.array_equal(left.values, right.values)

    def test_imex_rotation_to_round_off(self):
        solver = build_solver(self.grid, NonlinearityPreset.CUBIC, {"a": 3.0, "b": 1.0})

        rotated_then_stepped = solver.step(self.geometry.rotate_field(self.field, 7))
        stepped_then_rotated = self.geometry.rotate_field(solver.step(self.field), 7)

        np.testing.assert_allclose(rotated_then_stepped.values, stepped_then_rotated.values, atol=1e-12)

    def test_imex_reflection_to_round_off(self):
        solver = build_solver(self.grid, NonlinearityPreset.CUBIC, {"a": 3.0, "b": 1.0})

        for k in (0, 3, 8):
            e = self.geometry.direction_from_index(self.grid.ntheta, k)
            left = solver.step(self.geometry.reflect_field(self.field, e))
            right = self.geometry.reflect_field(solver.step(self.field), e)
            np.testing.assert_allclose(left.values, right.values, atol=1e-12)


class TestEquilibrium:

    @pytest.mark.parametrize("reaction_order", [1, 2])
    def test_cubic_equilibrium_converges_to_radial_state(self, disk_grid, reaction_order):
        solver = build_solver(
            disk_grid, NonlinearityPreset.CUBIC, {"a": 12.0, "b": 1.0}, dt=5e-3, reaction_order=reaction_order,
        )
        u0 = gaussian_bump(disk_grid, x0=0.2, y0=0.0, width=0.3)
        geometry = GeometryService()

        result = solver.equilibrium_solve(u0, residual_tol=1e-6, max_steps=50000)

        assert result.converged
        assert result.residual < 1e-6
        assert result.field.values.min() > 0
        for k in range(0, disk_grid.lattice_size, 8):
            mirrored = geometry.reflect_field(result.field, geometry.direction_from_index(disk_grid.ntheta, k))
            assert geometry.sup_distance(result.field, mirrored) < 1e-4

    def test_heat_equilibrium_is_zero(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.HEAT, dt=5e-3)

        result = solver.equilibrium_solve(gaussian_bump(disk_grid), residual_tol=1e-6, max_steps=50000)

        assert result.converged
        assert result.field.sup_norm < 1e-6

    def test_second_eigenfunction_is_already_an_equilibrium(self):
        grid = PolarGrid(domain=RadialDomain.disk(1.0), nr=48, ntheta=96)
        eigen = EigenService()
        lam = eigen.second_eigenvalue(grid.domain)
        solver = build_solver(grid, NonlinearityPreset.LINEAR, {"c": lam}, dt=2e-3)
        u0 = eigen.eigenpair_oracle(grid.domain, grid, 1, 1).field
        # discretisation error only: a few percent of lam * |u0|
        tol = 0.05 * lam * u0.sup_norm

        result = solver.equilibrium_solve(u0, residual_tol=tol)

        assert result.converged
        assert result.steps == 0
        assert result.field is u0

    def test_exhausted_budget_reports_best_iterate(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.CUBIC, {"a": 12.0, "b": 1.0}, dt=5e-3, reaction_order=1)
        u0 = gaussian_bump(disk_grid)

        result = solver.equilibrium_solve(u0, residual_tol=1e-12, max_steps=20)

        assert not result.converged
        assert result.steps == 20
        assert result.residual <= solver.residual(u0)

    def test_non_autonomous_rejected(self, disk_grid):
        solver = build_solver(disk_grid, NonlinearityPreset.PERIODIC, {"eps": 0.1, "T": 0.5})

        with pytest.raises(ValueError, match="autonomous"):
            solver.equilibrium_solve(gaussian_bump(disk_grid), residual_tol=1e-6)


def test_radial_data_stays_radial(disk_grid):
    solver = build_solver(disk_grid, NonlinearityPreset.EIGEN_PUMP, kind=SchemeKind.BACKWARD_EULER)
    r, _ = disk_grid.mesh()
    u = Field(grid=disk_grid, values=jv(0, 2.404825557695773 * r))

    stepped = solver.step(u)

    assert np.array_equal(stepped.values, np.repeat(stepped.values[:, :1], disk_grid.ntheta, axis=1))
