import numpy as np
import pytest

from nnflux import problems
from nnflux.errors import ConfigError, SimulationFailure
from nnflux.flux import FluxChoice
from nnflux.fvm import (
    BcRule,
    BoundaryCondition,
    SimState,
    advance,
    cfl_timestep,
    compute_residual,
    conserved_total,
    face_flux_function,
    initial_state,
    make_config,
    run_simulation,
)
from nnflux.mesh import make_pentagon_tri_mesh, make_quad_mesh_rect, make_uniform_grid_1d
from nnflux.physics import PdeSystem

CLASSICAL = [FluxChoice.GODUNOV, FluxChoice.ROE, FluxChoice.ROE_HARTEN, FluxChoice.HLL]
B1 = PdeSystem.burgers1d()
SWE1 = PdeSystem.swe1d()


def uniform(mesh, value):
    return SimState(np.tile(value, (mesh.n_cells, 1)).astype(float))


MESHES = {
    "burgers1d": (B1, lambda: make_uniform_grid_1d(-1, 1, 9), [0.7]),
    "burgers2d": (PdeSystem.burgers2d((1.0, -0.5)), lambda: make_pentagon_tri_mesh(1.0, 3), [-1.3]),
    "swe1d": (SWE1, lambda: make_uniform_grid_1d(0, 1, 9), [1.5, -0.6]),
    "swe2d_quad": (PdeSystem.swe2d(), lambda: make_quad_mesh_rect(0, 1, 0, 2, 4, 5), [1.5, -0.6, 0.9]),
    "swe2d_tri": (PdeSystem.swe2d(), lambda: make_pentagon_tri_mesh(2.0, 3), [0.8, 0.2, -0.4]),
}


@pytest.mark.parametrize("case", MESHES)
@pytest.mark.parametrize("flux", CLASSICAL)
def test_free_stream_preservation(case, flux):
    pde, build, value = MESHES[case]
    mesh = build()
    fn = face_flux_function(pde, flux)
    rate = compute_residual(pde, mesh, uniform(mesh, value), fn, BoundaryCondition())
    assert np.abs(rate).max() <= 1e-12


def test_two_cell_burgers_example():
    mesh = make_uniform_grid_1d(0, 1, 2)
    state = SimState(np.array([[1.0], [0.0]]))
    rate = compute_residual(B1, mesh, state, face_flux_function(B1, "godunov"), BoundaryCondition())
    np.testing.assert_allclose(rate[:, 0], [0.0, 1.0], atol=1e-15)


def test_viscous_term_is_a_second_order_laplacian():
    zero = lambda Up, Um, N: np.zeros_like(Up)  # noqa: E731
    errors = []
    for n in (50, 100, 200):
        pde = PdeSystem.burgers1d(viscosity=0.1)
        bc = BoundaryCondition.periodic_pairs(("left", "right"))
        mesh = bc.apply(make_uniform_grid_1d(0, 1, n))
        x = mesh.cell_centroids[:, 0]
        state = SimState(np.sin(2 * np.pi * x)[:, None])
        rate = compute_residual(pde, mesh, state, zero, bc)[:, 0]
        errors.append(np.abs(rate - 0.1 * -(2 * np.pi) ** 2 * np.sin(2 * np.pi * x)).max())
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders > 1.9)


def test_cfl_examples():
    mesh = make_uniform_grid_1d(0, 1, 10)
    state = SimState(np.linspace(-1, 1, 10)[:, None])
    assert cfl_timestep(B1, mesh, state, 0.4) == pytest.approx(0.04)
    dry = uniform(make_uniform_grid_1d(0, 1, 10), [0.0, 0.0])
    dt = cfl_timestep(SWE1, make_uniform_grid_1d(0, 1, 10), dry, 0.4)
    assert np.isfinite(dt) and dt > 1e10
    mesh = make_uniform_grid_1d(0, 1, 100)
    still = uniform(mesh, [0.0])
    assert cfl_timestep(PdeSystem.burgers1d(1e-4), mesh, still, 0.4) == pytest.approx(0.2)


def test_constant_stays_constant():
    cfg = make_config(PdeSystem.swe2d(), make_quad_mesh_rect(0, 1, 0, 1, 5, 5), "hll", 0.3)
    res = run_simulation(cfg, lambda X: np.tile([1.2, 0.3, -0.1], (len(X), 1)))
    np.testing.assert_allclose(res.state.U, np.tile([1.2, 0.3, -0.1], (25, 1)), atol=1e-13)
    assert res.state.t == 0.3


def test_case_one_is_odd_symmetric():
    res = run_simulation(problems.standard_config("burgers_case1", "godunov"), problems.burgers_case1)
    u = res.state.U[:, 0]
    assert res.state.t == 0.75
    assert np.abs(u + u[::-1]).max() <= 1e-10


def exact_case_one(x, t):
    return np.clip(x / t, -1.0, 1.0)


def test_grid_convergence_on_rarefaction():
    errors = []
    for n in (100, 200, 400):
        mesh_spec = {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": n}
        cfg = problems.standard_config("burgers_case1", "godunov", mesh_spec=mesh_spec)
        res = run_simulation(cfg, problems.burgers_case1)
        x = cfg.mesh.cell_centroids[:, 0]
        errors.append(np.sum(np.abs(res.state.U[:, 0] - exact_case_one(x, 0.75)) * cfg.mesh.cell_measures))
    assert errors[0] > errors[1] > errors[2]


def test_periodic_viscous_run_conserves_per_step():
    cfg = problems.standard_config("burgers_viscous_sine", "godunov", t_final=0.2)
    state = initial_state(cfg.mesh, problems.burgers_viscous_sine)
    total = conserved_total(cfg.mesh, state.U)
    for _ in range(50):
        state, _, bflux = advance(cfg, state)
        np.testing.assert_allclose(conserved_total(cfg.mesh, state.U), total, atol=1e-12, rtol=0)
        assert np.all(bflux == 0)


@pytest.mark.parametrize("flux", CLASSICAL)
def test_periodic_conservation_full_run(flux):
    bc = BoundaryCondition.periodic_pairs(("left", "right"), ("bottom", "top"))
    cfg = make_config(PdeSystem.swe2d(), make_quad_mesh_rect(0, 1, 0, 1, 8, 8), flux, 0.2, bc)
    ic = lambda X: np.column_stack([1 + 0.3 * np.sin(2 * np.pi * X[:, 0]), 0.2 + 0 * X[:, 0], 0.1 * np.cos(2 * np.pi * X[:, 1])])  # noqa: E731
    res = run_simulation(cfg, ic)
    np.testing.assert_allclose(conserved_total(cfg.mesh, res.state.U), res.initial_total, atol=1e-12, rtol=0)


def test_transmissive_balance_closes():
    cfg = make_config(PdeSystem.swe2d(), make_quad_mesh_rect(0, 10, 0, 10, 12, 12), "hll", 1.0)
    res = run_simulation(cfg, problems.swe2d_dambreak)
    assert np.abs(res.balance_defect(cfg.mesh)).max() <= 1e-10
    assert abs(res.boundary_outflow[0]) > 0


def test_reflective_walls_keep_mass():
    bc = BoundaryCondition(default=BcRule.REFLECTIVE)
    cfg = make_config(PdeSystem.swe2d(), make_quad_mesh_rect(0, 10, 0, 10, 10, 10), "godunov", 2.0, bc)
    res = run_simulation(cfg, problems.swe2d_dambreak)
    assert abs(res.boundary_outflow[0]) <= 1e-12
    assert abs(conserved_total(cfg.mesh, res.state.U)[0] - res.initial_total[0]) <= 1e-10


def test_reflective_rule_is_for_swe_only():
    bc = BoundaryCondition(default=BcRule.REFLECTIVE)
    with pytest.raises(ConfigError):
        make_config(B1, make_uniform_grid_1d(0, 1, 4), "godunov", 0.1, bc)


@pytest.mark.parametrize("flux", ["roe", "roe_harten"])
def test_roe_fails_on_case_three(flux):
    with pytest.raises(SimulationFailure) as info:
        run_simulation(problems.standard_config("swe_case3", flux), problems.swe_case3)
    rec = info.value.record()
    assert rec["time"] < 0.1
    assert rec["cell"] is not None


@pytest.mark.parametrize("flux", ["hll", "godunov"])
def test_case_three_completes_with_robust_fluxes(flux):
    res = run_simulation(problems.standard_config("swe_case3", flux), problems.swe_case3)
    assert res.state.t == 0.1
    assert np.all(res.state.U[:, 0] >= 0)


def test_negative_initial_depth_is_a_failure():
    cfg = make_config(SWE1, make_uniform_grid_1d(0, 1, 4), "hll", 0.1)
    with pytest.raises(SimulationFailure) as info:
        run_simulation(cfg, lambda X: np.column_stack([np.where(X[:, 0] > 0.5, -1e-3, 1.0), 0 * X[:, 0]]))
    assert info.value.record()["cell"] in (2, 3)


def test_snapshots_land_on_requested_times():
    cfg = problems.standard_config("swe_case2", "hll", snapshot_times=(0.05, 0.2, 0.1))
    res = run_simulation(cfg, problems.swe_case2)
    assert sorted(res.snapshots) == [0.05, 0.1, 0.2]
    np.testing.assert_array_equal(res.snapshots[0.2], res.state.U)


@pytest.mark.parametrize("kwargs", [
    {"cfl": 0.0}, {"cfl": 1.5}, {"snapshot_times": (0.5,)}, {"snapshot_times": (0.0,)},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        problems.standard_config("swe_case1", "hll", **kwargs)


def test_config_rejects_mismatches():
    with pytest.raises(ConfigError):
        make_config(SWE1, make_quad_mesh_rect(0, 1, 0, 1, 2, 2), "hll", 0.1)
    with pytest.raises(ConfigError):
        make_config(SWE1, make_uniform_grid_1d(0, 1, 4), "bfnn", 0.1)
    with pytest.raises(ConfigError):
        make_config(B1, make_uniform_grid_1d(0, 1, 4), "hll", -1.0)
    with pytest.raises(ConfigError):
        make_config(B1, make_uniform_grid_1d(0, 1, 4), "hll", 1.0, BoundaryCondition({"left": "periodic"}))


def test_initial_condition_midpoint_values():
    mesh = make_uniform_grid_1d(0, 1, 4)
    state = initial_state(mesh, problems.burgers_viscous_sine)
    x = np.array([0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(state.U[:, 0], 0.2 + np.sin(2 * np.pi * x) / np.pi)
