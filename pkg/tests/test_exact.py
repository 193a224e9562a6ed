import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nnflux import exact
from nnflux.errors import ConvergenceError, InvalidStateError
from nnflux.exact import (
    Wave,
    godunov_flux,
    godunov_flux_burgers,
    sample_swe_solution,
    solve_swe_star,
)
from nnflux.physics import PdeSystem, projected_flux

from oracles import bisect_star_depth, hopf_lax_burgers

B1 = PdeSystem.burgers1d()
S1 = PdeSystem.swe1d()


@pytest.mark.parametrize("up,um,expected", [(1, 1, 0.5), (-1, 1, 0.0), (2, -1, 2.0)])
def test_burgers_godunov_examples(up, um, expected):
    assert godunov_flux_burgers(up, um) == expected


def test_burgers_godunov_matches_hopf_lax(rng):
    up, um = rng.uniform(-3, 3, 10_000), rng.uniform(-3, 3, 10_000)
    u0 = hopf_lax_burgers(up, um)
    np.testing.assert_allclose(godunov_flux_burgers(up, um), 0.5 * u0**2, atol=1e-5)


def test_star_state_examples():
    s = solve_swe_star(1.0, 0.0, 1.0, 0.0)
    assert s.h_star == pytest.approx(1.0, abs=1e-12) and s.u_star == pytest.approx(0.0, abs=1e-12)
    s = solve_swe_star(1.0, -0.5, 1.0, 0.5)
    assert s.h_star == pytest.approx(0.5625, abs=1e-12)
    assert s.u_star == pytest.approx(0.0, abs=1e-12)
    assert s.left_wave is Wave.RAREFACTION and s.right_wave is Wave.RAREFACTION
    assert solve_swe_star(1.0, -3.0, 1.0, 3.0).dry


def test_shock_waves_are_labelled():
    s = solve_swe_star(1.0, 1.0, 1.0, -1.0)
    assert s.left_wave is Wave.SHOCK and s.right_wave is Wave.SHOCK and s.h_star > 1


def test_negative_depth_is_rejected():
    with pytest.raises(InvalidStateError):
        solve_swe_star(-1.0, 0.0, 1.0, 0.0)


def test_nonconvergence_raises(monkeypatch):
    monkeypatch.setattr(exact, "NEWTON_MAXITER", 1)
    with pytest.raises(ConvergenceError):
        solve_swe_star(3.0, 2.0, 0.1, -2.0)


def _swe_pairs(rng, n):
    h_l, h_r = rng.uniform(1e-6, 3.5, n), rng.uniform(1e-6, 3.5, n)
    u_l, u_r = rng.uniform(-2.5, 2.5, n), rng.uniform(-2.5, 2.5, n)
    return h_l, u_l, h_r, u_r


def test_star_depth_matches_bisection_oracle(rng):
    h_l, u_l, h_r, u_r = _swe_pairs(rng, 10_000)
    h_s, _, dry, _ = exact._star_arrays(h_l, u_l, h_r, u_r, 1.0)
    wet = ~dry
    ref = bisect_star_depth(h_l[wet], u_l[wet], h_r[wet], u_r[wet])
    assert np.all(h_s >= 0)
    np.testing.assert_allclose(h_s[wet], ref, rtol=1e-10, atol=1e-12)
    # the dry criterion itself
    c_l, c_r = np.sqrt(h_l), np.sqrt(h_r)
    np.testing.assert_array_equal(dry, u_r - u_l >= 2 * (c_l + c_r))


def test_sample_examples():
    s = solve_swe_star(1.0, -0.5, 1.0, 0.5)
    np.testing.assert_allclose(sample_swe_solution(s, 1.0, -0.5, 1.0, 0.5, 1.0, -1e9), [1.0, -0.5])
    np.testing.assert_allclose(sample_swe_solution(s, 1.0, -0.5, 1.0, 0.5, 1.0, 0.0), [0.5625, 0.0], atol=1e-12)
    d = solve_swe_star(1.0, -3.0, 1.0, 3.0)
    np.testing.assert_allclose(sample_swe_solution(d, 1.0, -3.0, 1.0, 3.0, 1.0, 0.0), [0.0, 0.0])


def test_sample_rejects_foreign_star():
    s = solve_swe_star(1.0, -0.5, 1.0, 0.5)
    with pytest.raises(InvalidStateError):
        sample_swe_solution(s, 2.0, -0.5, 1.0, 0.5, 1.0, 0.0)


def test_godunov_swe_examples():
    np.testing.assert_allclose(godunov_flux(S1, [1.0, 0.0], [1.0, 0.0]), [0.0, 0.5])
    np.testing.assert_allclose(godunov_flux(S1, [1.0, -1.0], [1.0, 1.0]), [0.0, 0.03125], atol=1e-12)
    assert godunov_flux(B1, [-1.0], [1.0])[0] == 0.0


def test_godunov_multid_is_rejected():
    with pytest.raises(ValueError):
        godunov_flux(PdeSystem.swe2d(), [1.0, 0, 0], [1.0, 0, 0])


def test_consistency(rng):
    h = rng.uniform(0, 3.5, 1000)
    U = np.column_stack([h, h * rng.uniform(-2.5, 2.5, 1000)])
    np.testing.assert_allclose(godunov_flux(S1, U, U), projected_flux(S1, U, [1.0]), atol=1e-14, rtol=0)
    u = rng.uniform(-3, 3, (1000, 1))
    np.testing.assert_allclose(godunov_flux(B1, u, u), projected_flux(B1, u, [1.0]), atol=1e-14, rtol=0)


def test_burgers_reflection_symmetry(rng):
    # mirror x -> -x, u -> -u maps the data (a, b) to (-b, -a) and keeps u^2/2
    a, b = rng.uniform(-3, 3, 1000), rng.uniform(-3, 3, 1000)
    np.testing.assert_array_equal(godunov_flux_burgers(a, b), godunov_flux_burgers(-b, -a))


def test_swe_reflection_symmetry(rng):
    h_l, u_l, h_r, u_r = _swe_pairs(rng, 1000)
    F = godunov_flux(S1, np.column_stack([h_l, h_l * u_l]), np.column_stack([h_r, h_r * u_r]))
    G = godunov_flux(S1, np.column_stack([h_r, -h_r * u_r]), np.column_stack([h_l, -h_l * u_l]))
    np.testing.assert_allclose(F[:, 0], -G[:, 0], atol=1e-10)
    np.testing.assert_allclose(F[:, 1], G[:, 1], atol=1e-10)


def _rh_residual(left, right, speed, g=1.0):
    (hl, ul), (hr, ur) = left, right
    q = lambda h, u: np.array([h * u, h * u * u + 0.5 * g * h * h])  # noqa: E731
    return np.abs(speed * np.array([hr - hl, hr * ur - hl * ul]) - (q(hr, ur) - q(hl, ul))).max()


@given(
    st.floats(0.05, 3.5), st.floats(-2.5, 2.5), st.floats(0.05, 3.5), st.floats(-2.5, 2.5)
)
def test_wave_structure(h_l, u_l, h_r, u_r):
    s = solve_swe_star(h_l, u_l, h_r, u_r)
    if s.dry:
        return
    g = 1.0
    xi = np.linspace(-6, 6, 4001)
    W = sample_swe_solution(s, h_l, u_l, h_r, u_r, g, xi)
    h = W[:, 0]
    if s.left_wave is Wave.SHOCK:
        S = u_l - np.sqrt(g * s.h_star * (s.h_star + h_l) / (2 * h_l))
        assert _rh_residual((h_l, u_l), (s.h_star, s.u_star), S) < 1e-9
    else:
        # depth decreases monotonically through the left fan
        fan = (xi > u_l - np.sqrt(g * h_l)) & (xi < s.u_star - np.sqrt(g * s.h_star))
        assert np.all(np.diff(h[fan]) <= 1e-12)
    if s.right_wave is Wave.SHOCK:
        S = u_r + np.sqrt(g * s.h_star * (s.h_star + h_r) / (2 * h_r))
        assert _rh_residual((s.h_star, s.u_star), (h_r, u_r), S) < 1e-9
    else:
        fan = (xi > s.u_star + np.sqrt(g * s.h_star)) & (xi < u_r + np.sqrt(g * h_r))
        assert np.all(np.diff(h[fan]) >= -1e-12)


def test_flux_at_interface_matches_sampled_state(rng):
    h_l, u_l, h_r, u_r = _swe_pairs(rng, 200)
    F = godunov_flux(S1, np.column_stack([h_l, h_l * u_l]), np.column_stack([h_r, h_r * u_r]))
    for i in range(200):
        s = solve_swe_star(h_l[i], u_l[i], h_r[i], u_r[i])
        W = sample_swe_solution(s, h_l[i], u_l[i], h_r[i], u_r[i], 1.0, 0.0)
        np.testing.assert_allclose(F[i], projected_flux(S1, W, [1.0]), atol=1e-12)


def test_dry_region_flux_is_zero():
    np.testing.assert_array_equal(godunov_flux(S1, [1.0, -3.0], [1.0, 3.0]), [0.0, 0.0])
