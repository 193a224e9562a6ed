"""Exact (Godunov) Riemann solvers for 1D Burgers and 1D shallow water.

Sign convention: ``u_plus`` is the state on the left of the interface
(``s < 0``) and ``u_minus`` the state on the right.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError, InvalidStateError
from .physics import PdeKind, check_admissible, velocities

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 100
H_FLOOR = 1e-12


class Wave(str, Enum):
    SHOCK = "shock"
    RAREFACTION = "rarefaction"


@dataclass(frozen=True)
class SweStarState:
    h_star: float
    u_star: float
    left_wave: Wave
    right_wave: Wave
    dry: bool
    newton_iterations: int


def burgers_flux(u):
    return 0.5 * np.asarray(u) ** 2


def godunov_flux_burgers(u_plus, u_minus):
    """Godunov flux of ``u^2/2``: ``max(f(max(u+, 0)), f(min(u-, 0)))``."""
    u_plus = np.asarray(u_plus, dtype=float)
    u_minus = np.asarray(u_minus, dtype=float)
    return np.maximum(
        burgers_flux(np.maximum(u_plus, 0.0)), burgers_flux(np.minimum(u_minus, 0.0))
    )


def depth_function(h, h_k, g):
    """Toro's ``f_K(h; h_K)`` and its derivative, for wet ``h_K``.

    Rarefaction branch for ``h <= h_K``, shock branch otherwise.
    """
    h = np.asarray(h, dtype=float)
    h_k = np.asarray(h_k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rare = h <= h_k
        f_r = 2.0 * (np.sqrt(g * h) - np.sqrt(g * h_k))
        df_r = np.sqrt(g / h)
        G = np.sqrt(g * (h + h_k) / (2.0 * h * h_k))
        f_s = (h - h_k) * G
        df_s = G - g * (h - h_k) / (4.0 * G * h**2)
    return np.where(rare, f_r, f_s), np.where(rare, df_r, df_s)


def _star_arrays(h_l, u_l, h_r, u_r, g):
    """Vectorized star-region solve.

    Returns ``(h_star, u_star, dry, iterations)``; ``dry`` flags every
    configuration that contains vacuum (dry input side or a dry region
    generated by diverging data).
    """
    h_l, u_l, h_r, u_r = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (h_l, u_l, h_r, u_r))
    )
    if np.any(h_l < 0) or np.any(h_r < 0):
        raise InvalidStateError("negative water depth in Riemann data")
    c_l = np.sqrt(g * h_l)
    c_r = np.sqrt(g * h_r)
    dry = (h_l == 0) | (h_r == 0) | (u_r - u_l >= 2.0 * (c_l + c_r))
    wet = ~dry

    h_star = np.zeros(h_l.shape)
    u_star = np.zeros(h_l.shape)
    iters = np.zeros(h_l.shape, dtype=int)
    if not np.any(wet):
        return h_star, u_star, dry, iters

    hl, ul, hr, ur = h_l[wet], u_l[wet], h_r[wet], u_r[wet]
    du = ur - ul
    h = (0.5 * (c_l[wet] + c_r[wet]) + 0.25 * (ul - ur)) ** 2 / g
    h = np.maximum(h, H_FLOOR)
    n_it = np.zeros(h.shape, dtype=int)
    active = np.ones(h.shape, dtype=bool)
    for _ in range(NEWTON_MAXITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ha = h[idx]
        f_l, df_l = depth_function(ha, hl[idx], g)
        f_r, df_r = depth_function(ha, hr[idx], g)
        phi = f_l + f_r + du[idx]
        done = np.abs(phi) < NEWTON_TOL
        step = -phi / (df_l + df_r)
        step[done] = 0.0
        # keep iterates positive by halving offending steps
        while True:
            bad = ha + step <= 0
            if not np.any(bad):
                break
            step[bad] *= 0.5
        h_new = ha + step
        done |= np.abs(step) < NEWTON_TOL * h_new
        h[idx] = h_new
        n_it[idx] += 1
        active[idx[done]] = False
    if np.any(active):
        raise ConvergenceError(
            f"SWE star-state Newton iteration did not converge in {NEWTON_MAXITER} iterations"
        )
    f_l, _ = depth_function(h, hl, g)
    f_r, _ = depth_function(h, hr, g)
    h_star[wet] = h
    u_star[wet] = 0.5 * (ul + ur) + 0.5 * (f_r - f_l)
    iters[wet] = n_it
    return h_star, u_star, dry, iters


def solve_swe_star(h_l, u_l, h_r, u_r, g=1.0):
    """Star depth and velocity for one 1D SWE Riemann problem."""
    if not g > 0:
        raise ValueError("gravity must be positive")
    h_s, u_s, dry, it = _star_arrays(h_l, u_l, h_r, u_r, g)
    h_s, u_s, dry, it = float(h_s), float(u_s), bool(dry), int(it)
    if dry:
        left = right = Wave.RAREFACTION
    else:
        left = Wave.SHOCK if h_s > h_l else Wave.RAREFACTION
        right = Wave.SHOCK if h_s > h_r else Wave.RAREFACTION
    return SweStarState(h_s, u_s, left, right, dry, it)


def _left_fan(u_l, c_l, xi, g):
    c = (u_l + 2.0 * c_l - xi) / 3.0
    return c**2 / g, xi + c


def _right_fan(u_r, c_r, xi, g):
    c = (xi - u_r + 2.0 * c_r) / 3.0
    return c**2 / g, xi - c


def _sample_arrays(h_l, u_l, h_r, u_r, g, h_s, u_s, dry, xi):
    """Depth and velocity of the similarity solution at ``xi``.

    All arguments broadcast together.
    """
    h_l, u_l, h_r, u_r, h_s, u_s, dry, xi = np.broadcast_arrays(
        h_l, u_l, h_r, u_r, h_s, u_s, dry, xi
    )
    c_l = np.sqrt(g * h_l)
    c_r = np.sqrt(g * h_r)
    h = np.zeros(xi.shape)
    u = np.zeros(xi.shape)

    def put(mask, hv, uv):
        h[mask] = np.broadcast_to(hv, xi.shape)[mask]
        u[mask] = np.broadcast_to(uv, xi.shape)[mask]

    wet_l = h_l > 0
    wet_r = h_r > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        # vacuum cases: fans bounded by the dry fronts u_l + 2c_l, u_r - 2c_r
        vac = dry
        front_l = np.where(wet_l, u_l + 2.0 * c_l, -np.inf)
        front_r = np.where(wet_r, u_r - 2.0 * c_r, np.inf)
        head_l = u_l - c_l
        head_r = u_r + c_r
        m = vac & wet_l & (xi <= head_l)
        put(m, h_l, u_l)
        m = vac & wet_l & (xi > head_l) & (xi < front_l)
        fh, fu = _left_fan(u_l, c_l, xi, g)
        put(m, fh, fu)
        m = vac & wet_r & (xi >= head_r)
        put(m, h_r, u_r)
        m = vac & wet_r & (xi > front_r) & (xi < head_r)
        fh, fu = _right_fan(u_r, c_r, xi, g)
        put(m, fh, fu)
        # remaining vacuum points stay dry (h = u = 0)

        wet = ~vac
        c_s = np.sqrt(g * h_s)
        left_side = wet & (xi <= u_s)
        right_side = wet & (xi > u_s)

        shock_l = h_s > h_l
        q_l = np.sqrt(0.5 * (h_s + h_l) * h_s / h_l**2)
        s_l = u_l - c_l * q_l
        m = left_side & shock_l
        put(m & (xi <= s_l), h_l, u_l)
        put(m & (xi > s_l), h_s, u_s)
        m = left_side & ~shock_l
        tail_l = u_s - c_s
        put(m & (xi <= head_l), h_l, u_l)
        put(m & (xi >= tail_l), h_s, u_s)
        fh, fu = _left_fan(u_l, c_l, xi, g)
        put(m & (xi > head_l) & (xi < tail_l), fh, fu)

        shock_r = h_s > h_r
        q_r = np.sqrt(0.5 * (h_s + h_r) * h_s / h_r**2)
        s_r = u_r + c_r * q_r
        m = right_side & shock_r
        put(m & (xi >= s_r), h_r, u_r)
        put(m & (xi < s_r), h_s, u_s)
        m = right_side & ~shock_r
        tail_r = u_s + c_s
        put(m & (xi >= head_r), h_r, u_r)
        put(m & (xi <= tail_r), h_s, u_s)
        fh, fu = _right_fan(u_r, c_r, xi, g)
        put(m & (xi > tail_r) & (xi < head_r), fh, fu)
    return h, u


def sample_swe_solution(star, h_l, u_l, h_r, u_r, g, xi):
    """Evaluate the exact SWE Riemann solution at similarity coordinate ``xi``.

    Returns the conserved state ``(h, h u)``; ``xi`` may be an array, in
    which case the result has shape ``xi.shape + (2,)``.
    """
    if star.dry:
        c_l, c_r = np.sqrt(g * h_l), np.sqrt(g * h_r)
        if h_l > 0 and h_r > 0 and u_r - u_l < 2.0 * (c_l + c_r):
            raise InvalidStateError("star state flagged dry but the data is not")
    else:
        f_l, _ = depth_function(star.h_star, h_l, g)
        f_r, _ = depth_function(star.h_star, h_r, g)
        resid = f_l + f_r + (u_r - u_l)
        if not abs(resid) <= 1e-8 * max(1.0, abs(u_r - u_l)):
            raise InvalidStateError("star state does not match the Riemann data")
    h, u = _sample_arrays(
        float(h_l), float(u_l), float(h_r), float(u_r), g,
        star.h_star, star.u_star, star.dry, np.asarray(xi, dtype=float),
    )
    return np.stack([h, h * u], axis=-1)


def _swe_godunov(U_plus, U_minus, g):
    h_l, h_r = U_plus[..., 0], U_minus[..., 0]
    u_l = velocities(U_plus)[..., 0]
    u_r = velocities(U_minus)[..., 0]
    h_s, u_s, dry, _ = _star_arrays(h_l, u_l, h_r, u_r, g)
    h, u = _sample_arrays(h_l, u_l, h_r, u_r, g, h_s, u_s, dry, 0.0)
    hu = h * u
    # reuse the exact input momentum when the interface sees an input state
    is_l = (h == h_l) & (u == u_l)
    is_r = (h == h_r) & (u == u_r) & ~is_l
    hu = np.where(is_l, U_plus[..., 1], np.where(is_r, U_minus[..., 1], hu))
    flux = np.empty(h.shape + (2,))
    flux[..., 0] = hu
    flux[..., 1] = hu * u + 0.5 * g * h**2
    return flux


def godunov_flux(pde, U_plus, U_minus):
    """x-directed Godunov flux ``F_I(Psi(0)) e_1`` for 1D systems.

    Accepts single states ``(m,)`` or batches ``(..., m)``.
    """
    if pde.kind not in (PdeKind.BURGERS_1D, PdeKind.SWE_1D):
        raise ValueError("godunov_flux is defined for 1D systems; lift via rotation")
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    if pde.kind is PdeKind.BURGERS_1D:
        return godunov_flux_burgers(U_plus[..., 0], U_minus[..., 0])[..., None]
    return _swe_godunov(U_plus, U_minus, pde.gravity)
