"""Approximate Riemann fluxes: Roe, Roe with Harten's entropy fix, HLL.

All fluxes are x-directed 1D fluxes on batches of states ``(..., m)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DryStateError
from .physics import PdeKind, check_admissible, projected_flux, velocities

E1 = np.array([1.0])
HARTEN_SCALE = 0.1


@dataclass(frozen=True)
class RoeAverageSwe:
    h_tilde: np.ndarray
    u_tilde: np.ndarray
    c_tilde: np.ndarray


@dataclass(frozen=True)
class WaveSpeedPair:
    s_plus: np.ndarray
    s_minus: np.ndarray


def _check_1d(pde):
    if pde.kind not in (PdeKind.BURGERS_1D, PdeKind.SWE_1D):
        raise ValueError("approximate fluxes are defined for 1D systems")


def _f(pde, U):
    return projected_flux(pde, U, E1)


def roe_average_swe(U_plus, U_minus, g):
    h_p, h_m = U_plus[..., 0], U_minus[..., 0]
    bad = (h_p <= 0) | (h_m <= 0)
    if np.any(bad):
        idx = int(np.flatnonzero(np.ravel(bad))[0])
        raise DryStateError("Roe average undefined for a dry state", index=idx)
    sp, sm = np.sqrt(h_p), np.sqrt(h_m)
    u_p = U_plus[..., 1] / h_p
    u_m = U_minus[..., 1] / h_m
    h_t = 0.5 * (h_p + h_m)
    return RoeAverageSwe(h_t, (sp * u_p + sm * u_m) / (sp + sm), np.sqrt(g * h_t))


def harten_fix(lam, delta):
    """Harten's smoothed ``|lambda|``: parabolic inside ``|lambda| < delta``."""
    lam = np.asarray(lam, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise ValueError("delta must be positive")
    a = np.abs(lam)
    return np.where(a >= delta, a, (lam**2 + delta**2) / (2.0 * delta))


def harten_delta(pde, U_plus, U_minus, scale=HARTEN_SCALE):
    """Default delta policy: ``scale * c~`` (SWE), ``scale * max|u|`` (Burgers)."""
    if pde.is_swe:
        return scale * roe_average_swe(U_plus, U_minus, pde.gravity).c_tilde
    mag = np.maximum(np.abs(U_plus[..., 0]), np.abs(U_minus[..., 0]))
    return scale * np.maximum(mag, 1e-8)


def _roe(pde, U_plus, U_minus, delta):
    _check_1d(pde)
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    central = 0.5 * (_f(pde, U_plus) + _f(pde, U_minus))
    dU = U_minus - U_plus

    def mag(lam):
        return np.abs(lam) if delta is None else harten_fix(lam, delta)

    if pde.kind is PdeKind.BURGERS_1D:
        a = 0.5 * (U_plus[..., 0] + U_minus[..., 0])
        return central - 0.5 * mag(a)[..., None] * dU

    avg = roe_average_swe(U_plus, U_minus, pde.gravity)
    u, c = avg.u_tilde, avg.c_tilde
    lam1, lam2 = u - c, u + c
    dh, dq = dU[..., 0], dU[..., 1]
    # wave strengths on r_k = (1, lam_k)
    a1 = (lam2 * dh - dq) / (2.0 * c)
    a2 = (dq - lam1 * dh) / (2.0 * c)
    w1 = mag(lam1) * a1
    w2 = mag(lam2) * a2
    diss = np.stack([w1 + w2, w1 * lam1 + w2 * lam2], axis=-1)
    return central - 0.5 * diss


def roe_flux(pde, U_plus, U_minus):
    """Roe flux ``(F+ + F-)/2 - |B~|(U- - U+)/2``.

    Raises :class:`DryStateError` for SWE states with ``h <= 0``.
    """
    return _roe(pde, U_plus, U_minus, None)


def roe_flux_fixed(pde, U_plus, U_minus, delta=None, scale=HARTEN_SCALE):
    """Roe flux with every ``|lambda_k|`` passed through :func:`harten_fix`.

    ``delta`` overrides the default policy when given.
    """
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    if delta is None:
        delta = harten_delta(pde, U_plus, U_minus, scale)
    return _roe(pde, U_plus, U_minus, delta)


def einfeldt_speeds(pde, U_plus, U_minus):
    """HLLE wave-speed bounds.

    ``s_plus`` is the slow (left-going) bound attached to ``U_plus``; dry
    sides use the dry-front characteristic ``u -/+ 2c`` of the wet side.
    """
    _check_1d(pde)
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    if pde.kind is PdeKind.BURGERS_1D:
        up, um = U_plus[..., 0], U_minus[..., 0]
        a = 0.5 * (up + um)
        return WaveSpeedPair(np.minimum(up, a), np.maximum(um, a))

    g = pde.gravity
    h_p, h_m = U_plus[..., 0], U_minus[..., 0]
    u_p = velocities(U_plus)[..., 0]
    u_m = velocities(U_minus)[..., 0]
    c_p, c_m = np.sqrt(g * h_p), np.sqrt(g * h_m)
    wet_p, wet_m = h_p > 0, h_m > 0
    both = wet_p & wet_m
    sp_, sm_ = np.sqrt(np.where(both, h_p, 1.0)), np.sqrt(np.where(both, h_m, 1.0))
    u_t = (sp_ * u_p + sm_ * u_m) / (sp_ + sm_)
    c_t = np.sqrt(g * 0.5 * (h_p + h_m))
    s_plus = np.where(
        both,
        np.minimum(u_p - c_p, u_t - c_t),
        np.where(wet_m, u_m - 2.0 * c_m, u_p - c_p),
    )
    s_minus = np.where(
        both,
        np.maximum(u_m + c_m, u_t + c_t),
        np.where(wet_p, u_p + 2.0 * c_p, u_m + c_m),
    )
    s_plus = np.where(~wet_p & ~wet_m, 0.0, s_plus)
    s_minus = np.where(~wet_p & ~wet_m, 0.0, s_minus)
    return WaveSpeedPair(s_plus, s_minus)


def hll_flux(pde, U_plus, U_minus):
    """HLL flux with Einfeldt speeds; branch labels follow ``S+ <= S-``."""
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    ws = einfeldt_speeds(pde, U_plus, U_minus)
    sp = ws.s_plus[..., None]
    sm = ws.s_minus[..., None]
    F_p, F_m = _f(pde, U_plus), _f(pde, U_minus)
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = (sm * F_p - sp * F_m + sp * sm * (U_minus - U_plus)) / (sm - sp)
    return np.where(0.0 <= sp, F_p, np.where(sm <= 0.0, F_m, mid))
