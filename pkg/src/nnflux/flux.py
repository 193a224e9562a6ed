"""Numerical flux choices and their lift to arbitrary face normals.

A *core* flux is any x-directed 1D flux ``H(U+, U-)`` on batches of
states: the exact, approximate and learned fluxes all fit that shape.
:func:`lift` turns a core flux into ``H(U+, U-, N)`` for the PDE at hand.
"""

from enum import Enum
from functools import partial

import numpy as np

from . import approx, exact
from .physics import DRY_TOL, rotate_back, rotate_to_normal


class FluxChoice(str, Enum):
    GODUNOV = "godunov"
    ROE = "roe"
    ROE_HARTEN = "roe_harten"
    HLL = "hll"
    VNN = "vnn"
    BFNN = "bfnn"


def core_flux(choice, pde1d):
    """x-directed flux function for a non-learned choice."""
    choice = FluxChoice(choice)
    fn = {
        FluxChoice.GODUNOV: exact.godunov_flux,
        FluxChoice.ROE: approx.roe_flux,
        FluxChoice.ROE_HARTEN: approx.roe_flux_fixed,
        FluxChoice.HLL: approx.hll_flux,
    }.get(choice)
    if fn is None:
        raise ValueError(f"{choice.value} needs a trained model")
    return partial(fn, pde1d)


def lift(core, pde, U_plus, U_minus, N):
    """Evaluate ``core`` across faces with unit normals ``N``.

    Scalar laws use ``a = beta . N``: the flux is ``a H(u+, u-)`` when
    ``a >= 0`` and ``a H(u-, u+)`` otherwise (mirror image of the Riemann
    problem). Shallow water is rotated into the face frame; the tangential
    momentum is carried by the mass flux and upwinded on its sign.
    """
    U_plus = np.asarray(U_plus, dtype=float)
    U_minus = np.asarray(U_minus, dtype=float)
    N = np.asarray(N, dtype=float)
    if pde.is_burgers:
        a = np.einsum("...d,d->...", N, np.asarray(pde.beta))
        fwd = (a >= 0)[..., None]
        left = np.where(fwd, U_plus, U_minus)
        right = np.where(fwd, U_minus, U_plus)
        return a[..., None] * core(left, right)

    V_plus = rotate_to_normal(pde, U_plus, N)
    V_minus = rotate_to_normal(pde, U_minus, N)
    F1 = core(V_plus[..., :2], V_minus[..., :2])
    if pde.d == 1:
        return rotate_back(pde, F1, N)
    F = np.empty(F1.shape[:-1] + (3,))
    F[..., :2] = F1

    def ut(V):
        h = V[..., 0]
        wet = h > DRY_TOL
        return np.where(wet, V[..., 2] / np.where(wet, h, 1.0), 0.0)

    mass = F1[..., 0]
    F[..., 2] = mass * np.where(mass >= 0, ut(V_plus), ut(V_minus))
    return rotate_back(pde, F, N)
