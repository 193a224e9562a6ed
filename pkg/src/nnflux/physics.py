"""PDE systems: Burgers and shallow water in one and two dimensions.

State arrays carry the conserved variables on their last axis, so every
function here accepts a single state of shape ``(m,)`` or a batch of shape
``(..., m)``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DryStateError, InvalidStateError

# Depths below this are treated as dry when recovering velocities.
DRY_TOL = 1e-12


class PdeKind(str, Enum):
    BURGERS_1D = "burgers1d"
    BURGERS_ND = "burgersnd"
    SWE_1D = "swe1d"
    SWE_2D = "swe2d"


@dataclass(frozen=True)
class PdeSystem:
    """A conservation law ``U_t + div F_I(U) = div F_V(U, grad U)``.

    Use the named constructors rather than building this directly.
    """

    kind: PdeKind
    gravity: float = 1.0
    viscosity: float = 0.0
    beta: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "kind", PdeKind(self.kind))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if self.is_swe:
            if not self.gravity > 0:
                raise ValueError("gravity must be positive")
            if self.viscosity != 0:
                raise ValueError("viscosity is only supported for Burgers")
        if self.viscosity < 0:
            raise ValueError("viscosity must be non-negative")
        if self.kind is PdeKind.BURGERS_1D and self.beta != (1.0,):
            raise ValueError("1D Burgers has unit advection")

    @classmethod
    def burgers1d(cls, viscosity=0.0):
        return cls(PdeKind.BURGERS_1D, viscosity=viscosity)

    @classmethod
    def burgers2d(cls, beta=(1.0, 1.0), viscosity=0.0):
        return cls(PdeKind.BURGERS_ND, viscosity=viscosity, beta=tuple(beta))

    @classmethod
    def swe1d(cls, gravity=1.0):
        return cls(PdeKind.SWE_1D, gravity=gravity)

    @classmethod
    def swe2d(cls, gravity=1.0):
        return cls(PdeKind.SWE_2D, gravity=gravity)

    @property
    def is_swe(self):
        return self.kind in (PdeKind.SWE_1D, PdeKind.SWE_2D)

    @property
    def is_burgers(self):
        return not self.is_swe

    @property
    def d(self):
        if self.kind is PdeKind.BURGERS_ND:
            return len(self.beta)
        return 2 if self.kind is PdeKind.SWE_2D else 1

    @property
    def m(self):
        return self.d + 1 if self.is_swe else 1

    def one_d(self):
        """The x-directed 1D system that faces of this PDE reduce to."""
        if self.is_swe:
            return PdeSystem.swe1d(self.gravity)
        return PdeSystem.burgers1d()


def _as_states(pde, U):
    U = np.asarray(U, dtype=float)
    if U.ndim == 0:
        U = U.reshape(1)
    if U.shape[-1] != pde.m:
        raise InvalidStateError(f"expected {pde.m} state components, got {U.shape[-1]}")
    return U


def _as_normal(pde, N):
    N = np.asarray(N, dtype=float)
    if N.ndim == 0:
        N = N.reshape(1)
    if N.shape[-1] != pde.d:
        raise ValueError(f"expected a normal of dimension {pde.d}")
    return N


def velocities(U):
    """Velocity components of SWE states; zero where the depth is dry."""
    h = U[..., 0]
    wet = h > DRY_TOL
    safe_h = np.where(wet, h, 1.0)
    return np.where(wet[..., None], U[..., 1:] / safe_h[..., None], 0.0)


def check_admissible(pde, U):
    U = _as_states(pde, U)
    if pde.is_swe and np.any(U[..., 0] < 0):
        raise InvalidStateError("negative water depth")
    return U


def inviscid_flux(pde, U):
    """Physical inviscid flux ``F_I(U)`` with shape ``(..., m, d)``."""
    U = check_admissible(pde, U)
    if pde.is_burgers:
        u = U[..., 0]
        beta = np.asarray(pde.beta)
        return (0.5 * u**2)[..., None, None] * beta
    g = pde.gravity
    h = U[..., 0]
    vel = velocities(U)
    mom = h[..., None] * vel
    d = pde.d
    F = np.empty(U.shape + (d,))
    F[..., 0, :] = mom
    F[..., 1:, :] = mom[..., :, None] * vel[..., None, :]
    pressure = 0.5 * g * h**2
    for k in range(d):
        F[..., 1 + k, k] += pressure
    return F


def projected_flux(pde, U, N):
    """``F_I(U) N``, shape ``(..., m)``."""
    N = _as_normal(pde, N)
    return np.einsum("...md,...d->...m", inviscid_flux(pde, U), N)


def max_wave_speed(pde, U):
    """Largest characteristic speed magnitude of each state."""
    U = check_admissible(pde, U)
    if pde.is_burgers:
        return np.abs(U[..., 0]) * float(np.linalg.norm(pde.beta))
    h = U[..., 0]
    speed = np.linalg.norm(velocities(U), axis=-1)
    return speed + np.sqrt(pde.gravity * np.maximum(h, 0.0))


@dataclass(frozen=True)
class ProjectedJacobian:
    """``B(U, N)`` with its eigen-decomposition ``R diag(lam) L``."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray
    left_eigenvectors: np.ndarray

    def absolute(self):
        """``|B| = R |Lambda| L``."""
        R = self.right_eigenvectors
        return R @ np.diag(np.abs(self.eigenvalues)) @ self.left_eigenvectors


def projected_jacobian(pde, U, N):
    """Analytic Jacobian of the projected flux at a single state."""
    U = _as_states(pde, U)
    N = _as_normal(pde, N)
    if U.ndim != 1:
        raise ValueError("projected_jacobian takes a single state")
    if pde.is_burgers:
        lam = U[0] * float(np.dot(pde.beta, N))
        A = np.array([[lam]])
        one = np.ones((1, 1))
        return ProjectedJacobian(A, np.array([lam]), one, one.copy())

    h = U[0]
    if not h > 0:
        raise DryStateError("Jacobian undefined for a dry state")
    g = pde.gravity
    c = np.sqrt(g * h)
    if pde.kind is PdeKind.SWE_1D:
        u = U[1] / h
        n = N[0]
        A = n * np.array([[0.0, 1.0], [c**2 - u**2, 2.0 * u]])
        lam = np.array([u * n - c, u * n + c])
        R = np.array([[1.0, 1.0], [u - c * n, u + c * n]])
    else:
        u, v = U[1] / h, U[2] / h
        n1, n2 = N
        un = u * n1 + v * n2
        A = np.array(
            [
                [0.0, n1, n2],
                [c**2 * n1 - u * un, un + u * n1, u * n2],
                [c**2 * n2 - v * un, v * n1, un + v * n2],
            ]
        )
        lam = np.array([un - c, un, un + c])
        R = np.array(
            [
                [1.0, 0.0, 1.0],
                [u - c * n1, -n2, u + c * n1],
                [v - c * n2, n1, v + c * n2],
            ]
        )
    return ProjectedJacobian(A, lam, R, np.linalg.inv(R))


def tangent(N):
    """Counter-clockwise unit tangent ``(-N2, N1)``."""
    N = np.asarray(N, dtype=float)
    return np.stack([-N[..., 1], N[..., 0]], axis=-1)


def rotate_to_normal(pde, U, N):
    """Express momentum in the face frame: ``(h, h u_n, h u_t)``.

    In 1D the frame is just the sign of ``N``. Scalar Burgers states are
    returned unchanged.
    """
    U = _as_states(pde, U)
    if pde.is_burgers:
        return U.copy()
    N = _as_normal(pde, N)
    V = U.copy()
    if pde.d == 1:
        V[..., 1] = U[..., 1] * N[..., 0]
        return V
    mom = U[..., 1:]
    V[..., 1] = np.sum(mom * N, axis=-1)
    V[..., 2] = np.sum(mom * tangent(N), axis=-1)
    return V


def rotate_back(pde, V, N):
    """Inverse of :func:`rotate_to_normal`; also maps fluxes back."""
    V = _as_states(pde, V)
    if pde.is_burgers:
        return V.copy()
    N = _as_normal(pde, N)
    U = V.copy()
    if pde.d == 1:
        U[..., 1] = V[..., 1] * N[..., 0]
        return U
    U[..., 1:] = V[..., 1:2] * N + V[..., 2:3] * tangent(N)
    return U
