"""First-order cell-centered finite volumes with pluggable numerical fluxes.

The semi-discrete update of cell ``K`` is

    dU_K/dt = -(1/|K|) sum_j |dK_j| (H(U_K, U_j, N_j) - F_V . N_j)

with piecewise-constant traces, a two-point viscous face gradient and
forward Euler in time.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, InvalidStateError, NNFluxError, SimulationFailure
from .flux import FluxChoice, core_flux, lift
from .physics import max_wave_speed, rotate_back, rotate_to_normal

# Depths below this (negative) value abort the run.
POSITIVITY_TOL = 1e-12
WAVE_SPEED_FLOOR = 1e-14


class BcRule(str, Enum):
    TRANSMISSIVE = "transmissive"
    PERIODIC = "periodic"
    REFLECTIVE = "reflective"


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-tag rules; ``periodic`` lists tag pairs merged into interior faces."""

    rules: dict = field(default_factory=dict)
    periodic: tuple = ()
    default: BcRule = BcRule.TRANSMISSIVE

    def rule(self, tag):
        return BcRule(self.rules.get(tag, self.default))

    @classmethod
    def transmissive(cls):
        return cls()

    @classmethod
    def periodic_pairs(cls, *pairs):
        return cls(periodic=tuple(tuple(p) for p in pairs))

    def apply(self, mesh):
        """Mesh with periodic pairs merged; checks every remaining tag has a rule."""
        for a, b in self.periodic:
            mesh = mesh.with_periodic(a, b)
        for tag in mesh.boundary_tags():
            if self.rule(tag) is BcRule.PERIODIC:
                raise ConfigError(f"boundary tag {tag!r} marked periodic but not paired")
        return mesh


@dataclass
class SimState:
    U: np.ndarray
    t: float = 0.0


@dataclass
class SimulationConfig:
    """Everything a run needs besides the initial condition.

    ``mesh`` must already have periodic pairs merged (see
    :meth:`BoundaryCondition.apply`); :func:`make_config` does this.
    """

    pde: object
    mesh: object
    flux: FluxChoice
    t_final: float
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)
    cfl: float = 0.4
    snapshot_times: tuple = ()
    model: object = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        self.flux = FluxChoice(self.flux)
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive")
        if self.pde.viscosity > 0 and not self.pde.is_burgers:
            raise ConfigError("viscosity is only supported for Burgers systems")
        if self.flux in (FluxChoice.VNN, FluxChoice.BFNN) and self.model is None:
            raise ConfigError(f"flux {self.flux.value} needs a trained model")
        if self.mesh.dim != self.pde.d:
            raise ConfigError("mesh dimension does not match the PDE")
        for tag in self.mesh.boundary_tags():
            rule = self.bc.rule(tag)
            if rule is BcRule.REFLECTIVE and not self.pde.is_swe:
                raise ConfigError("reflective walls are defined for shallow water only")
            if rule is BcRule.PERIODIC:
                raise ConfigError(f"boundary tag {tag!r} marked periodic but not paired")
        times = sorted(float(t) for t in self.snapshot_times)
        if any(t <= 0 or t > self.t_final for t in times):
            raise ConfigError("snapshot times must lie in (0, t_final]")
        self.snapshot_times = tuple(times)


def make_config(pde, mesh, flux, t_final, bc=None, **kwargs):
    bc = BoundaryCondition() if bc is None else bc
    return SimulationConfig(pde, bc.apply(mesh), flux, t_final, bc, **kwargs)


def face_flux_function(pde, choice, model=None):
    """``H(U+, U-, N)`` for a flux choice on batches of faces."""
    choice = FluxChoice(choice)
    if choice in (FluxChoice.VNN, FluxChoice.BFNN):
        if model is None:
            raise ConfigError(f"flux {choice.value} needs a trained model")
        if pde.one_d().kind is not model.pde_tag:
            raise ConfigError(f"model for {model.pde_tag.value} cannot serve {pde.kind.value}")
        want = "bifidelity" if choice is FluxChoice.BFNN else "vanilla"
        if model.kind.value != want:
            raise ConfigError(f"flux {choice.value} needs a {want} model, got {model.kind.value}")
        core = model
    else:
        core = core_flux(choice, pde.one_d())
    return lambda Up, Um, N: lift(core, pde, Up, Um, N)


def ghost_states(pde, mesh, bc, U):
    """Exterior traces for the boundary faces, in ``mesh.boundary`` order."""
    faces = np.flatnonzero(mesh.boundary)
    inner = U[mesh.face_owner[faces]]
    ghost = inner.copy()
    tags = mesh.face_tags[faces]
    for tag in set(tags.tolist()):
        rule = bc.rule(tag)
        sel = tags == tag
        if rule is BcRule.TRANSMISSIVE:
            continue
        if rule is BcRule.REFLECTIVE:
            if not pde.is_swe:
                raise ConfigError("reflective walls are defined for shallow water only")
            N = mesh.face_normals[faces[sel]]
            V = rotate_to_normal(pde, inner[sel], N)
            V[..., 1] *= -1
            ghost[sel] = rotate_back(pde, V, N)
        else:
            raise ConfigError(f"boundary tag {tag!r} has no usable rule")
    return ghost


def face_fluxes(pde, mesh, bc, U, flux_fn, viscosity=None, t=0.0):
    """Net normal flux ``H - F_V . N`` per face (inviscid minus viscous)."""
    nu = pde.viscosity if viscosity is None else viscosity
    inner = mesh.interior
    bfaces = ~inner
    Up = U[mesh.face_owner]
    Um = np.empty_like(Up)
    Um[inner] = U[mesh.face_neighbor[inner]]
    Um[bfaces] = ghost_states(pde, mesh, bc, U)
    try:
        F = flux_fn(Up, Um, mesh.face_normals)
    except InvalidStateError as exc:
        face = getattr(exc, "index", None)
        cell = None if face is None else int(mesh.face_owner[face])
        raise SimulationFailure(str(exc), t, cell=cell, face=face) from exc
    if nu > 0:
        grad = np.zeros_like(F)
        grad[inner] = (Um[inner] - Up[inner]) / mesh.face_distance[inner, None]
        F = F - nu * grad
    return F


def compute_residual(pde, mesh, state, flux_fn, bc, viscosity=None, return_boundary=False):
    """Per-cell ``dU/dt``.

    With ``return_boundary`` also returns the total outward flux through
    boundary faces, ``sum |dK_j| (H - F_V . N)`` per component.
    """
    U = state.U
    F = face_fluxes(pde, mesh, bc, U, flux_fn, viscosity, state.t)
    w = F * mesh.face_measures[:, None]
    acc = np.zeros_like(U)
    np.add.at(acc, mesh.face_owner, -w)
    inner = mesh.interior
    np.add.at(acc, mesh.face_neighbor[inner], w[inner])
    rate = acc / mesh.cell_measures[:, None]
    if return_boundary:
        return rate, w[~inner].sum(axis=0)
    return rate


def cfl_timestep(pde, mesh, state, cfl, viscosity=None):
    nu = pde.viscosity if viscosity is None else viscosity
    hk = mesh.size_proxy()
    speed = max_wave_speed(pde, state.U)
    dt = cfl * float(np.min(hk / (speed + WAVE_SPEED_FLOOR)))
    if nu > 0:
        dt = min(dt, cfl * float(np.min(hk**2)) / (2 * nu))
    return dt


@dataclass
class SimResult:
    state: SimState
    snapshots: dict
    steps: int
    boundary_outflow: np.ndarray
    initial_total: np.ndarray

    def balance_defect(self, mesh):
        """``total(final) + outflow - total(initial)``; round-off for a conservative run."""
        return conserved_total(mesh, self.state.U) + self.boundary_outflow - self.initial_total


def initial_state(mesh, ic):
    """Cell averages from midpoint evaluation of ``ic`` at the centroids."""
    X = mesh.cell_centroids
    U = np.asarray(ic(X), dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.shape[0] != mesh.n_cells:
        raise ConfigError("initial condition returned the wrong number of cells")
    return SimState(U.copy(), 0.0)


def check_state(pde, state):
    U = state.U
    if not np.all(np.isfinite(U)):
        cell = int(np.flatnonzero(~np.all(np.isfinite(U), axis=1))[0])
        raise SimulationFailure("non-finite cell average", state.t, cell=cell)
    if pde.is_swe:
        h = U[:, 0]
        if np.any(h < -POSITIVITY_TOL):
            cell = int(np.argmin(h))
            raise SimulationFailure(f"negative depth {h[cell]:.3e}", state.t, cell=cell)


def advance(config, state, flux_fn=None, dt=None, t_stop=None):
    """One forward-Euler step; returns ``(new_state, dt, boundary_flux_rate)``."""
    flux_fn = flux_fn or face_flux_function(config.pde, config.flux, config.model)
    if dt is None:
        dt = cfl_timestep(config.pde, config.mesh, state, config.cfl)
        if t_stop is not None and state.t + dt >= t_stop:
            dt = t_stop - state.t
    rate, bflux = compute_residual(
        config.pde, config.mesh, state, flux_fn, config.bc, return_boundary=True
    )
    new = SimState(state.U + dt * rate, state.t + dt)
    check_state(config.pde, new)
    if config.pde.is_swe:
        # round-off negatives within tolerance are set dry
        dry = new.U[:, 0] < 0
        new.U[dry] = 0.0
    return new, dt, bflux


def conserved_total(mesh, U):
    return (mesh.cell_measures[:, None] * U).sum(axis=0)


def run_simulation(config, ic, progress=None):
    """Integrate to ``t_final``; stops exactly at each snapshot time.

    Returns a :class:`SimResult` whose ``boundary_outflow`` is the time
    integral of the boundary flux, so that
    ``total(final) + boundary_outflow == total(initial)`` up to round-off.
    Raises :class:`SimulationFailure` when the run cannot continue.
    """
    state = initial_state(config.mesh, ic) if callable(ic) else SimState(np.array(ic, float), 0.0)
    check_state(config.pde, state)
    flux_fn = face_flux_function(config.pde, config.flux, config.model)
    stops = list(config.snapshot_times)
    if not stops or stops[-1] < config.t_final:
        stops.append(config.t_final)
    snapshots = {}
    outflow = np.zeros(state.U.shape[1])
    total0 = conserved_total(config.mesh, state.U)
    steps = 0
    for t_stop in stops:
        while state.t < t_stop:
            if steps >= config.max_steps:
                raise SimulationFailure("step limit reached", state.t)
            try:
                state, dt, bflux = advance(config, state, flux_fn, t_stop=t_stop)
            except SimulationFailure:
                raise
            except NNFluxError as exc:
                raise SimulationFailure(str(exc), state.t) from exc
            if abs(state.t - t_stop) <= 1e-14 * max(1.0, t_stop):
                state.t = t_stop
            outflow += dt * bflux
            steps += 1
            if progress is not None:
                progress(state.t, steps)
        if t_stop in config.snapshot_times:
            snapshots[t_stop] = state.U.copy()
    return SimResult(state, snapshots, steps, outflow, total0)
