"""Built-in initial conditions and the experiment setups that use them.

Each initial condition maps centroid coordinates ``(n, d)`` to conserved
cell values ``(n, m)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fvm import BoundaryCondition, make_config
from .mesh import make_pentagon_tri_mesh, make_quad_mesh_rect, make_uniform_grid_1d
from .physics import PdeSystem


def _step(x, left, right):
    return np.where(x < 0.0, left, right)


def burgers_case1(X):
    return _step(X[:, 0], -1.0, 1.0)[:, None]


def burgers_case2(X):
    return _step(X[:, 0], 0.5, -2.5)[:, None]


def burgers_viscous_sine(X):
    return (0.2 + np.sin(2 * np.pi * X[:, 0]) / np.pi)[:, None]


def _swe_step(h_left, h_right, u_left, u_right):
    def ic(X):
        x = X[:, 0]
        h = _step(x, h_left, h_right)
        return np.column_stack([h, h * _step(x, u_left, u_right)])

    return ic


swe_case1 = _swe_step(1.0, 1.0, -0.5, 0.5)
swe_case2 = _swe_step(2.0, 1.0, -0.5, 0.5)
swe_case3 = _swe_step(1.0, 1.0, -1.0, 1.0)


def cosbump_value(r, r_max=0.4):
    r = np.minimum(r, r_max)
    return (np.cos(8 * np.pi * r) + 1) * np.exp(r) / (1 + np.exp(r))


def burgers2d_cosbump(X, r_max=0.4):
    return cosbump_value(np.hypot(X[:, 0], X[:, 1]), r_max)[:, None]


def swe2d_dambreak(X):
    inside = (X[:, 0] - 5) ** 2 + (X[:, 1] - 5) ** 2 <= 6.25
    h = np.where(inside, 3.0, 0.25)
    return np.column_stack([h, np.zeros_like(h), np.zeros_like(h)])


INITIAL_CONDITIONS = {
    "burgers_case1": burgers_case1,
    "burgers_case2": burgers_case2,
    "burgers_viscous_sine": burgers_viscous_sine,
    "swe_case1": swe_case1,
    "swe_case2": swe_case2,
    "swe_case3": swe_case3,
    "burgers2d_cosbump": burgers2d_cosbump,
    "swe2d_dambreak": swe2d_dambreak,
}


def initial_condition(name, **params):
    try:
        ic = INITIAL_CONDITIONS[name]
    except KeyError:
        raise ConfigError(f"unknown initial condition {name!r}") from None
    if params:
        return lambda X: ic(X, **params)
    return ic


@dataclass(frozen=True)
class Setup:
    """Default PDE, mesh, boundary rule and end time for an initial condition."""

    pde: PdeSystem
    mesh_spec: dict
    t_final: float
    periodic: bool = False


SETUPS = {
    "burgers_case1": Setup(PdeSystem.burgers1d(), {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": 200}, 0.75),
    "burgers_case2": Setup(PdeSystem.burgers1d(), {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": 200}, 0.75),
    "burgers_viscous_sine": Setup(
        PdeSystem.burgers1d(viscosity=1e-4), {"kind": "uniform_1d", "x_lo": 0, "x_hi": 1, "n_cells": 104}, 1.0, True
    ),
    "swe_case1": Setup(PdeSystem.swe1d(), {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": 200}, 0.1),
    "swe_case2": Setup(PdeSystem.swe1d(), {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": 200}, 0.2),
    "swe_case3": Setup(PdeSystem.swe1d(), {"kind": "uniform_1d", "x_lo": -1, "x_hi": 1, "n_cells": 200}, 0.1),
    "burgers2d_cosbump": Setup(PdeSystem.burgers2d(), {"kind": "pentagon", "circumradius": 1.0, "n_rings": 21}, 0.4),
    "swe2d_dambreak": Setup(
        PdeSystem.swe2d(), {"kind": "quad", "x_lo": 0, "x_hi": 10, "y_lo": 0, "y_hi": 10, "nx": 40, "ny": 40}, 2.0
    ),
}


def build_mesh(spec):
    spec = dict(spec)
    kind = spec.pop("kind", None)
    try:
        if kind == "uniform_1d":
            return make_uniform_grid_1d(float(spec["x_lo"]), float(spec["x_hi"]), int(spec["n_cells"]))
        if kind == "quad":
            return make_quad_mesh_rect(
                float(spec["x_lo"]), float(spec["x_hi"]), float(spec["y_lo"]), float(spec["y_hi"]),
                int(spec["nx"]), int(spec["ny"]),
            )
        if kind == "pentagon":
            return make_pentagon_tri_mesh(float(spec["circumradius"]), int(spec["n_rings"]))
        if kind == "file":
            from .mesh import read_mesh

            return read_mesh(spec["path"])
    except KeyError as exc:
        raise ConfigError(f"mesh spec is missing field {exc.args[0]!r}") from None
    raise ConfigError(f"unknown mesh kind {kind!r}")


def standard_config(name, flux, model=None, mesh_spec=None, t_final=None, **kwargs):
    """Simulation config for a built-in case with optional overrides."""
    if name not in SETUPS:
        raise ConfigError(f"unknown case {name!r}")
    setup = SETUPS[name]
    mesh = build_mesh(mesh_spec or setup.mesh_spec)
    bc = BoundaryCondition.periodic_pairs(("left", "right")) if setup.periodic else BoundaryCondition()
    return make_config(
        setup.pde, mesh, flux, setup.t_final if t_final is None else t_final, bc, model=model, **kwargs
    )
