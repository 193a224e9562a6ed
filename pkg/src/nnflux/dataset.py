"""Training and test data: sampled Riemann data with Godunov targets.

Datasets are columnar: ``u_plus``, ``u_minus``, ``target`` and the optional
``lf`` flux are ``(n, m)`` arrays.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import approx, exact
from .errors import DryStateError, FormatError
from .physics import PdeKind, PdeSystem

# Smallest sampled depth; keeps the Roe average defined at every sample.
MIN_DEPTH = 1e-6


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform sampling of Riemann data.

    For Burgers, ``u_range`` bounds both states. For SWE, depth and velocity
    are drawn in primitive variables from ``h_range`` and ``u_range`` on both
    sides and converted to ``(h, hu)``.
    """

    pde_tag: PdeKind
    sample_count: int
    seed: int
    u_range: tuple = (-3.0, 3.0)
    h_range: tuple = (0.0, 3.5)

    def __post_init__(self):
        object.__setattr__(self, "pde_tag", PdeKind(self.pde_tag))
        if self.pde_tag not in (PdeKind.BURGERS_1D, PdeKind.SWE_1D):
            raise ValueError("sampling is defined for 1D systems")
        if self.h_range[0] < 0:
            raise ValueError("depth range must be non-negative")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")

    @classmethod
    def burgers(cls, sample_count, seed):
        return cls(PdeKind.BURGERS_1D, sample_count, seed, u_range=(-3.0, 3.0))

    @classmethod
    def swe(cls, sample_count, seed):
        return cls(PdeKind.SWE_1D, sample_count, seed, u_range=(-2.5, 2.5), h_range=(0.0, 3.5))


@dataclass(frozen=True)
class FluxSample:
    u_plus: np.ndarray
    u_minus: np.ndarray
    lf_flux: np.ndarray
    target: np.ndarray


@dataclass
class FluxDataset:
    pde_tag: PdeKind
    u_plus: np.ndarray
    u_minus: np.ndarray
    target: np.ndarray
    lf: np.ndarray = None
    lf_solver: str = None

    def __len__(self):
        return self.u_plus.shape[0]

    def __getitem__(self, i):
        lf = None if self.lf is None else self.lf[i]
        return FluxSample(self.u_plus[i], self.u_minus[i], lf, self.target[i])

    @property
    def m(self):
        return self.u_plus.shape[1]


def _depths(rng, lo, hi, n):
    h = rng.uniform(lo, hi, n)
    bad = h < MIN_DEPTH
    while np.any(bad):
        h[bad] = rng.uniform(lo, hi, int(bad.sum()))
        bad = h < MIN_DEPTH
    return h


def _conserved(h, u):
    return np.stack([h, h * u], axis=-1)


def sample_states(spec):
    """Draw ``(U_plus, U_minus)``, each of shape ``(n, m)``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.sample_count
    if spec.pde_tag is PdeKind.BURGERS_1D:
        lo, hi = spec.u_range
        return rng.uniform(lo, hi, (n, 1)), rng.uniform(lo, hi, (n, 1))
    h_p = _depths(rng, *spec.h_range, n)
    h_m = _depths(rng, *spec.h_range, n)
    u_p = rng.uniform(*spec.u_range, n)
    u_m = rng.uniform(*spec.u_range, n)
    return _conserved(h_p, u_p), _conserved(h_m, u_m)


def pde_for(tag, gravity=1.0):
    tag = PdeKind(tag)
    return PdeSystem.swe1d(gravity) if tag is PdeKind.SWE_1D else PdeSystem.burgers1d()


def lf_function(name):
    return {"roe": approx.roe_flux, "hll": approx.hll_flux}[name]


def build_dataset(U_plus, U_minus, pde, with_lf=None):
    """Godunov targets (and optionally LF fluxes) for given state pairs."""
    U_plus = np.asarray(U_plus, dtype=float)
    U_minus = np.asarray(U_minus, dtype=float)
    target = exact.godunov_flux(pde, U_plus, U_minus)
    lf = None
    if with_lf is not None:
        try:
            lf = lf_function(with_lf)(pde, U_plus, U_minus)
        except DryStateError as exc:
            raise DryStateError(
                f"sample {exc.index}: {with_lf} flux undefined for a dry state", index=exc.index
            ) from exc
    return FluxDataset(pde.kind, U_plus, U_minus, target, lf, with_lf)


def rarefaction_scenario_burgers(count, seed):
    """Transonic rarefactions: ``u+ ~ U(-3, 0)`` on the left, ``u- ~ U(0, 3)`` on the right."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-3.0, 0.0, (count, 1)), rng.uniform(0.0, 3.0, (count, 1))


def scenario_one_swe(count, seed):
    """Equal depths ``h ~ U(0, 3)`` with diverging velocities.

    The left state moves left (``u ~ U(-2, 0)``) and the right state moves
    right (``u ~ U(0, 2)``), so every pair opens two rarefactions and the
    depth between them drops below ``h``.
    """
    rng = np.random.default_rng(seed)
    h = _depths(rng, 0.0, 3.0, count)
    u_left = rng.uniform(-2.0, 0.0, count)
    u_right = rng.uniform(0.0, 2.0, count)
    return _conserved(h, u_left), _conserved(h, u_right)


def split_indices(n, test_fraction, seed):
    """Seeded disjoint ``(train, test)`` index partition of ``range(n)``."""
    perm = np.random.default_rng(seed).permutation(n)
    n_test = int(round(test_fraction * n))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def _columns(m, with_lf):
    names = [f"u_plus_{k}" for k in range(m)] + [f"u_minus_{k}" for k in range(m)]
    if with_lf:
        names += [f"lf_{k}" for k in range(m)]
    return names + [f"target_{k}" for k in range(m)]


def write_dataset(path, ds, comments=()):
    """Write a CSV with a header row; ``comments`` become leading ``#`` lines."""
    cols = [ds.u_plus, ds.u_minus] + ([ds.lf] if ds.lf is not None else []) + [ds.target]
    data = np.hstack(cols)
    lines = [f"# {c}" for c in comments]
    lines.append(f"# pde={ds.pde_tag.value} lf_solver={ds.lf_solver or ''}")
    lines.append(",".join(_columns(ds.m, ds.lf is not None)))
    lines += [",".join(repr(float(v)) for v in row) for row in data]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset(path):
    text = Path(path).read_text()
    lines = text.splitlines()
    meta = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        for tok in lines[i][1:].split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                meta[k] = v
        i += 1
    if i >= len(lines) or not lines[i].strip():
        raise FormatError("dataset file has no header", line=i + 1)
    header = lines[i].strip().split(",")
    n_cols = len(header)
    with_lf = any(h.startswith("lf_") for h in header)
    m = n_cols // (4 if with_lf else 3)
    if m < 1 or n_cols % (4 if with_lf else 3) or header != _columns(m, with_lf):
        raise FormatError(f"unexpected dataset header: {lines[i]!r}", line=i + 1)
    rows = []
    for j in range(i + 1, len(lines)):
        if not lines[j].strip():
            continue
        parts = lines[j].split(",")
        if len(parts) != n_cols:
            raise FormatError(f"expected {n_cols} fields, found {len(parts)}", line=j + 1)
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(str(exc), line=j + 1) from exc
    if not rows:
        raise FormatError("dataset file has no samples", line=i + 2)
    data = np.array(rows)
    tag = meta.get("pde") or ("swe1d" if m == 2 else "burgers1d")
    lf = data[:, 2 * m : 3 * m] if with_lf else None
    return FluxDataset(
        PdeKind(tag),
        data[:, :m],
        data[:, m : 2 * m],
        data[:, -m:],
        lf,
        meta.get("lf_solver") or None,
    )
