"""Learned Godunov-flux surrogates and their model files.

``Vanilla``: ``H(U+, U-) = net(U+, U-)``.
``BiFidelity``: ``H(U+, U-) = H_L + net(U+, U-, H_L)`` with ``H_L`` a Roe or
HLL flux, so the network only carries the correction to the cheap solver.
"""

from dataclasses import dataclass, field
from enum import Enum
import json
from pathlib import Path

import numpy as np

from . import approx
from .errors import DimensionMismatchError, FormatError
from .flux import lift
from .nn import NetworkParameters, NetworkSpec, forward
from .physics import PdeKind, PdeSystem, check_admissible

FORMAT_TAG = "nnflux-surrogate"
FORMAT_VERSION = 1


class SurrogateKind(str, Enum):
    VANILLA = "vanilla"
    BIFIDELITY = "bifidelity"


class LfSolver(str, Enum):
    ROE = "roe"
    HLL = "hll"


@dataclass(frozen=True)
class SurrogateModel:
    kind: SurrogateKind
    pde_tag: PdeKind
    params: NetworkParameters
    lf_solver: LfSolver = None
    gravity: float = 1.0
    normalized_inputs: bool = False
    # free-form provenance (e.g. the config hash); stored verbatim in the file
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", SurrogateKind(self.kind))
        object.__setattr__(self, "pde_tag", PdeKind(self.pde_tag))
        if self.pde_tag not in (PdeKind.BURGERS_1D, PdeKind.SWE_1D):
            raise ValueError("surrogates are trained on 1D systems")
        if self.kind is SurrogateKind.BIFIDELITY:
            if self.lf_solver is None:
                raise ValueError("bi-fidelity models need an lf_solver")
            object.__setattr__(self, "lf_solver", LfSolver(self.lf_solver))
        elif self.lf_solver is not None:
            raise ValueError("vanilla models have no lf_solver")
        m = self.pde.m
        want = 2 * m if self.kind is SurrogateKind.VANILLA else 3 * m
        spec = self.params.spec
        if spec.input_dim != want or spec.output_dim != m:
            raise DimensionMismatchError(
                f"{self.kind.value} model for {self.pde_tag.value} needs "
                f"{want} inputs and {m} outputs, got {spec.input_dim} and {spec.output_dim}"
            )

    @property
    def pde(self):
        if self.pde_tag is PdeKind.SWE_1D:
            return PdeSystem.swe1d(self.gravity)
        return PdeSystem.burgers1d()

    def lf_flux(self, U_plus, U_minus):
        fn = approx.roe_flux if self.lf_solver is LfSolver.ROE else approx.hll_flux
        return fn(self.pde, U_plus, U_minus)

    def __call__(self, U_plus, U_minus):
        return surrogate_flux_1d(self, U_plus, U_minus)


def features(model, U_plus, U_minus):
    """Network inputs and additive base for a batch of state pairs."""
    U_plus = np.asarray(U_plus, dtype=float)
    U_minus = np.asarray(U_minus, dtype=float)
    if model.kind is SurrogateKind.VANILLA:
        return np.concatenate([U_plus, U_minus], axis=-1), None
    H_L = model.lf_flux(U_plus, U_minus)
    return np.concatenate([U_plus, U_minus, H_L], axis=-1), H_L


def surrogate_flux_1d(model, U_plus, U_minus):
    """x-directed surrogate flux; batch shapes ``(..., m)``."""
    pde = model.pde
    U_plus = check_admissible(pde, U_plus)
    U_minus = check_admissible(pde, U_minus)
    X, base = features(model, U_plus, U_minus)
    out = forward(model.params, X)
    return out if base is None else base + out


def surrogate_flux_nd(model, pde, U_plus, U_minus, N):
    """Surrogate flux across faces with normals ``N`` of a (multi-D) PDE."""
    if pde.one_d().kind is not model.pde_tag:
        raise ValueError(f"model for {model.pde_tag.value} cannot serve {pde.kind.value}")
    return lift(model, pde, U_plus, U_minus, N)


def model_document(model):
    p = model.params
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "kind": model.kind.value,
        "pde": model.pde_tag.value,
        "lf_solver": None if model.lf_solver is None else model.lf_solver.value,
        "gravity": model.gravity,
        "normalized_inputs": model.normalized_inputs,
        "activation": p.spec.activation.value,
        "seed": p.seed,
        "spec": {
            "input_dim": p.spec.input_dim,
            "output_dim": p.spec.output_dim,
            "hidden_layers": list(p.spec.hidden_layers),
        },
        "weights": [W.tolist() for W in p.weights],
        "biases": [b.tolist() for b in p.biases],
        "metadata": dict(model.metadata),
    }


def dumps_model(model):
    return json.dumps(model_document(model), indent=1) + "\n"


def save_model(model, path):
    Path(path).write_text(dumps_model(model))


def model_from_document(doc):
    try:
        if doc.get("format") != FORMAT_TAG:
            raise FormatError("not a surrogate model document")
        if doc.get("version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model version {doc.get('version')}")
        if doc.get("normalized_inputs"):
            raise FormatError("input normalization is not supported")
        s = doc["spec"]
        spec = NetworkSpec(
            int(s["input_dim"]), int(s["output_dim"]), tuple(s["hidden_layers"]), doc["activation"]
        )
        params = NetworkParameters(
            [np.array(W, dtype=float) for W in doc["weights"]],
            [np.array(b, dtype=float) for b in doc["biases"]],
            spec,
            int(doc["seed"]),
        )
        return SurrogateModel(
            kind=doc["kind"],
            pde_tag=doc["pde"],
            params=params,
            lf_solver=doc.get("lf_solver"),
            gravity=float(doc.get("gravity", 1.0)),
            metadata=dict(doc.get("metadata") or {}),
        )
    except DimensionMismatchError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed model document: {exc}") from exc


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise FormatError("model file must hold a JSON object")
    return model_from_document(doc)
