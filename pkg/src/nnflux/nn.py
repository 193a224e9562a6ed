"""Small fully connected networks in numpy: forward, backprop, Adam.

Training minimizes the relative l1 (or l2) discrepancy between targets and
``base + net(x)``, where ``base`` is an optional fixed offset per sample.
The offset is how the bi-fidelity model trains on its residual while the
loss stays normalized by the high-fidelity flux.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging

import numpy as np

from .errors import DimensionMismatchError, DivergenceError

log = logging.getLogger(__name__)


class Activation(str, Enum):
    TANH = "tanh"
    RELU = "relu"


class LossNorm(str, Enum):
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class NetworkSpec:
    input_dim: int
    output_dim: int
    hidden_layers: tuple
    activation: Activation = Activation.TANH

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))
        object.__setattr__(self, "activation", Activation(self.activation))
        widths = (self.input_dim, *self.hidden_layers, self.output_dim)
        if any(w < 1 for w in widths):
            raise ValueError("all layer widths must be >= 1")

    @property
    def widths(self):
        return (self.input_dim, *self.hidden_layers, self.output_dim)


@dataclass
class NetworkParameters:
    """Weights ``W[l]`` of shape ``(width_l, width_{l-1})`` and biases ``b[l]``."""

    weights: list
    biases: list
    spec: NetworkSpec
    seed: int = 0

    def __post_init__(self):
        widths = self.spec.widths
        if len(self.weights) != len(widths) - 1 or len(self.biases) != len(widths) - 1:
            raise DimensionMismatchError("layer count does not match spec")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (widths[l + 1], widths[l]) or b.shape != (widths[l + 1],):
                raise DimensionMismatchError(f"layer {l} has shape {W.shape}, {b.shape}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {l} has non-finite entries")

    def arrays(self):
        return [*self.weights, *self.biases]

    def copy(self):
        return NetworkParameters(
            [W.copy() for W in self.weights], [b.copy() for b in self.biases], self.spec, self.seed
        )


@dataclass(frozen=True)
class StepDecay:
    factor: float = 0.5
    every: int = 300

    def __call__(self, lr0, epoch):
        return lr0 * self.factor ** (epoch // self.every)


@dataclass(frozen=True)
class Constant:
    def __call__(self, lr0, epoch):
        return lr0


@dataclass(frozen=True)
class Cosine:
    """Half-cosine decay from ``lr0`` to ``lr0 * floor`` over ``epochs``."""

    epochs: int
    floor: float = 1e-4

    def __call__(self, lr0, epoch):
        frac = min(epoch / max(self.epochs - 1, 1), 1.0)
        return lr0 * (self.floor + (1 - self.floor) * 0.5 * (1 + np.cos(np.pi * frac)))


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1300
    batch_size: int = 1000
    initial_lr: float = 0.01
    schedule: object = field(default_factory=StepDecay)
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    loss_norm: LossNorm = LossNorm.L1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loss_norm", LossNorm(self.loss_norm))
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")
        if not self.adam_eps > 0 or not self.initial_lr > 0:
            raise ValueError("adam_eps and initial_lr must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


@dataclass
class TrainHistory:
    loss: list = field(default_factory=list)
    lr: list = field(default_factory=list)


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros_like(cls, params):
        arrs = params.arrays()
        return cls([np.zeros_like(a) for a in arrs], [np.zeros_like(a) for a in arrs], 0)


def init_params(spec, seed):
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)
    widths = spec.widths
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParameters(weights, biases, spec, seed)


def _act(spec):
    if spec.activation is Activation.TANH:
        return np.tanh, lambda a, z: 1.0 - a * a
    return (lambda z: np.maximum(z, 0.0)), (lambda a, z: (z > 0).astype(float))


def _forward_cache(params, X):
    act, _ = _act(params.spec)
    zs, acts = [], [X]
    a = X
    last = len(params.weights) - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        zs.append(z)
        a = z if l == last else act(z)
        acts.append(a)
    return zs, acts


def forward(params, x):
    """Evaluate the network on one input ``(input_dim,)`` or a batch ``(n, input_dim)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.spec.input_dim:
        raise DimensionMismatchError(
            f"network expects {params.spec.input_dim} inputs, got {x.shape[-1]}"
        )
    single = x.ndim == 1
    X = x.reshape(-1, params.spec.input_dim)
    out = _forward_cache(params, X)[1][-1]
    return out[0] if single else out.reshape(x.shape[:-1] + (params.spec.output_dim,))


def relative_loss(targets, predictions, norm=LossNorm.L1):
    t = np.asarray(targets, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if t.shape != p.shape:
        raise DimensionMismatchError("targets and predictions differ in shape")
    norm = LossNorm(norm)
    if norm is LossNorm.L1:
        den = np.sum(np.abs(t))
        num = np.sum(np.abs(t - p))
    else:
        den = np.sqrt(np.sum(t * t))
        num = np.sqrt(np.sum((t - p) ** 2))
    if den == 0:
        raise ValueError("relative loss undefined for all-zero targets")
    return float(num / den)


def backward(params, X, targets, norm=LossNorm.L1, base=None):
    """Gradient of ``relative_loss(targets, base + net(X))`` w.r.t. all parameters.

    The normalizing sum over ``targets`` is a constant of the batch. Returns
    ``(loss, grads)`` with ``grads`` ordered like ``params.arrays()``.
    """
    X = np.asarray(X, dtype=float)
    T = np.asarray(targets, dtype=float)
    if X.ndim != 2 or X.shape[1] != params.spec.input_dim:
        raise DimensionMismatchError("batch inputs have the wrong shape")
    if T.shape != (X.shape[0], params.spec.output_dim):
        raise DimensionMismatchError("batch targets have the wrong shape")
    zs, acts = _forward_cache(params, X)
    pred = acts[-1] if base is None else acts[-1] + base
    err = pred - T
    norm = LossNorm(norm)
    if norm is LossNorm.L1:
        den = np.sum(np.abs(T))
        loss = np.sum(np.abs(err)) / den
        delta = np.sign(err) / den
    else:
        den = np.sqrt(np.sum(T * T))
        enorm = np.sqrt(np.sum(err * err))
        loss = enorm / den
        delta = err / (enorm * den) if enorm > 0 else np.zeros_like(err)
    if den == 0:
        raise ValueError("relative loss undefined for all-zero targets")

    _, dact = _act(params.spec)
    n_layers = len(params.weights)
    gW = [None] * n_layers
    gb = [None] * n_layers
    for l in range(n_layers - 1, -1, -1):
        gW[l] = delta.T @ acts[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l]) * dact(acts[l], zs[l - 1])
    return float(loss), [*gW, *gb]


def adam_step(params, grads, state, lr, config):
    """One Adam update; returns new ``(params, state)`` and leaves inputs untouched."""
    arrs = params.arrays()
    if len(grads) != len(arrs) or any(g.shape != a.shape for g, a in zip(grads, arrs)):
        raise DimensionMismatchError("gradient structure does not match parameters")
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps
    t = state.t + 1
    m = [b1 * mi + (1 - b1) * g for mi, g in zip(state.m, grads)]
    v = [b2 * vi + (1 - b2) * g * g for vi, g in zip(state.v, grads)]
    c1, c2 = 1 - b1**t, 1 - b2**t
    new = [a - lr * (mi / c1) / (np.sqrt(vi / c2) + eps) for a, mi, vi in zip(arrs, m, v)]
    k = len(params.weights)
    out = NetworkParameters(new[:k], new[k:], params.spec, params.seed)
    return out, AdamState(m, v, t)


def _adam_inplace(arrs, grads, state, lr, b1, b2, eps):
    state.t += 1
    c1, c2 = 1 - b1**state.t, 1 - b2**state.t
    step = lr / c1
    for a, g, m, v in zip(arrs, grads, state.m, state.v):
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        a -= step * m / (np.sqrt(v / c2) + eps)


def train(inputs, targets, spec, config, base=None, params=None, progress=None):
    """Mini-batch Adam on the relative loss.

    Parameters
    ----------
    inputs, targets : array_like
        ``(n, input_dim)`` and ``(n, output_dim)``.
    base : array_like, optional
        Fixed per-sample offset added to the network output (the LF flux for
        bi-fidelity training).
    params : NetworkParameters, optional
        Starting point; defaults to ``init_params(spec, config.seed)``.
    progress : callable, optional
        Called as ``progress(epoch, loss, lr)`` after each epoch.

    Returns
    -------
    (NetworkParameters, TrainHistory)
    """
    X = np.asarray(inputs, dtype=float)
    T = np.asarray(targets, dtype=float)
    B = None if base is None else np.asarray(base, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    if config.batch_size > n:
        raise ValueError("batch_size exceeds dataset size")
    params = init_params(spec, config.seed) if params is None else params.copy()
    state = AdamState.zeros_like(params)
    rng = np.random.default_rng(config.seed)
    hist = TrainHistory()
    arrs = params.arrays()
    # overflow on a diverging run is reported below as DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            lr = config.schedule(config.initial_lr, epoch)
            perm = rng.permutation(n)
            for start in range(0, n, config.batch_size):
                idx = perm[start : start + config.batch_size]
                _, grads = backward(
                    params, X[idx], T[idx], config.loss_norm, None if B is None else B[idx]
                )
                _adam_inplace(
                    arrs, grads, state, lr, config.adam_beta1, config.adam_beta2, config.adam_eps
                )
            pred = forward(params, X)
            if B is not None:
                pred = pred + B
            loss = relative_loss(T, pred, config.loss_norm)
            if not (np.isfinite(loss) and all(np.all(np.isfinite(a)) for a in arrs)):
                raise DivergenceError(f"training loss became non-finite at epoch {epoch}", epoch)
            hist.loss.append(loss)
            hist.lr.append(lr)
            if progress is not None:
                progress(epoch, loss, lr)
    return params, hist


def finite_difference_gradient(params, X, targets, norm=LossNorm.L1, base=None, eps=1e-6):
    """Central-difference gradient of the batch loss, ordered like ``params.arrays()``."""
    work = params.copy()
    grads = []
    for a in work.arrays():
        g = np.zeros_like(a)
        flat, gflat = a.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + eps
            up = backward(work, X, targets, norm, base)[0]
            flat[i] = old - eps
            down = backward(work, X, targets, norm, base)[0]
            flat[i] = old
            gflat[i] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def gradient_relative_error(analytic, numeric, floor=1e-8, scale_fraction=1e-3):
    """Largest entrywise ``|a - n| / max(|a|, |n|, s)`` over all arrays.

    ``s`` is ``scale_fraction`` times the largest analytic entry (but at least
    ``floor``). Exact zeros are common under the l1 loss, where sign terms
    cancel, and central differences return round-off of order
    ``eps |L| / step`` for them; comparing such entries against the overall
    gradient scale keeps that noise from posing as a relative error.
    """
    scale = max((float(np.max(np.abs(a))) for a in analytic if np.size(a)), default=0.0)
    s = max(floor, scale_fraction * scale)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        den = np.maximum(np.maximum(np.abs(a), np.abs(n)), s)
        worst = max(worst, float(np.max(np.abs(a - n) / den)))
    return worst
