"""Minimal dense numeric kernel: layers with hand-derived gradients plus Adam.

Tensors are plain 2-D float64 C-order ``np.ndarray``s. Every ``*_forward``
is a pure function; backward passes consume the cache returned by the
matching forward and return gradients shaped exactly like their parameters.
Convention for sequence inputs: a single sequence is ``(n, d)`` and a batch
is ``(B, n, d)``; cell-level functions accept ``(d,)`` vectors or ``(B, d)``
batches and return the same rank they were given.

Gate layout for LSTM weight matrices is ``[input, forget, candidate, output]``
concatenated along the last axis, so ``W_x`` is ``(d, 4H)``, ``W_h`` is
``(H, 4H)`` and ``b`` is ``(4H,)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DimensionError, NumericError

Array = np.ndarray


def sigmoid(x: Array) -> Array:
    # piecewise form avoids overflow in exp for large |x|
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> Array:
    """Seeded uniform init in ±1/sqrt(fan_in)."""
    limit = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-limit, limit, size=shape)


# ---------------------------------------------------------------------------
# dense / activation / dropout
# ---------------------------------------------------------------------------

def linear_forward(x: Array, W: Array, b: Array) -> Array:
    """y = x @ W + b, b broadcast over rows."""
    if x.ndim != 2 or W.ndim != 2 or x.shape[1] != W.shape[0]:
        raise DimensionError(f"linear: x {x.shape} incompatible with W {W.shape}")
    if b.shape != (W.shape[1],):
        raise DimensionError(f"linear: b {b.shape} incompatible with W {W.shape}")
    return x @ W + b


def linear_backward(dy: Array, x: Array, W: Array) -> tuple[Array, Array, Array]:
    """Gradients of y = xW + b: returns (dx, dW, db)."""
    dx = dy @ W.T
    dW = x.T @ dy
    db = dy.sum(axis=0)
    return dx, dW, db


def relu_forward(x: Array) -> Array:
    return np.maximum(x, 0.0)


def relu_backward(dy: Array, x: Array) -> Array:
    # tie at exactly 0 passes no gradient
    return dy * (x > 0)


def dropout_forward(
    x: Array, rate: float, mode: str, rng: np.random.Generator | None = None
) -> tuple[Array, Array | None]:
    """Inverted dropout. Returns (output, mask); mask is None in eval mode.

    Train mode zeroes each element independently with probability ``rate``
    and scales survivors by 1/(1-rate), so eval mode is the exact identity.
    """
    if not (0.0 <= rate < 1.0):
        raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
    if mode not in ("train", "eval"):
        raise ConfigError(f"dropout mode must be 'train' or 'eval', got {mode!r}")
    if mode == "eval" or rate == 0.0:
        return x, None
    if rng is None:
        raise ConfigError("train-mode dropout with rate > 0 needs an rng")
    mask = (rng.random(x.shape) >= rate).astype(np.float64)
    return dropout_apply(x, mask, rate), mask


def dropout_apply(x: Array, mask: Array, rate: float) -> Array:
    """Apply a fixed 0/1 mask with the inverted-dropout scale."""
    return x * mask / (1.0 - rate)


def dropout_backward(dy: Array, mask: Array | None, rate: float) -> Array:
    if mask is None:
        return dy
    return dy * mask / (1.0 - rate)


# ---------------------------------------------------------------------------
# LSTM cell
# ---------------------------------------------------------------------------

@dataclass
class LSTMParams:
    """One cell: W_x (d,4H), W_h (H,4H), b (4H,)."""

    W_x: Array
    W_h: Array
    b: Array

    @property
    def hidden(self) -> int:
        return self.W_h.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_x.shape[0]


def init_lstm_params(rng: np.random.Generator, input_dim: int, hidden: int) -> LSTMParams:
    b = np.zeros(4 * hidden)
    b[hidden : 2 * hidden] = 1.0  # forget-gate bias: slow initial state decay
    return LSTMParams(
        W_x=uniform_init(rng, (input_dim, 4 * hidden), input_dim),
        W_h=uniform_init(rng, (hidden, 4 * hidden), hidden),
        b=b,
    )


@dataclass
class LSTMCellCache:
    x: Array
    h_prev: Array
    c_prev: Array
    i: Array
    f: Array
    g: Array
    o: Array
    tanh_c: Array


def lstm_cell_forward(
    x_t: Array, h_prev: Array, c_prev: Array, params: LSTMParams
) -> tuple[Array, Array, LSTMCellCache]:
    """Standard LSTM step: sigmoid input/forget/output gates, tanh candidate.

    c_t = f*c_prev + i*g,  h_t = o*tanh(c_t). The cache keeps the gate
    activations needed by ``lstm_cell_backward``.
    """
    squeeze = x_t.ndim == 1
    x2 = np.atleast_2d(x_t)
    h2 = np.atleast_2d(h_prev)
    c2 = np.atleast_2d(c_prev)
    H = params.hidden
    if x2.shape[1] != params.input_dim:
        raise DimensionError(f"lstm cell: x {x2.shape} vs W_x {params.W_x.shape}")
    if h2.shape[1] != H or c2.shape[1] != H:
        raise DimensionError(f"lstm cell: state {h2.shape}/{c2.shape} vs hidden {H}")
    a = x2 @ params.W_x + h2 @ params.W_h + params.b
    i = sigmoid(a[:, :H])
    f = sigmoid(a[:, H : 2 * H])
    g = np.tanh(a[:, 2 * H : 3 * H])
    o = sigmoid(a[:, 3 * H :])
    c = f * c2 + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    cache = LSTMCellCache(x=x2, h_prev=h2, c_prev=c2, i=i, f=f, g=g, o=o, tanh_c=tanh_c)
    if squeeze:
        return h[0], c[0], cache
    return h, c, cache


def lstm_cell_backward(
    dh: Array, dc: Array, cache: LSTMCellCache, params: LSTMParams
) -> tuple[Array, Array, Array, dict[str, Array]]:
    """Backward through one cell step.

    ``dh``/``dc`` are the gradients flowing into h_t and c_t (dc carries the
    recurrent cell-state path from the future). Returns
    (dx, dh_prev, dc_prev, grads) with grads keyed W_x/W_h/b.
    """
    squeeze = dh.ndim == 1
    dh2 = np.atleast_2d(dh)
    dc2 = np.atleast_2d(dc)
    i, f, g, o, tanh_c = cache.i, cache.f, cache.g, cache.o, cache.tanh_c
    do = dh2 * tanh_c
    dct = dc2 + dh2 * o * (1.0 - tanh_c * tanh_c)
    df = dct * cache.c_prev
    di = dct * g
    dg = dct * i
    dc_prev = dct * f
    da = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    dx = da @ params.W_x.T
    dh_prev = da @ params.W_h.T
    grads = {
        "W_x": cache.x.T @ da,
        "W_h": cache.h_prev.T @ da,
        "b": da.sum(axis=0),
    }
    if squeeze:
        return dx[0], dh_prev[0], dc_prev[0], grads
    return dx, dh_prev, dc_prev, grads


# ---------------------------------------------------------------------------
# unidirectional sequence run (shared by both Bi-LSTM directions and decoder)
# ---------------------------------------------------------------------------

@dataclass
class SequenceCache:
    caches: list[LSTMCellCache]
    outputs: Array  # (B, n, H) hidden state after every step, processing order


def lstm_sequence_forward(
    xs: Array, params: LSTMParams, h0: Array | None = None, c0: Array | None = None
) -> tuple[Array, Array, SequenceCache]:
    """Run a cell over xs (B, n, d) in processing order.

    Returns (h_last, c_last, cache); initial states default to zeros.
    """
    B, n, _ = xs.shape
    H = params.hidden
    h = np.zeros((B, H)) if h0 is None else h0
    c = np.zeros((B, H)) if c0 is None else c0
    caches: list[LSTMCellCache] = []
    outputs = np.empty((B, n, H))
    for t in range(n):
        h, c, cache = lstm_cell_forward(xs[:, t, :], h, c, params)
        caches.append(cache)
        outputs[:, t, :] = h
    return h, c, SequenceCache(caches=caches, outputs=outputs)


def lstm_sequence_backward(
    d_outputs: Array | None,
    d_h_last: Array | None,
    d_c_last: Array | None,
    cache: SequenceCache,
    params: LSTMParams,
) -> tuple[Array, Array, Array, dict[str, Array]]:
    """BPTT over one direction.

    ``d_outputs`` (B, n, H) is the per-step gradient on the hidden outputs
    (None if only final-state gradients flow). Returns
    (d_xs, d_h0, d_c0, grads) with d_xs in processing order.
    """
    caches = cache.caches
    n = len(caches)
    B, H = caches[0].h_prev.shape
    d_xs = np.empty((B, n, caches[0].x.shape[1]))
    grads = {
        "W_x": np.zeros_like(params.W_x),
        "W_h": np.zeros_like(params.W_h),
        "b": np.zeros_like(params.b),
    }
    dh = np.zeros((B, H)) if d_h_last is None else d_h_last.copy()
    dc = np.zeros((B, H)) if d_c_last is None else d_c_last.copy()
    for t in range(n - 1, -1, -1):
        if d_outputs is not None:
            dh = dh + d_outputs[:, t, :]
        dx, dh, dc, g = lstm_cell_backward(dh, dc, caches[t], params)
        d_xs[:, t, :] = dx
        for k in grads:
            grads[k] += g[k]
    return d_xs, dh, dc, grads


# ---------------------------------------------------------------------------
# bidirectional stacked LSTM
# ---------------------------------------------------------------------------

@dataclass
class BiLSTMStackParams:
    fwd: LSTMParams
    bwd: LSTMParams


def init_bilstm_params(
    rng: np.random.Generator, input_dim: int, hidden: int, stacks: int
) -> list[BiLSTMStackParams]:
    layers = []
    d = input_dim
    for _ in range(stacks):
        layers.append(
            BiLSTMStackParams(
                fwd=init_lstm_params(rng, d, hidden),
                bwd=init_lstm_params(rng, d, hidden),
            )
        )
        d = 2 * hidden
    return layers


@dataclass
class BiLSTMCache:
    fwd: list[SequenceCache] = field(default_factory=list)
    bwd: list[SequenceCache] = field(default_factory=list)
    n: int = 0


def bilstm_forward(
    x: Array, params: list[BiLSTMStackParams], pooling: str = "last"
) -> tuple[Array, Array, BiLSTMCache]:
    """Stacked bidirectional pass over x of shape (n, d) or (B, n, d).

    Each stack consumes the per-step concatenation of both directions of the
    stack below. Returns the two directional summaries of the top stack:
    the final hidden state of each direction (``pooling="last"``) or the
    per-direction mean over steps (``pooling="mean"``).
    """
    if pooling not in ("last", "mean"):
        raise ConfigError(f"pooling must be 'last' or 'mean', got {pooling!r}")
    squeeze = x.ndim == 2
    xs = x[None, ...] if squeeze else x
    if xs.ndim != 3:
        raise DimensionError(f"bilstm: expected (n,d) or (B,n,d), got {x.shape}")
    if xs.shape[1] < 1:
        raise DataError("bilstm: empty sequence (n must be >= 1)")
    cache = BiLSTMCache(n=xs.shape[1])
    inp = xs
    h_f = h_b = None
    for layer in params:
        h_f, _, cf = lstm_sequence_forward(inp, layer.fwd)
        h_b, _, cb = lstm_sequence_forward(inp[:, ::-1, :], layer.bwd)
        cache.fwd.append(cf)
        cache.bwd.append(cb)
        # backward-direction outputs are in reversed processing order;
        # flip back to input time order before feeding the next stack
        inp = np.concatenate([cf.outputs, cb.outputs[:, ::-1, :]], axis=2)
    if pooling == "mean":
        h_f = cache.fwd[-1].outputs.mean(axis=1)
        h_b = cache.bwd[-1].outputs.mean(axis=1)
    if squeeze:
        return h_f[0], h_b[0], cache
    return h_f, h_b, cache


def bilstm_backward(
    d_hf: Array,
    d_hb: Array,
    cache: BiLSTMCache,
    params: list[BiLSTMStackParams],
    pooling: str = "last",
) -> tuple[Array, list[dict[str, dict[str, Array]]]]:
    """Backward through the stacked Bi-LSTM.

    ``d_hf``/``d_hb`` are gradients on the two directional summaries returned
    by :func:`bilstm_forward`. Returns (dx, grads) where grads[l] holds
    {"fwd": {...}, "bwd": {...}} for stack l.
    """
    squeeze = d_hf.ndim == 1
    d_hf2 = np.atleast_2d(d_hf)
    d_hb2 = np.atleast_2d(d_hb)
    n = cache.n
    grads: list[dict[str, dict[str, Array]]] = [dict() for _ in params]
    d_steps_f: Array | None = None
    d_steps_b: Array | None = None  # in backward processing order
    d_last_f: Array | None = None
    d_last_b: Array | None = None
    if pooling == "mean":
        d_steps_f = np.repeat(d_hf2[:, None, :] / n, n, axis=1)
        d_steps_b = np.repeat(d_hb2[:, None, :] / n, n, axis=1)
    else:
        d_last_f = d_hf2
        d_last_b = d_hb2
    dx: Array | None = None
    for l in range(len(params) - 1, -1, -1):
        layer = params[l]
        dxf, _, _, gf = lstm_sequence_backward(
            d_steps_f, d_last_f, None, cache.fwd[l], layer.fwd
        )
        dxb_rev, _, _, gb = lstm_sequence_backward(
            d_steps_b, d_last_b, None, cache.bwd[l], layer.bwd
        )
        grads[l] = {"fwd": gf, "bwd": gb}
        dx = dxf + dxb_rev[:, ::-1, :]
        if l > 0:
            H = params[l - 1].fwd.hidden
            d_steps_f = dx[:, :, :H]
            d_steps_b = dx[:, ::-1, H:]
            d_last_f = d_last_b = None
    if squeeze:
        return dx[0], grads
    return dx, grads


# ---------------------------------------------------------------------------
# Adam with bias correction, plus global-norm clipping
# ---------------------------------------------------------------------------

@dataclass
class AdamState:
    """Per-tensor first/second moment accumulators and step counter."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, Array] = field(default_factory=dict)
    v: dict[str, Array] = field(default_factory=dict)


def adam_init(params: dict[str, Array], lr: float = 1e-3, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    for name, p in params.items():
        state.m[name] = np.zeros_like(p)
        state.v[name] = np.zeros_like(p)
    return state


def adam_step(params: dict[str, Array], grads: dict[str, Array], state: AdamState) -> dict[str, Array]:
    """One Adam update; mutates and returns ``params`` (the updated set)."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for tensor {name!r}")
        if g.shape != params[name].shape:
            raise DimensionError(
                f"adam: grad {g.shape} vs param {params[name].shape} for {name!r}"
            )
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for name, g in grads.items():
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        params[name] -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params


def clip_global_norm(grads: dict[str, Array], max_norm: float) -> float:
    """Scale all gradients in place so their global L2 norm is <= max_norm.

    Returns the pre-clip norm.
    """
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    norm = np.sqrt(total)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm
