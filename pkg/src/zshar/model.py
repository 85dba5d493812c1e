"""Zero-shot activity model: recurrent IMU encoder, matching unit, skeleton decoder.

The encoder maps an IMU window to a feature vector f through a stacked
Bi-LSTM followed by dropout, ReLU and a linear projection into the class
semantic space. Training minimizes

    L = ||f - v_y||  +  lambda * NLL(softmax(f . v_k/||v_k||))  +  alpha * L_R

where L_R is the summed Euclidean distance of two decoded skeleton
sequences (conditioned on f and on v_y) from a reference skeleton of the
sample's class. Inference scores f against unseen-class vectors only and
decodes a skeleton sequence as the explanation.
"""

from __future__ import annotations

import copy
import json
import struct
from dataclasses import asdict, dataclass, field

import numpy as np

from . import metrics, nn
from .data import (
    ClassSemanticSet,
    Dataset,
    FoldSpec,
    ImuWindow,
    SkeletonSequence,
    resample_skeleton,
    train_val_split,
)
from .errors import (
    CheckpointError,
    ConfigError,
    DataError,
    DimensionError,
    NumericError,
)

Array = np.ndarray

CHECKPOINT_MAGIC = b"ZSHAR-CHECKPOINT v1\n"


# ---------------------------------------------------------------------------
# configuration and parameters
# ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    lam: float = 1e-2            # weight of the classification loss
    alpha: float = 0.6           # weight of the reconstruction loss
    learning_rate: float = 1e-3
    epochs: int = 20
    batch: int = 64
    hidden: int = 128
    stacks: int = 2
    dropout: float = 0.1
    seed: int = 0
    decoder_frames: int = 32
    joints: int = 12
    dims: int = 2
    train_fraction: float = 0.9
    pooling: str = "last"        # "last" or "mean" sequence summary
    normalize_features: bool = False  # ablation: unit-normalize f before scoring
    clip_norm: float = 5.0

    def __post_init__(self):
        if self.lam < 0 or self.alpha < 0:
            raise ConfigError("loss weights lam/alpha must be >= 0")
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.epochs < 1 or self.batch < 1 or self.hidden < 1 or self.stacks < 1:
            raise ConfigError("epochs, batch, hidden and stacks must be >= 1")
        if self.decoder_frames < 2 or self.joints < 1 or self.dims < 1:
            raise ConfigError("need decoder_frames >= 2 and joints, dims >= 1")
        if self.pooling not in ("last", "mean"):
            raise ConfigError(f"pooling must be 'last' or 'mean', got {self.pooling!r}")


@dataclass
class DecoderParams:
    W_h0: Array
    b_h0: Array
    W_c0: Array
    b_c0: Array
    token: Array
    cell: nn.LSTMParams
    W_out: Array
    b_out: Array


@dataclass
class ModelParams:
    input_dim: int
    hidden: int
    stacks: int
    embedding_dim: int
    decoder_frames: int
    joints: int
    dims: int
    pooling: str
    normalize_features: bool
    encoder: list[nn.BiLSTMStackParams]
    head_W: Array
    head_b: Array
    decoder: DecoderParams
    norm_mean: Array
    norm_std: Array

    def tensor_dict(self) -> dict[str, Array]:
        """All trainable tensors keyed by stable hierarchical names."""
        out: dict[str, Array] = {}
        for l, layer in enumerate(self.encoder):
            for direction in ("fwd", "bwd"):
                cell = getattr(layer, direction)
                out[f"enc.{l}.{direction}.W_x"] = cell.W_x
                out[f"enc.{l}.{direction}.W_h"] = cell.W_h
                out[f"enc.{l}.{direction}.b"] = cell.b
        out["head.W"] = self.head_W
        out["head.b"] = self.head_b
        d = self.decoder
        out["dec.W_h0"] = d.W_h0
        out["dec.b_h0"] = d.b_h0
        out["dec.W_c0"] = d.W_c0
        out["dec.b_c0"] = d.b_c0
        out["dec.token"] = d.token
        out["dec.cell.W_x"] = d.cell.W_x
        out["dec.cell.W_h"] = d.cell.W_h
        out["dec.cell.b"] = d.cell.b
        out["dec.W_out"] = d.W_out
        out["dec.b_out"] = d.b_out
        return out


def init_model_params(rng: np.random.Generator, input_dim: int, embedding_dim: int,
                      config: TrainConfig) -> ModelParams:
    H = config.hidden
    jk = config.joints * config.dims
    decoder = DecoderParams(
        W_h0=nn.uniform_init(rng, (embedding_dim, H), embedding_dim),
        b_h0=np.zeros(H),
        W_c0=nn.uniform_init(rng, (embedding_dim, H), embedding_dim),
        b_c0=np.zeros(H),
        token=nn.uniform_init(rng, (jk,), jk),
        cell=nn.init_lstm_params(rng, jk, H),
        W_out=nn.uniform_init(rng, (H, jk), H),
        b_out=np.zeros(jk),
    )
    return ModelParams(
        input_dim=input_dim,
        hidden=H,
        stacks=config.stacks,
        embedding_dim=embedding_dim,
        decoder_frames=config.decoder_frames,
        joints=config.joints,
        dims=config.dims,
        pooling=config.pooling,
        normalize_features=config.normalize_features,
        encoder=nn.init_bilstm_params(rng, input_dim, H, config.stacks),
        head_W=nn.uniform_init(rng, (2 * H, embedding_dim), 2 * H),
        head_b=np.zeros(embedding_dim),
        decoder=decoder,
        norm_mean=np.zeros(input_dim),
        norm_std=np.ones(input_dim),
    )


# ---------------------------------------------------------------------------
# encoder
# ---------------------------------------------------------------------------

@dataclass
class _EncodeCache:
    bilstm: nn.BiLSTMCache
    dropped: Array       # dropout output (ReLU input)
    activated: Array     # ReLU output (head linear input)
    mask: Array | None


def _encode_batch(X: Array, params: ModelParams, mode: str,
                  dropout_rate: float = 0.0,
                  rng: np.random.Generator | None = None,
                  mask: Array | None = None) -> tuple[Array, _EncodeCache]:
    """Encode (B, n, d) windows to (B, embedding_dim) features."""
    if X.ndim != 3 or X.shape[2] != params.input_dim:
        raise DimensionError(f"encoder input {X.shape} vs input_dim {params.input_dim}")
    Xn = (X - params.norm_mean) / params.norm_std
    h_f, h_b, bicache = nn.bilstm_forward(Xn, params.encoder, pooling=params.pooling)
    rep = np.concatenate([h_f, h_b], axis=1)
    if mask is not None:
        dropped = nn.dropout_apply(rep, mask, dropout_rate)
    else:
        dropped, mask = nn.dropout_forward(rep, dropout_rate, mode, rng)
    activated = nn.relu_forward(dropped)
    f = nn.linear_forward(activated, params.head_W, params.head_b)
    return f, _EncodeCache(bilstm=bicache, dropped=dropped, activated=activated, mask=mask)


def _encode_backward(dF: Array, cache: _EncodeCache, params: ModelParams,
                     dropout_rate: float, grads: dict[str, Array]) -> None:
    """Accumulate encoder + head gradients into ``grads``."""
    d_act, dW, db = nn.linear_backward(dF, cache.activated, params.head_W)
    grads["head.W"] += dW
    grads["head.b"] += db
    d_drop = nn.relu_backward(d_act, cache.dropped)
    d_rep = nn.dropout_backward(d_drop, cache.mask, dropout_rate)
    H = params.hidden
    _, enc_grads = nn.bilstm_backward(
        d_rep[:, :H], d_rep[:, H:], cache.bilstm, params.encoder, pooling=params.pooling
    )
    for l, layer in enumerate(enc_grads):
        for direction, g in layer.items():
            for tensor, arr in g.items():
                grads[f"enc.{l}.{direction}.{tensor}"] += arr


def encode_imu(x, params: ModelParams, mode: str = "eval",
               rng: np.random.Generator | None = None,
               dropout_rate: float = 0.0) -> Array:
    """High-level feature vector for one IMU window."""
    values = x.values if isinstance(x, ImuWindow) else np.asarray(x, dtype=np.float64)
    f, _ = _encode_batch(values[None, ...], params, mode, dropout_rate, rng)
    return f[0]


# ---------------------------------------------------------------------------
# matching unit
# ---------------------------------------------------------------------------

def _unit_rows(semantics: ClassSemanticSet, classes: list[str]) -> Array:
    rows = []
    for cls in classes:
        v = semantics.vectors[cls]
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise DataError(f"class {cls!r} has a zero-norm semantic vector")
        rows.append(v / norm)
    return np.stack(rows)


def similarity_scores(f: Array, semantics: ClassSemanticSet) -> dict[str, float]:
    """beta_k = f . v_k / ||v_k||; f itself is not normalized."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (semantics.embedding_dim,):
        raise DimensionError(f"feature {f.shape} vs embedding_dim {semantics.embedding_dim}")
    classes = semantics.classes
    beta = _unit_rows(semantics, classes) @ f
    return {cls: float(b) for cls, b in zip(classes, beta)}


def class_probabilities(scores: dict[str, float]) -> dict[str, float]:
    """Stable softmax over the score map."""
    if not scores:
        raise DataError("no classes to normalize over")
    classes = sorted(scores)
    beta = np.array([scores[c] for c in classes])
    beta = beta - beta.max()
    e = np.exp(beta)
    p = e / e.sum()
    return {cls: float(v) for cls, v in zip(classes, p)}


def matching_loss(f: Array, v_y: Array) -> float:
    """Euclidean (not squared) distance between the feature and its target."""
    f = np.asarray(f, dtype=np.float64)
    v_y = np.asarray(v_y, dtype=np.float64)
    if f.shape != v_y.shape:
        raise DimensionError(f"matching loss shapes {f.shape} vs {v_y.shape}")
    return float(np.linalg.norm(f - v_y))


def classification_loss(probabilities: dict[str, float], true_class: str) -> float:
    if true_class not in probabilities:
        raise DataError(f"true class {true_class!r} missing from probability map")
    return float(-np.log(probabilities[true_class]))


def _log_softmax_nll(beta: Array, target_idx: Array) -> tuple[float, Array]:
    """Mean fused -log softmax(beta)[target] and its gradient w.r.t. beta."""
    shifted = beta - beta.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - logsumexp
    B = beta.shape[0]
    loss = float(-log_p[np.arange(B), target_idx].mean())
    dbeta = np.exp(log_p)
    dbeta[np.arange(B), target_idx] -= 1.0
    return loss, dbeta / B


def total_loss(loss_matching: float, loss_classification: float,
               loss_reconstruction: float, lam: float, alpha: float) -> float:
    return loss_matching + lam * loss_classification + alpha * loss_reconstruction


# ---------------------------------------------------------------------------
# skeleton decoder
# ---------------------------------------------------------------------------

@dataclass
class _DecodeCache:
    condition: Array
    seq: nn.SequenceCache
    out: Array  # (B, T, JK) tanh outputs


def _decode_batch(condition: Array, dec: DecoderParams, frames: int) -> tuple[Array, _DecodeCache]:
    """Decode (B, E) conditions to (B, frames, J*K) coordinate rows.

    The condition is linearly mapped to the initial hidden/cell state; the
    step input is a learned constant token; a linear head plus tanh emits
    the per-frame coordinates.
    """
    B = condition.shape[0]
    h0 = condition @ dec.W_h0 + dec.b_h0
    c0 = condition @ dec.W_c0 + dec.b_c0
    xs = np.broadcast_to(dec.token, (B, frames, dec.token.size)).copy()
    _, _, seq_cache = nn.lstm_sequence_forward(xs, dec.cell, h0, c0)
    pre = seq_cache.outputs @ dec.W_out + dec.b_out
    out = np.tanh(pre)
    return out, _DecodeCache(condition=condition, seq=seq_cache, out=out)


def _decode_backward(d_out: Array, cache: _DecodeCache, dec: DecoderParams,
                     grads: dict[str, Array]) -> Array:
    """Accumulate decoder gradients; returns gradient w.r.t. the condition."""
    dz = d_out * (1.0 - cache.out * cache.out)
    B, T, H = cache.seq.outputs.shape
    flat_h = cache.seq.outputs.reshape(B * T, H)
    flat_dz = dz.reshape(B * T, -1)
    grads["dec.W_out"] += flat_h.T @ flat_dz
    grads["dec.b_out"] += flat_dz.sum(axis=0)
    d_hidden = dz @ dec.W_out.T
    d_xs, d_h0, d_c0, cell_grads = nn.lstm_sequence_backward(
        d_hidden, None, None, cache.seq, dec.cell
    )
    grads["dec.cell.W_x"] += cell_grads["W_x"]
    grads["dec.cell.W_h"] += cell_grads["W_h"]
    grads["dec.cell.b"] += cell_grads["b"]
    grads["dec.token"] += d_xs.sum(axis=(0, 1))
    grads["dec.W_h0"] += cache.condition.T @ d_h0
    grads["dec.b_h0"] += d_h0.sum(axis=0)
    grads["dec.W_c0"] += cache.condition.T @ d_c0
    grads["dec.b_c0"] += d_c0.sum(axis=0)
    return d_h0 @ dec.W_h0.T + d_c0 @ dec.W_c0.T


def decode_skeleton(condition: Array, params: ModelParams,
                    frames: int | None = None, class_name: str = "") -> SkeletonSequence:
    """Generate a skeleton sequence from a conditioning vector."""
    condition = np.asarray(condition, dtype=np.float64)
    if condition.shape != (params.embedding_dim,):
        raise DimensionError(
            f"condition {condition.shape} vs embedding_dim {params.embedding_dim}"
        )
    T = frames or params.decoder_frames
    out, _ = _decode_batch(condition[None, :], params.decoder, T)
    coords = out[0].reshape(T, params.joints, params.dims)
    return SkeletonSequence(class_name=class_name, coords=coords)


def reconstruction_loss(generated_f, generated_v, target) -> float:
    """||h_f - h_c|| + ||h_v - h_c|| over the flattened T*J*K values."""
    gf = _flat(generated_f)
    gv = _flat(generated_v)
    tc = _flat(target)
    if gf.shape != tc.shape or gv.shape != tc.shape:
        raise DimensionError(
            f"reconstruction shapes {gf.shape}/{gv.shape} vs target {tc.shape}"
        )
    return float(np.linalg.norm(gf - tc) + np.linalg.norm(gv - tc))


def _flat(seq) -> Array:
    if isinstance(seq, SkeletonSequence):
        return seq.coords.reshape(-1)
    return np.asarray(seq, dtype=np.float64).reshape(-1)


def _norm_grad_rows(diff: Array) -> tuple[Array, Array]:
    """Per-row Euclidean norms and d||row||/d(row) with 0 subgradient at 0."""
    norms = np.linalg.norm(diff, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    return norms, diff / safe[:, None] * (norms > 0.0)[:, None]


# ---------------------------------------------------------------------------
# one training step (pure given its inputs; shared with the gradient checks)
# ---------------------------------------------------------------------------

def compute_batch_loss_and_grads(
    params: ModelParams,
    X: Array,
    target_idx: Array,
    target_vectors: Array,
    unit_seen: Array,
    target_skeletons: Array,
    config: TrainConfig,
    dropout_mask: Array | None = None,
    with_grads: bool = True,
) -> tuple[dict[str, float], dict[str, Array]]:
    """Losses and parameter gradients for one batch.

    X (B,n,d); target_idx indexes rows of unit_seen; target_vectors (B,E)
    are the raw class vectors v_y; target_skeletons (B,T,J*K). The dropout
    mask is supplied by the caller so the step is a deterministic function
    of its arguments. ``with_grads=False`` skips the backward pass.
    """
    B = X.shape[0]
    f, enc_cache = _encode_batch(
        X, params, mode="train" if dropout_mask is not None else "eval",
        dropout_rate=config.dropout, mask=dropout_mask,
    )
    # matching loss: mean_i ||f_i - v_{y_i}||
    norms, dnorm = _norm_grad_rows(f - target_vectors)
    loss_m = float(norms.mean())

    # classification loss via fused log-softmax over seen-class projections
    beta = f @ unit_seen.T
    loss_c, dbeta = _log_softmax_nll(beta, target_idx)

    # reconstruction: decode from f and from v_y, pull both toward h_c
    T = config.decoder_frames
    out_f, cache_f = _decode_batch(f, params.decoder, T)
    out_v, cache_v = _decode_batch(target_vectors, params.decoder, T)
    flat_f = out_f.reshape(B, -1)
    flat_v = out_v.reshape(B, -1)
    flat_c = target_skeletons.reshape(B, -1)
    norms_f, dflat_f = _norm_grad_rows(flat_f - flat_c)
    norms_v, dflat_v = _norm_grad_rows(flat_v - flat_c)
    loss_r = float((norms_f + norms_v).mean())

    losses = {
        "loss_matching": loss_m,
        "loss_classification": loss_c,
        "loss_reconstruction": loss_r,
        "loss_total": total_loss(loss_m, loss_c, loss_r, config.lam, config.alpha),
    }
    if not with_grads:
        return losses, {}

    dF = dnorm / B + config.lam * (dbeta @ unit_seen)
    grads = {k: np.zeros_like(v) for k, v in params.tensor_dict().items()}
    if config.alpha > 0:
        d_out_f = (config.alpha / B) * dflat_f.reshape(out_f.shape)
        d_out_v = (config.alpha / B) * dflat_v.reshape(out_v.shape)
        dF = dF + _decode_backward(d_out_f, cache_f, params.decoder, grads)
        _decode_backward(d_out_v, cache_v, params.decoder, grads)
    _encode_backward(dF, enc_cache, params, config.dropout, grads)
    return losses, grads


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

def _normalization_stats(windows: list[ImuWindow]) -> tuple[Array, Array]:
    stacked = np.concatenate([w.values for w in windows], axis=0)
    mean = stacked.mean(axis=0)
    std = np.maximum(stacked.std(axis=0), 1e-8)
    return mean, std


def _batch_accuracy(params: ModelParams, X: Array, labels: list[str],
                    unit_rows: Array, classes: list[str]) -> float:
    f, _ = _encode_batch(X, params, mode="eval")
    if params.normalize_features:
        f = f / np.maximum(np.linalg.norm(f, axis=1, keepdims=True), 1e-12)
    beta = f @ unit_rows.T
    # argmax over lexicographically sorted classes; first max wins ties
    pred = [classes[i] for i in np.argmax(beta, axis=1)]
    return float(np.mean([p == t for p, t in zip(pred, labels)]))


def train(dataset: Dataset, fold: FoldSpec, config: TrainConfig
          ) -> tuple[ModelParams, list[dict]]:
    """Train on the fold's seen classes; returns best-validation params and log.

    Per epoch, every training sample is matched to a fresh seeded-random
    reference skeleton of its class; the best epoch by validation
    seen-class accuracy supplies the returned parameters.
    """
    classes = set(dataset.classes)
    if set(fold.seen) | set(fold.unseen) != classes or set(fold.seen) & set(fold.unseen):
        raise DataError("fold seen/unseen classes do not partition the dataset classes")
    seen = sorted(fold.seen)
    for cls in seen:
        if not dataset.skeletons.get(cls):
            raise DataError(f"seen class {cls!r} has no skeleton sequences")
    if (dataset.manifest.joints, dataset.manifest.dims) != (config.joints, config.dims):
        raise ConfigError(
            f"config joints/dims ({config.joints}, {config.dims}) do not match "
            f"dataset ({dataset.manifest.joints}, {dataset.manifest.dims})"
        )

    seeds = np.random.SeedSequence(config.seed).spawn(4)
    rng_init = np.random.default_rng(seeds[0])
    rng_shuffle = np.random.default_rng(seeds[1])
    rng_dropout = np.random.default_rng(seeds[2])
    rng_skeleton = np.random.default_rng(seeds[3])

    samples = dataset.windows_for(seen)
    if not samples:
        raise DataError("no labeled IMU samples for the fold's seen classes")
    train_set, val_set = train_val_split(samples, config.train_fraction, seed=config.seed)

    semantics = dataset.semantics
    params = init_model_params(rng_init, dataset.manifest.d, semantics.embedding_dim, config)
    params.norm_mean, params.norm_std = _normalization_stats(train_set)

    class_index = {cls: i for i, cls in enumerate(seen)}
    unit_seen = _unit_rows(semantics, seen)
    raw_vectors = np.stack([semantics.vectors[c] for c in seen])

    X_train = np.stack([w.values for w in train_set])
    y_train = np.array([class_index[w.label] for w in train_set])
    X_val = np.stack([w.values for w in val_set])
    labels_val = [w.label for w in val_set]

    # reference skeletons resampled once to the decoder length
    T = config.decoder_frames
    pools = {
        cls: np.stack([resample_skeleton(s, T).flat() for s in dataset.skeletons[cls]])
        for cls in seen
    }
    # start the decoder at the mean training frame so the few available
    # optimizer steps go into motion rather than the static offset
    mean_frame = np.concatenate([p.reshape(-1, p.shape[-1]) for p in pools.values()]
                                ).mean(axis=0)
    params.decoder.b_out[...] = np.arctanh(np.clip(mean_frame, -0.99, 0.99))

    tensors = params.tensor_dict()
    opt = nn.adam_init(tensors, lr=config.learning_rate)
    log: list[dict] = []
    best_acc = -1.0
    best_params = copy.deepcopy(params)
    n_train = len(train_set)
    rep_width = 2 * config.hidden

    for epoch in range(1, config.epochs + 1):
        order = rng_shuffle.permutation(n_train)
        sums = {"loss_matching": 0.0, "loss_classification": 0.0,
                "loss_reconstruction": 0.0, "loss_total": 0.0}
        for start in range(0, n_train, config.batch):
            idx = order[start : start + config.batch]
            Xb = X_train[idx]
            yb = y_train[idx]
            skel = np.stack([
                pools[seen[y]][rng_skeleton.integers(len(pools[seen[y]]))] for y in yb
            ])
            mask = None
            if config.dropout > 0.0:
                mask = (rng_dropout.random((len(idx), rep_width)) >= config.dropout
                        ).astype(np.float64)
            losses, grads = compute_batch_loss_and_grads(
                params, Xb, yb, raw_vectors[yb], unit_seen, skel, config, dropout_mask=mask
            )
            if not np.isfinite(losses["loss_total"]):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, batch {start // config.batch}: {losses}"
                )
            nn.clip_global_norm(grads, config.clip_norm)
            nn.adam_step(tensors, grads, opt)
            for k in sums:
                sums[k] += losses[k] * len(idx)
        val_acc = _batch_accuracy(params, X_val, labels_val, unit_seen, seen)
        entry = {k: sums[k] / n_train for k in sums}
        entry["epoch"] = epoch
        entry["val_accuracy"] = val_acc
        log.append(entry)
        if val_acc > best_acc:
            best_acc = val_acc
            best_params = copy.deepcopy(params)
    return best_params, log


# ---------------------------------------------------------------------------
# inference and explanation
# ---------------------------------------------------------------------------

@dataclass
class Prediction:
    predicted_class: str
    scores: dict[str, float]
    probabilities: dict[str, float]


@dataclass
class Explanation:
    generated: SkeletonSequence
    predicted_class: str
    matching_seen_class: str
    dtw_to_match: float


def _feature_for_scoring(x, params: ModelParams) -> Array:
    f = encode_imu(x, params, mode="eval")
    if params.normalize_features:
        f = f / max(float(np.linalg.norm(f)), 1e-12)
    return f


def predict_unseen(x, params: ModelParams, unseen: ClassSemanticSet) -> Prediction:
    """Eval-mode encoding scored against the unseen-class vectors only."""
    if not unseen.vectors:
        raise DataError("empty unseen class set")
    f = _feature_for_scoring(x, params)
    scores = similarity_scores(f, unseen)
    probs = class_probabilities(scores)
    best = None
    for cls in sorted(scores):  # lexicographic tie-break
        if best is None or scores[cls] > scores[best]:
            best = cls
    return Prediction(predicted_class=best, scores=scores, probabilities=probs)


def explain(x, params: ModelParams, unseen: ClassSemanticSet,
            references: list[tuple[str, SkeletonSequence]],
            cost_model: metrics.CostModel | None = None) -> Explanation:
    """Predict, decode the explanatory skeleton, and find its matching seen class."""
    if not references:
        raise DataError("empty seen-class reference skeleton set")
    prediction = predict_unseen(x, params, unseen)
    f = encode_imu(x, params, mode="eval")
    generated = decode_skeleton(f, params, class_name=prediction.predicted_class)
    if cost_model is None:
        cost_model = metrics.estimate_cost_model([seq for _, seq in references])
    match_cls, dist = metrics.matching_seen_class(generated, references, cost_model)
    return Explanation(
        generated=generated,
        predicted_class=prediction.predicted_class,
        matching_seen_class=match_cls,
        dtw_to_match=dist,
    )


@dataclass
class EvalResult:
    accuracy: float
    alignment: metrics.AlignmentReport
    realism: metrics.RealismReport
    predictions: list[tuple[str, str, str]]  # (sample id, true, predicted)


def evaluate_fold(dataset: Dataset, fold: FoldSpec, params: ModelParams) -> EvalResult:
    """Zero-shot evaluation over the fold's unseen-class samples."""
    test_windows = dataset.windows_for(fold.unseen)
    if not test_windows:
        raise DataError("no IMU samples labeled with the fold's unseen classes")
    unseen = dataset.semantics.restrict(sorted(fold.unseen))
    references = [
        (cls, seq)
        for cls in sorted(fold.seen)
        for seq in dataset.skeletons[cls]
    ]
    cost_model = metrics.estimate_cost_model([seq for _, seq in references])

    # batch-encode, then decode each sample's explanation
    X = np.stack([w.values for w in test_windows])
    F, _ = _encode_batch(X, params, mode="eval")
    F_score = F
    if params.normalize_features:
        F_score = F / np.maximum(np.linalg.norm(F, axis=1, keepdims=True), 1e-12)
    records = []
    predictions = []
    pairs = []
    for w, f, f_score in zip(test_windows, F, F_score):
        scores = similarity_scores(f_score, unseen)
        best = None
        for cls in sorted(scores):
            if best is None or scores[cls] > scores[best]:
                best = cls
        generated = decode_skeleton(f, params, class_name=best)
        match_cls, dist, best_ref = metrics.match_reference(generated, references, cost_model)
        correct = best == w.label
        records.append(metrics.AlignmentRecord(
            sample_id=w.id, correct=correct, predicted_class=best,
            matching_class=match_cls, distance=dist,
        ))
        predictions.append((w.id, w.label, best))
        # realism compares against the matched reference sequence
        pairs.append((generated, best_ref))
    accuracy = metrics.avg_accuracy_per_class([(t, p) for _, t, p in predictions])
    alignment = metrics.alignment_metrics(records, dataset.superclasses)
    realism = metrics.realism_report(pairs)
    return EvalResult(accuracy=accuracy, alignment=alignment, realism=realism,
                      predictions=predictions)


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(params: ModelParams, config: TrainConfig, path,
                    fold: FoldSpec | None = None, meta: dict | None = None) -> None:
    """Versioned binary container: magic, JSON header, raw float64 buffers."""
    tensors = params.tensor_dict()
    header = {
        "config": asdict(config),
        "fold": fold.to_dict() if fold is not None else None,
        "meta": meta or {},
        "model": {
            "input_dim": params.input_dim,
            "hidden": params.hidden,
            "stacks": params.stacks,
            "embedding_dim": params.embedding_dim,
            "decoder_frames": params.decoder_frames,
            "joints": params.joints,
            "dims": params.dims,
            "pooling": params.pooling,
            "normalize_features": params.normalize_features,
        },
        "norm_mean": params.norm_mean.tolist(),
        "norm_std": params.norm_std.tolist(),
        "tensors": [{"name": k, "shape": list(v.shape)} for k, v in tensors.items()],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for v in tensors.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


@dataclass
class Checkpoint:
    params: ModelParams
    config: TrainConfig
    fold: FoldSpec | None
    meta: dict


def load_checkpoint(path) -> Checkpoint:
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not raw.startswith(CHECKPOINT_MAGIC):
        raise CheckpointError(
            f"{path}: bad magic or unsupported version (expected {CHECKPOINT_MAGIC!r})"
        )
    off = len(CHECKPOINT_MAGIC)
    if len(raw) < off + 8:
        raise CheckpointError(f"{path}: truncated header length")
    (hlen,) = struct.unpack_from("<Q", raw, off)
    off += 8
    if len(raw) < off + hlen:
        raise CheckpointError(f"{path}: truncated JSON header")
    try:
        header = json.loads(raw[off : off + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: corrupt JSON header ({exc})") from exc
    off += hlen

    config = TrainConfig(**header["config"])
    m = header["model"]
    params = init_model_params(
        np.random.default_rng(0), m["input_dim"], m["embedding_dim"], config
    )
    params.pooling = m["pooling"]
    params.normalize_features = m["normalize_features"]
    params.decoder_frames = m["decoder_frames"]
    params.joints = m["joints"]
    params.dims = m["dims"]
    params.norm_mean = np.array(header["norm_mean"], dtype=np.float64)
    params.norm_std = np.array(header["norm_std"], dtype=np.float64)
    tensors = params.tensor_dict()
    listed = [t["name"] for t in header["tensors"]]
    if listed != list(tensors.keys()):
        raise CheckpointError(f"{path}: tensor index does not match this model layout")
    for spec in header["tensors"]:
        arr = tensors[spec["name"]]
        if list(arr.shape) != spec["shape"]:
            raise CheckpointError(
                f"{path}: tensor {spec['name']!r} has shape {spec['shape']}, "
                f"expected {list(arr.shape)}"
            )
        nbytes = arr.size * 8
        if len(raw) < off + nbytes:
            raise CheckpointError(f"{path}: truncated tensor data at {spec['name']!r}")
        arr[...] = np.frombuffer(raw[off : off + nbytes], dtype="<f8").reshape(arr.shape)
        off += nbytes
    if off != len(raw):
        raise CheckpointError(f"{path}: {len(raw) - off} trailing bytes")
    fold = FoldSpec.from_dict(header["fold"]) if header["fold"] else None
    return Checkpoint(params=params, config=config, fold=fold, meta=header["meta"])
