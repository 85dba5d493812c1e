"""Evaluation metrics: macro accuracy, Mahalanobis-cost DTW, alignment, DFD.

Skeleton frames are compared as flattened (J*K,) vectors. The DTW local
cost is the Mahalanobis distance under a covariance estimated from the
seen-class reference skeletons; the Discrete Frechet Distance uses plain
Euclidean frame distances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import SkeletonSequence, SuperClassMap
from .errors import ConfigError, DataError, DimensionError

Array = np.ndarray


# ---------------------------------------------------------------------------
# average accuracy per class (macro-averaged recall over unseen classes)
# ---------------------------------------------------------------------------

def avg_accuracy_per_class(predictions: list[tuple[str, str]]) -> float:
    """Mean over classes of per-class accuracy; input is (true, predicted)."""
    if not predictions:
        raise DataError("no predictions to score")
    totals: dict[str, int] = {}
    correct: dict[str, int] = {}
    for true_cls, pred_cls in predictions:
        totals[true_cls] = totals.get(true_cls, 0) + 1
        correct[true_cls] = correct.get(true_cls, 0) + (1 if pred_cls == true_cls else 0)
    return sum(correct[c] / totals[c] for c in totals) / len(totals)


# ---------------------------------------------------------------------------
# Mahalanobis cost model
# ---------------------------------------------------------------------------

@dataclass
class CostModel:
    """Covariance-weighted frame distance sqrt((a-b)^T (S+eps*I)^-1 (a-b))."""

    S: Array
    eps: float
    inverse: Array = field(init=False)
    _chol: Array = field(init=False, repr=False)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DataError(f"covariance must be square, got {S.shape}")
        if not np.all(np.isfinite(S)):
            raise DataError("covariance has non-finite entries")
        if np.max(np.abs(S - S.T)) > 1e-10:
            raise DataError("covariance is not symmetric within 1e-10")
        if self.eps <= 0.0:
            raise ConfigError(f"regularization eps must be > 0, got {self.eps}")
        self.S = (S + S.T) / 2.0
        reg = self.S + self.eps * np.eye(S.shape[0])
        eigvals = np.linalg.eigvalsh(reg)
        if eigvals[0] <= 0.0:
            raise DataError(f"regularized covariance not positive definite (min eig {eigvals[0]})")
        self.inverse = np.linalg.inv(reg)
        resid = np.max(np.abs(self.inverse @ reg - np.eye(S.shape[0])))
        if resid > 1e-8:
            raise DataError(f"covariance inversion residual {resid:.2e} exceeds 1e-8")
        # lower Cholesky factor of the inverse: distances become Euclidean
        # after projecting frames with it
        self._chol = np.linalg.cholesky(self.inverse)

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    def project(self, frames: Array) -> Array:
        """Map (m, dim) frames so Euclidean distance equals the Mahalanobis cost."""
        return frames @ self._chol


def estimate_cost_model(reference_skeletons: list[SkeletonSequence],
                        eps: float | None = None) -> CostModel:
    """Sample covariance of flattened frames pooled over all references.

    ``eps=None`` picks 1e-6 * trace(S)/dim with a 1e-8 floor so a degenerate
    all-identical-frames input still inverts.
    """
    if not reference_skeletons:
        raise DataError("no reference skeletons for covariance estimation")
    frames = np.concatenate([seq.flat() for seq in reference_skeletons], axis=0)
    if not np.all(np.isfinite(frames)):
        raise DataError("reference skeletons contain non-finite values")
    centered = frames - frames.mean(axis=0)
    S = centered.T @ centered / max(frames.shape[0] - 1, 1)
    if eps is None:
        eps = max(1e-6 * float(np.trace(S)) / S.shape[0], 1e-8)
    return CostModel(S=S, eps=float(eps))


def mahalanobis_cost(a: Array, b: Array, model: CostModel) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape or a.size != model.dim:
        raise DimensionError(
            f"frame lengths {a.shape}/{b.shape} do not match cost model dim {model.dim}"
        )
    diff = a - b
    return float(np.sqrt(diff @ model.inverse @ diff))


# ---------------------------------------------------------------------------
# dynamic time warping
# ---------------------------------------------------------------------------

def _as_frames(seq) -> Array:
    if isinstance(seq, SkeletonSequence):
        return seq.flat()
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    elif arr.ndim == 3:
        arr = arr.reshape(arr.shape[0], -1)
    return arr


def _pairwise_euclidean(u: Array, w: Array) -> Array:
    diff = u[:, None, :] - w[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def dtw_distance(X, Y, model: CostModel) -> float:
    """Cumulative cost of the optimal monotone alignment of X and Y.

    Boundary conditions: D(0,0)=0 and D(i,0)=D(0,j)=inf, so the path runs
    from the first frame pair to the last. O(nm) time, two DP rows.
    """
    xf, yf = _as_frames(X), _as_frames(Y)
    if xf.shape[0] == 0 or yf.shape[0] == 0:
        raise DataError("dtw: empty sequence")
    if xf.shape[1] != yf.shape[1] or xf.shape[1] != model.dim:
        raise DimensionError(
            f"dtw: frame dims {xf.shape[1]}/{yf.shape[1]} vs cost model {model.dim}"
        )
    cost = _pairwise_euclidean(model.project(xf), model.project(yf))
    n, m = cost.shape
    prev = np.full(m + 1, np.inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur = np.empty(m + 1)
        cur[0] = np.inf
        row = cost[i - 1]
        for j in range(1, m + 1):
            cur[j] = row[j - 1] + min(prev[j], cur[j - 1], prev[j - 1])
        prev = cur
    return float(prev[m])


def match_reference(generated, references: list[tuple[str, SkeletonSequence]],
                    model: CostModel) -> tuple[str, float, SkeletonSequence]:
    """Reference with minimum DTW distance; ties break by class name, then order."""
    if not references:
        raise DataError("no reference skeletons to match against")
    best = None
    best_seq = None
    for idx, (cls, seq) in enumerate(references):
        d = dtw_distance(generated, seq, model)
        key = (d, cls, idx)
        if best is None or key < best:
            best = key
            best_seq = seq
    return best[1], best[0], best_seq


def matching_seen_class(generated, references: list[tuple[str, SkeletonSequence]],
                        model: CostModel) -> tuple[str, float]:
    """Class of the reference with minimum DTW distance to the generated sequence."""
    cls, dist, _ = match_reference(generated, references, model)
    return cls, dist


# ---------------------------------------------------------------------------
# alignment metrics (TSA / PSA / OA / ADD)
# ---------------------------------------------------------------------------

@dataclass
class AlignmentRecord:
    sample_id: str
    correct: bool
    predicted_class: str
    matching_class: str
    distance: float

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "correct": self.correct,
            "predicted_class": self.predicted_class,
            "matching_class": self.matching_class,
            "distance": self.distance,
        }


@dataclass
class AlignmentReport:
    tsa: float | None
    psa: float | None
    oa: float | None
    add: float
    records: list[AlignmentRecord]

    def to_dict(self) -> dict:
        return {
            "tsa": self.tsa,
            "psa": self.psa,
            "oa": self.oa,
            "add": self.add,
            "records": [r.to_dict() for r in self.records],
        }


def alignment_metrics(records: list[AlignmentRecord],
                      superclass_map: SuperClassMap) -> AlignmentReport:
    """Super-class alignment percentages of the matching seen classes.

    TSA counts correct predictions whose match shares the target's
    super-class; PSA counts incorrect predictions whose match shares the
    predicted class's super-class; OA counts every sample against the
    predicted class's super-class. Empty denominators yield None, never 0.
    """
    if not records:
        raise DataError("no alignment records")
    t_hits = t_total = p_hits = p_total = o_hits = 0
    for r in records:
        aligned = superclass_map.superclass_of(r.matching_class) == \
            superclass_map.superclass_of(r.predicted_class)
        if r.correct:
            t_total += 1
            t_hits += aligned
        else:
            p_total += 1
            p_hits += aligned
        o_hits += aligned
    return AlignmentReport(
        tsa=100.0 * t_hits / t_total if t_total else None,
        psa=100.0 * p_hits / p_total if p_total else None,
        oa=100.0 * o_hits / len(records),
        add=float(np.mean([r.distance for r in records])),
        records=list(records),
    )


# ---------------------------------------------------------------------------
# discrete Frechet distance
# ---------------------------------------------------------------------------

def dfd(P, Q) -> float:
    """Minimum over couplings of the maximum linked frame distance."""
    pf, qf = _as_frames(P), _as_frames(Q)
    if pf.shape[0] == 0 or qf.shape[0] == 0:
        raise DataError("dfd: empty sequence")
    if pf.shape[1] != qf.shape[1]:
        raise DimensionError(f"dfd: frame dims {pf.shape[1]} vs {qf.shape[1]}")
    dist = _pairwise_euclidean(pf, qf)
    n, m = dist.shape
    prev = np.empty(m)
    for i in range(n):
        cur = np.empty(m)
        for j in range(m):
            if i == 0 and j == 0:
                best = 0.0
            elif i == 0:
                best = cur[j - 1]
            elif j == 0:
                best = prev[j]
            else:
                best = min(prev[j], cur[j - 1], prev[j - 1])
            cur[j] = max(dist[i, j], best)
        prev = cur
    return float(prev[m - 1])


@dataclass
class RealismReport:
    dfd_mean: float
    dfd_std: float
    values: list[float]

    def to_dict(self) -> dict:
        return {"dfd_mean": self.dfd_mean, "dfd_std": self.dfd_std, "values": self.values}


def realism_report(pairs: list[tuple[SkeletonSequence, SkeletonSequence]]) -> RealismReport:
    """Mean and population std of DFD over (generated, reference) pairs."""
    if not pairs:
        raise DataError("no sequence pairs for the realism report")
    values = [dfd(gen, ref) for gen, ref in pairs]
    return RealismReport(
        dfd_mean=float(np.mean(values)),
        dfd_std=float(np.std(values)),
        values=values,
    )


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------

def _cell(v: float | None) -> str:
    return "n/a" if v is None else f"{v:.2f}"


def render_alignment_table(reports: dict[str, AlignmentReport]) -> str:
    """Aligned-column text table: rows are dataset names, columns TSA/PSA/OA/ADD."""
    rows = [("Dataset", "TSA", "PSA", "OA", "ADD")]
    for name in reports:
        r = reports[name]
        rows.append((name, _cell(r.tsa), _cell(r.psa), _cell(r.oa), f"{r.add:.2f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in rows)


def render_realism_table(reports: dict[str, RealismReport]) -> str:
    rows = [("Metric",) + tuple(reports)]
    rows.append(("DFD-Mean",) + tuple(f"{r.dfd_mean:.3f}" for r in reports.values()))
    rows.append(("DFD-std",) + tuple(f"{r.dfd_std:.3f}" for r in reports.values()))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in rows)


def report_to_json(accuracy: float, alignment: AlignmentReport, realism: RealismReport,
                   meta: dict) -> str:
    doc = {
        "average_accuracy_per_class": accuracy,
        "alignment": alignment.to_dict(),
        "realism": realism.to_dict(),
        "meta": meta,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
