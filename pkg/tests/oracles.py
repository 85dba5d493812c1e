"""Independent reference implementations the tests check against.

Everything here is deliberately naive (loops, exhaustive enumeration,
finite differences) and shares no code with the package.
"""

from __future__ import annotations

import numpy as np


def matmul_naive(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Triple-loop matrix product."""
    n, k = x.shape
    k2, m = w.shape
    assert k == k2
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for p in range(k):
                s += x[i, p] * w[p, j]
            out[i, j] = s
    return out


def finite_difference_grad(fn, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function w.r.t. array x.

    Perturbs one element at a time; fn must not retain references to x.
    """
    g = np.zeros_like(x, dtype=np.float64)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + step
        fp = fn()
        flat[idx] = orig - step
        fm = fn()
        flat[idx] = orig
        gflat[idx] = (fp - fm) / (2.0 * step)
    return g


def grad_rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Max absolute difference normalized by the larger gradient scale."""
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def finite_difference_grad_subset(fn, x: np.ndarray, flat_indices, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of fn at the given flat indices of x."""
    flat = x.reshape(-1)
    out = np.zeros(len(flat_indices))
    for k, idx in enumerate(flat_indices):
        orig = flat[idx]
        flat[idx] = orig + step
        fp = fn()
        flat[idx] = orig - step
        fm = fn()
        flat[idx] = orig
        out[k] = (fp - fm) / (2.0 * step)
    return out


def mean_naive(vectors) -> np.ndarray:
    acc = np.zeros_like(np.asarray(vectors[0], dtype=np.float64))
    for v in vectors:
        acc = acc + np.asarray(v, dtype=np.float64)
    return acc / len(vectors)


def softmax_naive(scores: np.ndarray) -> np.ndarray:
    e = np.exp(scores)
    return e / e.sum()


def monotone_paths(n: int, m: int):
    """All warping paths from (0,0) to (n-1,m-1) with steps (1,0),(0,1),(1,1)."""
    paths = []

    def extend(path):
        i, j = path[-1]
        if i == n - 1 and j == m - 1:
            paths.append(list(path))
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < n and nj < m:
                path.append((ni, nj))
                extend(path)
                path.pop()

    extend([(0, 0)])
    return paths


def dtw_bruteforce(cost: np.ndarray) -> float:
    """Minimum summed cost over all monotone warping paths.

    ``cost[i, j]`` is the local cost between step i of X and step j of Y.
    """
    n, m = cost.shape
    best = np.inf
    for path in monotone_paths(n, m):
        total = sum(cost[i, j] for i, j in path)
        best = min(best, total)
    return best


def dfd_bruteforce(dist: np.ndarray) -> float:
    """Minimum over all couplings of the maximum linked-point distance."""
    n, m = dist.shape
    best = np.inf
    for path in monotone_paths(n, m):
        worst = max(dist[i, j] for i, j in path)
        best = min(best, worst)
    return best


def mean_std_twopass(values) -> tuple[float, float]:
    """Two-pass mean and population standard deviation."""
    vals = [float(v) for v in values]
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    return mean, var ** 0.5
