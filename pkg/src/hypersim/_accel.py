"""Hot numeric kernels: Brandes betweenness centrality over a CSR adjacency.

The jitted path is used by default. Set ``HYPERSIM_NO_NUMBA=1`` before import
to force the pure-Python/NumPy fallback (same contract, much slower); the
benchmark in ``benchmarks/bench_betweenness.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("HYPERSIM_NO_NUMBA", "").strip() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def _betweenness_py(indptr: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
    """Unweighted Brandes betweenness, pure-Python reference path."""
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        # BFS from s, recording shortest-path counts and predecessors.
        sigma = np.zeros(n, dtype=np.float64)
        dist = np.full(n, -1, dtype=np.int64)
        sigma[s] = 1.0
        dist[s] = 0
        order = [s]
        head = 0
        preds: list[list[int]] = [[] for _ in range(n)]
        while head < len(order):
            v = order[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # Dependency accumulation in reverse BFS order.
        delta = np.zeros(n, dtype=np.float64)
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # Each undirected pair was counted from both endpoints.
    return bc / 2.0


if USE_NUMBA:

    @njit(cache=True)
    def _betweenness_jit(indptr, indices, n):  # pragma: no cover - jitted
        bc = np.zeros(n, dtype=np.float64)
        sigma = np.zeros(n, dtype=np.float64)
        dist = np.empty(n, dtype=np.int64)
        order = np.empty(n, dtype=np.int64)
        delta = np.zeros(n, dtype=np.float64)
        # Flat predecessor storage: at most one entry per directed edge.
        pred = np.empty(indices.shape[0], dtype=np.int64)
        pred_ptr = np.empty(n + 1, dtype=np.int64)
        pred_cnt = np.empty(n, dtype=np.int64)
        for s in range(n):
            for i in range(n):
                sigma[i] = 0.0
                dist[i] = -1
                delta[i] = 0.0
                pred_cnt[i] = 0
            pred_ptr[0] = 0
            for i in range(n):
                pred_ptr[i + 1] = pred_ptr[i] + (indptr[i + 1] - indptr[i])
            sigma[s] = 1.0
            dist[s] = 0
            order[0] = s
            size = 1
            head = 0
            while head < size:
                v = order[head]
                head += 1
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        order[size] = w
                        size += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
                        pred[pred_ptr[w] + pred_cnt[w]] = v
                        pred_cnt[w] += 1
            for idx in range(size - 1, -1, -1):
                w = order[idx]
                coeff = (1.0 + delta[w]) / sigma[w]
                for k in range(pred_cnt[w]):
                    v = pred[pred_ptr[w] + k]
                    delta[v] += sigma[v] * coeff
                if w != s:
                    bc[w] += delta[w]
        return bc / 2.0

    def betweenness(indptr: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros(0, dtype=np.float64)
        return _betweenness_jit(
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64),
            n,
        )

else:

    def betweenness(indptr: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros(0, dtype=np.float64)
        return _betweenness_py(
            np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64), n
        )
