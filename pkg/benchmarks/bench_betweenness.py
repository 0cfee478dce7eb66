#!/usr/bin/env python3
"""Benchmark the betweenness kernel: jitted path vs pure-Python fallback.

The kernel runs once per simulation round (the graph rewires every round),
so it dominates the runtime of a Monte Carlo experiment. Run with
``python benchmarks/bench_betweenness.py [--nodes N] [--repeat K]``.
"""

import argparse
import time

import numpy as np

from hypersim import _accel
from hypersim.topology import NetworkConfig, compute_reachability, generate_network


def build_csr(n_legit, p, seed):
    cfg = NetworkConfig(
        n_ws=max(1, n_legit // 20),
        n_db=max(1, n_legit // 20),
        n_iot=n_legit - 2 * max(1, n_legit // 20),
        n_lh=0, n_hh=0, p_r=p,
    )
    net = generate_network(cfg, np.random.default_rng(seed))
    alive = net.active_legit_ids()
    pos = {v: k for k, v in enumerate(alive)}
    counts = np.array([len(net.adj[v]) for v in alive], dtype=np.int64)
    indptr = np.zeros(len(alive) + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.zeros(int(indptr[-1]), dtype=np.int64)
    cursor = indptr[:-1].copy()
    for v in alive:
        k = pos[v]
        for j in sorted(net.adj[v]):
            indices[cursor[k]] = pos[j]
            cursor[k] += 1
    return indptr, indices, len(alive)


def bench(fn, indptr, indices, n, repeat):
    fn(indptr, indices, n)  # warmup (and jit compile)
    start = time.perf_counter()
    for _ in range(repeat):
        out = fn(indptr, indices, n)
    return (time.perf_counter() - start) / repeat, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nodes", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--p", type=float, default=0.05)
    args = parser.parse_args()

    indptr, indices, n = build_csr(args.nodes, args.p, seed=1)
    print(f"graph: {n} nodes, {len(indices) // 2} edges")

    t_py, out_py = bench(_accel._betweenness_py, indptr, indices, n, max(1, args.repeat // 10))
    print(f"pure python : {t_py * 1e3:9.3f} ms/call")

    if _accel.USE_NUMBA:
        t_jit, out_jit = bench(_accel.betweenness, indptr, indices, n, args.repeat)
        print(f"numba jit   : {t_jit * 1e3:9.3f} ms/call")
        print(f"speedup     : {t_py / t_jit:9.1f}x")
        same = np.allclose(out_py, out_jit, atol=1e-9)
        print(f"outputs agree: {same}")
        if not same:
            raise SystemExit(1)
    else:
        print("numba path disabled (HYPERSIM_NO_NUMBA set); only the fallback ran")


if __name__ == "__main__":
    main()
