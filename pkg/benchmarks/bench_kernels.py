#!/usr/bin/env python3
"""Benchmark the compiled training kernels against the pure-Python fallback.

Runs the two hot loops (ranked-list batches and a full local+global epoch) on
a synthetic scale-free graph with both backends and prints the speedup.

    python benchmarks/bench_kernels.py [--nodes 5000] [--dim 128] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from logembed import _inner_py
from logembed.evaluation import scale_free_graph
from logembed.graph import build_noise_table, sample_negatives
from logembed.model import init_model
from logembed.status import assign_levels, pagerank, rank_nodes, sample_level_lists

try:
    from logembed import _inner
except ImportError:
    _inner = None


def time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_gine(impl, g, levels, dim, n_lists, repeat):
    lists = sample_level_lists(levels, np.random.default_rng(0), n_lists)

    def run():
        m = init_model(g.n_nodes, dim, np.random.default_rng(1))
        impl.gine_batch(m.source, m.w_source, lists, 0.025)

    return time_call(run, repeat)


def bench_log_epoch(impl, g, levels, dim, n_neg, repeat):
    rng = np.random.default_rng(0)
    order = rng.permutation(g.n_nodes).astype(np.int64)
    n_edges = int(g.degrees()[order].sum())
    table = build_noise_table(g)
    negatives = sample_negatives(table, rng, n_edges * n_neg)
    gate = rng.random(g.n_nodes)
    lists = sample_level_lists(levels, rng, g.n_nodes)

    def run():
        m = init_model(g.n_nodes, dim, np.random.default_rng(1))
        impl.log_epoch(m.source, m.target, m.w_source, m.w_target,
                       g.indptr, g.neighbors, order, negatives, gate, lists,
                       0.3, 0.025, 0.0025, n_neg, False, 0, n_edges)

    return time_call(run, repeat), n_edges


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=5000)
    ap.add_argument("--dim", type=int, default=128)
    ap.add_argument("--levels", type=int, default=60)
    ap.add_argument("--lists", type=int, default=5000)
    ap.add_argument("--negatives", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = scale_free_graph(args.nodes, 5, 0)
    levels = assign_levels(rank_nodes(pagerank(g)), args.levels)
    print(f"graph: N={g.n_nodes} M={g.n_edges}  dim={args.dim} "
          f"K={args.levels} negatives={args.negatives}")

    rows = []
    t_py = bench_gine(_inner_py, g, levels, args.dim, args.lists, args.repeat)
    rows.append(("gine_batch  (%d lists)" % args.lists, t_py, None))
    if _inner is not None:
        t_c = bench_gine(_inner, g, levels, args.dim, args.lists, args.repeat)
        rows[-1] = (rows[-1][0], t_py, t_c)

    (t_py, n_edges) = bench_log_epoch(_inner_py, g, levels, args.dim,
                                      args.negatives, args.repeat)
    rows.append(("log_epoch  (%d edge visits)" % n_edges, t_py, None))
    if _inner is not None:
        t_c, _ = bench_log_epoch(_inner, g, levels, args.dim, args.negatives,
                                 args.repeat)
        rows[-1] = (rows[-1][0], t_py, t_c)

    print(f"{'kernel':<34}{'python':>10}{'cython':>10}{'speedup':>9}")
    for name, py, cy in rows:
        if cy is None:
            print(f"{name:<34}{py:>9.3f}s{'n/a':>10}{'':>9}")
        else:
            print(f"{name:<34}{py:>9.3f}s{cy:>9.3f}s{py / cy:>8.1f}x")
    if _inner is None:
        print("compiled backend not built; run `python setup.py build_ext --inplace`")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
