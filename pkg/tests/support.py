"""Shared test helpers: independent oracles the implementations are checked against.

Everything here is deliberately written from the definitions, not by calling
the library code under test.
"""
from __future__ import annotations

import numpy as np

from logembed.graph import Graph


def finite_difference(loss_fn, array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences of loss_fn() w.r.t. every entry of `array` (in place)."""
    grad = np.zeros_like(array, dtype=np.float64)
    it = np.nditer(array, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = array[idx]
        array[idx] = orig + h
        up = loss_fn()
        array[idx] = orig - h
        down = loss_fn()
        array[idx] = orig
        grad[idx] = (up - down) / (2.0 * h)
        it.iternext()
    return grad


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6)
    return float((np.abs(a - b) / denom).max())


def dense_pagerank(g: Graph, damping: float, tol: float = 1e-13,
                   max_iter: int = 100000) -> np.ndarray:
    """Full-matrix power iteration; structurally different from the sparse path."""
    n = g.n_nodes
    T = np.zeros((n, n))
    for v in range(n):
        neigh = g.adjacency(v)
        T[neigh, v] = 1.0 / neigh.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = (1.0 - damping) / n + damping * (T @ x)
        if np.abs(new - x).sum() < tol:
            return new
        x = new
    return x


def pairwise_auc(scores, labels) -> float:
    """O(n^2) definition: P(pos > neg) + 0.5 P(pos == neg)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    cmp = pos[:, None] - neg[None, :]
    wins = float((cmp > 0).sum())
    ties = float((cmp == 0).sum())
    return (wins + 0.5 * ties) / (pos.shape[0] * neg.shape[0])


def brute_force_pair_stats(g: Graph, a: int, b: int):
    """Set-based recomputation of the handcrafted pair features."""
    na = set(int(x) for x in g.adjacency(a))
    nb = set(int(x) for x in g.adjacency(b))
    common = len(na & nb)
    union = len(na | nb)
    jaccard = common / union if union else 0.0
    return [common, jaccard, len(na) * len(nb)]


def random_simple_graph(rng: np.random.Generator, n: int, extra_edges: int) -> Graph:
    """Random connected-ish simple graph: a spanning chain plus random extras."""
    from logembed.graph import from_edges

    edges = {(i, i + 1) for i in range(n - 1)}
    tries = 0
    while len(edges) < n - 1 + extra_edges and tries < 50 * extra_edges:
        a, b = rng.integers(0, n, 2)
        tries += 1
        if a == b:
            continue
        edges.add((min(int(a), int(b)), max(int(a), int(b))))
    pairs = np.asarray(sorted(edges), dtype=np.int32)
    return from_edges([str(i) for i in range(n)], pairs)
