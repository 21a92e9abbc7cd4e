"""Node status: PageRank scores, the descending status ranking and K status levels."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "StatusScores",
    "StatusLevels",
    "pagerank",
    "rank_nodes",
    "assign_levels",
    "sample_level_list",
    "sample_level_lists",
    "write_status_csv",
    "read_status_csv",
]


@dataclass(frozen=True)
class StatusScores:
    """PageRank result. Scores sum to 1 and are strictly positive."""

    scores: np.ndarray  # (N,) float64
    iterations_used: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class StatusLevels:
    """K status levels over the descending PageRank ranking.

    Level 1 holds the highest-status nodes.  Buckets are consecutive slices of
    `ranking`; bucket i (1-based) is ranking[bucket_starts[i-1]:bucket_starts[i]].
    """

    level_of: np.ndarray      # (N,) int32 in 1..K
    ranking: np.ndarray       # (N,) int64, descending score order
    bucket_starts: np.ndarray  # (K+1,) int64
    K: int

    @property
    def n_nodes(self) -> int:
        return int(self.ranking.shape[0])

    @property
    def buckets(self) -> list[np.ndarray]:
        return [self.ranking[self.bucket_starts[i]:self.bucket_starts[i + 1]]
                for i in range(self.K)]

    def bucket_sizes(self) -> np.ndarray:
        return np.diff(self.bucket_starts)


def pagerank(g: Graph, damping: float = 0.85, tolerance: float = 1e-10,
             max_iter: int = 1000) -> StatusScores:
    """Power iteration on the undirected random-walk transition with uniform teleport.

    Stops when the L1 change between iterations drops below `tolerance`.  If
    `max_iter` is exhausted first the scores are still returned, flagged
    non-converged; the caller decides what to do.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = g.n_nodes
    if n == 0:
        raise ValueError("empty graph")

    inv_deg = 1.0 / g.degrees().astype(np.float64)
    indptr = g.indptr
    neighbors = g.neighbors
    teleport = (1.0 - damping) / n

    x = np.full(n, 1.0 / n)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        contrib = x * inv_deg
        pulled = np.add.reduceat(contrib[neighbors], indptr[:-1])
        new = teleport + damping * pulled
        residual = float(np.abs(new - x).sum())
        x = new
        if residual < tolerance:
            return StatusScores(x, iterations, residual, True)
    return StatusScores(x, iterations, residual, False)


def rank_nodes(scores) -> np.ndarray:
    """Permutation of node indices by descending score, ties broken by ascending index."""
    if isinstance(scores, StatusScores):
        scores = scores.scores
    scores = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    # stable sort keeps ascending node index within tied scores
    return np.argsort(-scores, kind="stable").astype(np.int64)


def assign_levels(ranking: np.ndarray, K: int) -> StatusLevels:
    """Split the ranking into K consecutive buckets of nearly equal node count.

    The first (N mod K) buckets receive one extra node, so sizes differ by at
    most 1 and every bucket is non-empty.
    """
    ranking = np.asarray(ranking, dtype=np.int64)
    n = ranking.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K must satisfy 1 <= K <= N, got K={K}, N={n}")
    base, extra = divmod(n, K)
    sizes = np.full(K, base, dtype=np.int64)
    sizes[:extra] += 1
    starts = np.zeros(K + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    level_of = np.empty(n, dtype=np.int32)
    for lvl in range(K):
        level_of[ranking[starts[lvl]:starts[lvl + 1]]] = lvl + 1
    return StatusLevels(level_of=level_of, ranking=ranking, bucket_starts=starts, K=K)


def sample_level_list(levels: StatusLevels, rng: np.random.Generator) -> np.ndarray:
    """One node drawn uniformly from each level, ordered level 1..K."""
    picks = rng.integers(0, levels.bucket_sizes())
    return levels.ranking[levels.bucket_starts[:-1] + picks]


def sample_level_lists(levels: StatusLevels, rng: np.random.Generator,
                       count: int) -> np.ndarray:
    """(count, K) int32 batch of level lists; row semantics match sample_level_list."""
    sizes = levels.bucket_sizes()
    picks = rng.integers(0, sizes, size=(count, levels.K))
    return levels.ranking[levels.bucket_starts[:-1] + picks].astype(np.int32)


def write_status_csv(path, g: Graph, scores: StatusScores, levels: StatusLevels) -> None:
    """Export `label,score,rank,level` rows in descending rank order (rank is 1-based)."""
    rank_of = np.empty(levels.n_nodes, dtype=np.int64)
    rank_of[levels.ranking] = np.arange(1, levels.n_nodes + 1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "score", "rank", "level"])
        for pos, v in enumerate(levels.ranking, start=1):
            writer.writerow([g.labels[v], repr(float(scores.scores[v])), pos,
                             int(levels.level_of[v])])


def read_status_csv(path):
    """Read a status CSV back: (labels, scores, ranks, levels) parallel arrays."""
    labels, scores, ranks, lvls = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["label", "score", "rank", "level"]:
            raise ValueError(f"unexpected status CSV header: {header}")
        for row in reader:
            labels.append(row[0])
            scores.append(float(row[1]))
            ranks.append(int(row[2]))
            lvls.append(int(row[3]))
    return labels, np.asarray(scores), np.asarray(ranks), np.asarray(lvls)
