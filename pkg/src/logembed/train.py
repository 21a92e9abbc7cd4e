"""The two SGD trainers.

train_gine learns embeddings from the status ranking alone: a fixed number of
ranked-list gradient steps.  train_log interleaves skip-gram-with-negative-
sampling updates over the edges with probabilistic ranked-list updates on the
joint status mapping.

Determinism contract: with threads=1, identical (graph, levels, config)
produce bit-identical models.  With threads>1 the shuffled visits are sharded
across workers that update the shared model without locks; lost updates are
tolerated and determinism is sacrificed.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import Graph, build_noise_table, sample_negatives
from .model import EmbeddingModel, init_model
from .status import StatusLevels, sample_level_lists

__all__ = ["GineConfig", "LogConfig", "TrainStats", "train_gine", "train_log"]

GINE_BATCH = 2048  # lists per kernel call; partitioning is a pure function of L


@dataclass(frozen=True)
class GineConfig:
    """Hyperparameters for the status-only trainer."""

    n_lists: int              # L, total ranked-list updates
    dim: int = 128
    eta: float = 0.025
    k_levels: int = 60
    seed: int = 42

    def __post_init__(self):
        if self.n_lists < 1:
            raise ValueError("n_lists must be >= 1")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.k_levels < 2:
            raise ValueError("k_levels must be >= 2")


@dataclass(frozen=True)
class LogConfig:
    """Hyperparameters for the joint local+global trainer.

    lam weighs the global task: after each node's neighbor updates, a ranked
    list update fires with probability lam.  The learning rates are constant
    unless lr_decay is set, which fades them linearly to 1e-4 of the base over
    all planned edge visits.
    """

    dim: int = 128
    eta_local: float = 0.025    # learning rate of the neighbor updates
    eta_global: float = 0.0025  # learning rate of the ranked-list updates
    lam: float = 0.3
    n_negative: int = 5
    epochs: int = 5
    k_levels: int = 60
    seed: int = 42
    lr_decay: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.eta_local <= 0 or self.eta_global <= 0:
            raise ValueError("learning rates must be positive")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.n_negative < 0:
            raise ValueError("n_negative must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.k_levels < 2:
            raise ValueError("k_levels must be >= 2")


@dataclass
class TrainStats:
    """Optional counters filled in by train_log."""

    local_updates: int = 0
    global_updates: int = 0
    per_epoch_global: list[int] = field(default_factory=list)


def _worker_rngs(seed: int, n: int) -> list[np.random.Generator]:
    # streams derived from the master seed plus the worker index
    return [np.random.default_rng([seed, 1000 + w]) for w in range(n)]


def train_gine(levels: StatusLevels, cfg: GineConfig, threads: int = 1,
               debug: bool = False) -> EmbeddingModel:
    """Status-only training: exactly cfg.n_lists ranked-list updates.

    Touches only the source matrix and w_source; the target side keeps its
    initialization.  With debug=True the model is checked for NaN/Inf after
    every kernel batch.
    """
    if levels.K != cfg.k_levels:
        raise ValueError(f"levels built with K={levels.K} but config says {cfg.k_levels}")
    n = levels.n_nodes
    if n < cfg.k_levels:
        raise ValueError("need at least K nodes")

    rng = np.random.default_rng(cfg.seed)
    model = init_model(n, cfg.dim, rng)

    if threads <= 1:
        remaining = cfg.n_lists
        while remaining > 0:
            batch = min(GINE_BATCH, remaining)
            lists = sample_level_lists(levels, rng, batch)
            kernels.gine_batch(model.source, model.w_source, lists, cfg.eta)
            remaining -= batch
            if debug:
                model.check_finite()
        return model

    shares = [cfg.n_lists // threads] * threads
    for w in range(cfg.n_lists % threads):
        shares[w] += 1
    rngs = _worker_rngs(cfg.seed, threads)

    def run(w: int) -> None:
        remaining = shares[w]
        while remaining > 0:
            batch = min(GINE_BATCH, remaining)
            lists = sample_level_lists(levels, rngs[w], batch)
            kernels.gine_batch(model.source, model.w_source, lists, cfg.eta)
            remaining -= batch

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(run, range(threads)))
    return model


def _epoch_draws(table, deg, levels: StatusLevels, cfg: LogConfig,
                 rng: np.random.Generator, order: np.ndarray):
    """Pre-draw every random quantity one epoch shard consumes, in fixed order.

    Negatives, gates and level lists are drawn unconditionally so the stream
    is identical whatever lam is; LOG(0) and LOG(0.3) with the same seed share
    the exact same local-update randomness.
    """
    n_edges = int(deg[order].sum())
    negatives = sample_negatives(table, rng, n_edges * cfg.n_negative)
    gate = rng.random(order.shape[0])
    level_lists = sample_level_lists(levels, rng, order.shape[0])
    return negatives, gate, level_lists, n_edges


def train_log(g: Graph, levels: StatusLevels, cfg: LogConfig, threads: int = 1,
              stats: TrainStats | None = None, debug: bool = False) -> EmbeddingModel:
    """Joint local+global training, cfg.epochs passes over the shuffled node set.

    With debug=True the model is checked for NaN/Inf after every epoch.
    """
    if levels.n_nodes != g.n_nodes:
        raise ValueError("levels and graph disagree on the node count")
    if levels.K != cfg.k_levels:
        raise ValueError(f"levels built with K={levels.K} but config says {cfg.k_levels}")

    rng = np.random.default_rng(cfg.seed)
    model = init_model(g.n_nodes, cfg.dim, rng)
    table = build_noise_table(g)
    deg = g.degrees()

    total_edge_visits = max(1, cfg.epochs * 2 * g.n_edges)
    worker_rngs = _worker_rngs(cfg.seed, threads) if threads > 1 else None

    done_edges = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(g.n_nodes)
        epoch_global = 0
        if threads <= 1:
            negatives, gate, lists, n_edges = _epoch_draws(table, deg, levels, cfg, rng, order)
            _, n_global = kernels.log_epoch(
                model.source, model.target, model.w_source, model.w_target,
                g.indptr, g.neighbors, order.astype(np.int64),
                negatives, gate, lists,
                cfg.lam, cfg.eta_local, cfg.eta_global, cfg.n_negative,
                cfg.lr_decay, done_edges, total_edge_visits)
            epoch_global += int(n_global)
            done_edges += n_edges
        else:
            shards = np.array_split(order, threads)
            offsets = np.cumsum([0] + [int(deg[s].sum()) for s in shards])

            def run(w: int) -> int:
                shard = shards[w]
                negatives, gate, lists, _ = _epoch_draws(table, deg, levels, cfg, worker_rngs[w], shard)
                _, n_global = kernels.log_epoch(
                    model.source, model.target, model.w_source, model.w_target,
                    g.indptr, g.neighbors, shard.astype(np.int64),
                    negatives, gate, lists,
                    cfg.lam, cfg.eta_local, cfg.eta_global, cfg.n_negative,
                    cfg.lr_decay, done_edges + offsets[w], total_edge_visits)
                return int(n_global)

            with ThreadPoolExecutor(max_workers=threads) as pool:
                epoch_global += sum(pool.map(run, range(threads)))
            done_edges += int(offsets[-1])

        if stats is not None:
            stats.global_updates += epoch_global
            stats.local_updates += 2 * g.n_edges
            stats.per_epoch_global.append(epoch_global)
        if debug:
            model.check_finite()
    return model
