"""Embedding storage and the differentiable pieces of both objectives.

Everything here is a reference implementation in plain NumPy: the sigmoid pair
model, the linear status mappings, the ranked-list loss and the
negative-sampling local term, each with analytic gradients.  The training hot
loops (logembed.kernels) apply the same math; these functions are the ground
truth they are tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "EmbeddingModel",
    "ListGradient",
    "LocalTermGradient",
    "sigmoid",
    "log_sigmoid",
    "init_model",
    "status_value_gine",
    "status_value_log",
    "pair_order_prob",
    "list_loss_given_status",
    "global_list_loss",
    "local_term",
    "softmax_local_objective",
    "final_representation",
    "final_representation_matrix",
    "save_embeddings",
    "load_embeddings",
    "save_status_params",
    "load_status_params",
]


@dataclass
class EmbeddingModel:
    """Source/target representation matrices plus the linear status weights.

    The gine mapping uses only `source` and `w_source`; the log mapping uses
    all four.  Training mutates the arrays in place; see the concurrency notes
    in the trainer for which access patterns are safe.
    """

    source: np.ndarray    # (N, d) float64
    target: np.ndarray    # (N, d) float64
    w_source: np.ndarray  # (d,) float64
    w_target: np.ndarray  # (d,) float64

    @property
    def n_nodes(self) -> int:
        return int(self.source.shape[0])

    @property
    def dim(self) -> int:
        return int(self.source.shape[1])

    def check_finite(self) -> None:
        for name in ("source", "target", "w_source", "w_target"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise FloatingPointError(f"non-finite values in {name}")


@dataclass
class ListGradient:
    """Partials of one ranked-list loss, per list position plus the status weights."""

    nodes: np.ndarray           # (K,) node index per list position
    wrt_source: np.ndarray      # (K, d)
    wrt_w_source: np.ndarray    # (d,)
    wrt_target: np.ndarray | None = None    # (K, d), log mapping only
    wrt_w_target: np.ndarray | None = None  # (d,), log mapping only


@dataclass
class LocalTermGradient:
    """Sparse partials of one negative-sampling term.

    `target_rows` holds the distinct target-matrix rows touched (context plus
    negatives, duplicates merged); `wrt_targets` is aligned with it.
    """

    center: int
    wrt_center: np.ndarray   # (d,)
    target_rows: np.ndarray  # (m,) distinct indices
    wrt_targets: np.ndarray  # (m, d)


def sigmoid(x):
    """Numerically stable logistic function, scalar or array."""
    x = np.asarray(x, dtype=np.float64)
    t = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))
    return float(out) if out.ndim == 0 else out


def log_sigmoid(x):
    """log(sigmoid(x)) without overflow for large |x|."""
    x = np.asarray(x, dtype=np.float64)
    out = np.minimum(x, 0.0) - np.log1p(np.exp(-np.abs(x)))
    return float(out) if out.ndim == 0 else out


def init_model(n_nodes: int, dim: int, rng: np.random.Generator) -> EmbeddingModel:
    """Uniform init in (-0.5/d, +0.5/d) for all four parameter groups.

    Draw order is fixed (source, target, w_source, w_target) so a seeded
    generator reproduces the model exactly.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    source = (rng.random((n_nodes, dim)) - 0.5) / dim
    target = (rng.random((n_nodes, dim)) - 0.5) / dim
    w_source = (rng.random(dim) - 0.5) / dim
    w_target = (rng.random(dim) - 0.5) / dim
    return EmbeddingModel(source, target, w_source, w_target)


def status_value_gine(m: EmbeddingModel, v: int) -> float:
    """Linear status of node v from its source vector alone."""
    return float(m.source[v] @ m.w_source)


def status_value_log(m: EmbeddingModel, v: int) -> float:
    """Linear status of node v from both its source and target vectors."""
    return float(m.source[v] @ m.w_source + m.target[v] @ m.w_target)


def pair_order_prob(f_i: float, f_j: float) -> float:
    """Probability that the node with status f_i outranks the node with status f_j."""
    return sigmoid(f_i - f_j)


def list_loss_given_status(f: np.ndarray):
    """Ranked-list loss and its partials w.r.t. the status values.

    loss = -sum over pairs i<j of log sigmoid(f[i] - f[j]); a list ordered by
    descending status has small loss.  Returns (loss, dloss_df).
    """
    f = np.asarray(f, dtype=np.float64)
    k = f.shape[0]
    if k < 2:
        raise ValueError("a ranked list needs at least two entries")
    diff = f[:, None] - f[None, :]
    iu, ju = np.triu_indices(k, k=1)
    x = diff[iu, ju]
    loss = float(-log_sigmoid(x).sum())
    # d(-log sigmoid(x))/dx = sigmoid(x) - 1
    t = sigmoid(x) - 1.0
    dloss = np.zeros(k)
    np.add.at(dloss, iu, t)
    np.subtract.at(dloss, ju, t)
    return loss, dloss


def _status_values(m: EmbeddingModel, nodes: np.ndarray, mapping: str) -> np.ndarray:
    if mapping == "gine":
        return m.source[nodes] @ m.w_source
    if mapping == "log":
        return m.source[nodes] @ m.w_source + m.target[nodes] @ m.w_target
    raise ValueError(f"unknown mapping {mapping!r}")


def global_list_loss(m: EmbeddingModel, nodes, mapping: str = "gine"):
    """Loss and analytic gradient of one level list under the chosen status mapping.

    `nodes` is a list of K node indices ordered by level (highest status
    first).  Returns (loss, ListGradient).  Raises on lists shorter than 2
    (no pairs to rank).
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    f = _status_values(m, nodes, mapping)
    loss, df = list_loss_given_status(f)
    rows_src = m.source[nodes]
    grad = ListGradient(
        nodes=nodes,
        wrt_source=np.outer(df, m.w_source),
        wrt_w_source=df @ rows_src,
    )
    if mapping == "log":
        grad.wrt_target = np.outer(df, m.w_target)
        grad.wrt_w_target = df @ m.target[nodes]
    return loss, grad


def local_term(m: EmbeddingModel, v: int, ctx: int, negatives):
    """Negative-sampling loss for one (center, context) pair and its gradient.

    loss = -log sigmoid(u.u'_ctx) - sum_n log sigmoid(-u.u'_neg_n).  The
    gradient touches only the center's source row and the context/negative
    target rows; repeated target rows are merged.
    """
    negatives = np.asarray(negatives, dtype=np.int64)
    u = m.source[v]
    targets = np.concatenate(([ctx], negatives)).astype(np.int64)
    scores = m.target[targets] @ u
    signs = np.ones(targets.shape[0])
    signs[1:] = -1.0
    loss = float(-log_sigmoid(signs * scores).sum())
    # coefficient per term: sigmoid(s)-1 for the context, sigmoid(s) for negatives
    coef = sigmoid(scores)
    coef[0] -= 1.0
    wrt_center = coef @ m.target[targets]
    uniq, inv = np.unique(targets, return_inverse=True)
    coef_per_row = np.zeros(uniq.shape[0])
    np.add.at(coef_per_row, inv, coef)
    grad = LocalTermGradient(
        center=int(v),
        wrt_center=wrt_center,
        target_rows=uniq,
        wrt_targets=np.outer(coef_per_row, u),
    )
    return loss, grad


def softmax_local_objective(m: EmbeddingModel, g) -> float:
    """Exact full-softmax neighborhood objective; O(N^2 d), small graphs only.

    Used as a test oracle for the negative-sampling surrogate, never in the
    training path.
    """
    scores = m.source @ m.target.T  # (N, N)
    mx = scores.max(axis=1, keepdims=True)
    lse = (mx[:, 0] + np.log(np.exp(scores - mx).sum(axis=1)))
    total = 0.0
    for v in range(g.n_nodes):
        neigh = g.adjacency(v)
        total -= float(scores[v, neigh].sum() - neigh.shape[0] * lse[v])
    return total


def final_representation(m: EmbeddingModel, v: int, mode: str) -> np.ndarray:
    """gine mode: the source row; log mode: source and target rows concatenated."""
    if mode == "gine":
        return m.source[v].copy()
    if mode == "log":
        return np.concatenate([m.source[v], m.target[v]])
    raise ValueError(f"unknown mode {mode!r}")


def final_representation_matrix(m: EmbeddingModel, mode: str) -> np.ndarray:
    if mode == "gine":
        return m.source.copy()
    if mode == "log":
        return np.hstack([m.source, m.target])
    raise ValueError(f"unknown mode {mode!r}")


def _format_row(values) -> str:
    return " ".join(repr(float(x)) for x in values)


def save_embeddings(path, labels, reps: np.ndarray) -> None:
    """Text export: header "N D", then one `label v1 ... vD` line per node."""
    reps = np.asarray(reps, dtype=np.float64)
    if reps.ndim != 2 or reps.shape[0] != len(labels):
        raise ValueError("representation matrix does not match label count")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{reps.shape[0]} {reps.shape[1]}\n")
        for lab, row in zip(labels, reps):
            fh.write(f"{lab} {_format_row(row)}\n")


def load_embeddings(path):
    """Inverse of save_embeddings: returns (labels, (N, D) float64)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("embedding file missing 'N D' header")
        n, d = int(header[0]), int(header[1])
        labels, rows = [], np.empty((n, d))
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"embedding row {i} has {len(parts) - 1} values, expected {d}")
            labels.append(parts[0])
            rows[i] = [float(x) for x in parts[1:]]
    return labels, rows


def save_status_params(path, w_source: np.ndarray, w_target: np.ndarray) -> None:
    """Sidecar with the two status weight vectors, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_format_row(w_source) + "\n")
        fh.write(_format_row(w_target) + "\n")


def load_status_params(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 2:
        raise ValueError("status parameter file needs two lines (w, w')")
    w_source = np.asarray([float(x) for x in lines[0].split()])
    w_target = np.asarray([float(x) for x in lines[1].split()])
    if w_source.shape != w_target.shape:
        raise ValueError("w and w' have different lengths")
    return w_source, w_target
