"""The link-prediction harness and status-preservation diagnostics.

Covers the full protocol: degree-guarded edge removal, balanced labeled pair
sets, edge representations (element-wise sum), the handcrafted-feature
baseline, an in-house logistic-regression classifier, accuracy/AUC, Spearman
correlation and the status scatter export.  Synthetic scale-free fixtures
live here too.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import Graph, from_edges
from .model import final_representation_matrix, sigmoid
from .status import assign_levels, pagerank, rank_nodes
from .train import GineConfig, LogConfig, train_gine, train_log

__all__ = [
    "LabeledPairSet",
    "LinearClassifier",
    "LinkPredictionReport",
    "EdgeSplit",
    "split_edges",
    "build_pair_sets",
    "edge_representation",
    "embedding_pair_features",
    "hfb_features",
    "hfb_feature_matrix",
    "FeatureScaler",
    "fit_classifier",
    "evaluate",
    "accuracy_score",
    "auc_score",
    "spearman",
    "status_scatter",
    "write_scatter_csv",
    "scale_free_graph",
    "run_link_prediction",
    "report_row",
    "validate_report",
    "save_pair_set",
    "load_pair_set",
]


@dataclass(frozen=True)
class LabeledPairSet:
    """Node pairs with binary labels; positives and negatives in equal number."""

    pairs: np.ndarray   # (n, 2) int32
    labels: np.ndarray  # (n,) int8, 1 = linked
    purpose: str        # "train" | "test"

    def __post_init__(self):
        if self.pairs.shape[0] != self.labels.shape[0]:
            raise ValueError("pairs and labels differ in length")
        n_pos = int((self.labels == 1).sum())
        if 2 * n_pos != self.labels.shape[0]:
            raise ValueError("pair set is not class-balanced")

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])


@dataclass
class LinearClassifier:
    weights: np.ndarray
    bias: float
    iterations_used: int = 0
    grad_norm: float = float("nan")

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_scores(X))


@dataclass(frozen=True)
class LinkPredictionReport:
    accuracy: float
    auc: float
    removed_fraction: float
    method: str

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy out of range")
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError("auc out of range")


@dataclass(frozen=True)
class EdgeSplit:
    train: Graph
    removed: np.ndarray       # (R, 2) int32
    target_count: int
    achieved_fraction: float
    hit_target: bool


def split_edges(g: Graph, fraction: float, rng: np.random.Generator) -> EdgeSplit:
    """Remove ~fraction of the edges while keeping every node's degree >= 1.

    Edges are visited in one shuffled pass; an edge is removed only if both
    endpoints still have degree >= 2.  If the pass ends before the target
    count is reached the split is returned with hit_target=False (degrees make
    the target infeasible for this order); never an error.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    m = g.n_edges
    target = int(fraction * m)
    deg = g.degrees()
    removed_mask = np.zeros(m, dtype=bool)
    removed = 0
    edges = g.edges
    for e in rng.permutation(m):
        if removed == target:
            break
        a, b = int(edges[e, 0]), int(edges[e, 1])
        if deg[a] >= 2 and deg[b] >= 2:
            deg[a] -= 1
            deg[b] -= 1
            removed_mask[e] = True
            removed += 1
    train = from_edges(g.labels, edges[~removed_mask])
    return EdgeSplit(
        train=train,
        removed=edges[removed_mask].copy(),
        target_count=target,
        achieved_fraction=removed / m,
        hit_target=removed == target,
    )


def _canonical_keys(pairs: np.ndarray, n: int) -> np.ndarray:
    a = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    b = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    return a * n + b


def build_pair_sets(original: Graph, train: Graph, removed: np.ndarray,
                    rng: np.random.Generator):
    """Labeled train/test pair sets for link prediction.

    Positives: the remaining edges (train) and the removed edges (test).
    Negatives: uniformly drawn node pairs that are NOT edges of the original
    graph, distinct, disjoint between the two sets, matching the positive
    counts.  Raises when the graph is too dense to supply enough negatives.
    """
    n = original.n_nodes
    removed = np.asarray(removed, dtype=np.int32).reshape(-1, 2)
    n_train_pos = train.n_edges
    n_test_pos = removed.shape[0]
    need = n_train_pos + n_test_pos
    possible = n * (n - 1) // 2 - original.n_edges
    if need > possible:
        raise ValueError(
            f"graph too dense: need {need} negative pairs but only {possible} non-edges exist")

    forbidden = set(_canonical_keys(original.edges, n).tolist())
    chosen: set[int] = set()
    neg_pairs = np.empty((need, 2), dtype=np.int32)
    got = 0
    while got < need:
        batch = max(1024, 2 * (need - got))
        u = rng.integers(0, n, size=batch)
        v = rng.integers(0, n, size=batch)
        ok = u != v
        for a, b in zip(u[ok], v[ok]):
            if got == need:
                break
            lo, hi = (int(a), int(b)) if a < b else (int(b), int(a))
            key = lo * n + hi
            if key in forbidden or key in chosen:
                continue
            chosen.add(key)
            neg_pairs[got, 0] = lo
            neg_pairs[got, 1] = hi
            got += 1

    def make(pos: np.ndarray, neg: np.ndarray, purpose: str) -> LabeledPairSet:
        pairs = np.vstack([pos, neg]).astype(np.int32)
        labels = np.zeros(pairs.shape[0], dtype=np.int8)
        labels[:pos.shape[0]] = 1
        return LabeledPairSet(pairs=pairs, labels=labels, purpose=purpose)

    train_set = make(train.edges, neg_pairs[:n_train_pos], "train")
    test_set = make(removed, neg_pairs[n_train_pos:], "test")
    return train_set, test_set


def edge_representation(rep_a: np.ndarray, rep_b: np.ndarray) -> np.ndarray:
    """Element-wise sum of two node representations; symmetric in its arguments."""
    rep_a = np.asarray(rep_a, dtype=np.float64)
    rep_b = np.asarray(rep_b, dtype=np.float64)
    if rep_a.shape != rep_b.shape:
        raise ValueError("representations have different lengths")
    return rep_a + rep_b


def embedding_pair_features(reps: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    return reps[pairs[:, 0]] + reps[pairs[:, 1]]


def hfb_features(g: Graph, a: int, b: int) -> np.ndarray:
    """Common-neighbor count, Jaccard coefficient, preferential attachment."""
    na = g.adjacency(a)
    nb = g.adjacency(b)
    common = np.intersect1d(na, nb, assume_unique=True).shape[0]
    union = na.shape[0] + nb.shape[0] - common
    jaccard = common / union if union else 0.0
    return np.array([common, jaccard, na.shape[0] * nb.shape[0]], dtype=np.float64)


def hfb_feature_matrix(g: Graph, pairs: np.ndarray) -> np.ndarray:
    out = np.empty((pairs.shape[0], 3))
    for i, (a, b) in enumerate(pairs):
        out[i] = hfb_features(g, int(a), int(b))
    return out


@dataclass(frozen=True)
class FeatureScaler:
    """Per-column standardization fitted on the training features."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "FeatureScaler":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean=mean, scale=scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale


def _logistic_loss(X, y_pm, w, b, reg):
    z = X @ w + b
    return float(np.logaddexp(0.0, -y_pm * z).mean() + 0.5 * reg * (w @ w))


def fit_classifier(train: LabeledPairSet, features: Callable[[np.ndarray], np.ndarray],
                   reg: float = 1e-4, iters: int = 500) -> LinearClassifier:
    """L2-regularized logistic regression by full-batch gradient descent.

    The step size is chosen per iteration by backtracking (Armijo condition);
    descent stops once the gradient norm drops below 1e-6 or `iters` steps ran.
    The bias is not penalized.
    """
    y = train.labels.astype(np.float64)
    if y.min() == y.max():
        raise ValueError("training set must contain both classes")
    X = np.asarray(features(train.pairs), dtype=np.float64)
    y_pm = 2.0 * y - 1.0
    n, n_feat = X.shape

    w = np.zeros(n_feat)
    b = 0.0
    step = 1.0
    loss = _logistic_loss(X, y_pm, w, b, reg)
    it = 0
    grad_norm = float("inf")
    for it in range(1, iters + 1):
        p = sigmoid(X @ w + b)
        gw = X.T @ (p - y) / n + reg * w
        gb = float((p - y).mean())
        sq = float(gw @ gw + gb * gb)
        grad_norm = sq ** 0.5
        if grad_norm < 1e-6:
            it -= 1
            break
        step = min(step * 2.0, 1e4)
        while step > 1e-12:
            cand_loss = _logistic_loss(X, y_pm, w - step * gw, b - step * gb, reg)
            if cand_loss <= loss - 1e-4 * step * sq:
                break
            step *= 0.5
        w -= step * gw
        b -= step * gb
        loss = _logistic_loss(X, y_pm, w, b, reg)
    return LinearClassifier(weights=w, bias=b, iterations_used=it, grad_norm=grad_norm)


def _midranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the group average."""
    x = np.asarray(x)
    order = np.argsort(x, kind="stable")
    sx = x[order]
    n = x.shape[0]
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = sx[1:] != sx[:-1]
    group = np.cumsum(boundary) - 1
    starts = np.flatnonzero(boundary)
    ends = np.append(starts[1:], n)
    mid = 0.5 * (starts + ends - 1) + 1.0
    out = np.empty(n)
    out[order] = mid[group]
    return out


def accuracy_score(scores: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of correct predictions at probability threshold 0.5 (score 0)."""
    pred = (np.asarray(scores) >= 0.0).astype(np.int8)
    return float((pred == labels).mean())


def auc_score(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-statistic AUC; tied scores contribute one half.

    Equals the probability that a random positive outscores a random negative.
    """
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    ranks = _midranks(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def evaluate(classifier: LinearClassifier, test: LabeledPairSet,
             features: Callable[[np.ndarray], np.ndarray],
             method: str = "", removed_fraction: float = float("nan")) -> LinkPredictionReport:
    """Accuracy and AUC of the classifier on a labeled test set."""
    if test.size == 0:
        raise ValueError("empty test set")
    X = np.asarray(features(test.pairs), dtype=np.float64)
    z = classifier.decision_scores(X)
    return LinkPredictionReport(
        accuracy=accuracy_score(z, test.labels),
        auc=auc_score(z, test.labels),
        removed_fraction=removed_fraction,
        method=method,
    )


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need two equal-length 1-D arrays of length >= 2")
    rx = _midranks(x)
    ry = _midranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = float(np.sqrt((rx @ rx) * (ry @ ry)))
    if denom == 0.0:
        raise ValueError("rank variance is zero; correlation undefined")
    return float((rx @ ry) / denom)


def status_scatter(reps: np.ndarray, ranking: np.ndarray,
                   status_params: tuple[np.ndarray, np.ndarray] | None = None,
                   scores: np.ndarray | None = None) -> np.ndarray:
    """(position, predicted_status) rows, positions following the PageRank order.

    With `status_params` = (w, w') the prediction is the learned linear status
    of each node; without them a least-squares regression from representations
    to the PageRank `scores` supplies the fitted values (for embeddings that
    carry no status mapping).
    """
    reps = np.asarray(reps, dtype=np.float64)
    n, width = reps.shape
    if status_params is not None:
        w_source, w_target = status_params
        d = w_source.shape[0]
        if width == d:
            pred = reps @ w_source
        elif width == 2 * d:
            pred = reps[:, :d] @ w_source + reps[:, d:] @ w_target
        else:
            raise ValueError(f"representation width {width} fits neither d={d} nor 2d")
    else:
        if scores is None:
            raise ValueError("need PageRank scores for the regression path")
        X = np.hstack([reps, np.ones((n, 1))])
        beta, *_ = np.linalg.lstsq(X, np.asarray(scores, dtype=np.float64), rcond=None)
        pred = X @ beta
    positions = np.arange(1, n + 1, dtype=np.float64)
    return np.column_stack([positions, pred[np.asarray(ranking)]])


def write_scatter_csv(path, rows: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position", "predicted_status"])
        for pos, val in rows:
            writer.writerow([int(pos), repr(float(val))])


def scale_free_graph(n: int, m: int, rng) -> Graph:
    """Preferential-attachment graph: (m+1)-clique seed, then m edges per new node.

    Attachment probability is proportional to current degree; every node ends
    with degree >= m.  Labels are the decimal node indices.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if m < 1 or n <= m + 1:
        raise ValueError("need n > m + 1 >= 2")
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edges.append((i, j))
            repeated += [i, j]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        for t in sorted(targets):
            edges.append((new, t))
            repeated += [new, t]
    labels = [str(i) for i in range(n)]
    return from_edges(labels, np.asarray(edges, dtype=np.int32))


def save_pair_set(path, g: Graph, ps: LabeledPairSet) -> None:
    """CSV export `label_a,label_b,class`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label_a", "label_b", "class"])
        for (a, b), lab in zip(ps.pairs, ps.labels):
            writer.writerow([g.labels[a], g.labels[b], int(lab)])


def load_pair_set(path, g: Graph, purpose: str = "train") -> LabeledPairSet:
    pairs, labels = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["label_a", "label_b", "class"]:
            raise ValueError(f"unexpected pair-set header: {header}")
        for row in reader:
            pairs.append((g.index_of[row[0]], g.index_of[row[1]]))
            labels.append(int(row[2]))
    return LabeledPairSet(pairs=np.asarray(pairs, dtype=np.int32),
                          labels=np.asarray(labels, dtype=np.int8), purpose=purpose)


def run_link_prediction(g: Graph, cfg, fraction: float, seed: int,
                        with_hfb: bool = False, threads: int = 1,
                        classifier_reg: float = 1e-4, classifier_iters: int = 500):
    """Full protocol: split, embed the train graph, classify, score.

    `cfg` is a GineConfig or LogConfig; its own seed drives training while
    `seed` drives the split and the negative pairs.  Returns
    (reports, split): one LinkPredictionReport for the embedding method and,
    when `with_hfb`, one for the handcrafted-feature baseline.
    """
    split = split_edges(g, fraction, np.random.default_rng([seed, 101]))
    train_set, test_set = build_pair_sets(g, split.train, split.removed,
                                          np.random.default_rng([seed, 202]))

    pr = pagerank(split.train)
    ranking = rank_nodes(pr)
    levels = assign_levels(ranking, cfg.k_levels)
    if isinstance(cfg, GineConfig):
        model = train_gine(levels, cfg, threads=threads)
        mode = "gine"
        method = "gine"
    elif isinstance(cfg, LogConfig):
        model = train_log(split.train, levels, cfg, threads=threads)
        mode = "log"
        method = f"log({cfg.lam:g})"
    else:
        raise TypeError(f"unsupported config type {type(cfg).__name__}")
    reps = final_representation_matrix(model, mode)

    def run_method(raw_features, tag: str) -> LinkPredictionReport:
        scaler = FeatureScaler.fit(raw_features(train_set.pairs))
        features = lambda pairs: scaler.transform(raw_features(pairs))
        clf = fit_classifier(train_set, features, reg=classifier_reg, iters=classifier_iters)
        return evaluate(clf, test_set, features, method=tag,
                        removed_fraction=split.achieved_fraction)

    reports = [run_method(lambda pairs: embedding_pair_features(reps, pairs), method)]
    if with_hfb:
        reports.append(run_method(lambda pairs: hfb_feature_matrix(split.train, pairs), "hfb"))
    return reports, split


def report_row(report: LinkPredictionReport, seed: int, config_echo: dict) -> dict:
    return {
        "method": report.method,
        "fraction": report.removed_fraction,
        "accuracy": report.accuracy,
        "auc": report.auc,
        "seed": seed,
        "config": config_echo,
    }


def validate_report(obj) -> None:
    """Schema check for a report JSON object; raises ValueError on violation."""
    if not isinstance(obj, dict) or "reports" not in obj:
        raise ValueError("report JSON must be an object with a 'reports' list")
    rows = obj["reports"]
    if not isinstance(rows, list) or not rows:
        raise ValueError("'reports' must be a non-empty list")
    for i, row in enumerate(rows):
        for key, typ in (("method", str), ("fraction", float), ("accuracy", float),
                         ("auc", float), ("seed", int), ("config", dict)):
            if key not in row:
                raise ValueError(f"report row {i} missing key {key!r}")
            if not isinstance(row[key], typ):
                raise ValueError(f"report row {i} key {key!r} has type "
                                 f"{type(row[key]).__name__}, expected {typ.__name__}")
        for key in ("fraction", "accuracy", "auc"):
            if not 0.0 <= row[key] <= 1.0:
                raise ValueError(f"report row {i} key {key!r} out of [0, 1]")
