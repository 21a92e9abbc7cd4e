"""Undirected graph container, edge-list IO and the degree-based noise sampler.

Graphs are stored as a compact CSR-style adjacency over dense internal indices
0..N-1.  External node labels are arbitrary strings; every file interface
speaks labels, everything numeric speaks indices.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "EdgeListParseError",
    "EmptyGraphError",
    "Graph",
    "NoiseTable",
    "from_edges",
    "load_edge_list",
    "save_edge_list",
    "degree",
    "build_noise_table",
    "sample_negative",
    "sample_negatives",
]

NOISE_EXPONENT = 0.75


class EdgeListParseError(ValueError):
    """A line of the edge-list file did not contain exactly two labels."""

    def __init__(self, line_no: int, line: str):
        self.line_no = line_no
        self.line = line
        super().__init__(f"line {line_no}: expected two whitespace-separated labels, got {line!r}")


class EmptyGraphError(ValueError):
    """The input contained no usable edge."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph. Immutable after construction; reads are thread-safe.

    Attributes
    ----------
    labels : list of external node labels, position = internal index.
    index_of : label -> internal index.
    edges : (M, 2) int32 array of deduplicated edges in first-seen order.
    indptr : (N+1,) int64 CSR offsets into `neighbors`.
    neighbors : (2M,) int32, sorted within each node's slice.
    """

    labels: list[str]
    index_of: dict[str, int]
    edges: np.ndarray
    indptr: np.ndarray
    neighbors: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def adjacency(self, v: int) -> np.ndarray:
        """Sorted neighbor indices of node v (a view, do not mutate)."""
        self._check_index(v)
        return self.neighbors[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr).astype(np.int64)

    def has_edge(self, a: int, b: int) -> bool:
        adj = self.adjacency(a)
        pos = np.searchsorted(adj, b)
        return bool(pos < adj.shape[0] and adj[pos] == b)

    def _check_index(self, v: int) -> None:
        if not 0 <= v < self.n_nodes:
            raise IndexError(f"node index {v} out of range for graph with {self.n_nodes} nodes")


def from_edges(labels: list[str], pairs: np.ndarray) -> Graph:
    """Build a Graph from a dense label list and an (M, 2) index array.

    `pairs` must already be simple: no self-loops, no duplicates in either
    orientation.  Every index in 0..N-1 must appear in at least one pair.
    """
    n = len(labels)
    pairs = np.asarray(pairs, dtype=np.int32).reshape(-1, 2)
    if pairs.shape[0] == 0:
        raise EmptyGraphError("graph has no edges")
    if pairs.min() < 0 or pairs.max() >= n:
        raise ValueError("edge endpoint out of range")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise ValueError("self-loop in edge array")

    both = np.concatenate([pairs, pairs[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    counts = np.bincount(both[:, 0], minlength=n)
    if counts.min() == 0:
        raise ValueError("isolated node: every node must appear in an edge")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    neighbors = np.ascontiguousarray(both[:, 1], dtype=np.int32)
    # duplicate edges would show up as repeated entries in a sorted slice
    if np.any((both[1:, 0] == both[:-1, 0]) & (both[1:, 1] == both[:-1, 1])):
        raise ValueError("duplicate edge in edge array")

    index_of = {lab: i for i, lab in enumerate(labels)}
    if len(index_of) != n:
        raise ValueError("duplicate node label")
    return Graph(labels=list(labels), index_of=index_of, edges=pairs,
                 indptr=indptr, neighbors=neighbors)


def _open_lines(source):
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes().splitlines()
    data = source.read()
    if isinstance(data, str):
        data = data.encode("utf-8")
    return data.splitlines()


def load_edge_list(source) -> Graph:
    """Parse an edge-list byte stream (or path) into a Graph.

    One edge per line as two whitespace-separated labels.  Blank lines and
    lines starting with '#' are skipped, self-loop lines are dropped and
    duplicate edges are merged.  Raises EdgeListParseError on a malformed
    line and EmptyGraphError when no edge survives.
    """
    labels: list[str] = []
    index_of: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int]] = []

    for line_no, raw in enumerate(_open_lines(source), start=1):
        line = raw.decode("utf-8").strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(line_no, line)
        a_lab, b_lab = tokens
        if a_lab == b_lab:
            continue
        a = index_of.get(a_lab)
        if a is None:
            a = index_of[a_lab] = len(labels)
            labels.append(a_lab)
        b = index_of.get(b_lab)
        if b is None:
            b = index_of[b_lab] = len(labels)
            labels.append(b_lab)
        key = (a, b) if a < b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        pairs.append((a, b))

    if not pairs:
        raise EmptyGraphError("edge list contained no usable edge")
    return from_edges(labels, np.asarray(pairs, dtype=np.int32))


def save_edge_list(g: Graph, dest) -> None:
    """Write the graph back out, one labeled edge per line, in first-seen order.

    Reloading the output reproduces the graph bit-for-bit (labels, indices,
    adjacency).
    """
    lines = []
    for a, b in g.edges:
        lines.append(f"{g.labels[a]} {g.labels[b]}\n")
    text = "".join(lines)
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text.encode("utf-8") if isinstance(dest, io.BufferedIOBase) else text)


def degree(g: Graph, v: int) -> int:
    """Number of neighbors of node v."""
    g._check_index(v)
    return int(g.indptr[v + 1] - g.indptr[v])


@dataclass(frozen=True)
class NoiseTable:
    """Cumulative weights for the degree**0.75 negative-sampling distribution."""

    cumulative: np.ndarray  # (N,) float64, non-decreasing
    total: float

    @property
    def n_nodes(self) -> int:
        return int(self.cumulative.shape[0])

    def probabilities(self) -> np.ndarray:
        weights = np.diff(self.cumulative, prepend=0.0)
        return weights / self.total


def build_noise_table(g: Graph) -> NoiseTable:
    weights = g.degrees().astype(np.float64) ** NOISE_EXPONENT
    cumulative = np.cumsum(weights)
    return NoiseTable(cumulative=cumulative, total=float(cumulative[-1]))


def sample_negative(table: NoiseTable, rng: np.random.Generator) -> int:
    """Draw one node by inverse CDF: binary search over the cumulative weights."""
    x = rng.random() * table.total
    return int(np.searchsorted(table.cumulative, x, side="right"))


def sample_negatives(table: NoiseTable, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized `sample_negative`; one uniform consumed per draw."""
    x = rng.random(size) * table.total
    return np.searchsorted(table.cumulative, x, side="right").astype(np.int32)
