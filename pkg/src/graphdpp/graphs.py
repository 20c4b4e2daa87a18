"""Graph containers, Laplacians, and synthetic graph generation.

Graphs are undirected and weighted, stored as a deduplicated edge list in
canonical orientation (i < j). The combinatorial Laplacian L = D - W is kept
sparse; everything downstream works through sparse matvecs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np
import scipy.sparse as sp

if TYPE_CHECKING:
    from .spectral import EigenBasis

__all__ = [
    "Graph",
    "GraphFormatError",
    "Laplacian",
    "SbmConfig",
    "BandlimitedSignal",
    "build_laplacian",
    "generate_sbm",
    "sbm_detectability_threshold",
    "sbm_edge_probabilities",
    "load_graph",
    "save_graph",
    "generate_bandlimited_signal",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "star_graph",
    "disjoint_cliques",
    "random_geometric_graph",
]


class GraphFormatError(ValueError):
    """Malformed edge-list input; the message carries the offending line number."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph without self-loops.

    Each edge is stored exactly once with ``i < j``; the adjacency matrix is
    symmetric by construction and all weights are nonnegative.
    """

    n_nodes: int
    edges: np.ndarray    # (E, 2) int64, each row sorted i < j
    weights: np.ndarray  # (E,) float64, >= 0

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        if self.n_nodes < 0:
            raise ValueError("n_nodes must be nonnegative")
        if edges.shape[0] != weights.shape[0]:
            raise ValueError("edges and weights length mismatch")
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n_nodes:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must satisfy i < j (no self-loops)")
            if np.unique(edges, axis=0).shape[0] != edges.shape[0]:
                raise ValueError("duplicate edges")
        if np.any(weights < 0):
            raise ValueError("negative edge weight")

    @classmethod
    def from_edges(cls, n_nodes: int, triples: Iterable[tuple]) -> "Graph":
        """Build a graph from (i, j, w) triples, canonicalizing orientation.

        Triples may be given in either orientation; a pair appearing twice is
        rejected as a duplicate.
        """
        seen: dict[tuple[int, int], float] = {}
        for t in triples:
            if len(t) == 2:
                i, j = t
                w = 1.0
            else:
                i, j, w = t
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen[key] = float(w)
        if not seen:
            return cls(n_nodes, np.empty((0, 2), dtype=np.int64), np.empty(0))
        keys = sorted(seen)
        edges = np.array(keys, dtype=np.int64)
        weights = np.array([seen[k] for k in keys])
        return cls(n_nodes, edges, weights)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def adjacency(self) -> sp.csr_array:
        """Symmetric sparse adjacency matrix W."""
        n = self.n_nodes
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.concatenate([self.weights, self.weights])
        return sp.csr_array((data, (rows, cols)), shape=(n, n))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes)
        np.add.at(deg, self.edges[:, 0], self.weights)
        np.add.at(deg, self.edges[:, 1], self.weights)
        return deg


@dataclass(frozen=True, eq=False)
class Laplacian:
    """Combinatorial Laplacian L = D - W with its degree vector."""

    matrix: sp.csr_array
    degree: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0]


def build_laplacian(graph: Graph) -> Laplacian:
    """Assemble L = D - W as a sparse matrix with an explicit diagonal.

    The stored pattern is the adjacency pattern plus the full diagonal, so
    nnz(L) = nnz(W) + N even for isolated nodes.
    """
    n = graph.n_nodes
    deg = graph.degrees()
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    rows = np.concatenate([i, j, np.arange(n)])
    cols = np.concatenate([j, i, np.arange(n)])
    data = np.concatenate([-graph.weights, -graph.weights, deg])
    mat = sp.csr_array((data, (rows, cols)), shape=(n, n))
    return Laplacian(mat, deg)


# ----------------------------------------------------------------------------
# Stochastic block model
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SbmConfig:
    """Equal-size stochastic block model parameters.

    ``epsilon_ratio`` positions the inter/intra connection ratio as a fraction
    of the detectability threshold; 0 produces disconnected communities and 1
    sits exactly at the threshold.
    """

    n_nodes: int
    n_communities: int
    epsilon_ratio: float
    average_degree: float = 16.0
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes <= 0 or self.n_communities <= 0:
            raise ValueError("n_nodes and n_communities must be positive")
        if self.n_nodes % self.n_communities != 0:
            raise ValueError("n_nodes must be divisible by n_communities")
        if not 0.0 <= self.epsilon_ratio <= 1.0:
            raise ValueError("epsilon_ratio must lie in [0, 1]")
        if self.average_degree <= 0:
            raise ValueError("average_degree must be positive")
        if self.n_communities > 1 and self.average_degree <= 1:
            raise ValueError("average_degree must exceed 1 for multi-community models")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def sbm_detectability_threshold(average_degree: float, n_communities: int) -> float:
    """Inter/intra probability ratio above which communities become undetectable."""
    c = float(average_degree)
    q = int(n_communities)
    return (c - math.sqrt(c)) / (c + math.sqrt(c) * (q - 1))


def sbm_edge_probabilities(cfg: SbmConfig) -> tuple[float, float]:
    """Solve (p_in, p_out) so the expected average degree matches the config."""
    n, q, c = cfg.n_nodes, cfg.n_communities, cfg.average_degree
    size = n // q
    if q == 1:
        p_in = c / (n - 1)
        return p_in, 0.0
    eps = cfg.epsilon_ratio * sbm_detectability_threshold(c, q)
    p_in = c / ((size - 1) + eps * (n - size))
    p_out = eps * p_in
    if p_in > 1.0:
        raise ValueError(
            f"requested average degree {c} is infeasible: solved p_in = {p_in:.4f} > 1"
        )
    return p_in, p_out


def generate_sbm(cfg: SbmConfig, rng: np.random.Generator | None = None) -> Graph:
    """Draw one unweighted graph from the stochastic block model.

    Communities are the ``q`` consecutive index blocks of size ``n // q``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n, q = cfg.n_nodes, cfg.n_communities
    size = n // q
    p_in, p_out = sbm_edge_probabilities(cfg)

    chunks = []
    iu, ju = np.triu_indices(size, k=1)
    for a in range(q):
        base_a = a * size
        keep = rng.random(iu.size) < p_in
        if keep.any():
            chunks.append(np.column_stack([base_a + iu[keep], base_a + ju[keep]]))
        for b in range(a + 1, q):
            base_b = b * size
            draws = rng.random((size, size)) < p_out
            if draws.any():
                ra, rb = np.nonzero(draws)
                chunks.append(np.column_stack([base_a + ra, base_b + rb]))
    if chunks:
        edges = np.concatenate(chunks)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph(n, edges, np.ones(edges.shape[0]))


# ----------------------------------------------------------------------------
# Edge-list files
# ----------------------------------------------------------------------------


def load_graph(path, fmt: str = "edge-list") -> Graph:
    """Read a whitespace-separated ``i j w`` edge list (0-indexed).

    Lines starting with ``#`` are comments; a ``# nodes: N`` header pins the
    node count so trailing isolated nodes survive a round trip. The weight
    field may be omitted (defaults to 1). Duplicate edges, in either
    orientation, are rejected.
    """
    if fmt != "edge-list":
        raise ValueError(f"unsupported graph format: {fmt!r}")
    declared_nodes = 0
    max_node = -1
    seen: dict[tuple[int, int], tuple[int, float]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.lower().startswith("nodes:"):
                    declared_nodes = int(body.split(":", 1)[1])
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"{path}: line {ln}: expected 'i j [w]', got {line!r}"
                )
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise GraphFormatError(f"{path}: line {ln}: {exc}") from None
            if i == j:
                raise GraphFormatError(f"{path}: line {ln}: self-loop on node {i}")
            if i < 0 or j < 0:
                raise GraphFormatError(f"{path}: line {ln}: negative node index")
            if w < 0:
                raise GraphFormatError(f"{path}: line {ln}: negative weight {w}")
            key = (i, j) if i < j else (j, i)
            if key in seen:
                first_ln, first_w = seen[key]
                if first_w != w:
                    raise GraphFormatError(
                        f"{path}: line {ln}: edge {key} conflicts with line "
                        f"{first_ln} (weights {first_w} != {w})"
                    )
                raise GraphFormatError(
                    f"{path}: line {ln}: duplicate edge {key} (first at line {first_ln})"
                )
            seen[key] = (ln, w)
            max_node = max(max_node, i, j)
    n_nodes = max(declared_nodes, max_node + 1)
    keys = sorted(seen)
    edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[k][1] for k in keys])
    return Graph(n_nodes, edges, weights)


def save_graph(graph: Graph, path) -> None:
    """Write the canonical edge list with a node-count header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {graph.n_nodes}\n")
        for (i, j), w in zip(graph.edges, graph.weights):
            fh.write(f"{i} {j} {w:.17g}\n")


# ----------------------------------------------------------------------------
# Bandlimited signals
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BandlimitedSignal:
    """Unit-norm signal lying in the span of the first ``band`` Fourier modes."""

    values: np.ndarray        # (N,)
    coefficients: np.ndarray  # (band,)
    band: int


def generate_bandlimited_signal(
    basis: "EigenBasis", rng: np.random.Generator
) -> BandlimitedSignal:
    """Draw x = U_k a with Gaussian coefficients, normalized to unit norm.

    The coefficients are rescaled by the same factor so x = U_k a holds
    exactly for the returned pair.
    """
    k = basis.vectors.shape[1]
    for _ in range(100):
        alpha = rng.standard_normal(k)
        x = basis.vectors @ alpha
        norm = float(np.linalg.norm(x))
        if norm > 0:
            return BandlimitedSignal(x / norm, alpha / norm, k)
    raise RuntimeError("could not draw a nonzero bandlimited signal")


# ----------------------------------------------------------------------------
# Small canonical graphs (unit weights)
# ----------------------------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(
        n, [(i, j, 1.0) for i in range(n) for j in range(i + 1, n)]
    )


def star_graph(n: int) -> Graph:
    """Hub node 0 connected to n - 1 leaves."""
    return Graph.from_edges(n, [(0, i, 1.0) for i in range(1, n)])


def disjoint_cliques(sizes: Iterable[int]) -> Graph:
    """Disconnected union of complete graphs, one per entry of ``sizes``."""
    edges = []
    offset = 0
    for size in sizes:
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((offset + i, offset + j, 1.0))
        offset += size
    return Graph.from_edges(offset, edges)


def random_geometric_graph(
    n: int, radius: float, rng: np.random.Generator
) -> Graph:
    """Connect uniform points in the unit square within the given radius."""
    pts = rng.random((n, 2))
    edges = []
    for i in range(n):
        d2 = np.sum((pts[i + 1 :] - pts[i]) ** 2, axis=1)
        for off in np.nonzero(d2 <= radius * radius)[0]:
            edges.append((i, i + 1 + int(off), 1.0))
    return Graph.from_edges(n, edges)
