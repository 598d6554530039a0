"""Undirected graphs and the connectivity constants the coupling bounds use.

Nodes are numbered 1..n at every public boundary. Internally edges are also
kept as 0-indexed numpy arrays for vectorised dynamics.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_NODES = 64

TOPOLOGIES = ("chain", "ring", "star_tree", "complete")


class GraphError(ValueError):
    """Invalid or unsupported graph input."""


@dataclass(frozen=True)
class GraphConstants:
    L: float
    Lstar: float
    lambda2: float
    delta: int
    diameter: int
    dist: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Graph:
    """Connected simple undirected graph on nodes 1..n.

    Build instances through :func:`build_graph`, which validates the input.
    ``edges`` holds each edge once as a sorted 1-indexed pair.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u - 1].append(v)
            nbrs[v - 1].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Neighbours of 1-indexed node ``i``."""
        return self.adjacency[i - 1]

    @cached_property
    def edge_index(self) -> tuple[np.ndarray, np.ndarray]:
        e = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2) - 1
        return e[:, 0].copy(), e[:, 1].copy()

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        u, v = self.edge_index
        a[u, v] = 1.0
        a[v, u] = 1.0
        return a

    @property
    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def complement_edges(self) -> list[tuple[int, int]]:
        present = set(self.edges)
        return [(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)
                if (i, j) not in present]

    @cached_property
    def constants(self) -> GraphConstants:
        dist = all_pairs_distances(self)
        return GraphConstants(
            L=connectivity_L(self),
            Lstar=connectivity_Lstar(self),
            lambda2=algebraic_connectivity(self),
            delta=min(self.degrees),
            diameter=int(dist.max()),
            dist=dist,
        )


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate ``edge_list`` (1-indexed pairs) and return a connected :class:`Graph`."""
    n = int(n)
    if n < 2:
        raise GraphError(f"need at least 2 nodes, got n={n}")
    if n > MAX_NODES:
        raise GraphError(f"n={n} exceeds the supported maximum of {MAX_NODES}")
    seen: set[tuple[int, int]] = set()
    for pair in edge_list:
        if len(pair) != 2:
            raise GraphError(f"edge {tuple(pair)!r} is not a pair")
        u, v = int(pair[0]), int(pair[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 1..{n}")
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
    g = Graph(n, tuple(sorted(seen)))
    if not _is_connected(g):
        raise GraphError("L undefined for disconnected graph")
    return g


def make_topology(kind: str, n: int) -> Graph:
    """Standard test topologies; the star-tree hub is node 1."""
    if kind == "chain":
        if n < 2:
            raise GraphError("chain needs n >= 2")
        edges = [(i, i + 1) for i in range(1, n)]
    elif kind == "ring":
        if n < 3:
            raise GraphError("ring needs n >= 3")
        edges = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    elif kind == "star_tree":
        if n < 2:
            raise GraphError("star_tree needs n >= 2")
        edges = [(1, j) for j in range(2, n + 1)]
    elif kind == "complete":
        if n < 2:
            raise GraphError("complete graph needs n >= 2")
        edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    else:
        raise GraphError(f"unknown topology {kind!r}; expected one of {TOPOLOGIES}")
    return build_graph(n, edges)


def _bfs(g: Graph, source: int) -> np.ndarray:
    # 0-indexed source, -1 marks unreached
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if dist[v - 1] < 0:
                dist[v - 1] = dist[u] + 1
                queue.append(v - 1)
    return dist


def _is_connected(g: Graph) -> bool:
    return bool((_bfs(g, 0) >= 0).all())


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Hop-count matrix; entry ``[k-1, l-1]`` is dist(k, l)."""
    return np.vstack([_bfs(g, s) for s in range(g.n)])


def connectivity_L(g: Graph) -> float:
    """1 / (1 + sum of dist(k, l) over non-adjacent pairs)."""
    dist = all_pairs_distances(g)
    total = sum(int(dist[k - 1, l - 1]) for k, l in g.complement_edges())
    return 1.0 / (1.0 + total)


def connectivity_Lstar(g: Graph) -> float:
    """1 / (1 + diam(G) * |E^c|), the cruder diameter-based variant of L."""
    diam = int(all_pairs_distances(g).max())
    return 1.0 / (1.0 + diam * len(g.complement_edges()))


def laplacian(g: Graph) -> np.ndarray:
    a = g.adjacency_matrix
    return np.diag(a.sum(axis=1)) - a


def algebraic_connectivity(g: Graph) -> float:
    """Second-smallest eigenvalue of the graph Laplacian."""
    eig = np.linalg.eigvalsh(laplacian(g))
    return float(eig[1])


def pairwise_difference_norm(x: Sequence[float] | np.ndarray) -> float:
    """sqrt(sum_{i<j} (x_i - x_j)^2), i.e. the 2-norm of B_c^T x for the complete graph.

    Uses n * sum(x^2) - (sum x)^2 applied to the mean-removed vector, which is
    exact up to rounding and never builds the incidence matrix. Shifting by the
    first entry beforehand makes constant vectors give exactly 0.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a vector with at least 2 entries")
    x = x - x[0]
    xc = x - x.mean()
    return float(np.sqrt(x.size * np.dot(xc, xc)))
