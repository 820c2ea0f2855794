"""
Undirected simple graphs, structural statistics and edge-list I/O.

Graphs are immutable once built: the edge array, degree list and
clustering list are computed on construction (or lazily, then cached) and
flagged read-only so instances can be shared across worker processes.
"""

from __future__ import annotations

import io
import logging
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import EmptyGraphError, ParseError

logger = logging.getLogger(__name__)

#: Graphs with at least this many nodes get a sparse adjusted adjacency.
DENSE_THRESHOLD = 2000


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Parameters
    ----------
    n : int
        Node count.
    edges : ndarray of shape (E, 2)
        Unique pairs with ``u < v``, sorted lexicographically.
    ids : ndarray of shape (n,)
        External label of every node (original file ids, or indices into a
        parent graph for samples).
    skipped_self_loops : int
        Number of self-loop lines dropped while parsing.

    Use :meth:`from_edges` rather than the raw constructor; it validates
    and canonicalizes the edge set.
    """

    n: int
    edges: np.ndarray
    ids: np.ndarray = field(repr=False)
    skipped_self_loops: int = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, ids=None) -> "Graph":
        """Build a graph, dropping duplicates and rejecting self-loops."""
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0) if arr.size else np.empty((0, 2), np.int64)
        ids = np.arange(n, dtype=np.int64) if ids is None else np.asarray(ids, dtype=np.int64)
        if ids.shape != (n,):
            raise ValueError("ids must have one entry per node")
        return cls(n=n, edges=_readonly(arr), ids=_readonly(ids.copy()))

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = sp.triu(sp.csr_matrix(adj), k=1).tocoo()
        return cls.from_edges(adj.shape[0], np.column_stack([adj.row, adj.col]))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric binary adjacency matrix in CSR form."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(u))
        a = sp.csr_matrix((data, (np.r_[u, v], np.r_[v, u])), shape=(self.n, self.n))
        a.sort_indices()
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        return _readonly(d)

    @cached_property
    def clustering(self) -> np.ndarray:
        return _readonly(clustering_coefficients(self))

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors(i)

    def to_dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def subgraph(self, nodes) -> "Graph":
        """Node-induced subgraph; node ``k`` of the result is ``nodes[k]``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        sub = self.adjacency[nodes][:, nodes]
        g = Graph.from_adjacency(sub)
        return Graph.from_edges(len(nodes), g.edges, ids=nodes)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(map(tuple, self.edges))
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


def clustering_coefficients(graph: Graph) -> np.ndarray:
    """Local clustering coefficient of every node.

    ``gamma_i = 2 T_i / (d_i (d_i - 1))`` with ``T_i`` the number of
    triangles through ``i``; nodes with degree 0 or 1 get 0.
    """
    a = graph.adjacency
    d = graph.degrees.astype(float)
    # (A @ A) restricted to the edge pattern counts common neighbors per edge
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    denom = d * (d - 1)
    out = np.zeros(graph.n)
    ok = denom > 0
    out[ok] = 2.0 * tri[ok] / denom[ok]
    return out


def adjusted_adjacency(graph: Graph, sparse: bool | None = None):
    """Column-normalized adjacency ``A*[i, j] = A[i, j] / (1 + d_j)``.

    Returns a dense ndarray below :data:`DENSE_THRESHOLD` nodes and a CSR
    matrix above, unless ``sparse`` forces one or the other.
    """
    if sparse is None:
        sparse = graph.n >= DENSE_THRESHOLD
    scale = 1.0 / (1.0 + graph.degrees)
    a = graph.adjacency @ sp.diags(scale)
    if sparse:
        return sp.csr_matrix(a)
    return np.asarray(a.toarray())


def parse_edge_list(stream: TextIO | str) -> Graph:
    """Read a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are ignored. Each remaining
    line must start with two integer ids; extra columns are ignored. Ids
    are remapped to ``0..n-1`` in ascending id order and kept in
    ``Graph.ids``. Self-loops are skipped and counted.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    pairs = []
    loops = 0
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if len(tok) < 2:
            raise ParseError(f"expected two node ids, got {s!r}", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {s!r}", lineno) from None
        if u == v:
            loops += 1
            continue
        pairs.append((u, v))
    if not pairs:
        raise EmptyGraphError("edge list contains no edges")
    raw = np.array(pairs, dtype=np.int64)
    ids, inv = np.unique(raw, return_inverse=True)
    g = Graph.from_edges(len(ids), inv.reshape(-1, 2), ids=ids)
    if loops:
        warnings.warn(f"skipped {loops} self-loop line(s)", stacklevel=2)
        logger.info("skipped %d self-loops", loops)
    object.__setattr__(g, "skipped_self_loops", loops)
    return g


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def format_edge_list(graph: Graph, use_ids: bool = False) -> str:
    """Serialize as sorted ``u v`` lines with ``u < v``.

    With ``use_ids`` the external labels are written instead of indices.
    """
    buf = io.StringIO()
    buf.write(f"# nodes: {graph.n} edges: {graph.n_edges}\n")
    e = graph.ids[graph.edges] if use_ids else graph.edges
    if use_ids:
        e = np.sort(e, axis=1)
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
    for u, v in e:
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def write_edge_list(graph: Graph, path, use_ids: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(graph, use_ids=use_ids))


def snowball_sample(graph: Graph, target_size: int, seed) -> Graph:
    """BFS snowball sample of ``min(target_size, n)`` nodes.

    Starts from a uniformly chosen node and expands the BFS frontier,
    visiting each node's unvisited neighbors in random order. If the
    frontier empties before the target is reached (disconnected input) a
    new start is drawn uniformly from the unvisited nodes. The result is
    the node-induced subgraph with nodes in ascending parent order;
    ``ids`` holds the parent indices.
    """
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    rng = np.random.default_rng(seed)
    size = min(int(target_size), graph.n)
    visited = np.zeros(graph.n, dtype=bool)
    chosen = []
    queue: deque[int] = deque()

    def visit(u):
        visited[u] = True
        chosen.append(u)
        queue.append(u)

    while len(chosen) < size:
        if not queue:
            visit(int(rng.choice(np.flatnonzero(~visited))))
            continue
        u = queue.popleft()
        nb = graph.neighbors(u)
        nb = nb[~visited[nb]]
        for v in rng.permutation(nb):
            if len(chosen) == size:
                break
            visit(int(v))
    return graph.subgraph(np.sort(np.array(chosen, dtype=np.int64)))
