"""
Growth generators for BA and clustering-weighted (GMG) random graphs.

Both start from a complete graph on ``m + 1`` nodes. Every arriving node
brings ``m`` edges whose targets are drawn one at a time, without
replacement, from the existing nodes. BA draws with probability
proportional to degree; GMG with probability proportional to
``d_i * (1 + gamma_i) ** alpha`` using the clustering coefficient at the
moment of the draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import Graph


@dataclass(frozen=True)
class SynthesisConfig:
    """Inputs of the growth process.

    ``n`` total nodes, ``m`` edges per arriving node, ``alpha`` the
    clustering weight (ignored by BA) and ``seed`` for the generator.
    """

    n: int
    m: int
    alpha: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError(f"m must be a positive integer, got {self.m}")
        if int(self.n) != self.n or self.n < self.m + 1:
            raise ConfigError(f"n must be >= m + 1 = {self.m + 1}, got {self.n}")


def expected_edge_count(n: int, m: int) -> int:
    return m * (m + 1) // 2 + (n - m - 1) * m


class _Growth:
    """Mutable adjacency with incremental triangle counts."""

    def __init__(self, n, m):
        self.adj = [set() for _ in range(n)]
        self.deg = np.zeros(n, dtype=np.int64)
        self.tri = np.zeros(n, dtype=np.int64)
        self.edges = []
        for i in range(m + 1):
            for j in range(i + 1, m + 1):
                self.add_edge(i, j)

    def add_edge(self, u, v):
        adj = self.adj
        common = adj[u] & adj[v]
        k = len(common)
        if k:
            self.tri[u] += k
            self.tri[v] += k
            for w in common:
                self.tri[w] += 1
        adj[u].add(v)
        adj[v].add(u)
        self.deg[u] += 1
        self.deg[v] += 1
        self.edges.append((v, u) if v < u else (u, v))

    def clustering(self, upto):
        d = self.deg[:upto].astype(float)
        denom = d * (d - 1)
        out = np.zeros(upto)
        ok = denom > 0
        out[ok] = 2.0 * self.tri[:upto][ok] / denom[ok]
        return out


def _grow(cfg: SynthesisConfig, weight_fn, attach=None) -> Graph:
    rng = np.random.default_rng(cfg.seed)
    n, m = int(cfg.n), int(cfg.m)
    g = _Growth(n, m)
    if attach is not None:
        attach[: m + 1, : m + 1] = 1.0 - np.eye(m + 1)
    for new in range(m + 1, n):
        # Targets are excluded once chosen, and every degree/clustering
        # change caused by the new node's edges lands on the new node, a
        # chosen target or their common neighbors (also chosen targets).
        # Remaining candidates therefore keep their weights across the m
        # draws, so one weight vector per arriving node is exact.
        w = weight_fn(g, new)
        for _ in range(m):
            p = w / w.sum()
            if attach is not None:
                attach[new, :new] += p
            t = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
            t = min(t, new - 1)
            while w[t] == 0:  # float edge case at the cdf boundary
                t -= 1
            g.add_edge(new, t)
            w[t] = 0.0
    if attach is not None:
        iu = np.triu_indices(n, 1)
        attach[iu] = attach.T[iu]
    return Graph.from_edges(n, g.edges)


def synthesize_ba(cfg: SynthesisConfig) -> Graph:
    """Barabasi-Albert growth: attachment probability proportional to degree."""
    return _grow(cfg, _ba_weights)


def synthesize_gmg(cfg: SynthesisConfig) -> Graph:
    """Growth with attachment weight ``d_i * (1 + gamma_i) ** alpha``.

    ``alpha = 0`` reproduces :func:`synthesize_ba` draw for draw under the
    same seed.
    """
    return _grow(cfg, _gmg_weights(float(cfg.alpha)))


def _ba_weights(g, new):
    return g.deg[:new].astype(float)


def _gmg_weights(alpha):
    def weights(g, new):
        d = g.deg[:new].astype(float)
        if alpha == 0.0:
            return d
        return d * (1.0 + g.clustering(new)) ** alpha
    return weights


def synthesize(model: str, cfg: SynthesisConfig) -> Graph:
    if model == "ba":
        return synthesize_ba(cfg)
    if model == "gmg":
        return synthesize_gmg(cfg)
    raise ConfigError(f"unknown model {model!r}")


def synthesize_with_attachment(model: str, cfg: SynthesisConfig):
    """Grow a graph and also return its conditional edge probabilities.

    Entry ``(i, j)`` of the returned symmetric matrix is the sum, over the
    draws made by the later of the two nodes, of the probability that the
    earlier node was picked at that draw given everything drawn before
    (zero once it has been picked); seed-clique pairs get 1. Its
    expectation equals ``P(A_ij = 1)``, so averaging it over realizations
    estimates the mean adjacency with much lower variance than averaging
    the sampled adjacency itself. The graph is identical to
    :func:`synthesize` under the same config.
    """
    if model == "ba":
        fn = _ba_weights
    elif model == "gmg":
        fn = _gmg_weights(float(cfg.alpha))
    else:
        raise ConfigError(f"unknown model {model!r}")
    probs = np.zeros((cfg.n, cfg.n))
    g = _grow(cfg, fn, probs)
    return g, probs
