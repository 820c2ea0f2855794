"""
Closed-form O(N) estimators of edge probabilities, converged beliefs and
control power under the BA and GMG network models.

Both models share one shape. Each node gets a weight ``xi`` (the degree
for BA, ``d_i * (1 + gamma_i) ** alpha`` for GMG) and the expected
adjacency is ``P_ij = s * xi_i * xi_j`` with scale ``s = 1 / sum(d)`` for
BA and ``s = sum(d) / eta`` for GMG, ``eta = sum_{i != j} xi_i xi_j``.
Averaging the walk expansion of the exact solve under ``P`` gives a
geometric series with ratio ``beta = s * sum_{k free} xi_k^2 / (1 + d_k)``
and the expected converged belief of a free node::

    E[B_i] = s * xi_i / (1 + d_i) * (sum_{k ctrl} B*_k xi_k
                                     + sum_{k free} w_bar_k xi_k / (1 + d_k))
             / (1 - beta)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .engine import NO_CONTROL, ControlStrategy
from .errors import ConfigError, NonConvergenceError

MODELS = ("ba", "gmg")


@dataclass(frozen=True)
class ModelParams:
    """Summary statistics consumed by every estimator.

    Parameters
    ----------
    degrees : array_like
        Degree list ``d_i``.
    clusterings : array_like, optional
        Clustering list ``gamma_i`` in [0, 1] (GMG only).
    alpha : float, optional
        Clustering weight (GMG only).
    w_bar : array_like, optional
        Expected private belief per node; zeros when omitted. A 2-D
        ``(k, N)`` array evaluates ``k`` belief vectors at once.
    model : {"ba", "gmg"}
    """

    degrees: np.ndarray
    clusterings: np.ndarray | None = None
    alpha: float | None = None
    w_bar: np.ndarray | None = None
    model: str = "ba"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        d = np.asarray(self.degrees, dtype=float)
        if d.ndim != 1:
            raise ConfigError("degrees must be one-dimensional")
        if np.any(d < 0):
            raise ConfigError("degrees must be non-negative")
        object.__setattr__(self, "degrees", d)
        n = len(d)
        if self.model == "gmg":
            if self.clusterings is None or self.alpha is None:
                raise ConfigError("GMG parameters need clusterings and alpha")
        if self.clusterings is not None:
            g = np.asarray(self.clusterings, dtype=float)
            if g.shape != d.shape:
                raise ConfigError("clusterings and degrees differ in length")
            if np.any((g < 0) | (g > 1)):
                raise ConfigError("clustering coefficients must lie in [0, 1]")
            object.__setattr__(self, "clusterings", g)
        w = np.zeros(n) if self.w_bar is None else np.asarray(self.w_bar, dtype=float)
        if w.shape[-1] != n:
            raise ConfigError("w_bar and degrees differ in length")
        object.__setattr__(self, "w_bar", w)

    @classmethod
    def from_graph(cls, graph, model="ba", alpha=None, w_bar=None) -> "ModelParams":
        return cls(graph.degrees, graph.clustering, alpha, w_bar, model)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total_degree(self) -> float:
        return float(self.degrees.sum())

    @cached_property
    def weights(self) -> np.ndarray:
        """Node weights ``xi``: the degree (BA) or ``d (1 + gamma) ** alpha`` (GMG)."""
        if self.model == "ba":
            xi = self.degrees.copy()
        else:
            xi = self.degrees * (1.0 + self.clusterings) ** float(self.alpha)
        xi.flags.writeable = False
        return xi

    @cached_property
    def scale(self) -> float:
        return _scale(self)

    def with_(self, **changes) -> "ModelParams":
        kw = dict(degrees=self.degrees, clusterings=self.clusterings, alpha=self.alpha,
                  w_bar=self.w_bar, model=self.model)
        kw.update(changes)
        return ModelParams(**kw)


@dataclass(frozen=True)
class ModelEstimate:
    """Result of a closed-form evaluation.

    ``beliefs`` applies the free-node formula to every node; ``beliefs_corrected``
    replaces controlled nodes by their broadcast value. ``cp`` is the mean
    of ``beliefs - w_bar`` over all nodes, exactly as the model's
    control-power sum is written; ``cp_corrected`` uses ``beliefs_corrected``.
    With a 2-D ``w_bar`` the belief fields are 2-D and the cp fields are
    1-D arrays.
    """

    beliefs: np.ndarray
    beliefs_corrected: np.ndarray
    beta: float
    cp: float | np.ndarray = field(default=np.nan)
    cp_corrected: float | np.ndarray = field(default=np.nan)

    @property
    def convergent(self) -> bool:
        return abs(self.beta) < 1


class EdgeProbability(float):
    """Raw formula value; ``above_one`` flags hub pairs where it exceeds 1."""

    @property
    def above_one(self) -> bool:
        return self > 1.0


def _scale(params: ModelParams) -> float:
    total = params.total_degree
    if total <= 0:
        raise ConfigError("total degree must be positive")
    if params.model == "ba":
        return 1.0 / total
    return total / eta(params)


def eta(params: ModelParams) -> float:
    """``sum_{i != j} xi_i xi_j`` computed as ``(sum xi)^2 - sum xi^2``."""
    if params.n < 2:
        raise ConfigError("eta needs at least two nodes")
    xi = params.weights
    s = xi.sum()
    return float(s * s - np.dot(xi, xi))


def edge_prob_ba(degrees, i: int, j: int) -> EdgeProbability:
    """``d_i d_j / sum(d)``."""
    d = np.asarray(degrees, dtype=float)
    if i == j:
        raise ConfigError("edge probability needs two distinct nodes")
    total = d.sum()
    if total <= 0:
        raise ConfigError("total degree must be positive")
    return EdgeProbability(d[i] * d[j] / total)


def edge_prob_gmg(params: ModelParams, i: int, j: int) -> EdgeProbability:
    """``xi_i xi_j sum(d) / eta``."""
    if i == j:
        raise ConfigError("edge probability needs two distinct nodes")
    xi = params.weights
    e = eta(params)
    if e <= 0:
        raise ConfigError("eta must be positive")
    return EdgeProbability(xi[i] * xi[j] * params.total_degree / e)


def edge_prob_matrix(params: ModelParams, clamp: bool = False) -> np.ndarray:
    """Full ``P`` matrix, diagonal included (the BA mass identity sums it).

    With ``clamp`` entries are clipped to [0, 1].
    """
    xi = params.weights
    p = _scale(params) * np.outer(xi, xi)
    return np.clip(p, 0.0, 1.0) if clamp else p


def beta(params: ModelParams, strategy: ControlStrategy = NO_CONTROL) -> float:
    """Series ratio ``s * sum_{k free} xi_k^2 / (1 + d_k)``."""
    free = ~strategy.mask(params.n)
    xi = params.weights
    return float(params.scale * np.dot(xi * xi / (1.0 + params.degrees), free))


def model_converged_beliefs(params: ModelParams,
                            strategy: ControlStrategy = NO_CONTROL) -> ModelEstimate:
    """Expected converged beliefs; raises when ``|beta| >= 1``."""
    n = params.n
    free = ~strategy.mask(n)
    d = params.degrees
    xi = params.weights
    s = params.scale
    b = beta(params, strategy)
    if abs(b) >= 1:
        raise NonConvergenceError(f"series ratio beta = {b:.6g} is not below 1", beta=b)
    ctrl_term = float(np.dot(strategy.values, xi[strategy.index]))
    w = params.w_bar
    shape = xi / (1.0 + d)
    free_term = w @ (shape * free)
    numer = ctrl_term + free_term
    beliefs = (s * shape) * (np.asarray(numer)[..., None] / (1.0 - b))
    beliefs = np.broadcast_to(beliefs, w.shape).copy()
    pinned = strategy.pin(beliefs)
    return ModelEstimate(beliefs, pinned, b)


def model_control_power(params: ModelParams,
                        strategy: ControlStrategy = NO_CONTROL) -> ModelEstimate:
    """Model control power, both as written (all nodes) and pinned."""
    est = model_converged_beliefs(params, strategy)
    w = params.w_bar
    cp = (est.beliefs - w).mean(axis=-1)
    cp_corrected = (est.beliefs_corrected - w).mean(axis=-1)
    if np.ndim(cp) == 0:
        cp, cp_corrected = float(cp), float(cp_corrected)
    return ModelEstimate(est.beliefs, est.beliefs_corrected, est.beta, cp, cp_corrected)
