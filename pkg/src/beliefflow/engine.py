"""
Exact belief dynamics on a fixed graph.

Every node holds a private belief ``w_i`` in [-1, 1]. Starting from
``b(0) = w``, each step replaces a free node's belief with the average of
its own private belief and its neighbors' current beliefs::

    b_i(T) = (w_i + sum_{j ~ i} b_j(T-1)) / (1 + d_i)

while controlled nodes are pinned to their broadcast value. In the
row-vector form ``B(T) = [w* + B(T-1) A*] M + V`` the converged state
solves ``B (I - A* M) = w* M + V``; the column sums of ``A*`` are
``d_j / (1 + d_j) < 1``, so the system is always nonsingular and the
iteration always contracts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigError, NonConvergenceError, SolveError
from .graph import DENSE_THRESHOLD, Graph, adjusted_adjacency

DEFAULT_TOL = 1e-10
DEFAULT_T_MAX = 100_000


@dataclass(frozen=True)
class ControlStrategy:
    """Control set with the belief each control node broadcasts."""

    control_set: tuple[int, ...] = ()
    controlled_beliefs: tuple[float, ...] = ()

    def __post_init__(self):
        cs = tuple(int(i) for i in self.control_set)
        cb = tuple(float(b) for b in self.controlled_beliefs)
        object.__setattr__(self, "control_set", cs)
        object.__setattr__(self, "controlled_beliefs", cb)
        if len(cs) != len(cb):
            raise ConfigError("control_set and controlled_beliefs differ in length")
        if len(set(cs)) != len(cs):
            raise ConfigError("control_set contains duplicates")
        if any(abs(b) > 1 for b in cb):
            raise ConfigError("controlled beliefs must lie in [-1, 1]")

    @classmethod
    def uniform(cls, nodes: Sequence[int], belief: float = 1.0) -> "ControlStrategy":
        return cls(tuple(nodes), (belief,) * len(nodes))

    @property
    def c(self) -> int:
        return len(self.control_set)

    @cached_property
    def index(self) -> np.ndarray:
        return np.array(self.control_set, dtype=np.int64)

    @cached_property
    def values(self) -> np.ndarray:
        return np.array(self.controlled_beliefs, dtype=float)

    def validate(self, n: int) -> None:
        idx = self.index
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ConfigError(f"control node index out of range for n={n}")

    def mask(self, n: int) -> np.ndarray:
        """Boolean vector, True at controlled nodes."""
        self.validate(n)
        out = np.zeros(n, dtype=bool)
        out[self.index] = True
        return out

    def vector(self, n: int) -> np.ndarray:
        """Control vector ``V``: the broadcast belief at control nodes, else 0."""
        self.validate(n)
        v = np.zeros(n)
        v[self.index] = self.values
        return v

    def pin(self, w: np.ndarray) -> np.ndarray:
        """Copy of ``w`` with controlled entries overwritten by their beliefs."""
        out = np.array(w, dtype=float, copy=True)
        out[..., self.index] = self.values
        return out


NO_CONTROL = ControlStrategy()


@dataclass(frozen=True)
class BeliefState:
    b: np.ndarray
    w: np.ndarray
    t: int = 0


@dataclass(frozen=True)
class PrivateBeliefDistribution:
    """Distribution of the private-belief vector.

    ``kind`` is ``"uniform"`` (iid on [-1, 1]), ``"constant"`` (``value``
    broadcast to every node, or a full vector) or ``"custom"`` (``sampler``
    called as ``sampler(rng, n)``; ``mean`` must then be supplied).
    """

    kind: str = "uniform"
    value: float | np.ndarray | None = None
    sampler: Callable | None = field(default=None, repr=False)
    mean: float | np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "constant", "custom"):
            raise ConfigError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "constant":
            if self.value is None:
                raise ConfigError("constant distribution needs a value")
            if np.any(np.abs(np.asarray(self.value)) > 1):
                raise ConfigError("private beliefs must lie in [-1, 1]")
        if self.kind == "custom" and (self.sampler is None or self.mean is None):
            raise ConfigError("custom distribution needs sampler and mean")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def constant(cls, value):
        return cls("constant", value=value)

    @property
    def deterministic(self) -> bool:
        return self.kind == "constant"

    def mean_vector(self, n: int) -> np.ndarray:
        if self.kind == "uniform":
            return np.zeros(n)
        src = self.value if self.kind == "constant" else self.mean
        return np.broadcast_to(np.asarray(src, dtype=float), (n,)).copy()

    def sample(self, rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
        """Draw one vector (``size=None``) or a ``(size, n)`` block."""
        shape = (n,) if size is None else (size, n)
        if self.kind == "uniform":
            return rng.uniform(-1.0, 1.0, size=shape)
        if self.kind == "constant":
            return np.broadcast_to(self.mean_vector(n), shape).copy()
        if size is None:
            out = np.asarray(self.sampler(rng, n), dtype=float)
        else:
            out = np.stack([np.asarray(self.sampler(rng, n), dtype=float) for _ in range(size)])
        if np.any(np.abs(out) > 1):
            raise ValueError("sampler produced beliefs outside [-1, 1]")
        return out


def _check_dims(graph: Graph, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != graph.n:
        raise ConfigError(f"belief vector length {w.shape[-1]} != node count {graph.n}")
    return w


def initial_state(graph: Graph, w, strategy: ControlStrategy = NO_CONTROL) -> BeliefState:
    w = _check_dims(graph, w)
    strategy.validate(graph.n)
    return BeliefState(b=strategy.pin(w), w=w.copy(), t=0)


def step(state: BeliefState, graph: Graph, strategy: ControlStrategy = NO_CONTROL) -> BeliefState:
    """One synchronous update of every free node."""
    b = _check_dims(graph, state.b)
    w = _check_dims(graph, state.w)
    new = (w + graph.adjacency @ b) / (1.0 + graph.degrees)
    return BeliefState(b=strategy.pin(new), w=state.w, t=state.t + 1)


def converge_iterative(graph: Graph, w, strategy: ControlStrategy = NO_CONTROL,
                       tol: float = DEFAULT_TOL, t_max: int = DEFAULT_T_MAX,
                       callback: Callable[[BeliefState], None] | None = None):
    """Iterate :func:`step` until the sup-norm change drops below ``tol``.

    Returns ``(b, steps)``. Raises :class:`NonConvergenceError` carrying
    the last residual if ``t_max`` steps are not enough.
    """
    if tol <= 0:
        raise ConfigError("tol must be positive")
    state = initial_state(graph, w, strategy)
    if callback is not None:
        callback(state)
    a = graph.adjacency
    scale = 1.0 / (1.0 + graph.degrees)
    b = state.b
    w = state.w
    resid = math.inf
    for t in range(1, t_max + 1):
        new = strategy.pin((w + a @ b) * scale)
        resid = float(np.max(np.abs(new - b))) if b.size else 0.0
        b = new
        if callback is not None:
            callback(BeliefState(b=b, w=w, t=t))
        if resid < tol:
            return b, t
    raise NonConvergenceError(
        f"no convergence after {t_max} steps (residual {resid:.3e})",
        residual=resid, steps=t_max)


class ExactSolver:
    """Factorized ``(I - A* M)`` for one graph and control set.

    The converged belief is linear in ``w``, so a single factorization
    serves any number of private-belief vectors (rows of a 2-D ``w``).
    """

    def __init__(self, graph: Graph, strategy: ControlStrategy = NO_CONTROL,
                 sparse: bool | None = None):
        strategy.validate(graph.n)
        self.graph = graph
        self.strategy = strategy
        n = graph.n
        self.free = ~strategy.mask(n)
        self.v = strategy.vector(n)
        self.scale = 1.0 / (1.0 + graph.degrees)
        if sparse is None:
            sparse = n >= DENSE_THRESHOLD
        self.sparse = sparse
        a_star = adjusted_adjacency(graph, sparse=sparse)
        m = sp.diags(self.free.astype(float)) if sparse else self.free.astype(float)
        # Row-vector system x K = r  <=>  K^T x^T = r^T with K = I - A* M.
        if sparse:
            k_t = (sp.identity(n, format="csc") - (a_star @ m).T).tocsc()
            try:
                self._lu = spla.splu(k_t)
            except RuntimeError as exc:
                raise SolveError(f"sparse factorization failed: {exc}") from exc
        else:
            k_t = np.eye(n) - (a_star * m[None, :]).T
            self._k_t = k_t
            self._lu = sla.lu_factor(k_t, check_finite=True)
            diag = np.abs(np.diag(self._lu[0]))
            if n and diag.min() == 0:
                raise SolveError("singular system", condition=math.inf)

    def rhs(self, w: np.ndarray) -> np.ndarray:
        return w * self.scale * self.free + self.v

    def solve(self, w) -> np.ndarray:
        """Converged beliefs for one ``(n,)`` or many ``(k, n)`` vectors."""
        w = _check_dims(self.graph, w)
        r = self.rhs(w)
        if self.sparse:
            x = self._lu.solve(np.atleast_2d(r).T).T
        else:
            x = sla.lu_solve(self._lu, np.atleast_2d(r).T).T
        if not np.all(np.isfinite(x)):
            raise SolveError("non-finite solution", condition=self.condition())
        x[:, ~self.free] = self.v[~self.free]
        return x[0] if w.ndim == 1 else x

    def condition(self) -> float:
        if self.sparse:
            return math.nan
        return float(np.linalg.cond(self._k_t, 1))


def converge_exact(graph: Graph, w, strategy: ControlStrategy = NO_CONTROL) -> np.ndarray:
    """Converged beliefs by LU solve of ``B (I - A* M) = w* M + V``."""
    return ExactSolver(graph, strategy).solve(w)


@dataclass(frozen=True)
class ControlPowerEstimate:
    """Monte Carlo estimate of the network control power.

    ``mean`` is the signed average shift ``(1/N) sum_i (B_i - w_i)``;
    ``abs_mean`` its magnitude. ``samples`` keeps the per-draw values.
    """

    mean: float
    stderr: float
    n_samples: int
    samples: np.ndarray = field(repr=False)

    @property
    def abs_mean(self) -> float:
        return abs(self.mean)


def control_power_samples(solver: ExactSolver, w: np.ndarray,
                          pin_private: bool = False) -> np.ndarray:
    """Exact control power for each row of ``w``.

    By default a controlled node contributes ``B* - w_i`` with its drawn
    private belief, matching the model estimators' ``- w_bar_i`` term.
    With ``pin_private`` its private belief is replaced by ``B*`` first,
    so it contributes zero.
    """
    w = np.atleast_2d(w)
    b = solver.solve(w)
    w_eff = solver.strategy.pin(w) if pin_private else w
    return (b - w_eff).mean(axis=1)


def control_power_exact(graph: Graph, dist: PrivateBeliefDistribution,
                        strategy: ControlStrategy = NO_CONTROL, n_samples: int = 100,
                        seed=None, pin_private: bool = False) -> ControlPowerEstimate:
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    solver = ExactSolver(graph, strategy)
    if dist.deterministic:
        n_samples = 1
    rng = np.random.default_rng(seed)
    w = dist.sample(rng, graph.n, size=n_samples)
    cps = control_power_samples(solver, w, pin_private=pin_private)
    se = float(cps.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return ControlPowerEstimate(float(cps.mean()), se, n_samples, cps)


def expected_converged_beliefs(graph: Graph, w_bar, strategy: ControlStrategy = NO_CONTROL):
    """``E[B(inf)]`` through linearity: the solve applied to the mean vector."""
    return converge_exact(graph, w_bar, strategy)


def control_power_expected(graph: Graph, dist: PrivateBeliefDistribution,
                           strategy: ControlStrategy = NO_CONTROL,
                           pin_private: bool = False) -> float:
    """Closed-form expected control power (no sampling)."""
    w_bar = dist.mean_vector(graph.n)
    b = expected_converged_beliefs(graph, w_bar, strategy)
    ref = strategy.pin(w_bar) if pin_private else w_bar
    return float((b - ref).mean())


def residual(graph: Graph, b, w, strategy: ControlStrategy = NO_CONTROL) -> float:
    """Sup-norm distance between ``b`` and one update step applied to it."""
    nxt = step(BeliefState(np.asarray(b, float), np.asarray(w, float)), graph, strategy)
    return float(np.max(np.abs(nxt.b - b))) if graph.n else 0.0


def beliefs_to_json(w, strategy: ControlStrategy, b_inf) -> str:
    return json.dumps({
        "w": [float(x) for x in w],
        "control_set": list(strategy.control_set),
        "controlled_beliefs": list(strategy.controlled_beliefs),
        "b_inf": [float(x) for x in b_inf],
    })


def beliefs_from_json(text: str):
    d = json.loads(text)
    strategy = ControlStrategy(tuple(d.get("control_set", ())),
                               tuple(d.get("controlled_beliefs", ())))
    b_inf = d.get("b_inf")
    return (np.asarray(d["w"], float), strategy,
            None if b_inf is None else np.asarray(b_inf, float))
