"""Control-set selection: closed-form ranking rules and an exhaustive oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .engine import ControlStrategy, converge_exact
from .errors import CombinatorialGuardError, ConfigError, NonConvergenceError
from .estimators import ModelParams, beta, model_control_power

MAX_CANDIDATES = 1_000_000


@dataclass(frozen=True)
class GMGCondition:
    """Both sides of the GMG optimality condition ``1/beta > rhs``."""

    satisfied: bool
    lhs: float
    rhs: float
    beta: float
    trivial: bool = False


@dataclass(frozen=True)
class OptimizationResult:
    strategy: ControlStrategy
    predicted_cp: float
    beta: float
    condition_satisfied: bool | None = None
    condition: GMGCondition | None = None


def rank_nodes(params: ModelParams) -> np.ndarray:
    """Node indices by descending weight; ties go to the smaller index."""
    return np.argsort(-params.weights, kind="stable")


def _literal_cp(params: ModelParams, strategy: ControlStrategy) -> float:
    try:
        return float(model_control_power(params, strategy).cp)
    except NonConvergenceError:
        return math.nan


def check_gmg_condition(params: ModelParams, strategy: ControlStrategy) -> GMGCondition:
    """Evaluate ``1/beta_2 > 1 + max(1, 2^alpha) sum_ctrl xi / sum_free xi^2/(1+d)``.

    With no control the right side is 1 and the test reduces to
    ``beta_2 < 1``. When every weighted node is controlled ``beta_2`` is 0
    and the condition holds trivially (``trivial=True``).
    """
    if params.model != "gmg":
        raise ConfigError("the optimality condition applies to the GMG model")
    ctrl = strategy.mask(params.n)
    xi = params.weights
    b = beta(params, strategy)
    if b == 0:
        return GMGCondition(True, math.inf, math.nan, 0.0, trivial=True)
    free_sum = float(np.sum(xi[~ctrl] ** 2 / (1.0 + params.degrees[~ctrl])))
    factor = max(1.0, 2.0 ** float(params.alpha))
    rhs = 1.0 + factor * float(xi[ctrl].sum()) / free_sum
    lhs = 1.0 / b
    return GMGCondition(bool(lhs > rhs), lhs, rhs, b)


def optimal_control_set(params: ModelParams, c: int) -> OptimizationResult:
    """Top-``c`` nodes by weight (degree for BA, ``xi`` for GMG), all set to 1.

    For GMG the optimality condition is evaluated and reported; the
    top-weight set is returned even when it fails.
    """
    if c < 0 or c > params.n:
        raise ConfigError(f"budget c={c} outside [0, {params.n}]")
    nodes = sorted(int(i) for i in rank_nodes(params)[:c])
    strategy = ControlStrategy.uniform(nodes, 1.0)
    cond = check_gmg_condition(params, strategy) if params.model == "gmg" else None
    return OptimizationResult(
        strategy=strategy,
        predicted_cp=_literal_cp(params, strategy),
        beta=beta(params, strategy),
        condition_satisfied=None if cond is None else cond.satisfied,
        condition=cond,
    )


def brute_force_control_set(params: ModelParams, c: int, objective: str = "model",
                            graph=None) -> OptimizationResult:
    """Exhaustive argmax of control power over all ``c``-subsets.

    ``objective="model"`` scores the closed-form control power as written;
    ``objective="exact"`` scores the exact converged beliefs on ``graph``
    with private beliefs ``params.w_bar``. Exact ties keep the
    lexicographically smallest subset. Subsets whose model series diverges
    score ``-inf``.
    """
    n = params.n
    if c < 0 or c > n:
        raise ConfigError(f"budget c={c} outside [0, {n}]")
    total = math.comb(n, c)
    if total > MAX_CANDIDATES:
        raise CombinatorialGuardError(
            f"C({n}, {c}) = {total} subsets exceeds {MAX_CANDIDATES}; "
            "use optimal_control_set instead")
    if objective == "exact":
        if graph is None:
            raise ConfigError("exact objective needs a graph")
        w = np.asarray(params.w_bar, dtype=float)

        def score(s):
            return float((converge_exact(graph, w, s) - w).mean())
    elif objective == "model":
        def score(s):
            v = _literal_cp(params, s)
            return -math.inf if math.isnan(v) else v
    else:
        raise ConfigError(f"unknown objective {objective!r}")

    best, best_val = None, -math.inf
    for subset in combinations(range(n), c):
        s = ControlStrategy.uniform(subset, 1.0)
        v = score(s)
        if best is None or v > best_val:
            best, best_val = s, v
    cond = check_gmg_condition(params, best) if params.model == "gmg" else None
    return OptimizationResult(
        strategy=best,
        predicted_cp=_literal_cp(params, best),
        beta=beta(params, best),
        condition_satisfied=None if cond is None else cond.satisfied,
        condition=cond,
    )
