"""
Learning the clustering weight alpha from a set of training networks.

Two procedures are provided. :func:`learn_alpha_full` needs full
adjacency: it picks the alpha whose closed-form GMG control power best
matches the exact control power. :func:`learn_alpha_partial` needs only
degree and clustering lists: it picks the alpha whose synthesized GMG
ensembles best reproduce those lists.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import ControlStrategy, ExactSolver, control_power_samples
from .errors import ConfigError, LearningError, NonConvergenceError
from .estimators import ModelParams, model_control_power
from .graph import Graph
from .synthesis import SynthesisConfig, synthesize_gmg

REL_ERROR_FLOOR = 1e-9


def coarse_grid(lo=-4.0, hi=4.0, step=0.1) -> np.ndarray:
    k = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(k + 1), 10)


def fine_grid(center: float, step=0.01, halfwidth=0.1) -> np.ndarray:
    k = int(round(halfwidth / step))
    return np.round(center + step * np.arange(-k, k + 1), 10)


@dataclass(frozen=True)
class AlphaSearchConfig:
    """Search settings.

    With ``grid=None`` a coarse grid on ``coarse`` = (lo, hi, step) is
    evaluated first, then a fine grid of step ``fine_step`` spanning
    ``+-fine_halfwidth`` around the coarse optimum. An explicit ``grid``
    is evaluated as given, without refinement.
    """

    grid: tuple[float, ...] | None = None
    trials: int = 100
    control_fraction: float = 0.05
    seed: int = 0
    coarse: tuple[float, float, float] = (-4.0, 4.0, 0.1)
    fine_step: float = 0.01
    fine_halfwidth: float = 0.1

    def __post_init__(self):
        if self.grid is not None:
            g = tuple(float(x) for x in self.grid)
            if not g:
                raise ConfigError("grid must not be empty")
            if list(g) != sorted(g):
                raise ConfigError("grid must be sorted")
            object.__setattr__(self, "grid", g)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 < self.control_fraction <= 1:
            raise ConfigError("control_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class GraphSummary:
    """Partial information about one network: its lists, size and m."""

    degrees: np.ndarray
    clusterings: np.ndarray
    n: int
    m: int

    @classmethod
    def from_graph(cls, graph: Graph, m: int | None = None) -> "GraphSummary":
        if m is None:
            m = max(1, int(round(graph.n_edges / graph.n)))
        return cls(np.asarray(graph.degrees, float), np.asarray(graph.clustering, float),
                   graph.n, int(m))


@dataclass
class AlphaFit:
    alpha: float
    error: float
    method: str
    grid: list[float] = field(default_factory=list)
    error_curve: list[float] = field(default_factory=list)
    seed: int = 0
    subcategory: str = ""

    def model_card(self) -> dict:
        return {
            "subcategory": self.subcategory,
            "alpha": self.alpha,
            "method": self.method,
            "grid": list(self.grid),
            "error_curve": [None if not math.isfinite(e) else e for e in self.error_curve],
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.model_card(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AlphaFit":
        d = json.loads(text)
        curve = [math.inf if e is None else float(e) for e in d["error_curve"]]
        grid = [float(a) for a in d["grid"]]
        k = grid.index(float(d["alpha"]))
        return cls(float(d["alpha"]), curve[k], d["method"], grid, curve,
                   int(d["seed"]), d.get("subcategory", ""))


def control_budget(n: int, fraction: float) -> int:
    # round first so that e.g. 0.05 * 100 does not ceil to 6
    return max(1, math.ceil(round(fraction * n, 9)))


def top_degree_strategy(graph: Graph, fraction: float) -> ControlStrategy:
    """Top ``ceil(fraction * n)`` nodes by degree, ties to smaller index, B* = 1."""
    c = control_budget(graph.n, fraction)
    order = np.argsort(-graph.degrees, kind="stable")[:c]
    return ControlStrategy.uniform(sorted(int(i) for i in order), 1.0)


def relative_errors(model_cp, exact_cp) -> np.ndarray:
    """``|model - exact| / |exact|``, absolute error where ``|exact| < 1e-9``."""
    model_cp = np.asarray(model_cp, float)
    exact_cp = np.asarray(exact_cp, float)
    diff = np.abs(model_cp - exact_cp)
    small = np.abs(exact_cp) < REL_ERROR_FLOOR
    return np.where(small, diff, diff / np.where(small, 1.0, np.abs(exact_cp)))


def _seed(*key) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(k) for k in key])


class _FullObjective:
    """Cached exact control powers for every training graph."""

    def __init__(self, graphs: Sequence[Graph], cfg: AlphaSearchConfig):
        self.items = []
        for gi, g in enumerate(graphs):
            strategy = top_degree_strategy(g, cfg.control_fraction)
            rng = np.random.default_rng(_seed(cfg.seed, gi))
            w = rng.uniform(-1.0, 1.0, size=(cfg.trials, g.n))
            exact = control_power_samples(ExactSolver(g, strategy), w)
            self.items.append((g, strategy, w, exact))

    def per_graph(self, alpha: float) -> np.ndarray:
        out = np.empty(len(self.items))
        for k, (g, strategy, w, exact) in enumerate(self.items):
            params = ModelParams(g.degrees, g.clustering, alpha, w, "gmg")
            try:
                est = model_control_power(params, strategy)
            except NonConvergenceError:
                out[k] = math.inf
                continue
            out[k] = relative_errors(est.cp, exact).mean()
        return out

    def __call__(self, alpha: float) -> float:
        return float(self.per_graph(alpha).mean())


class _PartialObjective:
    """Sorted-list distance between synthesized ensembles and training lists."""

    def __init__(self, summaries: Sequence[GraphSummary], cfg: AlphaSearchConfig):
        ns = {s.n for s in summaries}
        ms = {s.m for s in summaries}
        if len(ns) != 1 or len(ms) != 1:
            raise ConfigError("training summaries must share n and m")
        self.n, self.m = ns.pop(), ms.pop()
        SynthesisConfig(self.n, self.m)  # validates n >= m + 1
        self.cfg = cfg
        # training lists are averaged rank by rank, like the synthesized ensemble
        self.target = (np.mean([np.sort(s.degrees)[::-1] for s in summaries], axis=0),
                       np.mean([np.sort(s.clusterings)[::-1] for s in summaries], axis=0))

    def ensemble(self, alpha: float):
        deg = np.zeros(self.n)
        clu = np.zeros(self.n)
        for t in range(self.cfg.trials):
            # seeds depend on the trial only: common random numbers across alpha
            g = synthesize_gmg(SynthesisConfig(self.n, self.m, alpha, _seed(self.cfg.seed, t)))
            deg += np.sort(g.degrees)[::-1]
            clu += np.sort(g.clustering)[::-1]
        return deg / self.cfg.trials, clu / self.cfg.trials

    def __call__(self, alpha: float) -> float:
        deg, clu = self.ensemble(alpha)
        d_t, c_t = self.target
        dd = np.abs(deg - d_t).sum() / max(d_t.sum(), REL_ERROR_FLOOR)
        dc = np.abs(clu - c_t).sum() / max(c_t.sum(), REL_ERROR_FLOOR)
        return float(dd + dc)


def _search(objective, cfg: AlphaSearchConfig, method: str) -> AlphaFit:
    evaluated: dict[float, float] = {}

    def run(grid):
        for a in grid:
            a = float(a)
            if a not in evaluated:
                evaluated[a] = objective(a)

    if cfg.grid is not None:
        run(cfg.grid)
    else:
        run(coarse_grid(*cfg.coarse))
        finite = {a: e for a, e in evaluated.items() if math.isfinite(e)}
        if finite:
            center = min(finite, key=lambda a: (finite[a], a))
            run(fine_grid(center, cfg.fine_step, cfg.fine_halfwidth))
    grid = sorted(evaluated)
    curve = [evaluated[a] for a in grid]
    finite = [(e, a) for a, e in zip(grid, curve) if math.isfinite(e)]
    if not finite:
        raise LearningError("every alpha candidate diverged on the training set",
                            diagnostics={"grid": grid})
    err, best = min(finite)
    return AlphaFit(best, err, method, grid, curve, cfg.seed)


def learn_alpha_full(graphs: Sequence[Graph], cfg: AlphaSearchConfig = AlphaSearchConfig()) -> AlphaFit:
    """Alpha minimizing the mean relative error of GMG control power.

    For each training graph the control set is the top-degree
    ``ceil(control_fraction * n)`` nodes at B* = 1 and ``trials`` uniform
    private-belief vectors are drawn. Each draw is evaluated exactly and
    with the closed form (the draw itself serving as ``w_bar``); relative
    errors are averaged over draws, then over graphs. A candidate that
    diverges on a graph scores ``inf`` there.
    """
    if not graphs:
        raise ConfigError("training set is empty")
    for g in graphs:
        if g.n < 1:
            raise ConfigError("training graphs must be non-empty")
    return _search(_FullObjective(graphs, cfg), cfg, "full")


def learn_alpha_partial(summaries: Sequence[GraphSummary | Graph],
                        cfg: AlphaSearchConfig = AlphaSearchConfig()) -> AlphaFit:
    """Alpha whose GMG ensembles best reproduce the training lists.

    For each candidate, ``trials`` graphs with the training ``(n, m)`` are
    synthesized and their descending-sorted degree and clustering lists
    averaged rank by rank; the training lists are averaged the same way.
    The score is the L1 distance between the two averaged degree lists
    divided by the training list's sum, plus the same quantity for the
    clustering lists.
    """
    if not summaries:
        raise ConfigError("training set is empty")
    summaries = [GraphSummary.from_graph(s) if isinstance(s, Graph) else s for s in summaries]
    return _search(_PartialObjective(summaries, cfg), cfg, "partial")


def evaluate_alpha(method: str, training, alpha: float, cfg: AlphaSearchConfig) -> float:
    """Training error of one candidate, recomputed from scratch."""
    if method == "full":
        return _FullObjective(training, cfg)(alpha)
    if method == "partial":
        training = [GraphSummary.from_graph(s) if isinstance(s, Graph) else s for s in training]
        return _PartialObjective(training, cfg)(alpha)
    raise ConfigError(f"unknown method {method!r}")
