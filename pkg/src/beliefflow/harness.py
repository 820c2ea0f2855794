"""
Seeded experiment pipelines and their reports.

Three families are supported:

``pij``
    synthesize ensembles and compare the model edge probabilities with
    the mean adjacency, per (model, alpha, m) cell;
``cp``
    compare BA and GMG closed-form control power with the exact value
    on a set of test networks;
``strategy``
    compare the exact control power reached by the top-degree and the
    top-weight control sets.

Every random draw is seeded from ``(master_seed, family, cell, item)`` so
results do not depend on evaluation order, and reports serialize to
canonical JSON that is byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .alpha import (AlphaSearchConfig, GraphSummary, control_budget, learn_alpha_full,
                    learn_alpha_partial, relative_errors)
from .control import check_gmg_condition, rank_nodes
from .engine import ControlStrategy, ExactSolver, control_power_samples
from .errors import ConfigError, NonConvergenceError
from .estimators import ModelParams, edge_prob_matrix, model_control_power
from .graph import read_edge_list, snowball_sample
from .synthesis import SynthesisConfig, synthesize, synthesize_with_attachment

FAMILIES = ("pij", "cp", "strategy")
_FAMILY_CODE = {"pij": 1, "cp": 2, "strategy": 3}
FAMILY_ALIASES = {"pij_verification": "pij", "cp_estimation": "cp", "strategy_comparison": "strategy"}
PAIR_EPS = 1e-3


def derive_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Independent stream for one (family, cell, item, ...) coordinate."""
    return np.random.SeedSequence([int(master_seed), *[int(k) for k in key]])


@dataclass
class ExperimentConfig:
    """Configuration of one experiment run.

    Synthetic networks are described by ``model``/``n``/``m_values``/
    ``alpha_values``; ingested ones by ``edge_lists`` (snowball-sampled
    into ``samples_per_network`` sub-networks of ``sample_size`` nodes).
    For the ``cp`` and ``strategy`` families ``alpha`` is either a number
    or ``"full"``/``"partial"`` to learn it on the training networks.
    """

    family: str = "pij"
    model: str = "ba"
    n: int = 100
    m_values: list[int] = field(default_factory=lambda: [3])
    alpha_values: list[float] = field(default_factory=lambda: [0.0])
    realizations: int = 1000
    trials: int = 100
    control_fraction: float = 0.05
    master_seed: int = 0
    edge_lists: list[str] | None = None
    sample_size: int = 100
    samples_per_network: int = 50
    train_networks: int = 25
    test_networks: int = 25
    alpha: float | str = "full"
    alpha_search: dict[str, Any] = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        self.family = FAMILY_ALIASES.get(self.family, self.family)
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.model not in ("ba", "gmg"):
            raise ConfigError(f"model must be 'ba' or 'gmg', got {self.model!r}")
        if self.realizations < 1 or self.trials < 1:
            raise ConfigError("realizations and trials must be >= 1")
        if not 0 <= self.control_fraction <= 1:
            raise ConfigError("control_fraction must lie in [0, 1]")
        if self.edge_lists is not None and self.family == "pij":
            raise ConfigError("the pij family needs a synthetic source")
        if isinstance(self.alpha, str) and self.alpha not in ("full", "partial"):
            raise ConfigError("alpha must be a number, 'full' or 'partial'")
        for m in self.m_values:
            SynthesisConfig(self.n, m)

    @property
    def synthetic(self) -> bool:
        return self.edge_lists is None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        # the output location does not influence results, so it stays out of the echo
        d = asdict(self)
        d.pop("output")
        return d


@dataclass
class ExperimentReport:
    """Result of one run.

    ``cells`` holds one flat record per cell (pij) or network (cp,
    strategy); ``aggregates`` are computed from those records only.
    ``wall_time`` is kept out of the canonical JSON so that reports are
    reproducible byte for byte.
    """

    family: str
    config: dict
    master_seed: int
    library_version: str
    cells: list[dict]
    aggregates: dict
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "config": self.config,
            "master_seed": self.master_seed,
            "library_version": self.library_version,
            "cells": self.cells,
            "aggregates": self.aggregates,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        d = _unjson(json.loads(text))
        return cls(d["family"], d["config"], d["master_seed"], d["library_version"],
                   d["cells"], d["aggregates"])

    def cells_csv(self) -> str:
        buf = io.StringIO()
        if not self.cells:
            return ""
        cols = [k for k, v in self.cells[0].items() if not isinstance(v, (list, dict))]
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for c in self.cells:
            writer.writerow({k: _csv_value(c.get(k)) for k in cols})
        return buf.getvalue()

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json(), encoding="utf-8")
        (out / "cells.csv").write_text(self.cells_csv(), encoding="utf-8")
        (out / "timing.json").write_text(json.dumps({"wall_time": self.wall_time}) + "\n",
                                         encoding="utf-8")
        return out / "report.json"


def _csv_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _jsonable(obj):
    # non-finite floats become tagged strings so the JSON stays standard
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


_SPECIAL = {"NaN": math.nan, "Infinity": math.inf, "-Infinity": -math.inf}


def _unjson(obj):
    if isinstance(obj, dict):
        return {k: _unjson(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_unjson(v) for v in obj]
    if isinstance(obj, str) and obj in _SPECIAL:
        return _SPECIAL[obj]
    return obj


def _mean_se(values) -> tuple[float, float]:
    v = np.asarray([x for x in values if math.isfinite(x)], dtype=float)
    if v.size == 0:
        return math.nan, math.nan
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


# ---------------------------------------------------------------- pij

def pij_cell(model: str, n: int, m: int, alpha: float, realizations: int,
             master_seed: int, cell_id: int) -> dict:
    """Ensemble comparison of model edge probabilities with mean adjacency.

    Two estimates of the mean adjacency are formed from the same
    realizations: the plain average of sampled adjacency matrices and the
    average of conditional edge probabilities recorded during growth. The
    model ``P`` is built from the ensemble-averaged degree (and clustering)
    lists and clipped to [0, 1]. Errors are ``sum|P - A| / sum A`` over
    off-diagonal pairs.
    """
    a_sum = np.zeros((n, n))
    c_sum = np.zeros((n, n))
    d_sum = np.zeros(n)
    g_sum = np.zeros(n)
    for r in range(realizations):
        cfg = SynthesisConfig(n, m, alpha, derive_seed(master_seed, _FAMILY_CODE["pij"], cell_id, r))
        g, probs = synthesize_with_attachment(model, cfg)
        a_sum += g.to_dense()
        c_sum += probs
        d_sum += g.degrees
        g_sum += g.clustering
    a_bar = a_sum / realizations
    c_bar = c_sum / realizations
    d_bar = d_sum / realizations
    g_bar = g_sum / realizations
    params = ModelParams(d_bar, g_bar, alpha if model == "gmg" else None, model=model)
    raw = edge_prob_matrix(params)
    p = np.clip(raw, 0.0, 1.0)
    off = ~np.eye(n, dtype=bool)
    l1 = float(np.abs(p - a_bar)[off].sum())
    mass = float(a_bar[off].sum())
    l1_c = float(np.abs(p - c_bar)[off].sum())
    mass_c = float(c_bar[off].sum())
    per_pair = np.abs(p - a_bar)[off] / np.maximum(a_bar[off], PAIR_EPS)
    return {
        "cell": cell_id,
        "model": model,
        "n": n,
        "m": m,
        "alpha": float(alpha),
        "realizations": realizations,
        "l1_diff": l1,
        "l1_mass": mass,
        "rel_error": l1 / mass,
        "l1_diff_conditional": l1_c,
        "l1_mass_conditional": mass_c,
        "rel_error_conditional": l1_c / mass_c,
        "pairwise_rel_error": float(per_pair.mean()),
        "n_above_one": int(np.count_nonzero(raw[off] > 1.0)),
        "mean_degrees": d_bar.tolist(),
        "mean_clustering": g_bar.tolist(),
    }


def run_pij_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    if not cfg.synthetic:
        raise ConfigError("the pij family needs a synthetic source")
    alphas = [0.0] if cfg.model == "ba" else list(cfg.alpha_values)
    cells = []
    cell_id = 0
    for a in alphas:
        for m in cfg.m_values:
            cells.append(pij_cell(cfg.model, cfg.n, m, a, cfg.realizations, cfg.master_seed, cell_id))
            cell_id += 1
    errs = [c["rel_error"] for c in cells]
    errs_c = [c["rel_error_conditional"] for c in cells]
    aggregates = {
        "max_rel_error": max(errs),
        "mean_rel_error": _mean_se(errs)[0],
        "max_rel_error_conditional": max(errs_c),
        "mean_rel_error_conditional": _mean_se(errs_c)[0],
    }
    return ExperimentReport("pij", cfg.to_dict(), cfg.master_seed, __version__, cells,
                            aggregates, time.perf_counter() - t0)


# ------------------------------------------------------- network sets

def build_networks(cfg: ExperimentConfig):
    """Training and test networks for the cp and strategy families.

    Synthetic: ``train_networks + test_networks`` graphs from the
    configured generator at ``(n, m_values[0], alpha_values[0])``.
    Ingested: snowball samples from each edge list, split in two halves.
    """
    code = _FAMILY_CODE[cfg.family]
    if cfg.synthetic:
        m = cfg.m_values[0]
        a = cfg.alpha_values[0]
        total = cfg.train_networks + cfg.test_networks
        graphs = [synthesize(cfg.model, SynthesisConfig(cfg.n, m, a, derive_seed(cfg.master_seed, code, 0, k)))
                  for k in range(total)]
        return graphs[:cfg.train_networks], graphs[cfg.train_networks:]
    train, test = [], []
    for src_id, path in enumerate(cfg.edge_lists):
        big = read_edge_list(path)
        samples = [snowball_sample(big, cfg.sample_size, derive_seed(cfg.master_seed, code, 100 + src_id, k))
                   for k in range(cfg.samples_per_network)]
        order = np.random.default_rng(derive_seed(cfg.master_seed, code, 200 + src_id)).permutation(len(samples))
        half = len(samples) // 2
        train += [samples[i] for i in order[:half]]
        test += [samples[i] for i in order[half:]]
    return train, test


def resolve_alpha(cfg: ExperimentConfig, train) -> tuple[float, dict]:
    if not isinstance(cfg.alpha, str):
        return float(cfg.alpha), {"alpha": float(cfg.alpha), "method": "fixed"}
    search = dict(cfg.alpha_search)
    if "grid" in search and search["grid"] is not None:
        search["grid"] = tuple(search["grid"])
    if "coarse" in search:
        search["coarse"] = tuple(search["coarse"])
    search.setdefault("seed", int(derive_seed(cfg.master_seed, 9).generate_state(1)[0]))
    search.setdefault("control_fraction", cfg.control_fraction or 0.05)
    acfg = AlphaSearchConfig(**search)
    if cfg.alpha == "full":
        fit = learn_alpha_full(train, acfg)
    else:
        fit = learn_alpha_partial([GraphSummary.from_graph(g) for g in train], acfg)
    return fit.alpha, fit.model_card()


def _top_degree(graph, c) -> ControlStrategy:
    order = np.argsort(-graph.degrees, kind="stable")[:c]
    return ControlStrategy.uniform(sorted(int(i) for i in order), 1.0)


def _budget(n, fraction):
    return 0 if fraction == 0 else control_budget(n, fraction)


# ----------------------------------------------------------------- cp

def cp_network(graph, alpha: float, trials: int, control_fraction: float,
               master_seed: int, net_id: int) -> dict:
    """Exact vs BA vs GMG control power on one network."""
    strategy = _top_degree(graph, _budget(graph.n, control_fraction))
    rng = np.random.default_rng(derive_seed(master_seed, _FAMILY_CODE["cp"], 1, net_id))
    w = rng.uniform(-1.0, 1.0, size=(trials, graph.n))
    exact = control_power_samples(ExactSolver(graph, strategy), w)
    ba = model_control_power(ModelParams(graph.degrees, w_bar=w, model="ba"), strategy)
    rec = {
        "network": net_id,
        "n": graph.n,
        "c": strategy.c,
        "exact_cp": float(exact.mean()),
        "exact_cp_se": float(exact.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        "ba_cp": float(np.mean(ba.cp)),
        "ba_error": float(relative_errors(ba.cp, exact).mean()),
        "ba_beta": ba.beta,
    }
    try:
        gmg = model_control_power(ModelParams(graph.degrees, graph.clustering, alpha, w, "gmg"), strategy)
    except NonConvergenceError as exc:
        rec.update(gmg_cp=math.nan, gmg_error=math.nan, gmg_beta=exc.beta, gmg_convergent=False)
    else:
        rec.update(gmg_cp=float(np.mean(gmg.cp)), gmg_error=float(relative_errors(gmg.cp, exact).mean()),
                   gmg_beta=gmg.beta, gmg_convergent=True)
    rec["gmg_better"] = bool(rec["gmg_convergent"] and rec["gmg_error"] < rec["ba_error"])
    return rec


def run_cp_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    train, test = build_networks(cfg)
    alpha, card = resolve_alpha(cfg, train)
    cells = [cp_network(g, alpha, cfg.trials, cfg.control_fraction, cfg.master_seed, k)
             for k, g in enumerate(test)]
    conv = [c for c in cells if c["gmg_convergent"]]
    ba_m, ba_se = _mean_se(c["ba_error"] for c in cells)
    gm_m, gm_se = _mean_se(c["gmg_error"] for c in conv)
    aggregates = {
        "alpha": alpha,
        "alpha_fit": card,
        "ba_error_mean": ba_m,
        "ba_error_se": ba_se,
        "gmg_error_mean": gm_m,
        "gmg_error_se": gm_se,
        "gmg_excluded": len(cells) - len(conv),
        "gmg_win_rate": sum(c["gmg_better"] for c in cells) / len(cells) if cells else math.nan,
        "exact_cp_mean": _mean_se(c["exact_cp"] for c in cells)[0],
    }
    return ExperimentReport("cp", cfg.to_dict(), cfg.master_seed, __version__, cells,
                            aggregates, time.perf_counter() - t0)


# ----------------------------------------------------------- strategy

def strategy_network(graph, alpha: float, trials: int, control_fraction: float,
                     master_seed: int, net_id: int) -> dict:
    """Exact control power of the top-degree and top-weight sets on one network.

    Both sets are evaluated on the same private-belief draws.
    """
    c = _budget(graph.n, control_fraction)
    ba_set = _top_degree(graph, c)
    params = ModelParams(graph.degrees, graph.clustering, alpha, model="gmg")
    gmg_set = ControlStrategy.uniform(sorted(int(i) for i in rank_nodes(params)[:c]), 1.0)
    rng = np.random.default_rng(derive_seed(master_seed, _FAMILY_CODE["strategy"], 1, net_id))
    w = rng.uniform(-1.0, 1.0, size=(trials, graph.n))
    ba_cp = control_power_samples(ExactSolver(graph, ba_set), w)
    gmg_cp = ba_cp if gmg_set == ba_set else control_power_samples(ExactSolver(graph, gmg_set), w)
    cond = check_gmg_condition(params, gmg_set)
    return {
        "network": net_id,
        "n": graph.n,
        "c": c,
        "same_set": gmg_set == ba_set,
        "ba_cp": float(ba_cp.mean()),
        "gmg_cp": float(gmg_cp.mean()),
        "gmg_at_least_ba": bool(gmg_cp.mean() >= ba_cp.mean()),
        "condition_satisfied": cond.satisfied,
        "ba_set": list(ba_set.control_set),
        "gmg_set": list(gmg_set.control_set),
    }


def run_strategy_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    train, test = build_networks(cfg)
    alpha, card = resolve_alpha(cfg, train)
    cells = [strategy_network(g, alpha, cfg.trials, cfg.control_fraction, cfg.master_seed, k)
             for k, g in enumerate(test)]
    ba_m, ba_se = _mean_se(c["ba_cp"] for c in cells)
    gm_m, gm_se = _mean_se(c["gmg_cp"] for c in cells)
    aggregates = {
        "alpha": alpha,
        "alpha_fit": card,
        "ba_cp_mean": ba_m,
        "ba_cp_se": ba_se,
        "gmg_cp_mean": gm_m,
        "gmg_cp_se": gm_se,
        "gmg_win_rate": sum(c["gmg_at_least_ba"] for c in cells) / len(cells) if cells else math.nan,
        "same_set_count": sum(c["same_set"] for c in cells),
        "condition_satisfied_count": sum(c["condition_satisfied"] for c in cells),
    }
    return ExperimentReport("strategy", cfg.to_dict(), cfg.master_seed, __version__, cells,
                            aggregates, time.perf_counter() - t0)


RUNNERS = {
    "pij": run_pij_experiment,
    "cp": run_cp_experiment,
    "strategy": run_strategy_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[cfg.family](cfg)
