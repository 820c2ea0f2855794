"""
Command-line entry point.

Exit codes: 0 on success, 2 on invalid configuration or input, 3 when an
iteration, series or alpha search fails to converge.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .alpha import AlphaSearchConfig, GraphSummary, learn_alpha_full, learn_alpha_partial
from .control import brute_force_control_set, optimal_control_set
from .engine import (NO_CONTROL, ControlStrategy, beliefs_to_json, converge_exact,
                     converge_iterative)
from .errors import BeliefFlowError, ConfigError, LearningError, NonConvergenceError, SolveError
from .estimators import ModelParams, model_control_power
from .graph import read_edge_list, write_edge_list
from .harness import ExperimentConfig, run_experiment
from .synthesis import SynthesisConfig, synthesize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3

EDGE_LIST_SUFFIXES = (".txt", ".edges", ".edgelist", ".tsv", ".csv")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _read_vector(path) -> np.ndarray:
    """A JSON list, a beliefs document (its ``w``), or whitespace-separated numbers."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError:
        try:
            return np.array([float(t) for t in text.split()])
        except ValueError as exc:
            raise ConfigError(f"{path}: not a list of numbers") from exc
    if isinstance(d, dict):
        d = d.get("w")
    if not isinstance(d, list):
        raise ConfigError(f"{path}: expected a list of numbers")
    return np.asarray(d, dtype=float)


def _read_control(path) -> ControlStrategy:
    if path is None:
        return NO_CONTROL
    d = _read_json(path)
    return ControlStrategy(tuple(d.get("control_set", ())), tuple(d.get("controlled_beliefs", ())))


def _read_degrees(path):
    """JSON ``{"degrees": [...], "clusterings": [...]}`` or one/two text columns."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
        return np.asarray(d["degrees"], float), (None if d.get("clusterings") is None
                                                 else np.asarray(d["clusterings"], float))
    except json.JSONDecodeError:
        pass
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: expected a 'degrees' list") from exc
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        arr = np.array([[float(x) for x in r] for r in rows])
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric degree entry") from exc
    if arr.ndim != 2 or arr.shape[1] not in (1, 2):
        raise ConfigError(f"{path}: expected one or two columns")
    return arr[:, 0], (arr[:, 1] if arr.shape[1] == 2 else None)


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_grid(text: str):
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"grid must be LO:HI:STEP, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise ConfigError("grid needs LO <= HI and STEP > 0")
    return lo, hi, step


def _params(model, degrees, clusterings, alpha, w_bar=None) -> ModelParams:
    if model == "gmg" and alpha is None:
        raise ConfigError("--alpha is required for the gmg model")
    return ModelParams(degrees, clusterings, alpha if model == "gmg" else None, w_bar, model)


# ------------------------------------------------------------ commands

def cmd_synth(args):
    g = synthesize(args.model, SynthesisConfig(args.nodes, args.m, args.alpha, args.seed))
    if args.out in (None, "-"):
        from .graph import format_edge_list
        sys.stdout.write(format_edge_list(g))
    else:
        write_edge_list(g, args.out)


def cmd_simulate(args):
    g = read_edge_list(args.graph)
    strategy = _read_control(args.control)
    if args.w_uniform:
        w = np.random.default_rng(args.seed).uniform(-1.0, 1.0, g.n)
    else:
        w = _read_vector(args.w)
    if args.method == "exact":
        b = converge_exact(g, w, strategy)
    else:
        b, _ = converge_iterative(g, w, strategy, tol=args.tol, t_max=args.t_max)
    _write(args.out, beliefs_to_json(w, strategy, b) + "\n")


def cmd_estimate(args):
    if args.graph:
        g = read_edge_list(args.graph)
        degrees, clusterings = g.degrees, g.clustering
    else:
        degrees, clusterings = _read_degrees(args.degrees)
    w_bar = None if args.w_bar is None else _read_vector(args.w_bar)
    params = _params(args.model, degrees, clusterings, args.alpha, w_bar)
    strategy = _read_control(args.control)
    est = model_control_power(params, strategy)
    _write(args.out, _dump({
        "model": args.model,
        "alpha": params.alpha,
        "beta": est.beta,
        "cp": est.cp,
        "cp_corrected": est.cp_corrected,
        "beliefs": est.beliefs.tolist(),
        "beliefs_corrected": est.beliefs_corrected.tolist(),
        "control_set": list(strategy.control_set),
        "controlled_beliefs": list(strategy.controlled_beliefs),
    }))


def cmd_optimize(args):
    g = read_edge_list(args.graph)
    params = _params(args.model, g.degrees, g.clustering, args.alpha)
    if args.brute_force:
        res = brute_force_control_set(params, args.budget)
    else:
        res = optimal_control_set(params, args.budget)
    cond = res.condition
    _write(args.out, _dump({
        "model": args.model,
        "alpha": params.alpha,
        "budget": args.budget,
        "method": "brute-force" if args.brute_force else "ranking",
        "control_set": list(res.strategy.control_set),
        "controlled_beliefs": list(res.strategy.controlled_beliefs),
        "node_ids": [int(g.ids[i]) for i in res.strategy.control_set],
        "predicted_cp": None if np.isnan(res.predicted_cp) else res.predicted_cp,
        "beta": res.beta,
        "condition_satisfied": res.condition_satisfied,
        "condition": None if cond is None else {
            "lhs": cond.lhs if np.isfinite(cond.lhs) else None,
            "rhs": cond.rhs if np.isfinite(cond.rhs) else None,
            "trivial": cond.trivial,
        },
    }))


def _training_files(directory):
    d = Path(directory)
    if not d.is_dir():
        raise ConfigError(f"training directory {directory} does not exist")
    files = sorted(p for p in d.iterdir() if p.suffix in EDGE_LIST_SUFFIXES)
    if not files:
        raise ConfigError(f"no edge-list files in {directory}")
    return files


def cmd_learn_alpha(args):
    graphs = [read_edge_list(p) for p in _training_files(args.train)]
    kw = dict(trials=args.trials, control_fraction=args.control_fraction, seed=args.seed)
    if args.grid:
        kw["coarse"] = _parse_grid(args.grid)
    if args.no_refine:
        lo, hi, step = kw.get("coarse", (-4.0, 4.0, 0.1))
        from .alpha import coarse_grid
        kw["grid"] = tuple(coarse_grid(lo, hi, step))
    cfg = AlphaSearchConfig(**kw)
    if args.method == "full":
        fit = learn_alpha_full(graphs, cfg)
    else:
        fit = learn_alpha_partial([GraphSummary.from_graph(g, args.m) for g in graphs], cfg)
    fit.subcategory = args.subcategory or Path(args.train).name
    _write(args.out, fit.to_json() + "\n")


def cmd_experiment(args):
    d = _read_json(args.config) if args.config else {}
    if not isinstance(d, dict):
        raise ConfigError("experiment config must be a JSON object")
    if args.family:
        d["family"] = args.family
    if args.seed is not None:
        d["master_seed"] = args.seed
    if args.out:
        d["output"] = args.out
    cfg = ExperimentConfig.from_dict(d)
    report = run_experiment(cfg)
    if cfg.output:
        path = report.write(cfg.output)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(report.to_json())


# -------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beliefflow", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a BA or GMG network")
    s.add_argument("--model", choices=("ba", "gmg"), required=True)
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("simulate", help="converge beliefs on a network")
    s.add_argument("--graph", required=True)
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--w", help="private beliefs file")
    src.add_argument("--w-uniform", action="store_true", help="draw private beliefs on [-1, 1]")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--control", default=None)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--t-max", type=int, default=100_000)
    s.add_argument("--method", choices=("iterative", "exact"), default="iterative")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("estimate", help="closed-form beliefs and control power")
    s.add_argument("--model", choices=("ba", "gmg"), required=True)
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--degrees")
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--control", default=None)
    s.add_argument("--w-bar", default=None, help="expected private beliefs (default zeros)")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("optimize", help="choose a control set")
    s.add_argument("--model", choices=("ba", "gmg"), required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--budget", type=int, required=True)
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--brute-force", action="store_true")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("learn-alpha", help="learn the clustering weight")
    s.add_argument("--method", choices=("full", "partial"), required=True)
    s.add_argument("--train", required=True, help="directory of edge-list files")
    s.add_argument("--grid", default=None, help="coarse grid LO:HI:STEP")
    s.add_argument("--no-refine", action="store_true", help="skip the fine pass")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--control-fraction", type=float, default=0.05)
    s.add_argument("--m", type=int, default=None, help="attachment count for the partial method")
    s.add_argument("--subcategory", default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_learn_alpha)

    s = sub.add_parser("experiment", help="run an experiment family")
    s.add_argument("--family", choices=("pij", "cp", "strategy"), default=None)
    s.add_argument("--config", default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (NonConvergenceError, LearningError, SolveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (BeliefFlowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
