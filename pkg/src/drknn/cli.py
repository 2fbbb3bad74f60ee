"""Command-line entry point.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure
(solver breakdown or a failed verification check).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from .core import empirical_distributions, euclidean_cost, satisfies_triangle_inequality
from .datasets import DatasetFormatError, load_dataset
from .embedding import fit_pca, fit_svd, standardize, transform
from .evaluation import (DEFAULT_RADIUS_GRID, SWEEP_PARAMETERS, EpisodeSpec,
                         run_episodes, summary_rows, sweep)
from .lfd import SolverError, as_radii, solve_lfd
from .models import MODELS, make_model, parse_embedding
from .verify import GridSpec, run_checks

SCHEMA_VERSION = 1

DEFAULTS = {
    "dataset": None,
    "query_file": None,
    "radii": "0.1",
    "radius_grid": ",".join(str(v) for v in DEFAULT_RADIUS_GRID),
    "folds": 5,
    "k": 5,
    "bandwidth": 1.0,
    "tau": 0.9,
    "embedding": "none",
    "standardize": False,
    "classifier": "drknn",
    "episodes": 30,
    "shots": 5,
    "classes": 2,
    "queries": 200,
    "seed": 0,
    "jobs": 1,
    "grid_step": 0.05,
    "param": None,
    "values": None,
    "out": None,
    "table": None,
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="drknn",
        description="Distributionally robust weighted k-NN: LFD solves, "
                    "classification, episode evaluation and self-checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (or a previous report); flags override it")
        sp.add_argument("--out", help="write the JSON report here (default: stdout)")
        sp.add_argument("--seed", type=int, help=f"root seed (default {DEFAULTS['seed']})")

    def data(sp):
        sp.add_argument("--dataset", help="delimited-text dataset, or builtin:two_point|six_point|gaussians")
        sp.add_argument("--embedding", help="none, pca:<r> or svd:<r> (default none)")
        sp.add_argument("--standardize", action="store_true", default=None,
                        help="z-score features before embedding (default off)")

    def model(sp):
        sp.add_argument("--classifier", help=f"comma list from {sorted(MODELS)} (default drknn)")
        sp.add_argument("--radii", help="radius: scalar, per-class comma list, or 'cv' (default 0.1)")
        sp.add_argument("--radius-grid", dest="radius_grid",
                        help="comma list of scalar radii searched when --radii cv (default 0,0.1,...,1)")
        sp.add_argument("--folds", type=int, help="cross-validation folds (default 5)")
        sp.add_argument("--k", type=int, help="neighbours (default 5)")
        sp.add_argument("--bandwidth", type=float, help="kernel bandwidth h (default 1.0)")
        sp.add_argument("--tau", type=float, help="truncation level in [0, 1] (default 0.9)")

    def episodes(sp):
        sp.add_argument("--episodes", type=int, help="number of episodes (default 30)")
        sp.add_argument("--shots", type=int, help="training samples per class K (default 5)")
        sp.add_argument("--classes", type=int, help="classes per episode M (default 2)")
        sp.add_argument("--queries", type=int, help="queries per episode (default 200)")
        sp.add_argument("--jobs", type=int, help="worker processes (default 1)")
        sp.add_argument("--table", help="also write a flat CSV summary here")

    sp = sub.add_parser("lfd", help="solve for least favorable distributions")
    common(sp); data(sp)
    sp.add_argument("--radii", help="scalar or per-class comma list (default 0.1)")

    sp = sub.add_parser("classify", help="fit on a dataset and label queries")
    common(sp); data(sp); model(sp)
    sp.add_argument("--query-file", dest="query_file",
                    help="queries in the dataset format (default: the training points)")

    sp = sub.add_parser("eval", help="mean accuracy over M-class K-shot episodes")
    common(sp); data(sp); model(sp); episodes(sp)

    sp = sub.add_parser("sweep", help="paired evaluation over one hyperparameter")
    common(sp); data(sp); model(sp); episodes(sp)
    sp.add_argument("--param", choices=SWEEP_PARAMETERS, help="parameter to sweep")
    sp.add_argument("--values", help="comma list of values")

    sp = sub.add_parser("verify", help="check the solvers against brute-force oracles")
    common(sp)
    sp.add_argument("--grid-step", dest="grid_step", type=float,
                    help="simplex grid resolution for the LFD oracle (default 0.05)")
    return p


def resolve_config(argv) -> dict:
    args = _parser().parse_args(argv)
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        loaded = loaded.get("config", loaded)
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config key")
        cfg.update({k: v for k, v in loaded.items() if k != "command"})
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            cfg[key] = val
    cfg["command"] = args.command
    _validate(cfg)
    return cfg


def _floats(text, field: str) -> list[float]:
    try:
        if isinstance(text, (int, float)):
            return [float(text)]
        if isinstance(text, list):
            return [float(v) for v in text]
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(field, f"expected numbers, got {text!r}") from None


def _validate(cfg: dict) -> None:
    cmd = cfg["command"]
    if cmd != "verify" and not cfg["dataset"]:
        raise ConfigError("dataset", "a dataset path is required (--dataset)")
    for key, lo in (("k", 1), ("folds", 2), ("episodes", 1), ("shots", 1),
                    ("classes", 2), ("queries", 1), ("jobs", 1)):
        if not isinstance(cfg[key], int) or cfg[key] < lo:
            raise ConfigError(key, f"must be an integer >= {lo}")
    if not cfg["bandwidth"] > 0:
        raise ConfigError("bandwidth", "must be positive")
    if not 0 <= cfg["tau"] <= 1:
        raise ConfigError("tau", "must lie in [0, 1]")
    try:
        parse_embedding(cfg["embedding"])
    except ValueError as exc:
        raise ConfigError("embedding", str(exc)) from None
    if cfg["radii"] != "cv":
        if any(r < 0 for r in _floats(cfg["radii"], "radii")):
            raise ConfigError("radii", "radii must be nonnegative")
    if any(r < 0 for r in _floats(cfg["radius_grid"], "radius_grid")):
        raise ConfigError("radius_grid", "radii must be nonnegative")
    for name in str(cfg["classifier"]).split(","):
        if name not in MODELS:
            raise ConfigError("classifier", f"unknown classifier {name!r}")
    if cmd == "sweep":
        if cfg["param"] not in SWEEP_PARAMETERS:
            raise ConfigError("param", f"choose one of {SWEEP_PARAMETERS}")
        if not cfg["values"]:
            raise ConfigError("values", "a comma list of values is required")
        _floats(cfg["values"], "values")
    if cmd == "verify":
        try:
            GridSpec(float(cfg["grid_step"]))
        except ValueError as exc:
            raise ConfigError("grid_step", str(exc)) from None


def _load(cfg, key="dataset"):
    try:
        return load_dataset(cfg[key])
    except FileNotFoundError:
        raise ConfigError(key, f"cannot read {cfg[key]!r}") from None
    except (DatasetFormatError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def _models(cfg, M: int) -> list:
    out = []
    for name in str(cfg["classifier"]).split(","):
        params = {"k": cfg["k"], "bandwidth": cfg["bandwidth"], "tau": cfg["tau"],
                  "embedding": None if cfg["embedding"] == "none" else cfg["embedding"],
                  "standardize": bool(cfg["standardize"]), "folds": cfg["folds"],
                  "seed": cfg["seed"], "cv_seed": cfg["seed"]}
        if cfg["radii"] == "cv":
            params["radius_grid"] = _floats(cfg["radius_grid"], "radius_grid")
        else:
            r = _floats(cfg["radii"], "radii")
            params["radius"] = r[0] if len(r) == 1 else r
        out.append(make_model(name, **params))
    return out


def _cmd_lfd(cfg) -> dict:
    ds = _load(cfg)
    X = ds.features
    if cfg["standardize"]:
        mu, sd = standardize(X)
        X = (X - mu) / sd
    spec = parse_embedding(cfg["embedding"])
    if spec:
        X = transform((fit_pca if spec[0] == "pca" else fit_svd)(X, spec[1]), X)
    r = _floats(cfg["radii"], "radii")
    try:
        radii = as_radii(r[0] if len(r) == 1 else r, ds.class_count)
    except ValueError as exc:
        raise ConfigError("radii", str(exc)) from None
    cost = euclidean_cost(X)
    try:
        P = empirical_distributions(ds)
    except ValueError as exc:
        raise ConfigError("dataset", str(exc)) from None
    sol = solve_lfd(cost, P, radii)
    return {"n": len(ds), "class_count": ds.class_count,
            "cost": {"kind": "euclidean",
                     "triangle_inequality": satisfies_triangle_inequality(cost)},
            "radii": radii.tolist(), "objective": sol.objective,
            "minimax_risk": sol.minimax_risk, "spend": sol.spend.tolist(),
            "status": sol.status.value, "lfds": sol.lfds.tolist()}


def _cmd_classify(cfg) -> dict:
    train = _load(cfg)
    queries = _load(cfg, "query_file") if cfg["query_file"] else train
    if queries.dim != train.dim:
        raise ConfigError("query_file", f"queries have dimension {queries.dim}, training data {train.dim}")
    out = []
    for model in _models(cfg, train.class_count):
        model.fit(train)
        pred = model.predict(queries.features)
        out.append({"classifier": model.name, "params": model.params(),
                    "predictions": pred.tolist(),
                    "accuracy": float(np.mean(pred == queries.labels))})
    return {"n_train": len(train), "n_queries": len(queries), "classifiers": out}


def _spec(cfg) -> EpisodeSpec:
    return EpisodeSpec(cfg["classes"], cfg["shots"], cfg["queries"], cfg["seed"])


def _split_timing(rep_dicts):
    timing = [{"classifier": d["classifier"], "seconds": d.pop("seconds")} for d in rep_dicts]
    return rep_dicts, timing


def _cmd_eval(cfg):
    src = _load(cfg)
    try:
        reps = [run_episodes(m, src, _spec(cfg), cfg["episodes"], cfg["jobs"])
                for m in _models(cfg, cfg["classes"])]
    except ValueError as exc:
        if isinstance(exc, SolverError):
            raise
        raise ConfigError("dataset", str(exc)) from None
    dicts, timing = _split_timing([r.as_dict() for r in reps])
    return {"reports": dicts}, timing, summary_rows(reps)


def _cmd_sweep(cfg):
    src = _load(cfg)
    param = cfg["param"]
    values = _floats(cfg["values"], "values")
    if param == "k":
        if any(v != int(v) or v < 1 for v in values):
            raise ConfigError("values", "k values must be positive integers")
        values = [int(v) for v in values]
    model = _models(cfg, cfg["classes"])[0]
    try:
        reps = sweep(param, values, model, src, _spec(cfg), cfg["episodes"], cfg["jobs"])
    except ValueError as exc:
        if isinstance(exc, SolverError):
            raise
        raise ConfigError("param", str(exc)) from None
    means = [r.mean for r in reps]
    dicts, timing = _split_timing([r.as_dict() for r in reps])
    return ({"parameter": param, "values": values, "reports": dicts,
             "mean_accuracy_range": max(means) - min(means)},
            timing, summary_rows(reps))


def _cmd_verify(cfg):
    rows = run_checks(seed=cfg["seed"], grid=GridSpec(float(cfg["grid_step"])))
    return {"checks": rows, "passed": sum(r["passed"] for r in rows),
            "failed": sum(not r["passed"] for r in rows)}


def run(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        cfg = resolve_config(argv)
    except ConfigError as exc:
        print(f"drknn: config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return 0 if exc.code == 0 else 2

    timing, table = None, None
    try:
        cmd = cfg["command"]
        if cmd == "lfd":
            result = _cmd_lfd(cfg)
        elif cmd == "classify":
            result = _cmd_classify(cfg)
        elif cmd == "eval":
            result, timing, table = _cmd_eval(cfg)
        elif cmd == "sweep":
            result, timing, table = _cmd_sweep(cfg)
        else:
            result = _cmd_verify(cfg)
    except ConfigError as exc:
        print(f"drknn: config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"drknn: solver failure: {exc}", file=sys.stderr)
        return 3

    report = {"schema_version": SCHEMA_VERSION, "command": cfg["command"],
              "config": {k: v for k, v in cfg.items() if k != "command"},
              "result": result,
              "timing": {"total_seconds": time.perf_counter() - t0,
                         "episodes": timing}}
    text = json.dumps(report, indent=2)
    try:
        if cfg["out"]:
            with open(cfg["out"], "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        if table is not None and cfg["table"]:
            with open(cfg["table"], "w", newline="") as fh:
                fields = sorted({k for row in table for k in row})
                w = csv.DictWriter(fh, fieldnames=fields)
                w.writeheader()
                w.writerows(table)
    except OSError as exc:
        print(f"drknn: config error: out: {exc}", file=sys.stderr)
        return 2

    if cfg["command"] == "verify":
        for row in result["checks"]:
            print(f"{'PASS' if row['passed'] else 'FAIL'}  {row['name']}  {row['detail']}",
                  file=sys.stderr)
        return 0 if result["failed"] == 0 else 3
    return 0


def main() -> None:
    sys.exit(run())
