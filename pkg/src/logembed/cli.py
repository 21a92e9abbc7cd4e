"""Command-line entry point: pagerank, train, linkpred, scatter, sweep."""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import kernels
from .evaluation import (report_row, run_link_prediction, status_scatter,
                         validate_report, write_scatter_csv)
from .graph import load_edge_list
from .model import (final_representation_matrix, load_embeddings, load_status_params,
                    save_embeddings, save_status_params)
from .status import assign_levels, pagerank, rank_nodes, read_status_csv, write_status_csv
from .train import GineConfig, LogConfig, train_gine, train_log

TRAIN_DEFAULTS = {
    "algo": "log",
    "dim": 128,
    "levels": 60,
    "lam": 0.3,
    "negatives": 5,
    "epochs": 5,
    "lists": None,
    "lr1": 0.025,
    "lr2": 0.0025,
    "lr_decay": False,
    "seed": 42,
    "threads": 1,
}

_LOG_ONLY = {"lam": "--lambda", "negatives": "--negatives", "epochs": "--epochs",
             "lr2": "--lr2", "lr_decay": "--lr-decay"}


def _parse_config_file(path: str) -> dict:
    """Flat key=value file; '#' comments and blank lines allowed."""
    out = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key == "lambda":
            key = "lam"
        out[key] = value.strip()
    return out


def _coerce(key: str, value):
    if isinstance(value, str):
        default = TRAIN_DEFAULTS.get(key)
        if key in ("lam", "lr1", "lr2"):
            return float(value)
        if key == "lr_decay":
            return value.lower() in ("1", "true", "yes", "on")
        if key == "algo":
            return value
        if isinstance(default, (int, type(None))):
            return int(value)
    return value


def _resolve_train_config(args, parser) -> dict:
    cfg = dict(TRAIN_DEFAULTS)
    if args.config:
        for key, value in _parse_config_file(args.config).items():
            if key not in TRAIN_DEFAULTS:
                parser.error(f"unknown config key {key!r} in {args.config}")
            cfg[key] = _coerce(key, value)
    explicit = set()
    for key in TRAIN_DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
            explicit.add(key)

    if cfg["algo"] == "gine":
        for key, flag in _LOG_ONLY.items():
            if key in explicit:
                parser.error(f"{flag} is only valid with --algo log")
        if cfg["lists"] is None:
            parser.error("--algo gine requires --lists")
    else:
        if cfg["lists"] is not None:
            parser.error("--lists is only valid with --algo gine")
    return cfg


def _build_config(cfg: dict):
    if cfg["algo"] == "gine":
        return GineConfig(n_lists=cfg["lists"], dim=cfg["dim"], eta=cfg["lr1"],
                          k_levels=cfg["levels"], seed=cfg["seed"])
    return LogConfig(dim=cfg["dim"], eta_local=cfg["lr1"], eta_global=cfg["lr2"],
                     lam=cfg["lam"], n_negative=cfg["negatives"], epochs=cfg["epochs"],
                     k_levels=cfg["levels"], seed=cfg["seed"], lr_decay=cfg["lr_decay"])


def _write_manifest(path, command: str, config: dict, seed, inputs: dict,
                    outputs: dict, started: float, **extra) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "duration_sec": round(time.time() - started, 3),
        "backend": kernels.BACKEND,
    }
    manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=["gine", "log"])
    p.add_argument("--dim", type=int)
    p.add_argument("--levels", type=int, help="number of status levels K")
    p.add_argument("--lists", type=int, help="gine only: number of ranked-list updates L")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="log only: probability of a global update per node visit")
    p.add_argument("--negatives", type=int, help="log only: negative samples per edge")
    p.add_argument("--epochs", type=int, help="log only: passes over the node set")
    p.add_argument("--lr1", type=float, help="local / gine learning rate")
    p.add_argument("--lr2", type=float, help="log only: global learning rate")
    p.add_argument("--lr-decay", dest="lr_decay", action="store_const", const=True,
                   help="log only: linear learning-rate decay")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--config", help="key=value config file, overridden by explicit flags")


def cmd_pagerank(args, parser) -> int:
    started = time.time()
    g = load_edge_list(args.edge_file)
    scores = pagerank(g, damping=args.damping, tolerance=args.tol, max_iter=args.max_iter)
    ranking = rank_nodes(scores)
    levels = assign_levels(ranking, args.levels)
    write_status_csv(args.out, g, scores, levels)
    _write_manifest(str(args.out) + ".manifest.json", "pagerank",
                    {"damping": args.damping, "tol": args.tol,
                     "max_iter": args.max_iter, "levels": args.levels},
                    None, {"edge_file": str(args.edge_file)}, {"csv": str(args.out)},
                    started, converged=scores.converged,
                    iterations=scores.iterations_used)
    return 0


def _train_model(g, cfg_dict):
    cfg = _build_config(cfg_dict)
    scores = pagerank(g)
    levels = assign_levels(rank_nodes(scores), cfg.k_levels)
    if isinstance(cfg, GineConfig):
        model = train_gine(levels, cfg, threads=cfg_dict["threads"])
        mode = "gine"
    else:
        model = train_log(g, levels, cfg, threads=cfg_dict["threads"])
        mode = "log"
    return model, mode


def cmd_train(args, parser) -> int:
    started = time.time()
    cfg_dict = _resolve_train_config(args, parser)
    g = load_edge_list(args.edge_file)
    model, mode = _train_model(g, cfg_dict)
    reps = final_representation_matrix(model, mode)
    emb_path = args.out_prefix + ".emb"
    params_path = args.out_prefix + ".params"
    save_embeddings(emb_path, g.labels, reps)
    save_status_params(params_path, model.w_source, model.w_target)
    _write_manifest(args.out_prefix + ".manifest.json", "train", cfg_dict,
                    cfg_dict["seed"], {"edge_file": str(args.edge_file)},
                    {"embeddings": emb_path, "params": params_path}, started)
    return 0


def cmd_linkpred(args, parser) -> int:
    started = time.time()
    cfg_dict = _resolve_train_config(args, parser)
    if not 0.0 < args.remove_fraction < 1.0:
        parser.error("--remove-fraction must lie in (0, 1)")
    g = load_edge_list(args.edge_file)
    reports, split = run_link_prediction(
        g, _build_config(cfg_dict), args.remove_fraction, cfg_dict["seed"],
        with_hfb=args.with_hfb, threads=cfg_dict["threads"])
    echo = dict(cfg_dict, remove_fraction=args.remove_fraction)
    payload = {"reports": [report_row(r, cfg_dict["seed"], echo) for r in reports]}
    validate_report(payload)
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _write_manifest(str(args.out) + ".manifest.json", "linkpred", echo,
                    cfg_dict["seed"], {"edge_file": str(args.edge_file)},
                    {"report": str(args.out)}, started,
                    achieved_fraction=split.achieved_fraction,
                    hit_target=split.hit_target)
    if not split.hit_target:
        print(f"warning: only {split.achieved_fraction:.4f} of edges removable "
              f"(target {args.remove_fraction})", file=sys.stderr)
    return 0


def cmd_scatter(args, parser) -> int:
    started = time.time()
    emb_labels, reps = load_embeddings(args.embeddings)
    csv_labels, csv_scores, csv_ranks, _ = read_status_csv(args.pagerank)
    if sorted(emb_labels) != sorted(csv_labels):
        only_emb = sorted(set(emb_labels) - set(csv_labels))[:5]
        only_csv = sorted(set(csv_labels) - set(emb_labels))[:5]
        raise ValueError("node sets differ between embeddings and pagerank CSV; "
                         f"embedding-only={only_emb} csv-only={only_csv}")
    index_of = {lab: i for i, lab in enumerate(emb_labels)}
    n = len(emb_labels)
    ranking = np.empty(n, dtype=np.int64)
    scores = np.empty(n)
    for lab, score, rank in zip(csv_labels, csv_scores, csv_ranks):
        ranking[rank - 1] = index_of[lab]
        scores[index_of[lab]] = score
    if args.regress:
        rows = status_scatter(reps, ranking, scores=scores)
    else:
        w_source, w_target = load_status_params(args.params)
        rows = status_scatter(reps, ranking, status_params=(w_source, w_target))
    write_scatter_csv(args.out, rows)
    _write_manifest(str(args.out) + ".manifest.json", "scatter",
                    {"regress": bool(args.regress)}, None,
                    {"embeddings": str(args.embeddings), "pagerank": str(args.pagerank),
                     "params": str(args.params) if args.params else None},
                    {"csv": str(args.out)}, started)
    return 0


def _parse_grid(spec: str, parser) -> dict:
    grid = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            parser.error(f"malformed grid component {part!r}")
        key, _, values = part.partition("=")
        key = key.strip()
        if key == "dim":
            grid["dim"] = [int(v) for v in values.split(",") if v.strip()]
        elif key == "lambda":
            grid["lam"] = [float(v) for v in values.split(",") if v.strip()]
        else:
            parser.error(f"unknown grid key {key!r} (use dim and/or lambda)")
    if not grid:
        parser.error("empty grid")
    return grid


def cmd_sweep(args, parser) -> int:
    started = time.time()
    base = _resolve_train_config(args, parser)
    grid = _parse_grid(args.grid, parser)
    if base["algo"] == "gine" and len(grid.get("lam", [])) > 1:
        parser.error("a lambda grid needs --algo log")
    if not 0.0 < args.remove_fraction < 1.0:
        parser.error("--remove-fraction must lie in (0, 1)")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    g = load_edge_list(args.edge_file)

    dims = grid.get("dim", [base["dim"]])
    lams = grid.get("lam", [base["lam"]])
    cells = list(itertools.product(dims, lams))

    def run_cell(item):
        index, (dim, lam) = item
        cell_cfg = dict(base, dim=dim, lam=lam, seed=base["seed"] + index)
        reports, split = run_link_prediction(
            g, _build_config(cell_cfg), args.remove_fraction, cell_cfg["seed"],
            threads=1)
        echo = dict(cell_cfg, remove_fraction=args.remove_fraction)
        payload = {"reports": [report_row(r, cell_cfg["seed"], echo) for r in reports]}
        validate_report(payload)
        cell_path = out_dir / f"report_dim{dim}_lambda{lam:g}.json"
        cell_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        r = reports[0]
        return (dim, lam, r.removed_fraction, r.accuracy, r.auc, cell_cfg["seed"],
                str(cell_path))

    if args.parallel > 1:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(run_cell, enumerate(cells)))
    else:
        rows = [run_cell(item) for item in enumerate(cells)]

    summary = out_dir / "summary.csv"
    with open(summary, "w", encoding="utf-8") as fh:
        fh.write("dim,lambda,fraction,accuracy,auc,seed\n")
        for dim, lam, frac, acc, auc, seed, _ in rows:
            fh.write(f"{dim},{lam:g},{frac},{acc},{auc},{seed}\n")
    _write_manifest(out_dir / "manifest.json", "sweep",
                    dict(base, grid=args.grid, remove_fraction=args.remove_fraction),
                    base["seed"], {"edge_file": str(args.edge_file)},
                    {"summary": str(summary), "cells": [r[-1] for r in rows]}, started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logembed",
        description="Network embeddings preserving local structure and global "
                    "PageRank status, plus the link-prediction harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pagerank", help="status scores, ranking and levels as CSV")
    p.add_argument("edge_file")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--levels", type=int, default=60)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("train", help="train embeddings and export them")
    p.add_argument("edge_file")
    _add_train_flags(p)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("linkpred", help="edge-removal link prediction experiment")
    p.add_argument("edge_file")
    _add_train_flags(p)
    p.add_argument("--remove-fraction", type=float, default=0.5)
    p.add_argument("--with-hfb", action="store_true",
                   help="also evaluate the handcrafted-feature baseline")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_linkpred)

    p = sub.add_parser("scatter", help="status scatter CSV from an embedding file")
    p.add_argument("--embeddings", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--params", help="status parameter sidecar (w / w')")
    group.add_argument("--regress", action="store_true",
                       help="fit a linear regression instead of using learned status weights")
    p.add_argument("--pagerank", required=True, help="status CSV from the pagerank command")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("sweep", help="grid of linkpred runs over dim and/or lambda")
    p.add_argument("edge_file")
    _add_train_flags(p)
    p.add_argument("--grid", required=True,
                   help='e.g. "dim=8,16,32;lambda=0,0.1,0.3"')
    p.add_argument("--remove-fraction", type=float, default=0.5)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
