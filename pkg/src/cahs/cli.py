"""Command line front end: ``cahs build|verify|reproduce``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .reproduce import EXAMPLES, flatten_checks, run_example
from .scenario import ConfigError, build_scenario, mesh_for, run_checks, validate_config

log = logging.getLogger("cahs")

LEVELS = {"off": logging.CRITICAL + 1, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging():
    level = os.environ.get("CAHS_LOG", "off").lower()
    logging.basicConfig(level=LEVELS.get(level, LEVELS["off"]), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError([("<root>", f"invalid JSON: {exc}")]) from exc
    except OSError as exc:
        raise ConfigError([("<root>", f"cannot read config: {exc}")]) from exc


def _write_csv_report(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "value", "tol", "passed", "skipped", "note"])
        for name, c in flatten_checks(report):
            note = c.get("reason") or c.get("verdict") or ""
            w.writerow([name, io._fmt(c["value"]) if "value" in c else "",
                        io._fmt(c["tol"]) if isinstance(c.get("tol"), float) else c.get("tol", ""),
                        c["passed"], c.get("skipped", False), note])


def _all_passed(report):
    return all(c["passed"] for _, c in flatten_checks(report))


def _write_mesh(out, mesh):
    if mesh is None:
        return {"written": False, "reason": "mesh export needs a 2-dimensional surface"}
    io.write_obj(out / "mesh.obj", mesh)
    io.write_ply(out / "mesh.ply", mesh)
    return {"written": True, "vertices": len(mesh.vertices), "faces": len(mesh.faces),
            "skipped_cells": mesh.skipped}


def cmd_build(cfg, out: Path, seed=None):
    sc = build_scenario(cfg, seed)
    out.mkdir(parents=True, exist_ok=True)
    info = {"mesh": _write_mesh(out, mesh_for(sc))}
    if sc.builder is not None:
        io.write_h_table(out / "h_table.csv", sc.builder)
    if sc.grid is not None:
        io.write_distance_csv(out / "distance.csv", sc.grid, sc.distance.values)
    elif sc.seed is not None and sc.ambient.base.__class__.__name__ == "EuclideanFlat":
        from .base_manifold import Grid, distance_value
        from .scenario import _box
        lo, hi = _box(cfg, sc.ambient.base.dimension)
        h = float(np.max(hi - lo)) / 32
        grid = Grid(tuple(int(round(w / h)) + 1 for w in hi - lo), h, tuple(lo))
        io.write_distance_csv(out / "distance.csv", grid, distance_value(sc.seed, grid.nodes()))
    log.info("build artifacts written to %s", out)
    return sc, info


def cmd_verify(cfg, out: Path, seed=None):
    sc, info = cmd_build(cfg, out, seed)
    report = {"checks": run_checks(sc), "mesh": info["mesh"],
              "random_seed": cfg.get("random_seed", 0) if seed is None else seed}
    io.write_report(out / "report.json", report)
    _write_csv_report(out / "report.csv", report["checks"])
    return report


def cmd_reproduce(example, out: Path, seed=0):
    checks, mesh = run_example(example, seed)
    out.mkdir(parents=True, exist_ok=True)
    report = {"example": example, "checks": checks, "mesh": _write_mesh(out, mesh),
              "random_seed": seed}
    io.write_report(out / "report.json", report)
    _write_csv_report(out / "report.csv", checks)
    return report


def make_parser():
    p = argparse.ArgumentParser(prog="cahs", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("build", "build the surface and write meshes and tables"),
                        ("verify", "build and run the verification checks"),
                        ("reproduce", "run a pinned golden scenario")):
        s = sub.add_parser(name, help=help_)
        if name == "reproduce":
            s.add_argument("example", nargs="?", choices=EXAMPLES)
            s.add_argument("--config", help="JSON file with an 'example' key")
        else:
            s.add_argument("--config", required=True)
        s.add_argument("--out", required=True)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--threads", type=int, default=1,
                       help="accepted for compatibility; computations run in one thread")
    return p


def main(argv=None):
    _setup_logging()
    args = make_parser().parse_args(argv)
    out = Path(args.out)
    try:
        if args.command == "reproduce":
            example = args.example
            if args.config:
                cfg = _load_config(args.config)
                example = example or cfg.get("example")
            if example not in EXAMPLES:
                raise ConfigError([("example", f"choose one of {', '.join(EXAMPLES)}")])
            report = cmd_reproduce(example, out, 0 if args.seed is None else args.seed)
            return 0 if _all_passed(report["checks"]) else 1
        cfg = validate_config(_load_config(args.config))
        if args.command == "build":
            cmd_build(cfg, out, args.seed)
            return 0
        report = cmd_verify(cfg, out, args.seed)
        return 0 if _all_passed(report["checks"]) else 1
    except ConfigError as exc:
        for path, msg in exc.errors:
            print(f"config error at {path}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
