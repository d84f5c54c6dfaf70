"""Bench harness: build instances, run templated algorithms, compute error
measures, emit CSV, and check the round bounds of every run.

Commands (all driven by a flat key=value config file):
    predsync run    --config cfg [--trace] [--out csv]   one instance
    predsync sweep  --config cfg [--out csv]             k x seed Cartesian sweep
    predsync verify --config cfg                         validate an outputs file
    predsync sanity --config cfg                         lower-bound sanity report

Exit codes: 0 ok, 1 assertion (bound or validity) failure, 2 config error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import measures
from .audit import audit_run
from .engine import simulate
from .graphs import (GraphError, RootedTree, generate, line, read_graph,
                     validate)
from .registry import PROGRAM_KIND, get_program
from .stages import ConfigError
from .templates import build_template

COLUMNS = ("family", "n", "d", "delta", "problem", "template", "k", "seed",
           "eta1", "eta2", "eta_bw", "eta_t", "eta_H", "rounds",
           "bound_consistency", "bound_degrading", "bound_robust", "valid")


def parse_config(path: str) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = s.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def parse_range(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _graph_params(cfg: dict) -> dict:
    params = {}
    for key in ("n", "k_rim", "rows", "cols", "d"):
        if key in cfg:
            params["k" if key == "k_rim" else key] = int(cfg[key])
    if "p" in cfg:
        params["p"] = float(cfg["p"])
    if "shape" in cfg:
        params["shape"] = cfg["shape"]
    return params


def build_instance(cfg: dict, seed: int):
    family = cfg.get("graph", "RANDOM_CONNECTED").upper()
    made = generate(family, _graph_params(cfg),
                    cfg.get("id_scheme", "SEEDED_PERMUTATION"
                            if family.startswith("RANDOM") else "INCREASING"),
                    seed)
    if isinstance(made, RootedTree):
        return made.graph, made, family
    return made, None, family


def _predictions(cfg: dict, kind: str, g, tree, k: int, seed: int):
    pattern = cfg.get("pattern")
    return measures.make_predictions(
        kind, g, k=k, seed=seed, pattern=pattern, tree=tree,
        rows=int(cfg["rows"]) if "rows" in cfg else None,
        cols=int(cfg["cols"]) if "cols" in cfg else None)


def _cell(value) -> str:
    return "" if value is None or value == "" else str(value)


def run_one(cfg: dict, k: int, seed: int):
    """Execute one instance; returns (row dict, failure messages, outcome)."""
    g, tree, family = build_instance(cfg, seed)
    kind = cfg.get("problem", "MIS").upper()
    program_name = cfg.get("program")
    p = _predictions(cfg, kind, g, tree, k, seed)
    report = measures.error_report(kind, g, p, tree)

    if program_name:
        program = get_program(program_name)
        kind = PROGRAM_KIND[program_name]
        inst = None
        label = program_name
    else:
        options = {}
        if tree is not None or cfg.get("tree", "").lower() == "true":
            options["tree"] = True
        if "phase" in cfg:
            options["phase"] = int(cfg["phase"])
        inst = build_template(kind, cfg.get("template", "simple"), **options)
        program = inst.program
        label = inst.template

    max_rounds = int(cfg["max_rounds"]) if "max_rounds" in cfg else (
        inst.max_rounds(g) if inst else None)
    outcome = simulate(g, program, p, max_rounds, tree=tree, trace=True)
    valid = validate(kind, g, outcome.solution(kind, g))

    failures = []
    consistency = degrading = robust = ""
    if inst is not None:
        if valid is not None:
            failures.append(f"invalid solution: {valid.code}")
        if report["eta1"] == 0:
            consistency = str(outcome.total_rounds == inst.c).lower()
        f = inst.f(report)
        applicable = inst.template != "parallel" or inst.r1(g) >= f
        if applicable:
            degrading = str(outcome.total_rounds
                            <= inst.degrading_bound(report)).lower()
        rb = inst.robust_bound(g, report)
        if rb is not None:
            robust = str(outcome.total_rounds <= rb).lower()
        for flag, name in ((consistency, "consistency"),
                           (degrading, "degrading"), (robust, "robust")):
            if flag == "false":
                failures.append(f"bound_{name} violated")
        bad = audit_run(kind, g, outcome,
                        inst.checkpoints(g, outcome.total_rounds))
        failures += [f"not extendable at {msg}" for msg in bad]

    row = {
        "family": family, "n": g.n, "d": g.d, "delta": g.delta,
        "problem": kind, "template": label, "k": k, "seed": seed,
        "eta1": report["eta1"], "eta2": report["eta2"],
        "eta_bw": report["eta_bw"], "eta_t": report["eta_t"],
        "eta_H": report["eta_hamming"], "rounds": outcome.total_rounds,
        "bound_consistency": consistency, "bound_degrading": degrading,
        "bound_robust": robust,
        "valid": "VALID" if valid is None else valid.code,
    }
    return row, failures, outcome


def format_csv(rows) -> str:
    lines = [",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(cfg: dict, args) -> int:
    k = int(cfg.get("k", 0))
    seed = int(cfg.get("seed", 0))
    row, failures, outcome = run_one(cfg, k, seed)
    _emit(format_csv([row]), args.out)
    if args.trace:
        for text in outcome.trace_lines():
            print(text, file=sys.stderr)
    for msg in failures:
        print(f"ASSERTION FAILED (k={k}, seed={seed}): {msg}", file=sys.stderr)
    if failures and not args.trace:
        for text in outcome.trace_lines():
            print(text, file=sys.stderr)
    return 1 if failures else 0


def cmd_sweep(cfg: dict, args) -> int:
    ks = parse_range(cfg.get("k_range", cfg.get("k", "0")))
    seeds = parse_range(cfg.get("seed_range", cfg.get("seed", "0")))
    if not ks or not seeds:
        raise ConfigError("sweep needs non-empty k_range and seed_range")
    rows = []
    status = 0
    for k in ks:
        for seed in seeds:
            row, failures, outcome = run_one(cfg, k, seed)
            rows.append(row)
            for msg in failures:
                print(f"ASSERTION FAILED (k={k}, seed={seed}): {msg}",
                      file=sys.stderr)
            if failures:
                for text in outcome.trace_lines():
                    print(text, file=sys.stderr)
                status = 1
    _emit(format_csv(rows), args.out)
    return status


def cmd_verify(cfg: dict, args) -> int:
    kind = cfg.get("problem", "MIS").upper()
    made = read_graph(Path(cfg["graph_file"]).read_text())
    g = made.graph if isinstance(made, RootedTree) else made
    outputs = measures.parse_predictions(
        kind, Path(cfg["outputs_file"]).read_text())
    violation = validate(kind, g, outputs)
    if violation is None:
        print("VALID")
        return 0
    print(f"{violation.code} at {violation.where}: {violation.detail}")
    return 1


SANITY = {
    # family: (program name, threshold function of n)
    "MIS_LINE": ("mis.greedy", lambda n: (n - 5) / 2),
    "MM_LINE": ("mm.uniform", lambda n: (n - 3) / 2),
    "VC_LINE": ("vc.uniform", lambda n: (n - 3) / 2),
    "EC_LINE": ("ec.uniform", lambda n: (n - 3) / 2),
}


def cmd_sanity(cfg: dict, args) -> int:
    family = cfg.get("family", "MIS_LINE").upper()
    if family not in SANITY:
        raise ConfigError(f"unknown sanity family {family!r}")
    n = int(cfg.get("n", 101))
    name, threshold_fn = SANITY[family]
    g = line(n)
    outcome = simulate(g, get_program(name), max_rounds=4 * n + 20)
    threshold = math.ceil(threshold_fn(n))
    ok = outcome.total_rounds >= threshold
    print(f"{family} n={n} measured={outcome.total_rounds} "
          f"threshold={threshold} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="predsync",
        description="bench harness for prediction-augmented distributed algorithms")
    parser.add_argument("command", choices=("run", "sweep", "verify", "sanity"))
    parser.add_argument("--config", required=True)
    parser.add_argument("--trace", action="store_true")
    parser.add_argument("--out", default="")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        handler = {"run": cmd_run, "sweep": cmd_sweep,
                   "verify": cmd_verify, "sanity": cmd_sanity}[args.command]
        return handler(cfg, args)
    except (ConfigError, GraphError, KeyError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
