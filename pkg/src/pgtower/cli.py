"""Command line: run searches, verify final presentations, run oracle suites."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import cases, oracles, tower
from .descend import CapExceededError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_CAP = 3

OUT_ENV = "PGTOWER_OUT"


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or "pgtower-out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load_config(args) -> tower.SearchConfig:
    if args.config:
        cfg = tower.SearchConfig.load(args.config)
        if args.max_order is not None:
            cfg.max_order = args.max_order
        if args.max_class is not None:
            cfg.max_class = args.max_class
        return cfg
    if not args.case:
        raise tower.ConfigError("give --case or --config")
    return cases.load_case(args.case).config(max_order=args.max_order, max_class=args.max_class)


def _slug(name: str) -> str:
    return name.replace("-", "m").replace(" ", "_")


def cmd_run(args) -> int:
    cfg = _load_config(args)
    if args.exhaustive:
        cfg.surjections = "exhaustive"
    stages = list(range(1, args.stage + 1)) if args.stage else None
    progress = (lambda s: print(s, file=sys.stderr, flush=True)) if args.verbose else None
    rr = tower.run(cfg, stages=stages, assignment=args.assignment, jobs=args.jobs, progress=progress)
    text = tower.report(rr)
    out = _out_dir(args)
    base = _slug(cfg.name)
    (out / f"{base}-report.txt").write_text(text)
    for spec, per in rr.stages:
        res = per[0]
        (out / f"{base}-{spec.name}-tree.dot").write_text(tower.export_tree(res, mode=args.tree_mode))
        (out / f"{base}-{spec.name}-candidates.txt").write_text(tower.export_candidates(res))
    sys.stdout.write(text)
    return EXIT_CAP if rr.status == "cap" else EXIT_OK


def cmd_verify(args) -> int:
    ids = cases.case_ids() if args.case in (None, "all") else [args.case]
    ok = True
    for cid in ids:
        text, good = cases.verify_report(cid)
        sys.stdout.write(text)
        ok &= good
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    names = list(oracles.SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for nm in names:
        res = oracles.SUITES[nm]()
        print(res.line())
        ok &= res.ok
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(args) -> int:
    case = cases.load_case(args.case)
    if args.what == "config":
        text = json.dumps(case.config_data, indent=1) + "\n"
    elif args.what == "final":
        from .pcp import serialize

        parts = []
        for ch, G in case.final_groups():
            tag = " ".join(f"{k}={v}" for k, v in sorted(ch.items()))
            parts.append(f"# {case.id} {tag}\n{serialize(G)}")
        text = "\n".join(parts)
    else:
        text = "\n".join(f"# {nm}\n{case.groups[nm]}\n" for nm in sorted(case.groups))
    if args.out:
        out = _out_dir(args)
        path = out / f"{_slug(case.id)}-{args.what}.txt"
        path.write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgtower", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a constrained descendant search")
    r.add_argument("--case")
    r.add_argument("--config")
    r.add_argument("--stage", type=int, help="run stages 1..N (default: all)")
    r.add_argument("--assignment", type=int)
    r.add_argument("--max-order", type=int)
    r.add_argument("--max-class", type=int)
    r.add_argument("--tree-mode", choices=["full", "paper"], default="full")
    r.add_argument("--exhaustive", action="store_true", help="enumerate every surjection at each step")
    r.add_argument("--out")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("-v", "--verbose", action="store_true")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check the final presentations of a case")
    v.add_argument("--case", default="all")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="run brute-force cross-checks")
    o.add_argument("--suite", choices=["all", *oracles.SUITES], default="all")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("export", help="print case data")
    e.add_argument("--case", required=True)
    e.add_argument("--what", choices=["config", "final", "groups"], default="final")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (tower.ConfigError, cases.UnknownCaseError, cases.ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
