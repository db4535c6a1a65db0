"""Command line driver: run verification suites and emit reports.

Exit codes: 0 all hard checks pass, 1 hard failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import SUITE_NAMES, Config, load_config
from .errors import ConfigRejected, Gl2dError
from .report import Report
from .suites import run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gl2d-verify",
        description=(
            "Exact verification of Hecke-operator and Iwahori-invariance "
            "identities for compact inductions of GL2 over a p-adic "
            "division algebra, at configurable small parameters."
        ),
    )
    ap.add_argument("config", nargs="?", help="flat key=value config file")
    ap.add_argument("--p", type=int, help="residue characteristic")
    ap.add_argument("--f", type=int, help="inertia degree of the base field")
    ap.add_argument("--e", type=int, help="ramification degree of the base field")
    ap.add_argument("--w", type=int, help="index of the division algebra")
    ap.add_argument("--r", type=str, help="comma-separated weight exponents r_0,..,r_{wf-1}")
    ap.add_argument("--n-max", type=int, dest="n_max", help="depth bound for the element families")
    ap.add_argument("--suite", action="append", dest="suites",
                    help=f"suite to run (repeatable); one of {', '.join(SUITE_NAMES)}")
    ap.add_argument("--seed", type=int, help="seed for randomized cases")
    ap.add_argument("--kappa-mode", choices=("absolute", "paper_literal"), dest="kappa_mode",
                    help="carry position convention: e*w or literal e")
    ap.add_argument("--backend", choices=("auto", "exact", "tracked"))
    ap.add_argument("--digits", type=int, help="working digit precision override")
    ap.add_argument("--probe-depth", type=int, dest="probe_depth", choices=(0, 1))
    ap.add_argument("--workers", type=int, help="parallel suite workers")
    ap.add_argument("--disputed", choices=("fail", "divergence"),
                    help="treat printed-form divergences as hard failures (default) or records")
    ap.add_argument("--out", type=str, help="directory for report.json and report.txt")
    return ap


def config_from_args(args) -> Config:
    cfg = Config()
    if args.config:
        cfg = load_config(args.config, cfg)
    updates = {}
    for key in ("p", "f", "e", "w", "n_max", "seed", "kappa_mode", "backend",
                "digits", "probe_depth", "workers", "disputed"):
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    if args.r is not None:
        updates["r_vec"] = tuple(int(v) for v in args.r.split(","))
    if args.suites:
        updates["suites"] = tuple(args.suites)
    return replace(cfg, **updates).validated()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigRejected, ValueError) as ex:
        print(f"configuration rejected: {ex}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except ConfigRejected as ex:
        print(f"configuration rejected: {ex}", file=sys.stderr)
        return 2
    text = report.to_text()
    print(text, end="")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(report.to_json(), encoding="utf-8")
        (outdir / "report.txt").write_text(text, encoding="utf-8")
    return report.exit_code(cfg.disputed)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
