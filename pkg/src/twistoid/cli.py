"""Command line front end: ``twistoid build|verify|export`` plus per-module checks."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bimodule as bm
from .bundle import TransitionFamily
from .groupoid import Report
from .suites import (
    STRUCTURES,
    SUITES,
    InvalidConfig,
    RunConfig,
    bimodule_report,
    heisenberg_report,
    qhm_family,
    run_suite,
)
from .torus import rational_str

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational 'p/q': {text!r}") from None


def add_config_flags(p: argparse.ArgumentParser, samples: int = 500):
    p.add_argument("--c", type=int, default=1, help="Heisenberg twist parameter")
    p.add_argument("--mu", type=parse_rational, default=Fraction(1, 4))
    p.add_argument("--nu", type=parse_rational, default=Fraction(1, 6))
    p.add_argument("--grid", type=int, default=24, help="grid denominator q")
    p.add_argument("--levels", type=int, default=3, help="level bound N for the algebra")
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "--report", dest="out", default=None, help="write JSON here instead of stdout")


def config_from(args) -> RunConfig:
    cfg = RunConfig(args.c, args.mu, args.nu, args.grid, args.levels, args.samples, args.seed, args.out)
    return cfg.validate(dynamics=args.command != "heisenberg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistoid", description="Twist groupoids of quantum Heisenberg manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write the QHM bundle and grid as JSON")
    add_config_flags(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--bundle", default=None, help="transition data JSON to verify instead of the QHM bundle")
    add_config_flags(p)

    p = sub.add_parser("export", help="print one artifact as JSON")
    p.add_argument("what", choices=("bundle", "grid", "report"))
    add_config_flags(p)

    p = sub.add_parser("heisenberg", help="Heisenberg manifold checks")
    hs = p.add_subparsers(dest="action", required=True)
    q = hs.add_parser("check")
    add_config_flags(q)
    q.set_defaults(grid=16)

    p = sub.add_parser("bimodule", help="Hilbert bimodule checks")
    bs = p.add_subparsers(dest="action", required=True)
    q = bs.add_parser("verify")
    q.add_argument("--structure", choices=STRUCTURES + ("all",), default="all")
    add_config_flags(q)

    p = sub.add_parser("algebra", help="convolution algebra checks")
    als = p.add_subparsers(dest="action", required=True)
    q = als.add_parser("verify")
    add_config_flags(q)
    return parser


# --------------------------------------------------------------------------
# artifacts


def bundle_artifact(cfg: RunConfig) -> dict:
    family = qhm_family(cfg.c)
    return {
        "c": cfg.c,
        "alpha": [rational_str(t) for t in cfg.alpha.translation],
        "degree": bm.winding_degree(family),
        "section_module": f"M^{cfg.c}",
        "family": family.to_json(),
    }


def grid_artifact(cfg: RunConfig) -> dict:
    q = cfg.grid
    charts = bm._canonical_charts(qhm_family(cfg.c).cover, q)
    da, db = bm.node_offset(cfg.alpha.translation, q)
    return {
        "q": q,
        "alpha": [rational_str(t) for t in cfg.alpha.translation],
        "alpha_node_offset": [da, db],
        "canonical_chart": charts.tolist(),
        "partition_of_unity": [bm.grid_function_to_json(p.values) for p in bm.partition_of_unity_elements(q, cfg.c, cfg.nu)],
    }


def load_family(path: str) -> TransitionFamily:
    data = json.loads(Path(path).read_text())
    return TransitionFamily.from_json(data.get("family", data))


def threads() -> int:
    try:
        return max(1, int(os.environ.get("TWISTOID_THREADS", "1")))
    except ValueError:
        return 1


def _run(args) -> dict:
    name, cfg, family = args
    return run_suite(name, cfg, family).to_json()


def verify_all(cfg: RunConfig, family: TransitionFamily | None = None, names=SUITES) -> dict:
    jobs = [(name, cfg, family) for name in names]
    workers = min(threads(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run, jobs))
    else:
        reports = [_run(job) for job in jobs]
    return {"config": cfg.to_json(), "suites": reports, "passed": all(r["passed"] for r in reports)}


def emit(data: dict, out: str | None):
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from(args)
        family = load_family(args.bundle) if getattr(args, "bundle", None) else None
    except (InvalidConfig, OSError, ValueError, KeyError) as exc:
        print(f"twistoid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "build":
        bundle, grid = bundle_artifact(cfg), grid_artifact(cfg)
        if cfg.out:
            out = Path(cfg.out)
            out.mkdir(parents=True, exist_ok=True)
            emit(bundle, str(out / "bundle.json"))
            emit(grid, str(out / "grid.json"))
            emit({"written": [str(out / "bundle.json"), str(out / "grid.json")], "degree": bundle["degree"]}, None)
        else:
            emit({"bundle": bundle, "grid": grid}, None)
        return EXIT_OK

    if args.command == "export":
        if args.what == "bundle":
            emit(bundle_artifact(cfg), cfg.out)
            return EXIT_OK
        if args.what == "grid":
            emit(grid_artifact(cfg), cfg.out)
            return EXIT_OK
        result = verify_all(cfg)
        emit(result, cfg.out)
        return EXIT_OK if result["passed"] else EXIT_FAIL

    if args.command == "verify":
        if args.suite == "all":
            result = verify_all(cfg, family)
        else:
            result = {"config": cfg.to_json(), "suites": [run_suite(args.suite, cfg, family).to_json()]}
            result["passed"] = result["suites"][0]["passed"]
        emit(result, cfg.out)
        return EXIT_OK if result["passed"] else EXIT_FAIL

    report: Report
    if args.command == "heisenberg":
        report = heisenberg_report(cfg)
    elif args.command == "bimodule":
        report = bimodule_report(cfg, STRUCTURES if args.structure == "all" else (args.structure,))
    else:
        report = run_suite("algebra", cfg)
    emit({"config": cfg.to_json(), **report.to_json()}, cfg.out)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
