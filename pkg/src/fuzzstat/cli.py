"""Command-line front end.

Usage::

    fuzzstat analyze --example squares --scheme window:n,2n-1 --theta 0.75 --eps 0.5 --nmax 2000
    fuzzstat analyze --family "exp(-k*x)" --limit 0 --domain 0,1 --eps 0.25
    fuzzstat validate window:n,n+3 weights:unit --horizon 100
    fuzzstat theorems --seed 42 --nmax 64
    fuzzstat manifest

Exit codes: 0 success (whatever the verdicts), 2 bad configuration,
3 scheme/weight validation failure, 4 theorem-suite violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analyzer import MODES, FuzzyFunctionSequence, SpatialGrid, classify
from .corpus import ALIASES, NAMES, analysis_grid, example, instantiate, manifest
from .exprs import SpecParseError, compile_expr
from .fuzzy import AlphaGrid
from .report import write_reports
from .schemes import SchemeError, parse_scheme, parse_weights, validate
from .theorems import theorem_suite

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_THEOREM = 0, 2, 3, 4


def _domain(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"domain must be 'a,b', got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError("domain needs a < b")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzstat", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="density profiles and verdicts for one family")
    src = an.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=sorted(set(NAMES) | set(ALIASES)))
    src.add_argument("--family", metavar="EXPR", help="crisp values as an expression in k and x")
    an.add_argument("--limit", default="0", metavar="EXPR", help="candidate limit in x (with --family)")
    an.add_argument("--domain", type=_domain, default=None, help="a,b (default 0,1)")
    an.add_argument("--scheme", default="window:1,n")
    an.add_argument("--weights", default="weights:unit")
    an.add_argument("--theta", type=float, default=1.0)
    an.add_argument("--eps", type=float, action="append", help="threshold; repeatable (default 0.5)")
    an.add_argument("--mode", choices=MODES + ("all",), action="append", help="repeatable (default all)")
    an.add_argument("--nmax", type=int, default=1000)
    an.add_argument("--grid", type=int, default=513, help="spatial grid size")
    an.add_argument("--alpha-grid", type=int, default=257, help="alpha levels")
    an.add_argument("--index-mode", choices=("prefix", "window"), default="prefix")
    an.add_argument("--tolerance", type=float, default=0.05)
    an.add_argument("--seed", type=int, default=0, help="seed for random families")
    an.add_argument("--refine", action="store_true", help="refine the uniform supremum near each arg-max")
    an.add_argument("--per-x", action="store_true", help="also write per_x.csv")
    an.add_argument("--out", type=Path, default=Path("fuzzstat-out"))
    an.add_argument("--format", choices=("csv", "json", "both"), default="both")

    va = sub.add_parser("validate", help="check scheme and weight hypotheses on a finite horizon")
    va.add_argument("scheme")
    va.add_argument("weights", nargs="?", default="weights:unit")
    va.add_argument("--horizon", type=int, default=100)
    va.add_argument("--out", type=Path, default=None)

    th = sub.add_parser("theorems", help="run the finite containment suite")
    th.add_argument("--seed", type=int, default=42)
    th.add_argument("--nmax", type=int, default=64)
    th.add_argument("--out", type=Path, default=None)

    sub.add_parser("manifest", help="print the example corpus manifest")
    return parser


def _family(args, grid: AlphaGrid):
    if args.example:
        params = {"seed": args.seed} if args.example.startswith("random") else {}
        spec = example(args.example, domain=args.domain, **params)
        return instantiate(spec, grid), analysis_grid(spec, args.grid), {"example": spec.name, "params": spec.params}
    values = compile_expr(args.family, ("k", "x"), array=True)
    limit = compile_expr(args.limit, ("x",), array=True)
    domain = args.domain or (0.0, 1.0)

    def member(k, x):
        return np.broadcast_to(values(k, x), np.broadcast_shapes(np.shape(k), np.shape(x)))

    def lim(x):
        return np.broadcast_to(limit(x), np.shape(x))

    seq = FuzzyFunctionSequence.from_crisp(domain, member, lim, grid, name=args.family)
    return seq, SpatialGrid.uniform(*domain, args.grid), {"family": args.family, "limit": args.limit}


def _write_json(path: Path, data: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1) + "\n")


def cmd_analyze(args) -> int:
    eps_list = args.eps or [0.5]
    modes = args.mode or ["all"]
    modes = MODES if "all" in modes else tuple(m for m in MODES if m in modes)
    try:
        scheme = parse_scheme(args.scheme)
        weights = parse_weights(args.weights)
        seq, grid, source = _family(args, AlphaGrid.uniform(args.alpha_grid))
        if not 0 < args.theta <= 1:
            raise ValueError("--theta must lie in (0, 1]")
        if any(e <= 0 for e in eps_list):
            raise ValueError("--eps must be positive")
        if not 0 < args.tolerance < 0.5:
            raise ValueError("--tolerance must lie in (0, 0.5)")
        if args.nmax < 8:
            raise ValueError("--nmax must be at least 8")
    except (SpecParseError, SchemeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    config = {
        **source,
        "scheme": scheme.label, "weights": weights.label, "theta": args.theta, "epsilon": eps_list,
        "modes": list(modes), "n_max": args.nmax, "grid": args.grid, "alpha_grid": args.alpha_grid,
        "index_mode": args.index_mode, "tolerance": args.tolerance, "seed": args.seed, "refine": args.refine,
    }
    report = validate(weights, scheme, horizon=max(4, 10 * args.nmax))
    if not report.passed:
        _write_json(args.out / "validation.json", {"config": config, "validation": report.to_dict()})
        for c in report.failures():
            print(f"validation failed: {c.name} (witness {c.witness}) {c.detail}".rstrip(), file=sys.stderr)
        return EXIT_VALIDATION
    try:
        analysis = classify(seq, grid, weights, scheme, args.theta, eps_list, args.nmax, args.tolerance,
                            args.index_mode, modes, args.refine, check=False)
    except (SchemeError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    analysis.validation = report
    write_reports(analysis, args.out, scheme.label, weights.label, config, args.format, args.per_x)
    for mode in modes:
        print(analysis.verdicts[mode].summary())
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        scheme = parse_scheme(args.scheme)
        weights = parse_weights(args.weights)
        report = validate(weights, scheme, horizon=args.horizon)
    except (SpecParseError, SchemeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for c in report.checks:
        status = "pass" if c.passed else f"FAIL (witness {c.witness})"
        tag = " [surrogate]" if c.surrogate else ""
        print(f"{c.name}: {status}{tag}")
    if args.out is not None:
        _write_json(args.out / "validation.json", {"scheme": scheme.label, "weights": weights.label,
                                                   "validation": report.to_dict()})
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_theorems(args) -> int:
    if args.nmax < 1:
        print("error: --nmax must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    report = theorem_suite(args.seed, args.nmax)
    data = report.to_dict()
    if args.out is not None:
        _write_json(args.out / "theorems.json", data)
    for name, count in report.checked.items():
        bad = sum(1 for v in report.violations if v["check"] == name)
        print(f"{name}: {'pass' if bad == 0 else 'FAIL'} ({count} checks, {bad} violations)")
    if not report.passed:
        print(json.dumps({"witness": report.violations[0], "instance": report.instance}), file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"analyze": cmd_analyze, "validate": cmd_validate, "theorems": cmd_theorems}.get(args.command)
    if handler is None:
        print(json.dumps(manifest(), indent=1))
        return EXIT_OK
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
