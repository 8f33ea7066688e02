"""Command-line front end: analyze graphs, check theorems, run self-tests.

Exit codes: 0 success, 1 a requested theorem is applicable but inconsistent,
2 usage or configuration error, 3 numeric or domain error.  Machine-readable
JSON goes to stdout (or --out); human-readable errors go to stderr.  The CSV
report path also renders the 2-D grid fields as PNG figures next to the
delimited output unless --no-plots is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bernstein import ConfigError, THEOREM_CHECKS, Tolerances
from .examples import EXAMPLE_IDS, generate_example
from .expr import DomainError, ExprError, ExprSyntaxError, parse
from .fields import (
    CMF_MIN_RESOLUTION,
    FieldReport,
    GridDomain,
    JetGrid,
    field_report,
    load_grid_csv,
    sample_domain,
    write_grid_csv,
)
from .grassmann import BranchError, GeometryError, submersion_selftest

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laggraph",
        description="Analyze Lagrangian graphs (x, grad u) and check Bernstein-type theorems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_flags(p):
        p.add_argument("--expr", help="expression text over x1..xn")
        p.add_argument("--input", help="CSV of precomputed jets (see README for columns)")
        p.add_argument("--dim", type=int, help="number of variables (required with --expr)")
        p.add_argument(
            "--box",
            help="comma list: lo,hi for every axis, or lo1,hi1,lo2,hi2,... per axis",
        )
        p.add_argument("--res", help="points per axis: one integer or a comma list")
        p.add_argument("--tol-eig", type=float, default=1e-9, dest="tol_eig")
        p.add_argument("--tol-affine", type=float, default=1e-8, dest="tol_affine")
        p.add_argument(
            "--pde-c",
            type=float,
            default=None,
            dest="pde_c",
            help="override the residual-threshold constant C in tau = C*h^2",
        )
        p.add_argument("--hess-bound", type=float, default=100.0, dest="hess_bound")
        p.add_argument("--margin", type=float, default=1e-9)
        p.add_argument("--beta0", type=float, default=None)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument(
            "--no-plots",
            action="store_true",
            help="skip rendering figures alongside CSV output",
        )

    p_analyze = sub.add_parser("analyze", help="emit a field report")
    add_input_flags(p_analyze)

    p_check = sub.add_parser("check", help="evaluate theorem hypotheses and conclusions")
    p_check.add_argument(
        "theorems", nargs="+", choices=sorted(THEOREM_CHECKS), metavar="theorem",
        help="one or more of: " + ", ".join(sorted(THEOREM_CHECKS)),
    )
    add_input_flags(p_check)

    p_self = sub.add_parser("selftest", help="run the fibration self-tests")
    p_self.add_argument("--dim", type=int, required=True)
    p_self.add_argument("--out")

    p_gen = sub.add_parser("generate", help="emit a built-in example surface")
    p_gen.add_argument("example", choices=EXAMPLE_IDS)
    p_gen.add_argument("--dim", type=int, required=True)
    p_gen.add_argument("--a", help="comma list of linear coefficients (affine)")
    p_gen.add_argument("--c", type=float, default=1.0, help="quadratic coefficient")
    p_gen.add_argument("--out")

    return parser


def _parse_box(spec: str | None, dim: int) -> tuple:
    if spec is None:
        return (-1.0,) * dim, (1.0,) * dim
    try:
        vals = [float(s) for s in spec.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --box value {spec!r}: {exc}") from None
    if len(vals) == 2:
        lo, hi = vals
        return (lo,) * dim, (hi,) * dim
    if len(vals) == 2 * dim:
        return tuple(vals[0::2]), tuple(vals[1::2])
    raise ConfigError(
        f"--box needs 2 or {2 * dim} comma-separated values, got {len(vals)}"
    )


def _parse_res(spec: str | None, dim: int) -> tuple:
    if spec is None:
        return (41,) * dim
    try:
        vals = [int(s) for s in spec.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --res value {spec!r}: {exc}") from None
    if len(vals) == 1:
        return (vals[0],) * dim
    if len(vals) == dim:
        return tuple(vals)
    raise ConfigError(f"--res needs 1 or {dim} integers, got {len(vals)}")


def _round12(obj):
    """Round every float to 12 significant digits for stable report bytes."""
    if isinstance(obj, float):
        return float("%.12g" % obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(report: dict, out: str | None):
    payload = json.dumps(_round12(report), indent=2) + "\n"
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _tolerances(args) -> Tolerances:
    return Tolerances(
        eig=args.tol_eig,
        affine=args.tol_affine,
        pde_c=args.pde_c,
        hess_bound=args.hess_bound,
        margin=args.margin,
    )


def _load_grid(args, need_cmf: bool) -> tuple[JetGrid, dict]:
    if (args.expr is None) == (args.input is None):
        raise ConfigError("exactly one of --expr and --input must be given")
    if args.input is not None:
        try:
            grid = load_grid_csv(args.input)
        except (ValueError, OSError) as exc:
            raise ConfigError(f"cannot load {args.input}: {exc}") from None
        config = {
            "input": args.input,
            "dim": grid.domain.dim,
            "box": {"lower": list(grid.domain.lower), "upper": list(grid.domain.upper)},
            "resolution": list(grid.domain.resolution),
        }
    else:
        if args.dim is None:
            raise ConfigError("--dim is required with --expr")
        if args.dim < 1:
            raise ConfigError(f"--dim must be positive, got {args.dim}")
        lower, upper = _parse_box(args.box, args.dim)
        res = _parse_res(args.res, args.dim)
        try:
            dom = GridDomain(lower=lower, upper=upper, resolution=res)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        expr = parse(args.expr, args.dim)
        grid = sample_domain(dom, expr)
        config = {
            "expression": args.expr,
            "dim": args.dim,
            "box": {"lower": list(lower), "upper": list(upper)},
            "resolution": list(res),
        }
    if need_cmf and min(grid.domain.resolution) < CMF_MIN_RESOLUTION:
        raise ConfigError(
            f"this check needs the conformal-Maslov residual: resolution must be "
            f">= {CMF_MIN_RESOLUTION} per axis, got {grid.domain.resolution}"
        )
    return grid, config


def _summary_block(report: FieldReport) -> dict:
    block = dict(report.summaries)
    block["witnesses"] = {k: list(v) for k, v in report.witnesses.items()}
    return block


def _config_block(args, base: dict) -> dict:
    config = {"command": args.command}
    if args.command == "check":
        config["theorems"] = list(args.theorems)
    config.update(base)
    config["tolerances"] = {
        "eig": args.tol_eig,
        "affine": args.tol_affine,
        "pde_c": args.pde_c,
        "hess_bound": args.hess_bound,
        "margin": args.margin,
    }
    config["beta0"] = args.beta0
    config["format"] = args.format
    return config


def _write_csv_outputs(args, grid: JetGrid, report: FieldReport, notes: list):
    if not args.out:
        raise ConfigError("--format csv requires --out")
    write_grid_csv(grid, args.out, report=report)
    notes.append(f"grid written to {args.out}")
    if args.no_plots:
        return
    from .plots import render_report_figures

    stem = Path(args.out)
    figures = render_report_figures(report, stem.with_suffix(""))
    if figures:
        notes.append("figures: " + ", ".join(p.name for p in sorted(figures)))
    else:
        notes.append("figures skipped: only 2-D domains are rendered")


def _run_analyze(args) -> int:
    grid, base = _load_grid(args, need_cmf=False)
    report = field_report(grid)
    notes = []
    if report.cmf_residual_field is None:
        notes.append(
            f"cmf residual omitted: resolution below {CMF_MIN_RESOLUTION} per axis"
        )
    if args.format == "csv":
        _write_csv_outputs(args, grid, report, notes)
    doc = {
        "config": _config_block(args, base),
        "field_summaries": _summary_block(report),
        "verdicts": [],
        "notes": notes,
    }
    _emit(doc, args.out if args.format == "json" else None)
    return EXIT_OK


def _run_check(args) -> int:
    need_cmf = any(t in ("thm2", "tube") for t in args.theorems)
    grid, base = _load_grid(args, need_cmf=need_cmf)
    report = field_report(grid)
    tol = _tolerances(args)
    verdicts = []
    for name in args.theorems:
        if name == "thm2":
            verdicts.append(THEOREM_CHECKS[name](report, beta0=args.beta0, tol=tol))
        else:
            verdicts.append(THEOREM_CHECKS[name](report, tol=tol))
    notes = []
    if args.format == "csv":
        _write_csv_outputs(args, grid, report, notes)
    doc = {
        "config": _config_block(args, base),
        "field_summaries": _summary_block(report),
        "verdicts": [v.as_dict() for v in verdicts],
        "notes": notes,
    }
    _emit(doc, args.out if args.format == "json" else None)
    failed = any(v.applicable and not v.consistent for v in verdicts)
    return EXIT_INCONSISTENT if failed else EXIT_OK


def _run_selftest(args) -> int:
    if not 2 <= args.dim <= 5:
        raise ConfigError(f"selftest supports dims 2..5, got {args.dim}")
    report = submersion_selftest(args.dim)
    doc = {
        "config": {"command": "selftest", "dim": args.dim},
        "selftest": report.as_dict(),
        "verdicts": [],
        "notes": [],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _run_generate(args) -> int:
    a = None
    if args.a is not None:
        try:
            a = tuple(float(s) for s in args.a.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --a value {args.a!r}: {exc}") from None
    gen = generate_example(args.example, args.dim, a=a, c=args.c)
    doc = {
        "config": {"command": "generate", "example": args.example, "dim": args.dim},
        "expression": gen.text,
        "box": {"lower": list(gen.domain.lower), "upper": list(gen.domain.upper)},
        "resolution": list(gen.domain.resolution),
        "notes": [],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _join_negative_values(argv: list) -> list:
    """Fold '--box -1,1' into '--box=-1,1' so leading minus signs survive argparse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--box", "--a") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_negative_values(list(argv)))
    except SystemExit as exc:  # argparse already printed the usage message
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "analyze":
            return _run_analyze(args)
        if args.command == "check":
            return _run_check(args)
        if args.command == "selftest":
            return _run_selftest(args)
        return _run_generate(args)
    except (ConfigError, ExprSyntaxError) as exc:
        print(f"laggraph: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, BranchError) as exc:
        print(f"laggraph: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ExprError, GeometryError, ValueError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"laggraph: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"laggraph: i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
