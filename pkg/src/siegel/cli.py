"""Command-line front end: every module as a subcommand with
deterministic, machine-readable output.

Subcommands: decompose, reduce, volume, growth-table, sample,
enumerate-intersections, bounds.  One JSON document (or CSV table) per
invocation on stdout; every report embeds the effective seed, tolerance
overrides and tool version so runs can be reproduced byte for byte.
Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import MalformedConfigError, SiegelError
from .haar import RngStream, a_integral_mc, a_integral_quadrature, sample_haar_so, sample_siegel_point
from .iwasawa import (
    MINIMAL_PARAMS,
    SiegelParams,
    UnimodularIntMatrix,
    decompose,
    matrix_from_json_dict,
    matrix_to_json_dict,
    siegel_membership,
)
from .reduction import siegel_reduce
from .volumes import (
    GROWTH_CSV_HEADER,
    compare_normalization_forms,
    compare_quotient_forms,
    compare_ratio_forms,
    growth_table,
    growth_table_csv,
    harder_volume,
    normalization_ratio,
    ratio_C,
    vol_quotient,
    vol_siegel,
    vol_so,
    vol_symmetric_space,
)
from .intersections import (
    count_bounds,
    enumerate_intersections,
    height_bound_variants,
    log_height_bound,
    reports_to_jsonl,
)

SEED_ENV_VAR = "SIEGEL_SEED"

TOLERANCE_KEYS = (
    "det_tol",
    "ortho_tol",
    "recon_tol",
    "singular_tol",
    "membership_tol",
    "witness_tol",
)
BUDGET_KEYS = ("max_iter", "budget_per_candidate", "mc_samples")
OUTPUT_FORMATS = ("json", "csv", "pretty")


@dataclass
class RunConfig:
    """Effective run configuration echoed into every report."""

    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output_format: str = "json"
    budgets: dict = field(default_factory=dict)

    def report_header(self) -> dict:
        return {
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "tool_version": __version__,
        }


def load_config(path: str | None) -> RunConfig:
    """Read a flat JSON object; unknown keys are rejected, absent keys
    default."""
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedConfigError(
            f"config is not valid JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    except OSError as exc:
        raise MalformedConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedConfigError("config must be a flat JSON object")
    for key, value in raw.items():
        if key == "seed":
            cfg.seed = int(value)
        elif key == "output_format":
            if value not in OUTPUT_FORMATS:
                raise MalformedConfigError(f"unknown output_format {value!r}")
            cfg.output_format = value
        elif key in TOLERANCE_KEYS:
            cfg.tolerances[key] = float(value)
        elif key in BUDGET_KEYS:
            v = int(value)
            if v <= 0:
                raise MalformedConfigError(f"budget {key} must be positive")
            cfg.budgets[key] = v
        else:
            raise MalformedConfigError(f"unknown config key {key!r}")
    return cfg


def _read_matrix(path: str) -> np.ndarray:
    if path == "-":
        return matrix_from_json_dict(json.load(sys.stdin))
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json_dict(json.load(fh))


def _emit_json(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def _emit_pretty(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _report(config: RunConfig, command: str, result: dict, fmt: str) -> None:
    doc = {"command": command, "config": config.report_header(), "result": result}
    if fmt == "pretty":
        _emit_pretty(doc)
    else:
        _emit_json(doc)


_VOLUME_OBJECTS = ("so", "siegel", "quotient", "ratio", "symmetric", "harder", "norm-ratio")


def _volume_expression(obj: str, n: int, p: SiegelParams):
    if obj == "so":
        return vol_so(n)
    if obj == "siegel":
        return vol_siegel(n, p)
    if obj == "quotient":
        return vol_quotient(n)
    if obj == "ratio":
        return ratio_C(n)
    if obj == "symmetric":
        return vol_symmetric_space(n)
    if obj == "harder":
        return harder_volume(n)
    if obj == "norm-ratio":
        return normalization_ratio(n)
    raise SiegelError(f"unknown volume object {obj!r}")


def _cmd_volume(args, config: RunConfig, fmt: str) -> int:
    p = SiegelParams(args.t, getattr(args, "lam"))
    expr = _volume_expression(args.object, args.n, p)
    log = expr.log_value()
    result = {
        "object": args.object,
        "n": args.n,
        "t": args.t,
        "lambda": getattr(args, "lam"),
        "expression": str(expr),
        "log_value": log,
        "value": expr.value(),
    }
    if args.object == "quotient":
        result["form_check"] = compare_quotient_forms(args.n).to_json_dict()
    elif args.object == "ratio":
        result["form_check"] = compare_ratio_forms(args.n).to_json_dict()
    elif args.object == "norm-ratio":
        result["form_check"] = compare_normalization_forms(args.n).to_json_dict()
    if fmt == "pretty":
        sys.stdout.write(f"{result['expression']}\n= {result['value']!r} (log {log!r})\n")
        if "form_check" in result:
            fc = result["form_check"]
            tag = "agrees" if fc["agrees"] else "DOCUMENTED DISCREPANCY"
            sys.stdout.write(
                f"published simplification {tag}: log mismatch {fc['log_mismatch']!r}\n"
            )
        return 0
    _report(config, "volume", result, fmt)
    return 0


def _cmd_growth_table(args, config: RunConfig, fmt: str) -> int:
    rows = growth_table(args.n_max)
    if fmt == "csv":
        sys.stdout.write(growth_table_csv(rows))
        return 0
    result = {"n_max": args.n_max, "rows": [r.to_json_dict() for r in rows]}
    _report(config, "growth-table", result, fmt)
    return 0


def _cmd_decompose(args, config: RunConfig, fmt: str) -> int:
    g = _read_matrix(args.input)
    tol = config.tolerances.get("membership_tol", 1e-9)
    f = decompose(g)
    n = f.n
    iu = np.triu_indices(n, k=1)
    p = SiegelParams(args.t, getattr(args, "lam"))
    result = {
        "k": matrix_to_json_dict(f.k),
        "a": [float(x) for x in f.a],
        "u": matrix_to_json_dict(f.u),
        "b": [float(x) for x in f.b],
        "u_max": float(np.max(np.abs(f.u[iu]))) if iu[0].size else 0.0,
        "membership": siegel_membership(g, p, tol),
        "residuals": f.max_errors(g),
    }
    _report(config, "decompose", result, fmt)
    return 0


def _cmd_reduce(args, config: RunConfig, fmt: str) -> int:
    g = _read_matrix(args.input)
    max_iter = args.max_iter or config.budgets.get("max_iter")
    res = siegel_reduce(g, max_iter=max_iter)
    _report(config, "reduce", res.to_json_dict(), fmt)
    return 0


def _cmd_sample(args, config: RunConfig, fmt: str) -> int:
    stream = RngStream(config.seed, 0)
    p = SiegelParams(args.t, getattr(args, "lam"))
    result: dict = {"what": args.what, "n": args.n, "count": args.count}
    if args.what == "rotation":
        gen = stream.generator()
        result["samples"] = [
            matrix_to_json_dict(sample_haar_so(args.n, gen)) for _ in range(args.count)
        ]
    elif args.what == "point":
        gen = stream.generator()
        b_min = args.b_min if args.b_min is not None else p.t / 16.0
        result["b_min"] = b_min
        result["samples"] = [
            sample_siegel_point(args.n, p, b_min, gen).to_json_dict()
            for _ in range(args.count)
        ]
    else:  # a-integral estimate
        samples = config.budgets.get("mc_samples", args.count)
        rep = a_integral_mc(args.n, p.t, samples, stream, b_min=args.b_min)
        result["report"] = rep.to_json_dict()
        result["quadrature"] = a_integral_quadrature(args.n, p.t)
    _report(config, "sample", result, fmt)
    return 0


def _cmd_enumerate(args, config: RunConfig, fmt: str) -> int:
    budget = args.budget or config.budgets.get("budget_per_candidate", 400)
    reports, summary = enumerate_intersections(
        args.n,
        SiegelParams(args.t, getattr(args, "lam")),
        budget_per_candidate=budget,
        rng=RngStream(config.seed, 0),
        max_height=args.max_height,
        workers=args.threads,
    )
    if fmt == "pretty":
        for r in reports:
            sys.stdout.write(f"{r.gamma.entries}  {r.status}\n")
        sys.stdout.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        return 0
    sys.stdout.write(reports_to_jsonl(reports))
    doc = {
        "command": "enumerate-intersections",
        "config": config.report_header(),
        "summary": summary,
    }
    _emit_json(doc)
    return 0


def _cmd_bounds(args, config: RunConfig, fmt: str) -> int:
    log_lower, log_upper = count_bounds(args.n)
    result = {
        "n": args.n,
        "log_lower": log_lower,
        "log_upper": log_upper,
        "log_height_bound": log_height_bound(args.n),
        "height_bound_variants": height_bound_variants(args.n),
    }
    _report(config, "bounds", result, fmt)
    return 0


def _add_siegel_params(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--t", type=float, default=MINIMAL_PARAMS.t, help="ratio bound t")
    sub.add_argument(
        "--lambda", dest="lam", type=float, default=MINIMAL_PARAMS.lam,
        help="unipotent bound lambda",
    )


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # declared on the main parser with real defaults and on every
    # subparser with SUPPRESS, so the flags work on either side of the
    # subcommand without the subparser default clobbering a given value
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="path to a flat JSON config")
    parser.add_argument("--seed", type=int, default=d, help="override the config seed")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default=d)
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS if suppress else 1,
        help="worker processes (default 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegel",
        description="Siegel sets for SL(n,R): decomposition, volumes, reduction, intersections",
    )
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("volume", help="closed-form volumes and ratios", parents=[common])
    sub.add_argument("--object", required=True, choices=_VOLUME_OBJECTS)
    sub.add_argument("--n", type=int, required=True)
    _add_siegel_params(sub)
    sub.set_defaults(func=_cmd_volume)

    sub = commands.add_parser("growth-table", parents=[common], help="log-space growth table")
    sub.add_argument("--n-max", type=int, required=True)
    sub.set_defaults(func=_cmd_growth_table)

    sub = commands.add_parser("decompose", parents=[common], help="Iwasawa factors of a matrix (JSON file or '-')")
    sub.add_argument("--input", required=True)
    _add_siegel_params(sub)
    sub.set_defaults(func=_cmd_decompose)

    sub = commands.add_parser("reduce", parents=[common], help="move a matrix into the Siegel set")
    sub.add_argument("--input", required=True)
    sub.add_argument("--max-iter", type=int, default=None)
    sub.set_defaults(func=_cmd_reduce)

    sub = commands.add_parser("sample", parents=[common], help="seeded sampling / Monte Carlo estimates")
    sub.add_argument("--what", choices=("rotation", "point", "a-integral"), default="point")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--count", type=int, default=1)
    sub.add_argument("--b-min", type=float, default=None)
    _add_siegel_params(sub)
    sub.set_defaults(func=_cmd_sample)

    sub = commands.add_parser(
        "enumerate-intersections", parents=[common],
        help="witness search over all bounded-height candidates",
    )
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--budget", type=int, default=None)
    sub.add_argument("--max-height", type=int, default=None)
    _add_siegel_params(sub)
    sub.set_defaults(func=_cmd_enumerate)

    sub = commands.add_parser("bounds", parents=[common], help="two-sided intersection count bounds")
    sub.add_argument("--n", type=int, required=True)
    sub.set_defaults(func=_cmd_bounds)

    return parser


def run(argv: list[str]) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        elif os.environ.get(SEED_ENV_VAR):
            config.seed = int(os.environ[SEED_ENV_VAR])
        fmt = args.format or config.output_format
        threads = args.threads
        if threads < 1:
            raise MalformedConfigError("--threads must be >= 1")
        return args.func(args, config, fmt)
    except SiegelError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, MalformedConfigError) and exc.line is not None:
            error["line"] = exc.line
            error["column"] = exc.column
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return 1
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True)
            + "\n"
        )
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
