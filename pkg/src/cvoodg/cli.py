"""Batch command-line interface.

Four subcommands: ``bound`` samples a coherent-state bound curve over a
mean-photon-number grid, ``extend`` evaluates a state-extension bound,
``verify`` runs the brute-force verification suites, and ``sweep`` crosses
an eps0 grid with a state grid. Output is CSV or JSON with 17-significant-
digit numbers, so identical configurations reproduce byte-identical files.

Exit codes: 0 success, 1 verification violation, 2 invalid configuration,
3 trivial bound under --fail-on-trivial.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import oracle, state_bounds
from .coherent_bounds import (
    CURVE_CONSTRUCTORS,
    BoundCurve,
    InDistributionGuarantee,
    combined_with_step,
    concave_hull,
    universal_coherent_bound_detail,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_TRIVIAL = 3

CSV_BOUND_SCHEMA = "cvoodg.bound.v1"
CSV_SWEEP_SCHEMA = "cvoodg.sweep.v1"


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _thread_count(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("CV_OODG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"CV_OODG_THREADS must be an integer, got {env!r}") from exc
    return 1


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _json_dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)


def _guarantee(args) -> InDistributionGuarantee:
    try:
        return InDistributionGuarantee(eps0=args.eps0, tau=args.tau)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_curve(args, tag: str) -> BoundCurve:
    if tag not in CURVE_CONSTRUCTORS:
        raise ConfigError(f"unknown curve class {tag!r}; choose from {sorted(CURVE_CONSTRUCTORS)}")
    g = _guarantee(args)
    if tag == "cubic_phase":
        # The cubic-phase curve is hulled on an internal grid; size it to the
        # requested range so the extension segment is never exercised.
        from .coherent_bounds import cubic_phase_bound

        reach = max(getattr(args, "nbar_max", 0.0) or 0.0, getattr(args, "hull_max", 0.0) or 0.0, 20.0)
        return cubic_phase_bound(g, nbar_max=reach)
    return CURVE_CONSTRUCTORS[tag](g)


def _concavified_curve(args, tag: str) -> BoundCurve:
    curve = _build_curve(args, tag)
    if not curve.concavified:
        curve = concave_hull(curve, args.hull_max, args.hull_points)
    return curve


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def cmd_bound(args) -> int:
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    if args.nbar_max <= 0:
        raise ConfigError("--nbar-max must be positive")
    curve = _build_curve(args, args.cls)
    if args.concavify and not curve.concavified:
        curve = concave_hull(curve, args.hull_max, args.hull_points)
    if args.combined:
        curve = combined_with_step(curve)
    grid = np.linspace(0.0, args.nbar_max, args.points)

    per_point_s: list[float | None] = []
    values = []
    g = _guarantee(args)
    for nbar in grid:
        if args.cls == "universal" and not args.combined and not args.concavify:
            detail = universal_coherent_bound_detail(g, math.sqrt(float(nbar)))
            values.append(detail.value)
            per_point_s.append(detail.s_opt)
        else:
            values.append(curve(float(nbar)))
            per_point_s.append(None)

    if args.format == "csv":
        out = io.StringIO()
        out.write(f"# schema={CSV_BOUND_SCHEMA}\n")
        out.write("nbar,epsilon,class,eps0,tau\n")
        for nbar, value in zip(grid, values):
            out.write(
                f"{_fmt(float(nbar))},{_fmt(value)},{curve.class_tag},"
                f"{_fmt(args.eps0)},{_fmt(args.tau)}\n"
            )
        _write_output(out.getvalue(), args.output)
    else:
        payload = {
            "schema": "cvoodg.curve.v1",
            "class_tag": curve.class_tag,
            "eps0": args.eps0,
            "tau": args.tau,
            "concavified": curve.concavified,
            "grid": [[float(n), v] for n, v in zip(grid, values)],
        }
        if any(s is not None for s in per_point_s):
            payload["per_point_s"] = per_point_s
        _write_output(_json_dump(payload), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# extend
# ---------------------------------------------------------------------------

def cmd_extend(args) -> int:
    try:
        spec = state_bounds.parse_state_spec(args.state)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    curve = _concavified_curve(args, args.curve)
    report = state_bounds.extend(curve, spec)
    payload = report.as_json()
    payload["schema"] = "cvoodg.bound_report.v1"
    payload["state"] = args.state
    payload["curve"] = args.curve
    payload["eps0"] = args.eps0
    payload["tau"] = args.tau
    _write_output(_json_dump(payload), args.output)
    if args.fail_on_trivial and report.value >= 2.0:
        return EXIT_TRIVIAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    g = _guarantee(args)
    names = [args.suite]
    try:
        if args.suite == "dominance" and args.cls:
            reports = [
                oracle.run_dominance_suite(
                    g, classes=(args.cls,), seed=args.seed, curve_scale=args.curve_scale
                )
            ]
        else:
            reports = oracle.run_suites(
                names, g, seed=args.seed, curve_scale=args.curve_scale
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    all_pass = all(r.passed for r in reports)
    payload = {
        "schema": "cvoodg.verification_report.v1",
        "status": "pass" if all_pass else "fail",
        "seed": args.seed,
        "eps0": args.eps0,
        "tau": args.tau,
        "curve_scale": args.curve_scale,
        "suites": [r.as_json() for r in reports],
    }
    _write_output(_json_dump(payload), args.output)
    if not all_pass:
        worst = [
            a.as_json()
            for r in reports
            for a in r.assertions
            if a.status == "fail"
        ]
        sys.stderr.write(
            "verification FAILED; worst points: "
            + json.dumps([w["worst_point"] for w in worst])
            + "\n"
        )
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _state_nbar(spec) -> float:
    if isinstance(spec, (state_bounds.Classical, state_bounds.EnergyOnly)):
        return spec.nbar
    if isinstance(spec, state_bounds.Fock):
        return float(spec.m)
    if isinstance(spec, state_bounds.SPAT):
        return 1.0 + 2.0 * spec.q
    if isinstance(spec, state_bounds.SqueezedVacuum):
        return spec.nbar
    if isinstance(spec, state_bounds.FiniteNegativity):
        return spec.profile.nbar
    raise ConfigError(f"state {spec!r} is not sweepable")


def cmd_sweep(args) -> int:
    try:
        eps0_values = [float(v) for v in args.eps0_grid.split(",") if v.strip()]
        state_texts = [t.strip() for t in args.states.split(",") if t.strip()]
        specs = [state_bounds.parse_state_spec(t) for t in state_texts]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not eps0_values or not specs:
        raise ConfigError("sweep requires non-empty --eps0-grid and --states")

    cells = [
        (text, spec, eps0) for text, spec in zip(state_texts, specs) for eps0 in eps0_values
    ]

    def evaluate(cell):
        text, spec, eps0 = cell
        cell_args = argparse.Namespace(
            eps0=eps0, tau=args.tau, hull_max=args.hull_max, hull_points=args.hull_points
        )
        curve = _concavified_curve(cell_args, args.curve)
        report = state_bounds.extend(curve, spec)
        return text, spec, eps0, report

    threads = _thread_count(args)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, cells))
    else:
        results = [evaluate(c) for c in cells]

    if args.format == "csv":
        out = io.StringIO()
        out.write(f"# schema={CSV_SWEEP_SCHEMA}\n")
        out.write("state,nbar,epsilon,class,eps0,tau,s,M,kappa\n")
        for text, spec, eps0, report in results:
            params = report.chosen_params
            s = "" if params is None or params.s is None else _fmt(params.s)
            m = "" if params is None or params.M is None else str(params.M)
            kappa = "" if params is None or params.kappa is None else _fmt(params.kappa)
            out.write(
                f"{text},{_fmt(_state_nbar(spec))},{_fmt(report.value)},"
                f"{args.curve},{_fmt(eps0)},{_fmt(args.tau)},{s},{m},{kappa}\n"
            )
        _write_output(out.getvalue(), args.output)
    else:
        rows = []
        for text, spec, eps0, report in results:
            entry = report.as_json()
            entry["schema"] = "cvoodg.bound_report.v1"
            entry["state"] = text
            entry["curve"] = args.curve
            entry["eps0"] = eps0
            entry["tau"] = args.tau
            rows.append(entry)
        _write_output(_json_dump({"schema": "cvoodg.sweep.v1", "rows": rows}), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and config-file precedence
# ---------------------------------------------------------------------------

def _add_guarantee_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps0", type=float, default=0.1, help="in-distribution error bound")
    p.add_argument("--tau", type=float, default=1.0, help="amplitude radius of the guarantee")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", default=None, help="key=value config file (flags override)")
    p.add_argument("--threads", type=int, default=None,
                   help="internal parallelism cap (env CV_OODG_THREADS as fallback)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    p.add_argument("--hull-max", dest="hull_max", type=float, default=40.0,
                   help="grid ceiling used when a curve must be concavified")
    p.add_argument("--hull-points", dest="hull_points", type=int, default=241)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvoodg",
        description="Certified output-distance bounds for learned CV channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="sample a coherent-state bound curve")
    p_bound.add_argument("--class", dest="cls", required=True)
    _add_guarantee_flags(p_bound)
    p_bound.add_argument("--nbar-max", dest="nbar_max", type=float, default=20.0)
    p_bound.add_argument("--points", type=int, default=200)
    p_bound.add_argument("--combined", action="store_true",
                         help="report min(curve, step) instead of the named formula")
    p_bound.add_argument("--concavify", action="store_true",
                         help="replace the curve by its upper concave hull")
    _add_common_flags(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_extend = sub.add_parser("extend", help="extend a curve to a general input state")
    p_extend.add_argument("--state", required=True,
                          help="e.g. fock:2, spat:1.0, squeezed-vacuum:0.5, "
                               "classical:0.5, energy-only:1.0, finite-negativity:N:n+:n-")
    p_extend.add_argument("--curve", required=True)
    _add_guarantee_flags(p_extend)
    p_extend.add_argument("--fail-on-trivial", dest="fail_on_trivial", action="store_true")
    _add_common_flags(p_extend)
    p_extend.set_defaults(func=cmd_extend, format="json")

    p_verify = sub.add_parser("verify", help="run brute-force verification suites")
    p_verify.add_argument("--suite", required=True,
                          help="dominance | gamma-closed-form | mu-nu | delta-s | "
                               "concavity-limits | all")
    p_verify.add_argument("--class", dest="cls", default=None,
                          help="restrict the dominance suite to one channel class")
    _add_guarantee_flags(p_verify)
    p_verify.add_argument("--curve-scale", dest="curve_scale", type=float, default=1.0,
                          help="scale factor applied to curves (negative-control fixture)")
    _add_common_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify, format="json")

    p_sweep = sub.add_parser("sweep", help="cross an eps0 grid with a state grid")
    p_sweep.add_argument("--eps0-grid", dest="eps0_grid", required=True,
                         help="comma-separated eps0 values")
    p_sweep.add_argument("--states", required=True, help="comma-separated state specs")
    p_sweep.add_argument("--curve", required=True)
    p_sweep.add_argument("--tau", type=float, default=1.0)
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Config precedence: explicit flags > config file > parser defaults."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    explicit = {token.split("=", 1)[0].lstrip("-").replace("-", "_")
                for token in argv if token.startswith("--")}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno} is not key=value: {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in explicit or not hasattr(args, key):
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, value.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(value))
        elif isinstance(current, float):
            setattr(args, key, float(value))
        else:
            setattr(args, key, value)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args, argv)
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
