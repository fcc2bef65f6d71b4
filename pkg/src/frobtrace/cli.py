"""Command-line entry point: ``frobtrace <subcommand> ...``.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
Machine-readable output goes to stdout or ``--out``; summaries go to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import gl2
from .census import CensusOptions, build_report
from .frobenius import (
    CurveSpec,
    FormatError,
    build_trace_table,
    format_trace_table,
    load_trace_table,
    save_trace_table,
)
from .sieve import (
    MODES,
    SieveData,
    SolverError,
    check_lower_lemma,
    greaves_values,
    parameter_recipe,
    r1_of,
    r2_of,
    sifted_count,
    solve_U,
)


class UsageError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _curve(A: int, B: int) -> CurveSpec:
    try:
        return CurveSpec(A, B)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _positive(name: str, value) -> None:
    if value is not None and value < 1:
        raise UsageError(f"--{name} must be positive")


def _load_table(path: str):
    if not Path(path).is_file():
        raise UsageError(f"trace cache {path} not found")
    try:
        return load_trace_table(path)
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _image(source: str | None, level: int | None):
    if source is None:
        return None
    if source == "full":
        if level is None:
            raise UsageError("--image full needs --level")
        if level < 2:
            raise UsageError("--level must be >= 2")
        return gl2.full_image(level)
    if not Path(source).is_file():
        raise UsageError(f"image file {source} not found")
    try:
        img = gl2.load_image(source)
    except ValueError as exc:
        raise UsageError(f"{source}: {exc}") from None
    if level is not None and level != img.level:
        raise UsageError(f"--level {level} disagrees with image level {img.level}")
    return img


def _require_even_level(m: int) -> None:
    if m % 2:
        raise UsageError(f"torsion conductor level must be even, got {m}")


# --- subcommands -----------------------------------------------------------------

def cmd_traces(args) -> int:
    curve = _curve(args.A, args.B)
    _positive("x", args.x)
    _positive("workers", args.workers)
    t0 = time.perf_counter()
    table = build_trace_table(curve, args.x, args.method, args.workers)
    if args.out:
        save_trace_table(table, args.out)
    else:
        sys.stdout.write(format_trace_table(table))
    _log(f"traces: {len(table)} good primes <= {args.x} in {time.perf_counter() - t0:.2f}s")
    return 0


def cmd_census(args) -> int:
    if args.traces:
        table = _load_table(args.traces)
        for name in ("A", "B", "x"):
            given = getattr(args, name)
            have = table.x if name == "x" else getattr(table.curve, name)
            if given is not None and given != have:
                raise UsageError(f"--{name} {given} disagrees with cache value {have}")
    else:
        if args.A is None or args.B is None or args.x is None:
            raise UsageError("census needs --A, --B and --x, or --traces")
        _positive("x", args.x)
        _positive("workers", args.workers)
        table = build_trace_table(_curve(args.A, args.B), args.x, args.method, args.workers)
    _positive("k-max", args.k_max)
    if not 0.5 <= args.theta < 1:
        raise UsageError("--theta must lie in [1/2, 1)")
    image = _image(args.image, args.level)
    if image is not None:
        _require_even_level(image.level)
    image2 = None
    if args.half and image is not None:
        image2 = gl2.full_image(2 * image.level) if args.half == "full" else _image(args.half, 2 * image.level)
    opts = CensusOptions(
        m_E=args.m_E, image=image, image2=image2, theta=args.theta, mode=args.mode, k_max=args.k_max
    )
    report = build_report(table, opts)
    _emit(report.to_json(), args.out)
    _log(f"census: x={table.x} records={len(table)} prime-trace={report.counts['prime']}")
    return 0


def cmd_constant(args) -> int:
    if args.level is not None:
        _require_even_level(args.level)
    image = _image(args.image, args.level)
    _require_even_level(image.level)
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    image2 = None
    if args.half:
        image2 = gl2.full_image(2 * image.level) if args.half == "full" else _image(args.half, 2 * image.level)
    report = gl2.conjecture_constant(image, args.tol, image2=image2)
    sys.stdout.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    _log(f"constant: m_E={image.level} |G|={len(image)} C={report.C:.10f}")
    return 0


def cmd_sieve(args) -> int:
    try:
        if args.action == "eval":
            vals = greaves_values(args.U, args.V)
            out = {"U": args.U, "V": args.V, **vals.__dict__}
        elif args.action == "solve":
            U = solve_U(args.V, args.target, (args.lo, args.hi))
            out = {"V": args.V, "target": args.target, "U": round(U, 7), "U_raw": U}
        else:
            params = parameter_recipe(args.theta, args.mode, args.x, drop_log_factor=args.drop_log)
            out = {**params.to_dict(), "r1": r1_of(args.theta), "r2": r2_of(args.theta)}
    except SolverError as exc:
        _log(f"sieve solve: {exc}")
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0


def gl2_checks(lmax: int) -> list[dict]:
    """Brute-force enumeration against the closed-form trace-class counts."""
    from .arith import primes_up_to

    checks = []

    def record(name, got, want):
        checks.append({"check": name, "brute": got, "closed": want, "ok": got == want})

    primes = primes_up_to(lmax).tolist()
    for q in primes:
        hist = gl2.trace_histogram(q)
        for alpha in range(q):
            record(f"#C({q},{alpha})", int(hist[alpha]), gl2.count_trace_class(q, alpha))
        if q % 2:
            record(f"#C^({q},0)", gl2.count_projective_trace_zero_brute(q), gl2.count_projective_trace_zero(q))
        if q * q <= 30:
            record(f"#C({q * q},0)", gl2.count_trace_class_brute(q * q, 0), gl2.count_trace_class(q * q, 0))
            if q % 2:
                record(
                    f"#C^({q * q},0)",
                    gl2.count_projective_trace_zero_brute(q * q),
                    gl2.count_projective_trace_zero(q * q),
                )
    for m in range(2, min(max(lmax, 2), 12) + 1):
        record(f"sum_alpha #C({m},alpha)", int(gl2.trace_histogram(m).sum()), gl2.gl2_order(m))
    return checks


def cmd_gl2_verify(args) -> int:
    if args.lmax < 2:
        raise UsageError("--lmax must be >= 2 (nothing to check)")
    t0 = time.perf_counter()
    checks = gl2_checks(args.lmax)
    failed = [c for c in checks if not c["ok"]]
    sys.stdout.write(json.dumps({"checks": checks, "failed": len(failed)}, indent=2) + "\n")
    _log(f"gl2-verify: {len(checks) - len(failed)}/{len(checks)} passed in {time.perf_counter() - t0:.2f}s")
    return 1 if failed else 0


def cmd_greaves(args) -> int:
    table = _load_table(args.traces)
    if table.x <= math.e:
        raise UsageError("trace table too short for a sieve run")
    if args.m_E < 2 or args.m_E % 2:
        raise UsageError("--m-E must be even and >= 2")
    data = SieveData.from_traces(table.traces, args.m_E)
    try:
        params = parameter_recipe(args.theta, args.mode, table.x, drop_log_factor=args.drop_log)
        selberg = parameter_recipe(args.theta, "selberg", table.x, drop_log_factor=args.drop_log)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "selberg":
        raise UsageError("greaves needs a lower-bound mode (greaves_Q, greaves_P or pcc)")
    if params.z <= 1:
        raise UsageError(f"z = {params.z:.4g} <= 1 at this x; retry with --drop-log")
    if args.r is not None:
        _positive("r", args.r)
        params = type(params)(**{**params.to_dict(), "r": args.r})
    lemma = check_lower_lemma(data, params)
    out = {
        "x": table.x,
        "curve": {"A": table.curve.A, "B": table.curve.B},
        "m_E": args.m_E,
        "size": len(data),
        "S": sifted_count(data, selberg.z) if selberg.z > 1 else None,
        "selberg_params": selberg.to_dict(),
        "H": lemma.H,
        "params": params.to_dict(),
        "lower_lemma": lemma.to_dict(),
    }
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    _log(f"greaves: H={lemma.H:.4f} #omega<=r={lemma.count_omega_le_r} max_ok={lemma.max_ok}")
    return 0


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frobtrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    default_workers = os.cpu_count() or 1

    p = sub.add_parser("traces", help="compute a_p for all good p <= x and write the trace cache")
    p.add_argument("--A", type=int, required=True, help="coefficient A of y^2 = x^3 + Ax + B")
    p.add_argument("--B", type=int, required=True, help="coefficient B")
    p.add_argument("--x", type=int, required=True, help="prime bound")
    p.add_argument("--method", choices=["naive", "fast", "auto"], default="auto", help="trace algorithm")
    p.add_argument("--workers", type=int, default=default_workers, help="worker processes")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_traces)

    p = sub.add_parser("census", help="prime / almost-prime trace census as JSON")
    p.add_argument("--A", type=int, help="coefficient A")
    p.add_argument("--B", type=int, help="coefficient B")
    p.add_argument("--x", type=int, help="prime bound")
    p.add_argument("--traces", help="read traces from this cache instead of computing them")
    p.add_argument("--image", help="'full' or a gl2image file standing in for the Galois image")
    p.add_argument("--level", type=int, help="level m for --image full")
    p.add_argument("--half", help="image at level 2m for C' ('full' or a gl2image file)")
    p.add_argument("--m-E", dest="m_E", type=int, help="torsion conductor (default: image level, else 2)")
    p.add_argument("--theta", type=float, default=0.5, help="quasi-GRH exponent in [1/2, 1)")
    p.add_argument("--mode", choices=[m for m in MODES if m != "selberg"], default="greaves_Q", help="sieve recipe")
    p.add_argument("--k-max", dest="k_max", type=int, default=8, help="largest k for Q_k / P_k counts")
    p.add_argument("--method", choices=["naive", "fast", "auto"], default="auto", help="trace algorithm")
    p.add_argument("--workers", type=int, default=default_workers, help="worker processes")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("constant", help="C1, C2, C (and C') from a Galois image")
    p.add_argument("--level", type=int, help="level m_E (required with --image full)")
    p.add_argument("--image", default="full", help="'full' or a gl2image file")
    p.add_argument("--half", help="image at level 2 m_E for C' ('full' or a gl2image file)")
    p.add_argument("--tol", type=float, default=1e-10, help="Euler-product truncation tolerance")
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("sieve", help="Greaves functionals: eval J, solve for U, parameter recipes")
    act = p.add_subparsers(dest="action", required=True)
    e = act.add_parser("eval", help="alpha(V), beta(V), J(U, V)")
    e.add_argument("--U", type=float, required=True, help="upper ramp exponent U")
    e.add_argument("--V", type=float, required=True, help="lower ramp exponent V in [1/6, 1/4]")
    s = act.add_parser("solve", help="U with J(U, V) = target, by bisection")
    s.add_argument("--V", type=float, required=True, help="lower ramp exponent V")
    s.add_argument("--target", type=float, required=True, help="target value of J")
    s.add_argument("--lo", type=float, default=0.3, help="bracket lower end")
    s.add_argument("--hi", type=float, default=0.9, help="bracket upper end")
    r = act.add_parser("recipe", help="parameter block for a mode")
    r.add_argument("--theta", type=float, required=True, help="quasi-GRH exponent in [1/2, 1)")
    r.add_argument("--mode", choices=MODES, required=True, help="sieve mode")
    r.add_argument("--x", type=float, help="prime bound; needed for z")
    r.add_argument("--drop-log", action="store_true", help="omit the (log x)^k divisor of z")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("gl2-verify", help="brute-force check of the trace-class counts")
    p.add_argument("--lmax", type=int, required=True, help="check primes l <= lmax")
    p.set_defaults(func=cmd_gl2_verify)

    p = sub.add_parser("greaves", help="S, H and the almost-prime lemma on a cached trace table")
    p.add_argument("--traces", required=True, help="trace cache CSV")
    p.add_argument("--theta", type=float, default=0.5, help="quasi-GRH exponent in [1/2, 1)")
    p.add_argument("--mode", choices=MODES, default="greaves_Q", help="sieve recipe")
    p.add_argument("--m-E", dest="m_E", type=int, default=2, help="torsion conductor (even)")
    p.add_argument("--r", type=int, help="override the recipe's r")
    p.add_argument("--drop-log", action="store_true", help="omit the (log x)^k divisor of z")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_greaves)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help (0) or a usage error (2)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"frobtrace {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"frobtrace {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
