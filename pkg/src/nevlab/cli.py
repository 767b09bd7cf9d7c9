"""``nevlab`` command line.

Exit codes: 0 on PASS / CONSISTENT, 1 on a failed verifier (or ``NotEntire``
with ``--expect-entire``), 2 on usage, parse or precondition errors, 3 when a
numerical routine does not converge.  Errors are printed as JSON
``{"error": ..., "detail": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import quadrature
from .contour_zeros import locate_zeros_disk
from .errors import (
    ClusterUnresolved,
    NevlabError,
    NonConvergent,
    ParseError,
    ZeroOnContour,
)
from .moving_targets import (
    MovingHyperplane,
    verify_moving_smt,
    verify_moving_truncation,
)
from .nevanlinna import (
    INF,
    FixedHyperplane,
    HoloCurve,
    profile,
    verify_fmt,
    verify_jensen,
    verify_truncated_borel,
    verify_vojta_smt,
)
from .parser import parse
from .quotient_lab import (
    CONSISTENT,
    NOT_ENTIRE,
    PowerSum,
    construct_auxiliary_map,
    corollary_check,
    theorem_bounds,
)
from .reports import (
    FAIL,
    PASS,
    SCHEMA_VERSION,
    VerifierReport,
    atomic_write,
    csv_text,
    dumps,
    map_radii,
    normalize,
    radii_grid,
    row,
)
from .scalars import EXACT, FLOAT

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_radii(spec: str) -> list[float]:
    """``min:max:count[:log]`` (``:lin`` is accepted as the default)."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"radii must be min:max:count[:log], got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad radii grid {spec!r}") from exc
    scale = parts[3] if len(parts) == 4 else "lin"
    if scale not in ("lin", "log"):
        raise UsageError(f"grid scale must be lin or log, got {scale!r}")
    if lo <= 0 or hi < lo or count < 1:
        raise UsageError("radii grid needs 0 < min <= max and count >= 1")
    return radii_grid(lo, hi, count, scale == "log")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _domain(args) -> str:
    return FLOAT if args.float else EXACT


def _target(text: str, domain: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    f = parse(text, domain)
    if not f.is_constant():
        raise UsageError(f"target {text!r} is not a constant")
    return f.value_at_zero()


def _load_instance(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"instance file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("instance file must hold a JSON object")
    return data


def _exprs(items, domain: str, what: str):
    if not isinstance(items, list) or not items:
        raise UsageError(f"instance field {what!r} must be a nonempty list")
    return [parse(str(x), domain) for x in items]


def _instance_domain(args, data) -> str:
    return FLOAT if args.float or data.get("float") else EXACT


def _curve_and_rows(args):
    data = _load_instance(args.instance)
    domain = _instance_domain(args, data)
    comps = _exprs(data.get("curve"), domain, "curve")
    rows = data.get("hyperplanes")
    if not isinstance(rows, list) or not rows:
        raise UsageError("instance field 'hyperplanes' must be a nonempty list")
    return data, HoloCurve(tuple(comps)), [_exprs(r, domain, "hyperplanes") for r in rows]


# -- commands -------------------------------------------------------------------

def cmd_analyze(args):
    f = parse(args.expr, _domain(args))
    return profile(f, _target(args.a, f.domain), parse_radii(args.radii)), EXIT_OK


def cmd_zeros(args):
    f = parse(args.expr, _domain(args))
    zs = locate_zeros_disk(f, args.radius, tol=args.tol, strict=args.strict)
    out = {"schema": SCHEMA_VERSION, **zs.to_json()}
    return out, EXIT_OK


def cmd_quotient(args):
    d = _domain(args)
    F, G = parse(args.F, d), parse(args.G, d)
    kw = {} if args.cap is None else {"cap": args.cap}
    rep = corollary_check(F, G, args.radius, tol=args.tol, **kw)
    code = EXIT_OK if rep.verdict == CONSISTENT else EXIT_FAIL
    if args.expect_entire and rep.certificate.verdict == NOT_ENTIRE:
        code = EXIT_FAIL
    return rep, code


def cmd_verify_jensen(args):
    f = parse(args.expr, _domain(args))
    radii = parse_radii(args.radii)
    res = map_radii(lambda r: verify_jensen(f, r), radii)
    rows = [row(r, x, args.tol, residual=x) for r, x in zip(radii, res)]
    ok = all(x["margin"] >= 0 for x in rows)
    return VerifierReport("jensen", {"f": str(f), "tol": args.tol}, rows, PASS if ok else FAIL), None


def cmd_verify_fmt(args):
    f = parse(args.expr, _domain(args))
    return verify_fmt(f, _target(args.a, f.domain), parse_radii(args.radii), bound=args.bound), None


def cmd_verify_smt(args):
    _, c, rows = _curve_and_rows(args)
    Hs = []
    for r in rows:
        if not all(g.is_constant() for g in r):
            raise UsageError("fixed hyperplanes need constant coefficients")
        Hs.append(FixedHyperplane(tuple(g.value_at_zero() for g in r)))
    rep = verify_vojta_smt(c, Hs, args.eps, parse_radii(args.radii), allowed_violation=args.allowed_violation)
    return rep, None


def cmd_verify_moving_smt(args):
    data, c, rows = _curve_and_rows(args)
    Hs = [MovingHyperplane(tuple(r)) for r in rows]
    t = args.t if args.t is not None else int(data.get("t", 0))
    radii = parse_radii(args.radii)
    if args.truncation:
        return verify_moving_truncation(c, Hs, t, radii, Q=args.Q), None
    if args.Q is not None:
        raise UsageError("--Q applies only with --truncation")
    return verify_moving_smt(c, Hs, t, args.eps, radii, allowed_violation=args.allowed_violation), None


def cmd_verify_borel(args):
    if args.instance:
        data = _load_instance(args.instance)
        fs = _exprs(data.get("functions"), EXACT, "functions")
    elif args.exprs:
        fs = [parse(e, EXACT) for e in args.exprs]
    else:
        raise UsageError("give expressions or --instance")
    return verify_truncated_borel(fs, parse_radii(args.radii), C=args.C), None


def cmd_bounds(args):
    return theorem_bounds(args.l, args.m, args.s, args.t, args.a, eps=args.eps, w=args.w), EXIT_OK


def _power_sum(data, key: str) -> PowerSum:
    part = data.get(key)
    if not isinstance(part, dict):
        raise UsageError(f"instance field {key!r} must be an object with 'coeffs' and 'bases'")
    try:
        return PowerSum(tuple(_exprs(part.get("coeffs"), EXACT, "coeffs")), tuple(_exprs(part.get("bases"), EXACT, "bases")))
    except ValueError as exc:
        if isinstance(exc, NevlabError):
            raise
        raise UsageError(f"{key}: {exc}") from exc


def cmd_aux_map(args):
    data = _load_instance(args.instance)
    vals = {}
    for k in ("n", "s", "t"):
        v = getattr(args, k)
        vals[k] = v if v is not None else data.get(k)
        if not isinstance(vals[k], int):
            raise UsageError(f"{k} must be given as an integer")
    am = construct_auxiliary_map(_power_sum(data, "F"), _power_sum(data, "G"), vals["n"], vals["s"], vals["t"])
    return am, EXIT_OK if am.identity_holds and am.general_position else EXIT_FAIL


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, help="seed for contour phase retries")
    common.add_argument("--float", action="store_true", help="parse inputs in floating point")

    p = _Parser(prog="nevlab", description="Nevanlinna-theory desk lab for exponential polynomials.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", parents=[common], help="m, N and T on a radius grid")
    s.add_argument("expr")
    s.add_argument("--a", default="0", help="target value (constant or inf)")
    s.add_argument("--radii", default="1:10:10")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("zeros", parents=[common], help="certified zeros in a disk")
    s.add_argument("expr")
    s.add_argument("--radius", type=_positive(float), required=True)
    s.add_argument("--tol", type=_positive(float), default=1e-12)
    s.add_argument("--strict", action="store_true", help="fail on unresolved clusters")
    s.set_defaults(func=cmd_zeros)

    s = sub.add_parser("quotient", parents=[common], help="divisibility of F by G and frequency relations")
    s.add_argument("F")
    s.add_argument("G")
    s.add_argument("--radius", type=_positive(float), default=10.0)
    s.add_argument("--tol", type=_positive(float), default=1e-10, help="relation residual tolerance")
    s.add_argument("--cap", type=_positive(int), help="coefficient cap of the relation search")
    s.add_argument("--expect-entire", action="store_true")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("verify-jensen", parents=[common], help="Jensen formula residuals")
    s.add_argument("expr")
    s.add_argument("--radii", default="1:5:5")
    s.add_argument("--tol", type=_positive(float), default=1e-6)
    s.set_defaults(func=cmd_verify_jensen)

    s = sub.add_parser("verify-fmt", parents=[common], help="First Main Theorem defect oscillation")
    s.add_argument("expr")
    s.add_argument("--a", default="0")
    s.add_argument("--radii", default="1:40:20")
    s.add_argument("--bound", type=_positive(float), default=2.0)
    s.set_defaults(func=cmd_verify_fmt)

    s = sub.add_parser("verify-smt", parents=[common], help="Second Main Theorem, fixed hyperplanes")
    s.add_argument("instance", help="JSON with 'curve' and 'hyperplanes'")
    s.add_argument("--eps", type=_positive(float), default=0.5)
    s.add_argument("--radii", default="2:40:20")
    s.add_argument("--allowed-violation", type=float, default=0.1)
    s.set_defaults(func=cmd_verify_smt)

    s = sub.add_parser("verify-moving-smt", parents=[common], help="Second Main Theorem, moving targets")
    s.add_argument("instance", help="JSON with 'curve', 'hyperplanes' and optional 't'")
    s.add_argument("--t", type=int)
    s.add_argument("--eps", type=_positive(float), default=0.5)
    s.add_argument("--radii", default="2:20:10")
    s.add_argument("--allowed-violation", type=float, default=0.1)
    s.add_argument("--truncation", action="store_true", help="check the truncated counting inequality instead")
    s.add_argument("--Q", type=_positive(int), help="truncation level override")
    s.set_defaults(func=cmd_verify_moving_smt)

    s = sub.add_parser("verify-borel", parents=[common], help="truncated Borel inequality")
    s.add_argument("exprs", nargs="*")
    s.add_argument("--instance", help="JSON with 'functions'")
    s.add_argument("--radii", default="1:10:10")
    s.add_argument("--C", type=_positive(float), default=50.0)
    s.set_defaults(func=cmd_verify_borel)

    s = sub.add_parser("bounds", parents=[common], help="index-set sizes and thresholds")
    for k in ("l", "m", "s", "t"):
        s.add_argument(f"--{k}", type=_positive(int), required=True)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--eps", type=_positive(float))
    s.add_argument("--w", type=_positive(int), default=1)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("aux-map", parents=[common], help="auxiliary curve and hyperplanes")
    s.add_argument("instance", help="JSON with F/G as {coeffs, bases} and n, s, t")
    for k in ("n", "s", "t"):
        s.add_argument(f"--{k}", type=_positive(int))
    s.set_defaults(func=cmd_aux_map)
    return p


# -- output ---------------------------------------------------------------------

def _flat_csv(payload: dict) -> str:
    return csv_text(["key", "value"], ((k, json.dumps(normalize(v), sort_keys=True) if isinstance(v, (dict, list)) else v)
                                      for k, v in sorted(payload.items())))


def render(result, fmt: str) -> str:
    if fmt == "json":
        return dumps(result)
    if hasattr(result, "to_csv"):
        return result.to_csv()
    payload = result.to_json() if hasattr(result, "to_json") else result
    if isinstance(payload.get("zeros"), list):
        return csv_text(["re", "im", "mult", "cert_radius"],
                        ([z["re"], z["im"], z["mult"], z["cert_radius"]] for z in payload["zeros"]))
    return _flat_csv(payload)


def _emit(text: str, output: str | None) -> None:
    if output:
        atomic_write(output, text)
    else:
        sys.stdout.write(text)


def _error(kind: str, detail: str, code: int) -> int:
    sys.stdout.write(dumps({"error": kind, "detail": detail}))
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _error("UsageError", str(exc), EXIT_USAGE)
    if args.seed is not None:
        quadrature.set_phase_seed(args.seed)
    try:
        result, code = args.func(args)
        if code is None:
            code = EXIT_OK if result.status != FAIL else EXIT_FAIL
        _emit(render(result, args.format), args.output)
        return code
    except UsageError as exc:
        return _error("UsageError", str(exc), EXIT_USAGE)
    except (NonConvergent, ZeroOnContour, ClusterUnresolved) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_NUMERIC)
    except (ParseError, NevlabError, ValueError, TypeError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_USAGE)
    except OSError as exc:
        return _error("OSError", str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
