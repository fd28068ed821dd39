"""Command-line interface: ``hypframe <command> ...``.

Systems are named either by an exemplar id (``ex4_4``, ``exR3E2``, ``sym3``)
or by a path to a system JSON file.  Points are comma-separated decimals.

Exit status: 0 when every check passes, 1 when a verification or theorem
check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys as _sys
from pathlib import Path

import numpy as np

from . import exemplars as exm
from . import io, sampling
from .errors import HyperbolicityViolation, HyperError, InputError
from .frames import FrameSet, certify_minimality, verify_jordan_frame, verify_scaled_frame
from .majorize import (
    adjoint_S_search,
    build_T,
    diag_operator,
    hlp_transfer,
    majorization_slack,
    majorization_test,
    verify_ds_map,
    verify_e_ds_tuple,
    verify_lambda_ds_tuple,
)
from .suite import RunConfig, random_ds_configuration, report_json, run_suite
from .system import (
    Tolerances,
    cone_membership,
    derivative_system,
    eigenvalues,
    rank,
    semi_inner_product,
    trace,
    verify_hyperbolic,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- formatting ------------------------------------------------------------------


def fmt_number(v: float, scale: float = 1.0) -> str:
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    if abs(v) < 1e-12 * max(1.0, scale):
        return "0"
    return format(v, ".12g")


def fmt_vector(vals) -> str:
    vals = np.asarray(vals, dtype=float).ravel()
    scale = float(np.max(np.abs(vals))) if vals.size else 1.0
    return " ".join(fmt_number(v, scale) for v in vals)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _human(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_human(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], list):
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}  {fmt_vector(row)}" for row in val)
        elif isinstance(val, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
            lines.append(f"{pad}{key}: {fmt_vector(val)}")
        elif isinstance(val, list) and all(isinstance(v, str) for v in val):
            lines.append(f"{pad}{key}: {'; '.join(val) if val else 'none'}")
        elif isinstance(val, float):
            lines.append(f"{pad}{key}: {fmt_number(val)}")
        elif isinstance(val, bool):
            lines.append(f"{pad}{key}: {'true' if val else 'false'}")
        else:
            lines.append(f"{pad}{key}: {val}")
    return lines


def emit(args, obj: dict, headline: str | None = None) -> None:
    obj = _jsonable(obj)
    if args.format == "json":
        print(json.dumps(obj, sort_keys=True, indent=1))
        return
    if headline is not None:
        print(headline)
    else:
        print("\n".join(_human(obj)))


# -- argument resolution -------------------------------------------------------------


def _tol_override(args) -> dict:
    return {k: v for k, v in (("root", args.tol_root), ("rank", args.tol_rank), ("cone", args.tol_cone)) if v is not None}


def _exemplar(name: str, args):
    over = _tol_override(args)
    tol = Tolerances().replace(**over) if over else None
    try:
        return exm.get(name, tol)
    except KeyError:
        return None


def resolve_system(name: str, args):
    ex = _exemplar(name, args)
    if ex is not None:
        return ex.system, ex
    if not Path(name).exists():
        raise InputError(f"{name!r} is neither an exemplar id ({', '.join(exm.ids())}) nor a readable file")
    return io.load(name, "system", tol_override=_tol_override(args), name=Path(name).stem), None


def resolve_frame(arg: str | None, sys, ex, kind: str | None = None) -> FrameSet:
    if arg is None:
        if ex is None or not ex.known_frames:
            raise UsageError("a frame file is required for this system")
        F = ex.known_frames[0]
    else:
        F = io.load(arg, "frame", dim=sys.dim)
    if kind is not None and kind != F.kind:
        F = FrameSet(F.elements, kind)
    return F


def point(text: str, sys) -> np.ndarray:
    return io.parse_point(text, sys.dim)


# -- commands ------------------------------------------------------------------


def cmd_eig(args):
    sys, _ = resolve_system(args.system, args)
    spec = eigenvalues(sys, point(args.point, sys), path=args.path)
    emit(args, {"eigenvalues": spec.values, "max_imag": spec.realness, "marginal": spec.marginal},
         fmt_vector(spec.values))
    return EXIT_OK


def cmd_cone(args):
    sys, _ = resolve_system(args.system, args)
    v = cone_membership(sys, point(args.point, sys))
    emit(args, {"status": v.status.value, "margin": v.margin}, f"{v.status.value} (smallest eigenvalue {fmt_number(v.margin)})")
    return EXIT_OK


def cmd_rank(args):
    sys, _ = resolve_system(args.system, args)
    r = rank(sys, point(args.point, sys))
    emit(args, {"rank": r}, str(r))
    return EXIT_OK


def cmd_trace(args):
    sys, _ = resolve_system(args.system, args)
    t = trace(sys, point(args.point, sys))
    emit(args, {"trace": t}, fmt_number(t))
    return EXIT_OK


def cmd_ip(args):
    sys, _ = resolve_system(args.system, args)
    v = semi_inner_product(sys, point(args.x, sys), point(args.y, sys))
    emit(args, {"inner_product": v}, fmt_number(v))
    return EXIT_OK


def cmd_hyperbolic(args):
    sys, _ = resolve_system(args.system, args)
    v = verify_hyperbolic(sys, args.samples, args.seed)
    out = {"check": "real-rootedness on Gaussian samples", **v.to_dict()}
    emit(args, out)
    return EXIT_OK if v.holds else EXIT_FAIL


def cmd_derive(args):
    sys, _ = resolve_system(args.system, args)
    d = derivative_system(sys, args.m)
    if args.point is not None:
        spec = eigenvalues(d, point(args.point, sys))
        emit(args, {"m": args.m, "degree": d.degree, "eigenvalues": spec.values}, fmt_vector(spec.values))
    else:
        emit(args, io.system_to_json(d), json.dumps(io.system_to_json(d), sort_keys=True))
    return EXIT_OK


def cmd_frame_verify(args):
    sys, ex = resolve_system(args.system, args)
    F = resolve_frame(args.frame, sys, ex, args.kind)
    rep = verify_jordan_frame(sys, F) if F.kind == "jordan" else verify_scaled_frame(sys, F)
    out = rep.to_dict()
    out["citation"] = "Jordan frame: primitive idempotents, orthonormal, summing to e" if F.kind == "jordan" else (
        "scaled frame: rank-one cone elements with interior sum; k >= n"
    )
    emit(args, out)
    if rep.theorem_violation:
        return EXIT_FAIL
    return EXIT_OK if rep.verified else EXIT_FAIL


def cmd_certify(args):
    sys, ex = resolve_system(args.system, args)
    F = resolve_frame(args.frame, sys, ex, "scaled")
    cert = certify_minimality(sys, F, seed=args.seed, num_samples=args.samples)
    emit(args, cert)
    return EXIT_OK if cert["issued"] else EXIT_FAIL


def cmd_majorize(args):
    u, v = io.parse_point(args.u), io.parse_point(args.v)
    if len(u) != len(v):
        raise InputError(f"vectors have lengths {len(u)} and {len(v)}")
    slack = majorization_slack(u, v)
    holds = slack >= -args.tol
    out = {"majorized": holds, "slack": slack}
    if holds and args.transfer:
        D, chain = hlp_transfer(u, v)
        out["doubly_stochastic"] = D
        out["t_transforms"] = len(chain)
    emit(args, out, "true" if holds and not args.transfer else ("false" if not holds else None))
    return EXIT_OK if holds else EXIT_FAIL


def cmd_tuple_verify(args):
    sys, _ = resolve_system(args.system, args)
    A = io.load(args.tuple, "tuple", dim=sys.dim, length=sys.degree)
    e = verify_e_ds_tuple(sys, A)
    lam = verify_lambda_ds_tuple(sys, A)
    out = {"e_doubly_stochastic": e, "lambda_doubly_stochastic": lam}
    emit(args, out)
    # an e-DS tuple must be lambda-DS; anything else is a plain rejection
    return EXIT_OK if e["verified"] and lam["verified"] else EXIT_FAIL


def cmd_build_t(args):
    sys, ex = resolve_system(args.system, args)
    F = resolve_frame(args.frame, sys, ex)
    n = len(F.elements)
    A = io.load(args.tuple, "tuple", dim=sys.dim, length=n)
    D = io.load(args.matrix, "matrix", shape=(n, n))
    T = build_T(sys, F, A, D)
    ds = verify_ds_map(sys, T, args.samples, args.seed)
    maj = majorization_test(sys, T, args.samples, args.seed)
    out = {"T": T, "doubly_stochastic_map": ds.to_dict(), "majorization": maj,
           "citation": "lambda(T x) majorized by lambda(x) for T built from a Jordan frame"}
    emit(args, out)
    return EXIT_OK if ds.holds and maj["holds"] else EXIT_FAIL


def cmd_schur(args):
    sys, ex = resolve_system(args.system, args)
    F = resolve_frame(args.frame, sys, ex)
    Dg = diag_operator(sys, F)
    maj = majorization_test(sys, Dg, args.samples, args.seed, stream="schur")
    out = {"citation": "lambda(Diag x) majorized by lambda(x)", **maj}
    emit(args, out)
    return EXIT_OK if maj["holds"] else EXIT_FAIL


def cmd_adjoint(args):
    sys, ex = resolve_system(args.system, args)
    F = resolve_frame(args.frame, sys, ex)
    if args.tuple is not None:
        A = io.load(args.tuple, "tuple", dim=sys.dim, length=len(F.elements))
    else:
        A, _ = random_ds_configuration(sys, F, sampling.rng(args.seed, "cli-adjoint"))
    res = adjoint_S_search(sys, F, A, args.samples, args.seed)
    emit(args, res)
    # exploratory: failures are data, not a broken theorem
    return EXIT_OK


def cmd_suite(args):
    ids = None if args.all or not args.exemplar else args.exemplar
    if ids:
        for i in ids:
            if _exemplar(i, args) is None:
                raise InputError(f"unknown exemplar {i!r}")
    cfg = RunConfig(seed=args.seed, samples=args.samples, tol=_tol_override(args) or None)
    report = run_suite(ids, cfg)
    if args.format == "json":
        print(report_json(report))
    else:
        for c in report["checks"]:
            margin = "" if c["margin"] is None else f" margin={fmt_number(c['margin'])}"
            print(f"{c['verdict'].upper():11s} {c['id']}{margin}  [{c['citation']}]")
        s = report["summary"]
        print(f"{s['total']} checks, {len(s['failed'])} failed (seed {args.seed}, {args.samples} samples)")
    return EXIT_OK if report["summary"]["passed"] else EXIT_FAIL


def cmd_export(args):
    ex = _exemplar(args.id, args)
    if ex is None:
        raise InputError(f"unknown exemplar {args.id!r}")
    doc = io.system_to_json(ex.system)
    print(json.dumps(doc, sort_keys=True, indent=1))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get("HYPER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HYPER_SEED must be an integer, got {raw!r}") from None


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed, help="RNG seed (default: $HYPER_SEED or 0)")
    common.add_argument("--samples", type=int, default=1000, help="sample count for randomized checks")
    common.add_argument("--tol-root", type=float, default=None)
    common.add_argument("--tol-rank", type=float, default=None)
    common.add_argument("--tol-cone", type=float, default=None)
    common.add_argument("--format", choices=("human", "json"), default="human")

    parser = argparse.ArgumentParser(prog="hypframe", description="Computations in hyperbolic polynomial systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *spec):
        p = sub.add_parser(name, parents=[common], help=help_)
        for args, kw in spec:
            p.add_argument(*args, **kw)
        p.set_defaults(func=func)
        return p

    SYS = (("system",), {"help": "exemplar id or system JSON file"})
    PT = (("point",), {"help": "comma-separated coordinates"})
    FRAME = (("frame",), {"nargs": "?", "help": "frame JSON file (default: the exemplar's known frame)"})

    add("eig", cmd_eig, "eigenvalues of a point", SYS, PT,
        (("--path",), {"choices": ("poly", "oracle"), "default": "poly"}))
    add("cone", cmd_cone, "hyperbolicity-cone membership", SYS, PT)
    add("rank", cmd_rank, "number of nonzero eigenvalues", SYS, PT)
    add("trace", cmd_trace, "sum of eigenvalues", SYS, PT)
    add("ip", cmd_ip, "semi-inner product of two points", SYS, (("x",), {}), (("y",), {}))
    add("hyperbolic-check", cmd_hyperbolic, "sample for non-real roots", SYS)
    add("derive", cmd_derive, "m-th derivative system (or a spectrum in it)", SYS,
        (("m",), {"type": int}), (("--point",), {"default": None}))
    add("frame-verify", cmd_frame_verify, "verify a scaled or Jordan frame", SYS, FRAME,
        (("--kind",), {"choices": ("scaled", "jordan"), "default": None}))
    add("certify-minimal", cmd_certify, "minimality certificate from a scaled frame", SYS, FRAME)
    add("majorize", cmd_majorize, "is u majorized by v", (("u",), {}), (("v",), {}),
        (("--tol",), {"type": float, "default": 1e-9}),
        (("--transfer",), {"action": "store_true", "help": "also print a doubly stochastic D with u = D v"}))
    add("tuple-verify", cmd_tuple_verify, "e- and lambda-doubly-stochastic tests", SYS, (("tuple",), {}))
    add("build-t", cmd_build_t, "build T from frame, tuple and DS matrix", SYS,
        (("frame",), {}), (("tuple",), {}), (("matrix",), {}))
    add("schur-sweep", cmd_schur, "lambda(Diag x) against lambda(x)", SYS, FRAME)
    add("adjoint-s-sweep", cmd_adjoint, "exploratory sweep for the adjoint map", SYS, FRAME,
        (("--tuple",), {"default": None}))
    p = add("suite", cmd_suite, "run the randomized theorem suite",
            (("--exemplar",), {"action": "append", "default": None, "help": "exemplar id (repeatable)"}))
    p.add_argument("--all", action="store_true", help="all exemplars plus global checks (default)")
    add("export", cmd_export, "print an exemplar as a system JSON file", (("id",), {}))
    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser(_default_seed())
    except UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.samples < 1:
        print("error: --samples must be positive", file=_sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except HyperbolicityViolation as exc:
        print(f"hyperbolicity violated: {exc}", file=_sys.stderr)
        return EXIT_FAIL
    except (HyperError, UsageError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
