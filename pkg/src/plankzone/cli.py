"""Command-line entry point: ``plankzone {gen,verify,inv-eigen,trace,zones}``.

Exit codes: 0 pass, 1 bound failure or unsupported input, 2 usage or
parse error.  The default seed comes from $PLANKZONE_SEED (else 0).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from plankzone import trigpoly
from plankzone.errors import CertificationError, ConvergenceError, UnsupportedInputError
from plankzone.geom_core import SignPattern, UnitVectorSet, Zone, extremal_configuration, gram, zone_covers
from plankzone.inverse_eigen import (
    DualConfig,
    NewtonConfig,
    enumerate_all,
    solve_dual,
    solve_in_quadrant,
    verify_w_bounds,
)
from plankzone.io import InputError, dump_vectors, jsonable, load_gram, load_vector, load_vectors, load_zones
from plankzone.report import VerifyConfig, build_report
from plankzone.witness import CertifyConfig, WitnessConfig, build_M, certify_zone_bound

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def default_seed() -> int:
    raw = os.environ.get("PLANKZONE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


class UsageError(Exception):
    pass


def _emit(obj, out):
    out.write(json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n")


def _write(text, path, out):
    if path in (None, "-"):
        out.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args, out):
    if args.extremal is not None:
        if args.extremal < 1:
            raise UsageError(f"--extremal needs n >= 1, got {args.extremal}")
        vs = extremal_configuration(args.extremal)
    else:
        n, d = args.random
        if n < 1 or d < 1:
            raise UsageError(f"--random needs n >= 1 and d >= 1, got {n} {d}")
        rng = np.random.default_rng(args.seed)
        vs = UnitVectorSet.normalized(rng.standard_normal((n, d)))
    _write(dump_vectors(vs), args.output, out)
    return EXIT_OK


def cmd_verify(args, out):
    vs = load_vectors(args.file, normalize=args.normalize)
    if vs.n < 2:
        raise UsageError("verification needs at least two vectors")
    cfg = VerifyConfig(
        seed=args.seed,
        certify_tol=args.tol,
        residual_tol=args.residual_tol,
        bound_tol=args.bound_tol,
        oracle_slack=args.oracle_slack,
        oracle=args.oracle,
    )
    try:
        report = build_report(vs, cfg, source=args.file)
    except CertificationError as exc:
        report = {"schema": "1", "instance": {"n": vs.n, "d": vs.d, "source": args.file, "seed": args.seed},
                  "error": str(exc), "best_margin": exc.best_margin, "overall": False}
    _emit(report, out)
    return EXIT_OK if report["overall"] else EXIT_FAIL


def _solution_json(sol, n):
    rep = verify_w_bounds(sol, n) if sol.converged else None
    out = {
        "quadrant": str(sol.quadrant),
        "w": sol.w,
        "residual": sol.residual,
        "converged": sol.converged,
        "iterations": sol.iterations,
    }
    if rep is not None:
        out.update({"sup_norm": rep.sup_norm, "sharp_bound": rep.sharp_bound,
                    "bang_bound": rep.bang_bound, "strong_bound": rep.strong_bound})
    return out


def cmd_inv_eigen(args, out):
    H, _ = load_gram(args.file, normalize=args.normalize)
    n = H.n
    cfg = NewtonConfig(tol=args.residual_tol)
    if args.quadrant is not None:
        try:
            q = SignPattern.parse(args.quadrant)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if q.n != n:
            raise UsageError(f"quadrant has length {q.n}, expected {n}")
        sol = solve_in_quadrant(H, q, cfg)
        if sol is None:
            _emit({"mode": "quadrant", "quadrant": str(q), "exists": False, "solutions": []}, out)
            return EXIT_OK
        _emit({"mode": "quadrant", "quadrant": str(q), "exists": True, "solutions": [_solution_json(sol, n)]}, out)
        return EXIT_OK if sol.converged else EXIT_FAIL
    if args.all:
        if n > 20:
            raise UsageError("--all is limited to n <= 20")
        sols = enumerate_all(H, cfg)
        _emit({"mode": "all", "count": len(sols), "solutions": [_solution_json(s, n) for s in sols]}, out)
        return EXIT_OK
    sol = solve_dual(H, DualConfig(seed=args.seed, newton=cfg))
    body = _solution_json(sol, n)
    _emit({"mode": "dual", "solutions": [body]}, out)
    return EXIT_OK if body.get("sharp_bound", False) else EXIT_FAIL


def cmd_trace(args, out):
    vs = load_vectors(args.file, normalize=args.normalize)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    result = certify_zone_bound(vs, CertifyConfig(dual=DualConfig(seed=args.seed),
                                                  witness=WitnessConfig(seed=args.seed)))
    M = build_M(gram(vs), result.w).entries
    n = M.shape[0]
    if args.vector is not None:
        v = load_vector(args.vector)
        if v.shape != (n,):
            raise UsageError(f"slice vector must have length {n}, got {v.shape}")
    else:
        if args.slice is None:
            # first non-degenerate coordinate slice
            usable = [j for j in range(n) if n * M[j, j] - 1 > 1e-12]
            if not usable:
                raise UsageError("every coordinate slice is degenerate (M has constant diagonal 1/n)")
            k = usable[0]
        else:
            k = args.slice
        if not 0 <= k < n:
            raise UsageError(f"--slice must be in 0..{n - 1}")
        v = trigpoly.slice_vector(M, k)
    T = trigpoly.slice_poly(M, v)
    theta = 2 * np.pi * np.arange(args.samples) / args.samples
    P, dP, d2P = trigpoly.eval_derivatives(T, theta)
    Q = P - np.cos(n * theta)
    pts = np.cos(theta)[:, None] + np.sin(theta)[:, None] * v[None, :]
    quad = np.einsum("ij,jk,ik->i", pts, M, pts)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "T", "dT", "d2T", "Q", "quadform"])
    for row in zip(theta, P, dP, d2P, Q, quad):
        writer.writerow(["%.17g" % float(x) for x in row])
    _write(buf.getvalue(), args.output, out)
    return EXIT_OK


def cmd_zones(args, out):
    if args.file is not None:
        zones = load_zones(args.file)
    else:
        if args.width is None:
            raise UsageError("--from-vectors needs --width")
        vs = load_vectors(args.from_vectors, normalize=args.normalize)
        if vs.d > 3:
            raise UsageError("zone normals must live in R^3 (or lower, zero-padded)")
        vs = vs.embed(3)
        try:
            zones = [Zone(v, args.width) for v in vs.vectors]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if not zones:
        raise UsageError("zone list is empty")
    rep = zone_covers(zones, args.resolution)
    n = len(zones)
    equal = len({z.width for z in zones}) == 1
    body = {
        "schema": "1",
        "zones": n,
        "resolution": args.resolution,
        "grid_points": rep.grid_size,
        "covered": rep.covered,
        "margin": rep.margin,
        "uncovered_point": rep.uncovered_point,
        "refined_point": rep.refined_point,
        "refined_margin": rep.refined_margin,
        "total_width": rep.total_width,
        "total_width_minus_pi": rep.total_width - math.pi,
    }
    # equal-width zones can only cover S^2 when their total width reaches pi
    consistent = not (equal and rep.covered and rep.total_width < math.pi - 1e-9)
    body["consistent_with_bound"] = consistent
    _emit(body, out)
    return EXIT_OK if consistent else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plankzone", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    seed = default_seed()

    g = sub.add_parser("gen", help="write a vector file")
    mode = g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--extremal", type=int, metavar="N", help="N vectors in R^2 with lines pi/N apart")
    mode.add_argument("--random", type=int, nargs=2, metavar=("N", "D"), help="N normalized Gaussian vectors in R^D")
    g.add_argument("--seed", type=int, default=seed, help="RNG seed for --random (default $PLANKZONE_SEED or 0)")
    g.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run the full pipeline and print a JSON report")
    v.add_argument("file", help="vector file (JSON {'vectors': [...]} or CSV)")
    v.add_argument("--oracle", action="store_true", help="add brute-force oracle checks")
    v.add_argument("--tol", type=float, default=1e-9, help="certification tolerance on the margin (default 1e-9)")
    v.add_argument("--residual-tol", type=float, default=1e-10, help="inverse-eigenvector residual (default 1e-10)")
    v.add_argument("--bound-tol", type=float, default=1e-8, help="tolerance for w and M bounds (default 1e-8)")
    v.add_argument("--oracle-slack", type=float, default=1e-6, help="oracle comparison slack (default 1e-6)")
    v.add_argument("--seed", type=int, default=seed, help="multi-start seed (default $PLANKZONE_SEED or 0)")
    v.add_argument("--normalize", action="store_true", help="normalize rows instead of rejecting non-unit vectors")
    v.set_defaults(func=cmd_verify)

    ie = sub.add_parser("inv-eigen", help="inverse eigenvectors of a Gram matrix")
    ie.add_argument("file", help="vector file, or JSON {'gram': [[...]]}")
    which = ie.add_mutually_exclusive_group(required=True)
    which.add_argument("--quadrant", metavar="PATTERN", help="sign pattern such as ++-")
    which.add_argument("--all", action="store_true", help="every quadrant (n <= 20)")
    which.add_argument("--dual", action="store_true", help="product-maximizing solution via H^-1 (invertible H)")
    ie.add_argument("--residual-tol", type=float, default=1e-10, help="Newton residual tolerance (default 1e-10)")
    ie.add_argument("--seed", type=int, default=seed, help="multi-start seed for --dual")
    ie.add_argument("--normalize", action="store_true", help="normalize vector rows")
    ie.set_defaults(func=cmd_inv_eigen)

    t = sub.add_parser("trace", help="CSV samples of a slice polynomial for plotting")
    t.add_argument("file", help="vector file")
    src = t.add_mutually_exclusive_group()
    src.add_argument("--slice", type=int, metavar="K", help="coordinate slice (n e_K - 1)/sqrt(n m_KK - 1), 0-based (default: first non-degenerate)")
    src.add_argument("--vector", metavar="FILE", help="JSON list giving the slice direction v")
    t.add_argument("--samples", type=int, default=256, help="number of theta samples on [0, 2 pi) (default 256)")
    t.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    t.add_argument("--seed", type=int, default=seed, help="multi-start seed (default $PLANKZONE_SEED or 0)")
    t.add_argument("--normalize", action="store_true", help="normalize vector rows")
    t.set_defaults(func=cmd_trace)

    z = sub.add_parser("zones", help="test whether zones cover the sphere")
    z.add_argument("file", nargs="?", help="JSON {'zones': [{'normal': [x,y,z], 'width': w}]}")
    z.add_argument("--from-vectors", metavar="FILE", help="use these vectors as normals")
    z.add_argument("--width", type=float, help="common zone width in radians (with --from-vectors)")
    z.add_argument("--resolution", type=int, default=6, help="icosphere subdivision level (default 6)")
    z.add_argument("--normalize", action="store_true", help="normalize vector rows")
    z.set_defaults(func=cmd_zones)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "zones" and (args.file is None) == (args.from_vectors is None):
        print("plankzone: error: zones needs exactly one of FILE or --from-vectors", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, InputError) as exc:
        print(f"plankzone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedInputError as exc:
        print(f"plankzone: unsupported input: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CertificationError, ConvergenceError) as exc:
        print(f"plankzone: failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # validation errors on loaded data (non-unit rows, bad Gram matrix, ...)
        print(f"plankzone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
