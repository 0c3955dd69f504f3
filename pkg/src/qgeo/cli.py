"""``qgeo`` command line: verification suites, solver and flow runners.

JSON reports go to stdout, CSV samples to ``--out`` (stdout when omitted).
Exit codes: 0 success or suite pass, 1 suite failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .errors import QGeoError
from .geodesics import geodesic_through, write_geodesic_csv
from .hermitian import eig_hermitian, matrix_from_json, vector_from_json
from .observables import FlexibleObservable, Observable, flexible_flow, write_flow_csv
from .probability import DensityOperator, born_report
from .projective import Ray, diameter
from .spectral import SolverOptions, extremal_eigen, iters_per_restart
from .suites import SUITES, run_all, run_suite


class UsageError(Exception):
    pass


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _matrix(path: str) -> np.ndarray:
    return matrix_from_json(_load(path))


def _vector(path: str) -> np.ndarray:
    # a tangent's "base" field is ignored; the CLI takes the base separately
    return vector_from_json(_load(path))


def _interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"interval must be 'a,b', got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError("interval endpoints out of order")
    return lo, hi


def _positive(kind):
    def parse(text: str):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _open_out(path: Optional[str]):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_verify(args) -> int:
    if args.suite == "all":
        report = run_all(args.dim, args.trials, args.seed, args.hbar, args.tol)
    else:
        report = run_suite(args.suite, args.dim, args.trials, args.seed, args.hbar, args.tol)
    _emit(report.to_dict())
    return 0 if report.passed else 1


def cmd_spectrum(args) -> int:
    a = Observable(_matrix(args.matrix))
    out: dict = {"dim": a.dim}
    oracle = None
    if args.method in ("jacobi", "both"):
        oracle = eig_hermitian(a.matrix).eigenvalues
        out["eigenvalues_oracle"] = oracle.tolist()
    if args.method in ("riemannian", "both"):
        opts = SolverOptions(restarts=args.restarts, seed=args.seed)
        lo, _ = extremal_eigen(a, opts=opts, sense="min", hbar=args.hbar)
        hi, _ = extremal_eigen(a, opts=opts, sense="max", hbar=args.hbar)
        out["eigenvalues_riemannian"] = [lo, hi]
        out["iters_per_restart"] = iters_per_restart(a, opts, "min", args.hbar)
        if oracle is not None:
            out["max_abs_diff"] = max(abs(lo - oracle[0]), abs(hi - oracle[-1]))
    _emit(out)
    return 0


def cmd_flow(args) -> int:
    a = Observable(_matrix(args.observable))
    b = Observable(_matrix(args.observable2)) if args.observable2 else Observable(np.eye(a.dim))
    f = FlexibleObservable(a, b)
    x0 = Ray(_vector(args.state))
    res = flexible_flow(f, x0, args.t_end, args.step, args.hbar, args.record_every)
    if args.out:
        with _open_out(args.out) as fh:
            write_flow_csv(f, res, fh, args.hbar)
    _emit({"steps": int(round(args.t_end / args.step)), "t_end": args.t_end, "conserved_drift": res.conserved_drift})
    return 0


def cmd_geodesic(args) -> int:
    base = Ray(_vector(args.base))
    c = geodesic_through(base, _vector(args.dir), 1.0, args.hbar)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    t_max = diameter(args.hbar) if args.t_max is None else args.t_max
    ts = np.linspace(0.0, t_max, args.samples)
    if args.out:
        with _open_out(args.out) as fh:
            write_geodesic_csv(c, ts, fh)
    else:
        write_geodesic_csv(c, ts, sys.stdout)
    return 0


def cmd_born(args) -> int:
    a = Observable(_matrix(args.matrix))
    obj = _load(args.state)
    if "re" in obj and np.ndim(obj["re"]) == 1:
        w = DensityOperator.pure(Ray(vector_from_json(obj)))
    else:
        w = DensityOperator(matrix_from_json(obj))
    _emit(born_report(a, w, args.interval, args.hbar))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgeo", description="Geometry of quantum state space.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--hbar", type=_positive(float), default=1.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="run a seeded invariant suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    v.add_argument("--dim", type=int, default=4)
    v.add_argument("--trials", type=_positive(int), default=100)
    v.add_argument("--tol", type=_positive(float), default=None)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="extremal eigenvalues: Riemannian solver and/or Jacobi")
    s.add_argument("--matrix", required=True)
    s.add_argument("--method", choices=["riemannian", "jacobi", "both"], default="both")
    s.add_argument("--restarts", type=int, default=8)
    common(s)
    s.set_defaults(func=cmd_spectrum)

    f = sub.add_parser("flow", help="integrate the flow of <A> or <A><B>")
    f.add_argument("--observable", required=True)
    f.add_argument("--observable2", default=None)
    f.add_argument("--state", required=True)
    f.add_argument("--t-end", dest="t_end", type=float, required=True)
    f.add_argument("--step", type=_positive(float), required=True)
    f.add_argument("--record-every", dest="record_every", type=_positive(int), default=1)
    common(f)
    f.set_defaults(func=cmd_flow)

    g = sub.add_parser("geodesic", help="sample a unit-speed geodesic as CSV")
    g.add_argument("--base", required=True)
    g.add_argument("--dir", required=True)
    g.add_argument("--samples", type=int, default=100)
    g.add_argument("--t-max", dest="t_max", type=float, default=None)
    common(g)
    g.set_defaults(func=cmd_geodesic)

    b = sub.add_parser("born", help="Born probability of an interval")
    b.add_argument("--matrix", required=True)
    b.add_argument("--state", required=True)
    b.add_argument("--interval", type=_interval, action="append", required=True)
    common(b)
    b.set_defaults(func=cmd_born)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, QGeoError, ValueError) as exc:
        print(f"qgeo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
