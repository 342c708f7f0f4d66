"""Command-line entry point: every command reads JSON, writes one JSON report.

Exit codes: 0 success, 1 a certificate could not be established, 2 invalid input.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .energy import energy_report
from .errors import CertificationError, HypothesisViolated, InputError
from .gkz import (POINT_EVALUATION, FunctionalSpec, classify_functional, decompose,
                  default_grid, wco_extract, witness_search)
from .series import TaylorPoly
from .surjective import SurjectiveSeries, cover, hit_target, select_ladder
from .weights import (WeightSpec, check_mean_value, check_superharmonic, inf_estimate,
                      integral_over_disk, random_admissible_circles)

SCHEMA_VERSION = 1
PRECISIONS = ("standard", "extended")


def _clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return _clean([obj.real, obj.imag])
    return obj


def load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None


def _load(path, loader):
    obj = load_json(path)
    try:
        return loader(obj)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed content ({exc})") from None


def _load_table(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("basis_images"), list):
        raise InputError('operator table needs a "basis_images" list')
    out = []
    for i, item in enumerate(obj["basis_images"]):
        try:
            out.append(TaylorPoly.from_json(item))
        except InputError as exc:
            raise InputError(f"basis_images[{i}]: {exc}") from None
    return out


def _load_series(obj):
    # accept either a bare series or the report written by 'surject build'
    if isinstance(obj, dict) and isinstance(obj.get("result"), dict) and "series" in obj["result"]:
        obj = obj["result"]["series"]
    return SurjectiveSeries.from_json(obj)


def _complex_arg(values):
    return complex(float(values[0]), float(values[1]))


# commands ------------------------------------------------------------------------------

def cmd_energy(args):
    f = _load(args.function, TaylorPoly.from_json)
    w = _load(args.weight, WeightSpec.from_json) if args.weight else None
    rep = energy_report(f, w, args.method)
    failed = []
    if rep.discrepancy is not None and rep.discrepancy > 1e-8 * max(1.0, rep.dirichlet):
        failed.append("dirichlet_quadrature_agreement")
    for key, nodes in rep.nodes.items():
        if not nodes["converged"]:
            failed.append(f"{key}_quadrature_convergence")
    return rep.to_json(), failed


def cmd_weight_check(args):
    w = _load(args.weight, WeightSpec.from_json)
    sh = check_superharmonic(w, args.grid_step)
    rng = np.random.default_rng(args.seed)
    circles = random_admissible_circles(w, args.circles, rng)
    worst, n_fail = None, 0
    for c, rho in circles:
        mv = check_mean_value(w, c, rho)
        gap = mv.center_value - mv.circle_average
        if worst is None or gap < worst["center_minus_average"]:
            worst = {"center": c, "radius": rho, "center_minus_average": gap}
        n_fail += not mv.passed
    inf = inf_estimate(w)
    result = {"weight": w.to_json(), "superharmonic": sh.to_json(),
              "mean_value": {"n_circles": len(circles), "n_failed": n_fail, "worst": worst},
              "inf": inf.to_json(), "integral": integral_over_disk(w)}
    failed = []
    if not sh.passed:
        failed.append("superharmonic")
    if n_fail:
        failed.append("mean_value")
    return result, failed


def _series_from_args(args):
    if args.series:
        return _load(args.series, _load_series)
    if not args.weight:
        raise InputError("give --series FILE or --weight FILE")
    w = _load(args.weight, WeightSpec.from_json)
    return select_ladder(w, args.r, args.n_terms, precision=args.precision)


def cmd_surject_build(args):
    w = _load(args.weight, WeightSpec.from_json)
    b = _complex_arg(args.boundary_point) if args.boundary_point else None
    s = select_ladder(w, args.r, args.n_terms, boundary_point=b, precision=args.precision)
    return {"series": s.to_json()}, []


def cmd_surject_hit(args):
    s = _series_from_args(args)
    cert = hit_target(s, _complex_arg(args.target), args.samples)
    return {"certificate": cert.to_json(), "n_terms": s.n_terms}, []


def cmd_surject_cover(args):
    s = _series_from_args(args)
    rep = cover(s, args.R, args.grid, args.samples)
    failed = sorted({f["check"] for f in rep.failures})
    return rep.to_json(), failed


def cmd_decompose(args):
    f = _load(args.function, TaylorPoly.from_json)
    return decompose(f, seed=args.seed).to_json(), []


def cmd_functional_classify(args):
    L = _load(args.functional, FunctionalSpec.from_json)
    return classify_functional(L, args.max_degree, args.tol).to_json(), []


def cmd_functional_witness(args):
    L = _load(args.functional, FunctionalSpec.from_json)
    cls = classify_functional(L, args.max_degree, args.tol)
    res = witness_search(L, args.budget, args.seed)
    required = cls.verdict != POINT_EVALUATION
    failed = ["witness"] if required and not res.found else []
    return {"classification": cls.to_json(), "witness_required": required,
            "search": res.to_json()}, failed


def cmd_wco_extract(args):
    images = _load(args.table, _load_table)
    grid = default_grid(args.grid_radii, args.grid_angles)
    rep = wco_extract(images, grid)
    failed = [] if rep.residual < args.tol else ["residual"]
    return rep.to_json(), failed


# parser -----------------------------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", choices=PRECISIONS,
                   default=os.environ.get("DLAB_PRECISION", "standard"))
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit wall time and timestamp so reports are byte-reproducible")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="dlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", parents=[common], help="H^2, Dirichlet and weighted energies")
    p.add_argument("function")
    p.add_argument("--weight")
    p.add_argument("--method", choices=("coefficient", "quadrature", "both"), default="both")
    p.set_defaults(func=cmd_energy, name="energy")

    p = sub.add_parser("weight-check", parents=[common], help="superharmonicity and infimum checks")
    p.add_argument("weight")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--circles", type=int, default=1000)
    p.set_defaults(func=cmd_weight_check, name="weight-check")

    surj = sub.add_parser("surject", help="surjective series construction").add_subparsers(
        dest="action", required=True)
    series_src = argparse.ArgumentParser(add_help=False)
    series_src.add_argument("--series", help="series file from 'surject build'")
    series_src.add_argument("--weight", help="build the series from this weight first")
    series_src.add_argument("--r", type=float, default=0.5)
    series_src.add_argument("--n-terms", type=int, default=4)
    series_src.add_argument("--samples", type=int, default=1024)

    p = surj.add_parser("build", parents=[common])
    p.add_argument("--weight", required=True)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--n-terms", type=int, default=4)
    p.add_argument("--boundary-point", type=float, nargs=2, metavar=("RE", "IM"))
    p.set_defaults(func=cmd_surject_build, name="surject-build")

    p = surj.add_parser("hit", parents=[common, series_src])
    p.add_argument("--target", type=float, nargs=2, metavar=("RE", "IM"), required=True)
    p.set_defaults(func=cmd_surject_hit, name="surject-hit")

    p = surj.add_parser("cover", parents=[common, series_src])
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--grid", type=int, default=10)
    p.set_defaults(func=cmd_surject_cover, name="surject-cover")

    p = sub.add_parser("decompose", parents=[common], help="split f into two zero-free functions")
    p.add_argument("function")
    p.set_defaults(func=cmd_decompose, name="decompose")

    fn = sub.add_parser("functional", help="linear functionals").add_subparsers(
        dest="action", required=True)
    for action, func in (("classify", cmd_functional_classify), ("witness", cmd_functional_witness)):
        p = fn.add_parser(action, parents=[common])
        p.add_argument("functional")
        p.add_argument("--max-degree", type=int, default=8)
        p.add_argument("--tol", type=float, default=1e-10)
        if action == "witness":
            p.add_argument("--budget", type=int, default=64)
        p.set_defaults(func=func, name=f"functional-{action}")

    wco = sub.add_parser("wco", help="weighted composition operators").add_subparsers(
        dest="action", required=True)
    p = wco.add_parser("extract", parents=[common])
    p.add_argument("table")
    p.add_argument("--grid-radii", type=int, default=8)
    p.add_argument("--grid-angles", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_wco_extract, name="wco-extract")
    return parser


def _config(args):
    skip = {"func", "name", "command", "action", "output", "no_timestamp"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(args) -> tuple[int, dict]:
    start = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": args.name, "config": _config(args)}
    code = 0
    try:
        if args.precision not in PRECISIONS:
            raise InputError(f"precision must be one of {PRECISIONS}")
        result, failed = args.func(args)
        report["result"] = result
        report["failed_checks"] = failed
        report["status"] = "failed" if failed else "ok"
        code = 1 if failed else 0
    except InputError as exc:
        report.update(status="invalid", failed_checks=["input"], error=str(exc))
        code = 2
    except CertificationError as exc:
        report.update(status="failed", failed_checks=[exc.check],
                      error=f"{type(exc).__name__}: {exc}")
        if isinstance(exc, HypothesisViolated) and exc.report is not None:
            report["result"] = exc.report.to_json()
        code = 1
    if not args.no_timestamp:
        report["wall_time"] = time.perf_counter() - start
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return code, report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code, report = run(args)
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 2:
        print(f"dlab: error: {report.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
