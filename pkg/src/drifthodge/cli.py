"""Command-line front end.

Commands: riccati, classify-linear, poly-check, measure, invariance-test,
simulate.  All numeric inputs come from JSON files (small vectors may be
inline JSON); reports are machine-readable JSON with 17-significant-digit
numbers.  Exit status: 0 on success, 2 on precondition violations, 3 on
numerical failures.  DRIFT_HODGE_THREADS limits simulation workers.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
import warnings

import numpy as np

from . import __version__, jsonio, linmeasure, matcore, riccati, stochverify
from . import polyfield
from .errors import MeasureNotFinite, NumericalError, PreconditionError
from .stochverify import SimConfig

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_NUMERICAL = 3


def _add_common(parser):
    parser.add_argument("--out", metavar="FILE", default=None,
                        help="write the report to FILE instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp field (byte-stable reports)")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the default residual tolerance")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress informational messages on stderr")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="drift-hodge",
        description="Helmholtz-Hodge decompositions of diffusion drifts: "
                    "Riccati/Lyapunov solvers, Gaussian invariant measures, "
                    "symbolic checks, and stochastic validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("riccati", help="solve SG + G^T S = 2SAS with trace(G-AS)=0")
    p.add_argument("--drift", required=True, metavar="G.json")
    p.add_argument("--diffusion", required=True, metavar="A.json")
    p.add_argument("--method", default="auto",
                   choices=["auto", "2x2", "kron", "integral", "schur"])
    _add_common(p)

    p = sub.add_parser("classify-linear", help="classify the linear decomposition Sx + (G-AS)x")
    p.add_argument("--drift", required=True, metavar="G.json")
    p.add_argument("--diffusion", required=True, metavar="A.json")
    p.add_argument("--potential", default=None, metavar="S.json",
                   help="symmetric S; solved via the Riccati system when omitted")
    _add_common(p)

    p = sub.add_parser("poly-check", help="classify a polynomial drift against a potential")
    p.add_argument("--potential", required=True, metavar="phi.json")
    p.add_argument("--drift", required=True, metavar="p.json",
                   help="vector-field JSON, or a Matrix read as x -> Gx")
    p.add_argument("--diffusion", required=True, metavar="A.json")
    p.add_argument("--lyapunov", action="store_true",
                   help="additionally run the finiteness/conservativeness clauses "
                        "and emit the composite uniqueness verdict")
    _add_common(p)

    p = sub.add_parser("measure", help="query the Gaussian measure e^{<x,Sx>}dx")
    p.add_argument("--potential", required=True, metavar="S.json")
    p.add_argument("--at", default=None, metavar="x.json",
                   help="point (file or inline JSON list) for the log density")
    p.add_argument("--normalizer", action="store_true")
    p.add_argument("--covariance", action="store_true")
    _add_common(p)

    p = sub.add_parser("invariance-test", help="quadrature test of infinitesimal invariance")
    p.add_argument("--potential", required=True, metavar="S.json")
    p.add_argument("--drift", required=True)
    p.add_argument("--diffusion", required=True, metavar="A.json")
    p.add_argument("--max-degree", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("simulate", help="Euler-Maruyama stationary moments")
    p.add_argument("--drift", required=True)
    p.add_argument("--diffusion", required=True, metavar="A.json")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--paths", type=int, default=64)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", default=None, help="initial point (file or inline JSON list)")
    p.add_argument("--potential", default=None, metavar="S.json",
                   help="compare the empirical covariance against (-2S)^{-1}")
    p.add_argument("--dump", default=None, metavar="samples.csv",
                   help="write pooled post-burn-in states as CSV")
    _add_common(p)

    return parser


class _Inputs:
    """Collects raw input bytes for the report digest."""

    def __init__(self):
        self.hash = hashlib.sha256()

    def file(self, role, path):
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
        except OSError as exc:
            raise PreconditionError(f"{role}: cannot read {path}: {exc}") from exc
        self.hash.update(role.encode() + b"\0" + blob + b"\0")
        try:
            return json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"{role}: {path} is not valid JSON: {exc}") from exc

    def file_or_inline(self, role, text):
        if os.path.exists(text):
            return self.file(role, text)
        self.hash.update(role.encode() + b"\0" + text.encode() + b"\0")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"{role}: neither a file nor inline JSON: {text!r}") from exc

    def digest(self):
        return self.hash.hexdigest()


def _spectrum_json(spec):
    return [[float(v.real), float(v.imag)] for v in spec.values]


def _solution_json(sol, g):
    spec = matcore.eigenvalues(g)
    split = riccati.spectrum_split(spec)
    return {
        "S": jsonio.matrix_to_json(sol.s),
        "method": sol.method,
        "eq_residual": sol.eq_residual,
        "trace_residual": sol.trace_residual,
        "hurwitz": sol.hurwitz,
        "s_negative_definite": sol.s_negative_definite,
        "spectrum": _spectrum_json(spec),
        "sigma0_size": len(split.sigma0),
    }


def cmd_riccati(args, inputs):
    g = jsonio.matrix_from_json(inputs.file("drift", args.drift), "drift")
    a = jsonio.matrix_from_json(inputs.file("diffusion", args.diffusion), "diffusion")
    if g.shape != a.shape:
        raise PreconditionError("drift and diffusion dimensions disagree")
    sol = riccati.solve_riccati(g, a, method=args.method)
    return _solution_json(sol, g)


def cmd_classify_linear(args, inputs):
    g = jsonio.matrix_from_json(inputs.file("drift", args.drift), "drift")
    a = jsonio.matrix_from_json(inputs.file("diffusion", args.diffusion), "diffusion")
    if g.shape != a.shape:
        raise PreconditionError("drift and diffusion dimensions disagree")
    if args.potential is not None:
        s = jsonio.matrix_from_json(inputs.file("potential", args.potential), "potential")
        solved = False
    else:
        s = riccati.solve_riccati(g, a).s
        solved = True
    report = linmeasure.classify_linear(g, a, s, tol=args.tol)
    measure = linmeasure.gaussian_measure(s)
    return {
        "S": jsonio.matrix_to_json(s),
        "potential_solved": solved,
        "H": jsonio.matrix_to_json(report.h),
        "g_tilde": jsonio.matrix_to_json(report.g_tilde),
        "invariant": report.invariant,
        "sohhd": report.sohhd,
        "hurwitz": report.hurwitz,
        "measure_finite": report.measure_finite,
        "uniqueness": report.uniqueness,
        "note": report.note,
        "measure": {
            "finite": measure.finite,
            "log_normalizer": measure.log_normalizer,
            "normalizer": (None if measure.log_normalizer is None
                           else float(np.exp(measure.log_normalizer))),
        },
    }


def _lyapunov_clauses(phi, drift, a, report):
    clauses = {}
    notes = []
    try:
        leading = polyfield.leading_negativity(phi)
        clauses["finiteness"] = bool(leading.holds)
        leading_json = {"min_value": leading.min_value, "holds": leading.holds,
                        "witness": list(leading.witness)}
        if not leading.holds:
            notes.append("leading part of the potential is not strictly negative on the sphere")
    except PreconditionError as exc:
        leading = None
        leading_json = {"error": str(exc)}
        clauses["finiteness"] = False
        notes.append(f"finiteness clause not checkable: {exc}")

    clauses["invariance"] = bool(report.whhd)
    if not report.whhd:
        notes.append("invariance residual does not vanish")

    generator_json = None
    if report.whhd:
        lv = polyfield.lyapunov_generator_poly(phi, drift, a)
        generator_json = jsonio.polynomial_to_json(lv)

    b = polyfield.fluctuation_field(phi, drift, a)
    m = phi.degree
    criterion = (leading is not None and leading.holds and b.degree <= 2 * m - 2)
    growth = polyfield.growth_check(drift, np.eye(phi.dim))
    clauses["conservativeness"] = bool(criterion or growth == polyfield.GROWTH_CONCLUSIVE)
    if not clauses["conservativeness"]:
        notes.append("neither the degree/leading-part criterion nor the growth bound is conclusive")

    if all(clauses.values()):
        verdict = "unique finite invariant measure: all clauses pass"
    else:
        failing = ", ".join(k for k, v in clauses.items() if not v)
        verdict = f"not certified: {failing} failed"
    return {
        "leading_negativity": leading_json,
        "generator_potential": generator_json,
        "growth_check": growth,
        "clauses": clauses,
        "verdict": verdict,
        "notes": notes,
    }


def cmd_poly_check(args, inputs):
    phi = jsonio.polynomial_from_json(inputs.file("potential", args.potential), "potential")
    drift = jsonio.drift_from_json(inputs.file("drift", args.drift), "drift")
    a = jsonio.matrix_from_json(inputs.file("diffusion", args.diffusion), "diffusion")
    if not (phi.dim == drift.dim == a.shape[0] == a.shape[1]):
        raise PreconditionError("potential, drift and diffusion dimensions disagree")
    report = polyfield.classify_poly(phi, drift, a, tol=args.tol)
    result = {
        "whhd": report.whhd,
        "ohhd": report.ohhd,
        "sohhd": report.sohhd,
        "residual": jsonio.polynomial_to_json(report.residual),
        "div_b": jsonio.polynomial_to_json(report.div_b),
        "orth": jsonio.polynomial_to_json(report.orth),
        "notes": report.notes,
    }
    if args.lyapunov:
        result["lyapunov"] = _lyapunov_clauses(phi, drift, a, report)
    return result


def cmd_measure(args, inputs):
    s = jsonio.matrix_from_json(inputs.file("potential", args.potential), "potential")
    if args.at is None and not args.normalizer and not args.covariance:
        raise PreconditionError("measure: request at least one of --at, --normalizer, --covariance")
    result = {"finite": linmeasure.gaussian_measure(s).finite}
    if args.normalizer:
        log_z = linmeasure.log_normalizer(s)
        result["log_normalizer"] = log_z
        result["normalizer"] = float(np.exp(log_z))
    if args.covariance:
        result["covariance"] = jsonio.matrix_to_json(linmeasure.stationary_covariance(s))
    if args.at is not None:
        x = jsonio.vector_from_json(inputs.file_or_inline("at", args.at), "at")
        result["at"] = [float(v) for v in x]
        result["log_density"] = linmeasure.log_density(s, x)
    return result


def cmd_invariance_test(args, inputs):
    s = jsonio.matrix_from_json(inputs.file("potential", args.potential), "potential")
    drift = jsonio.drift_from_json(inputs.file("drift", args.drift), "drift")
    a = jsonio.matrix_from_json(inputs.file("diffusion", args.diffusion), "diffusion")
    res = stochverify.quadrature_invariance(s, a, drift, args.max_degree)
    return {
        "max_abs": res.max_abs,
        "per_function": res.per_function,
        "quadrature_order": res.quadrature_order,
    }


def cmd_simulate(args, inputs):
    drift = jsonio.drift_from_json(inputs.file("drift", args.drift), "drift")
    a = jsonio.matrix_from_json(inputs.file("diffusion", args.diffusion), "diffusion")
    x0 = None
    if args.x0 is not None:
        x0 = jsonio.vector_from_json(inputs.file_or_inline("x0", args.x0), "x0")
    cfg = SimConfig(dt=args.dt, n_steps=args.steps, n_paths=args.paths,
                    burn_in=args.burn_in, seed=args.seed, x0=x0)
    workers = int(os.environ.get("DRIFT_HODGE_THREADS", "1") or "1")
    sim = stochverify.euler_maruyama(a, drift, cfg, workers=workers, dump_path=args.dump)
    result = {
        "mean": [float(v) for v in sim.mean],
        "covariance": jsonio.matrix_to_json(sim.covariance),
        "n_effective": sim.n_effective,
        "diffusion_factor": sim.diffusion_factor,
        "dt": cfg.dt,
        "steps": cfg.n_steps,
        "paths": cfg.n_paths,
        "burn_in": cfg.burn_in,
        "seed": cfg.seed,
    }
    if args.potential is not None:
        s = jsonio.matrix_from_json(inputs.file("potential", args.potential), "potential")
        target = linmeasure.stationary_covariance(s)
        dev = matcore.fro(sim.covariance - target) / max(matcore.fro(target), 1e-300)
        result["stationary_covariance"] = jsonio.matrix_to_json(target)
        result["covariance_rel_deviation"] = dev
    if args.dump is not None:
        result["dump"] = args.dump
    return result


_HANDLERS = {
    "riccati": cmd_riccati,
    "classify-linear": cmd_classify_linear,
    "poly-check": cmd_poly_check,
    "measure": cmd_measure,
    "invariance-test": cmd_invariance_test,
    "simulate": cmd_simulate,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    inputs = _Inputs()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = _HANDLERS[args.command](args, inputs)
        report = {
            "command": args.command,
            "inputs_digest": inputs.digest(),
            "result": result,
            "warnings": [str(w.message) for w in caught],
            "version": __version__,
        }
        if not args.no_timestamp:
            report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = jsonio.dumps_17g(report)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            if not args.quiet:
                print(f"report written to {args.out}", file=sys.stderr)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except (PreconditionError, MeasureNotFinite) as exc:
        print(f"drift-hodge {args.command}: precondition violation: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericalError as exc:
        print(f"drift-hodge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
