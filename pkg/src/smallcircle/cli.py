"""Command line interface.

Subcommands: ``synth``, ``verify``, ``search``, ``scan`` and ``export``.  Exit codes:
0 success, 1 open loop / failed verification, 2 bad input or selection,
3 matrix fails unitarity or anti-Hermiticity.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import gates
from .errors import InvalidDirection, NotAntiHermitian, VerificationError, ZeroWinding
from .holonomy import holonomy_exact, holonomy_path_ordered
from .interchange import (
    CONVENTION,
    DocumentError,
    doc_to_matrix,
    dumps,
    load_document,
    matrix_to_doc,
)
from .linalg import frobenius_norm, unitarity_defect
from .manifold import ControlMatrix, penalty, winding_profile
from .search import multistart, random_starts, ray_zeros, scan_penalty_ray
from .synthesis import analyze_gate, build_solution, enumerate_families, optimal_member

EXIT_OK = 0
EXIT_OPEN = 1
EXIT_INPUT = 2
EXIT_INVALID = 3
CLOSURE_TOL = 1e-9


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resolve_gate(spec: str) -> tuple[str, np.ndarray, gates.GateFixture | None]:
    """Catalog name first, then a matrix document on disk."""
    try:
        fx = gates.get_fixture(spec)
        return fx.name, fx.U, fx
    except KeyError:
        pass
    try:
        u = doc_to_matrix(load_document(spec))
    except DocumentError as exc:
        raise CliError(f"unknown gate {spec!r} and not a readable matrix document: {exc}",
                       EXIT_INPUT)
    if u.shape[0] != u.shape[1]:
        raise CliError(f"gate matrix must be square, got {u.shape}", EXIT_INPUT)
    defect = unitarity_defect(u)
    if defect > 1e-10:
        raise CliError(f"gate is not unitary: ||U^dagger U - I||_F = {defect:.3e}", EXIT_INVALID)
    return Path(spec).stem, u, None


def _parse_coeffs(text: str | None) -> tuple[complex, ...] | None:
    if text is None:
        return None
    try:
        return tuple(complex(t.strip().replace(" ", "")) for t in text.split(","))
    except ValueError:
        raise CliError(f"cannot parse coefficients {text!r}; use e.g. 0.6,0.8j", EXIT_INPUT)


def _g6(x: float) -> str:
    return f"{x:.6g}"


# synth ---------------------------------------------------------------------

def _synth_report(name: str, u: np.ndarray, n_max: int) -> dict:
    target = analyze_gate(u)
    try:
        families = enumerate_families(target, n_max)
    except VerificationError as exc:
        raise CliError(str(exc), EXIT_OPEN)
    best_fam, best_n = optimal_member(families)
    fams = []
    for fam in families:
        members = []
        for n in sorted(fam.members, key=lambda m: (abs(m), m < 0)):
            chk = fam.checks[n]
            members.append({
                "n": n,
                "norm": fam.norm(n),
                "norm_over_pi": fam.norm(n) / math.pi,
                "optimal": fam is best_fam and n == best_n,
                "verification": {
                    "penalty": chk.penalty,
                    "holonomy_error": chk.holonomy_error,
                    "winding_zero_count": chk.winding_zero_count,
                },
            })
        fams.append({
            "mu": fam.mu,
            "omega": fam.omega,
            "omega_over_pi": fam.omega / math.pi,
            "multiplicity": target.cluster(fam.mu).multiplicity,
            "direction": [[float(z.real), float(z.imag)] for z in fam.direction],
            "members": members,
        })
    best = best_fam.members[best_n]
    return {
        "gate": matrix_to_doc(u, name=name, convention=CONVENTION),
        "families": fams,
        "optimal": {
            "mu": best_fam.mu,
            "n": best_n,
            "omega": best_fam.omega,
            "norm": best_fam.norm(best_n),
            "norm_over_pi": best_fam.norm(best_n) / math.pi,
            "control": matrix_to_doc(best.matrix, gate=name, family=best_fam.mu, n=best_n,
                                     theta=0.0, k=target.k),
        },
    }


def _synth_table(report: dict) -> str:
    out = io.StringIO()
    g = report["gate"]
    out.write(f"gate {g['metadata']['name']}  (k={g['rows']}, N={g['rows'] + 1}); "
              f"eigenvalues written exp(-i omega)\n")
    out.write(f"{'family':>6} {'omega/pi':>9} {'mult':>4} {'n':>4} {'||W||/pi':>10} "
              f"{'penalty':>10} {'hol.err':>10} {'returns':>7}\n")
    for fam in report["families"]:
        for m in fam["members"]:
            v = m["verification"]
            mark = " *" if m["optimal"] else ""
            out.write(f"{fam['mu']:>6} {_g6(fam['omega_over_pi']):>9} {fam['multiplicity']:>4} "
                      f"{m['n']:>4} {_g6(m['norm_over_pi']):>10} {v['penalty']:>10.2e} "
                      f"{v['holonomy_error']:>10.2e} {str(v['winding_zero_count']):>7}{mark}\n")
    o = report["optimal"]
    out.write(f"optimal: family {o['mu']}, n={o['n']}, ||W||/pi = {_g6(o['norm_over_pi'])}\n")
    return out.getvalue()


def cmd_synth(args) -> int:
    name, u, _ = _resolve_gate(args.gate)
    if args.n_max < 1:
        raise CliError("--n-max must be >= 1", EXIT_INPUT)
    report = _synth_report(name, u, args.n_max)
    sys.stdout.write(dumps(report) if args.format == "json" else _synth_table(report))
    return EXIT_OK


# verify --------------------------------------------------------------------

def cmd_verify(args) -> int:
    try:
        doc = load_document(args.x_file)
        x = doc_to_matrix(doc)
    except DocumentError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    n = x.shape[0]
    if x.shape[1] != n or n < 2:
        raise CliError(f"X must be square with N >= 2, got {x.shape}", EXIT_INPUT)
    k = args.k
    if k is None:
        k = int(doc.get("metadata", {}).get("k", n - 1))
    if not 1 <= k < n:
        raise CliError(f"need 1 <= k < N, got k={k}, N={n}", EXIT_INPUT)
    try:
        ctrl = ControlMatrix.from_matrix(x, k)
    except NotAntiHermitian as exc:
        raise CliError(str(exc), EXIT_INVALID)
    if args.steps < 10:
        raise CliError("--steps must be >= 10", EXIT_INPUT)

    p = penalty(ctrl)
    profile = winding_profile(ctrl)
    report = {
        "N": n,
        "k": k,
        "penalty": p,
        "closed": p <= CLOSURE_TOL,
        "degenerate": ctrl.is_degenerate,
        "winding_zero_count": profile.zero_count,
        "loop_speed": frobenius_norm(ctrl.w),
        "control": matrix_to_doc(x),
    }
    if p <= CLOSURE_TOL:
        exact = holonomy_exact(ctrl)
        ordered = holonomy_path_ordered(ctrl, args.steps)
        report.update({
            "holonomy_exact": matrix_to_doc(exact.U),
            "holonomy_path_ordered": matrix_to_doc(ordered.U),
            "steps": args.steps,
            "holonomy_distance": frobenius_norm(exact.U - ordered.U),
            "path_ordered_residual": ordered.residual,
        })
    if args.format == "json":
        sys.stdout.write(dumps(report))
    else:
        out = sys.stdout
        out.write(f"N={n} k={k}\n")
        out.write(f"penalty                {p:.3e}\n")
        out.write(f"||W||                  {report['loop_speed']:.6g}\n")
        if ctrl.is_degenerate:
            out.write("winding                degenerate (W = 0, constant loop)\n")
        else:
            out.write(f"interior returns       {profile.zero_count}\n")
        if p <= CLOSURE_TOL:
            out.write("exact holonomy:\n")
            out.write(np.array2string(exact.U, precision=6, suppress_small=True) + "\n")
            out.write(f"path-ordered holonomy ({args.steps} steps):\n")
            out.write(np.array2string(ordered.U, precision=6, suppress_small=True) + "\n")
            out.write(f"distance               {report['holonomy_distance']:.3e}\n")
    if ctrl.is_degenerate:
        _err("warning: W = 0 gives a constant loop (no control)")
    if p > CLOSURE_TOL:
        _err(f"open loop: penalty {p:.3e} > {CLOSURE_TOL:.0e}")
        return EXIT_OPEN
    return EXIT_OK


# search --------------------------------------------------------------------

def cmd_search(args) -> int:
    name, u, _ = _resolve_gate(args.gate)
    if args.starts < 1:
        raise CliError("--starts must be >= 1", EXIT_INPUT)
    if not 0 < args.r_min <= args.r_max:
        raise CliError("need 0 < --r-min <= --r-max", EXIT_INPUT)
    target = analyze_gate(u)
    rng = np.random.default_rng(args.seed)
    starts = random_starts(target.k, args.starts, args.r_min, args.r_max, rng)
    results = multistart(target, starts, workers=args.workers)
    rows = []
    for w0, res in zip(starts, results):
        rows.append({
            "start_norm": frobenius_norm(w0),
            "converged": res.converged,
            "penalty": res.value,
            "norm": res.norm,
            "evaluations": res.evaluations,
            "family": None if res.classified is None else res.classified[0],
            "n": None if res.classified is None else res.classified[1],
            "norm_error": res.norm_error,
            "direction_residual": res.direction_residual,
            "scalar_closure": res.scalar_closure,
            "w": matrix_to_doc(res.w[:, None]),
        })
    if args.format == "json":
        sys.stdout.write(dumps({"gate": name, "seed": args.seed, "results": rows}))
    else:
        out = sys.stdout
        out.write(f"{'start':>8} {'||W||':>10} {'penalty':>10} {'evals':>6}  result\n")
        for r in rows:
            if not r["converged"]:
                label = "not converged"
            elif r["family"] is None:
                label = "unclassified" + (" (expm(X) scalar)" if r["scalar_closure"] else "")
            else:
                label = f"family {r['family']}, n={r['n']} (norm err {r['norm_error']:.1e})"
            out.write(f"{r['start_norm']:>8.4f} {r['norm']:>10.6f} {r['penalty']:>10.2e} "
                      f"{r['evaluations']:>6}  {label}\n")
    return EXIT_OK


# scan ----------------------------------------------------------------------

def cmd_scan(args) -> int:
    name, u, _ = _resolve_gate(args.gate)
    target = analyze_gate(u)
    if not 1 <= args.cluster <= len(target.clusters):
        raise CliError(f"cluster must be in 1..{len(target.clusters)}, got {args.cluster}",
                       EXIT_INPUT)
    if args.samples < 2:
        raise CliError("--samples must be >= 2", EXIT_INPUT)
    if not args.r_max > 0:
        raise CliError("--r-max must be positive", EXIT_INPUT)
    d = target.cluster(args.cluster).canonical_direction
    radii, values = scan_penalty_ray(target, d, args.r_max, args.samples)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "penalty"])
    for r, v in zip(radii, values):
        writer.writerow([repr(float(r)), repr(float(v))])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
        for z in ray_zeros(target, d, args.r_max, args.samples):
            print(f"zero at r = {z:.10g}")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# export --------------------------------------------------------------------

def _export_matrix(name: str, u: np.ndarray, fixture, family: int, n: int, theta: float,
                   coeffs) -> tuple[ControlMatrix, dict]:
    meta = {"gate": name, "family": family, "n": n, "theta": theta}
    if fixture is not None and 1 <= family <= len(fixture.solutions):
        sol = fixture.solution(family)
        if coeffs is not None and len(coeffs) != sol.basis.shape[1]:
            raise CliError(f"family {family} takes {sol.basis.shape[1]} coefficient(s)",
                           EXIT_INPUT)
        x = gates.synthesis_counterpart(fixture, family, n, theta, coeffs)
        used = sol.default_coeffs if coeffs is None else coeffs
        meta["minus_one_phase"] = fixture.minus_one_phase
    else:
        target = analyze_gate(u)
        if not 1 <= family <= len(target.clusters):
            raise CliError(f"family must be in 1..{len(target.clusters)}", EXIT_INPUT)
        basis = target.cluster(family).basis
        if coeffs is None:
            direction, used = None, (1,) + (0,) * (basis.shape[1] - 1)
        else:
            if len(coeffs) != basis.shape[1]:
                raise CliError(f"family {family} takes {basis.shape[1]} coefficient(s)",
                               EXIT_INPUT)
            direction, used = basis @ np.asarray(coeffs, dtype=complex), coeffs
        x = build_solution(target, family, direction, n, theta)
    meta["coeffs"] = [[float(complex(c).real), float(complex(c).imag)] for c in used]
    meta["k"] = x.k
    meta["convention"] = CONVENTION
    return x, meta


def cmd_export(args) -> int:
    name, u, fixture = _resolve_gate(args.gate)
    coeffs = _parse_coeffs(args.coeffs)
    try:
        x, meta = _export_matrix(name, u, fixture, args.family, args.n, args.theta, coeffs)
    except (InvalidDirection, ZeroWinding, IndexError) as exc:
        raise CliError(str(exc), EXIT_INPUT)
    text = dumps(matrix_to_doc(x.matrix, **meta))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smallcircle",
        description="Small-circle holonomic loops implementing unitary gates.")
    sub = parser.add_subparsers(dest="command", required=True)
    names = ", ".join(gates.gate_names())

    p = sub.add_parser("synth", help="enumerate solution families and pick the shortest loop")
    p.add_argument("--gate", required=True, help=f"catalog name ({names}) or matrix JSON file")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check closure and holonomy of a control matrix")
    p.add_argument("x_file", help="matrix JSON file holding X")
    p.add_argument("--k", type=int, default=None,
                   help="size of the degenerate subspace (default: metadata k, else N-1)")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="multi-start numerical search for penalty zeros")
    p.add_argument("--gate", required=True)
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-min", type=float, default=0.5, help="smallest start norm")
    p.add_argument("--r-max", type=float, default=7.0, help="largest start norm")
    p.add_argument("--workers", type=int, default=1, help="parallel searches")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("scan", help="penalty along W = r * u for one eigencluster")
    p.add_argument("--gate", required=True)
    p.add_argument("--cluster", type=int, required=True, help="1-based family index")
    p.add_argument("--r-max", type=float, default=7.0)
    p.add_argument("--samples", type=int, default=1401)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("export", help="write one family member as a matrix JSON file")
    p.add_argument("--gate", required=True)
    p.add_argument("--family", type=int, required=True, help="1-based family index")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--coeffs", default=None,
                   help="comma-separated complex coefficients of the direction in the "
                        "family's eigenspace basis, e.g. 0.6,0.8j")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _err(f"error: {exc}")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
