"""``cvxorder`` command-line interface.

Exit codes: 0 order holds, 10 order fails, 11 barycenters differ,
2 usage or input error, 1 paper-repro expectation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import measure as M
from . import order1d, ordernd, projcert
from .lp import solve_feasibility, verify_outcome
from .measure import MeasureError, format_rational, parse_rational

EXIT_OK = 0
EXIT_EXPECTATION = 1
EXIT_USAGE = 2
EXIT_NOT_DOMINATED = 10
EXIT_MEAN_MISMATCH = 11

_EXIT_BY_VERDICT = {
    "Dominated": EXIT_OK,
    "AllDominated": EXIT_OK,
    "NotDominated": EXIT_NOT_DOMINATED,
    "FailsAt": EXIT_NOT_DOMINATED,
    "MeanMismatch": EXIT_MEAN_MISMATCH,
}


class UsageError(Exception):
    pass


def _q(x) -> str:
    return format_rational(x)


def _vec(p) -> list[str]:
    return [_q(c) for c in p]


def _emit(report: dict, out) -> None:
    out.write(json.dumps(report, indent=2) + "\n")


def _load(path):
    try:
        return M.load_measure(path)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except MeasureError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _witness_dict(f: ordernd.MaxAffineWitness) -> list[dict]:
    return [{"slope": _vec(s), "intercept": _q(c)} for s, c in f.pieces]


def _mismatch_dict(v) -> dict:
    a, b = v.mean_a, v.mean_b
    if isinstance(a, tuple):
        return {"barycenter_a": _vec(a), "barycenter_b": _vec(b)}
    return {"mean_a": _q(a), "mean_b": _q(b)}


def cmd_check1d(args, out) -> int:
    a, b = _load(args.file_a), _load(args.file_b)
    if a.dim != 1 or b.dim != 1:
        raise UsageError(f"check1d needs 1-dimensional measures, got dims {a.dim} and {b.dim}")
    v = order1d.check_convex_order_1d(a, b)
    report = {"command": "check1d", "inputs": [args.file_a, args.file_b], "verdict": v.name}
    if isinstance(v, order1d.NotDominated):
        report["threshold"] = _q(v.threshold)
        report["stop_loss_a"] = _q(order1d.stop_loss(a, v.threshold))
        report["stop_loss_b"] = _q(order1d.stop_loss(b, v.threshold))
    elif isinstance(v, order1d.MeanMismatch):
        report.update(_mismatch_dict(v))
    _emit(report, out)
    return _EXIT_BY_VERDICT[v.name]


def cmd_checknd(args, out) -> int:
    a, b = _load(args.file_a), _load(args.file_b)
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")
    v = ordernd.check_convex_order(a, b)
    report = {"command": "checknd", "inputs": [args.file_a, args.file_b], "verdict": v.name}
    if isinstance(v, ordernd.Dominated):
        report["coupling"] = [_vec(row) for row in v.coupling]
    elif isinstance(v, ordernd.NotDominated):
        report["gap"] = _q(v.gap)
        if args.witness:
            int_a, int_b, _ = ordernd.evaluate_witness(v.witness, a, b)
            report["witness"] = _witness_dict(v.witness)
            report["integral_a"] = _q(int_a)
            report["integral_b"] = _q(int_b)
    else:
        report.update(_mismatch_dict(v))
    _emit(report, out)
    return _EXIT_BY_VERDICT[v.name]


def cmd_certify2d(args, out) -> int:
    a, b = _load(args.file_a), _load(args.file_b)
    if a.dim != 2 or b.dim != 2:
        raise UsageError(
            f"certify2d needs 2-dimensional measures, got dims {a.dim} and {b.dim}; "
            "for other dimensions sample directions with "
            "cvxorder.projcert.spot_check_directions or project + check1d"
        )
    cert = projcert.certify_all_directions_2d(a, b)
    doc = cert.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")
    report = {
        "command": "certify2d",
        "inputs": [args.file_a, args.file_b],
        "verdict": cert.overall.name,
        "critical_directions": len(cert.critical_directions),
        "arcs": len(cert.arcs),
        "arcs_verified": sum(arc.verified for arc in cert.arcs),
    }
    if isinstance(cert.overall, projcert.FailsAt):
        report["direction"] = _vec(cert.overall.direction)
        report["threshold"] = _q(cert.overall.threshold)
    if args.out:
        report["certificate"] = args.out
    _emit(report, out)
    return _EXIT_BY_VERDICT[cert.overall.name]


def cmd_popoviciu(args, out) -> int:
    try:
        r, s, t = (parse_rational(x, name) for x, name in zip(args.values, "rst"))
    except MeasureError as exc:
        raise UsageError(str(exc)) from None
    x, y = order1d.popoviciu_majorization_vectors(r, s, t)
    v = order1d.majorizes(x, y)
    report = {
        "command": "popoviciu",
        "inputs": [_q(r), _q(s), _q(t)],
        "midpoints": _vec(x),
        "centroid_and_points": _vec(y),
        "partial_sums_midpoints": _vec(v.partial_sums_x),
        "partial_sums_centroid_and_points": _vec(v.partial_sums_y),
        "holds": v.holds,
    }
    if not v.holds:
        report["failing_k"] = v.failing_k
    _emit(report, out)
    return EXIT_OK if v.holds else EXIT_NOT_DOMINATED


PAPER_EXPECTED = {
    "certify2d": "AllDominated",
    "checknd": "NotDominated",
    "integral_mu": Fraction(2, 3),
    "integral_nu": Fraction(1, 2),
    "gap": Fraction(1, 6),
    "lhs": Fraction(3),
    "rhs": Fraction(4),
    "holds": False,
}


def paper_repro(expected: dict | None = None) -> tuple[dict, bool]:
    """Run the triangle counterexample end to end; returns (report, all_ok)."""
    expected = dict(PAPER_EXPECTED, **(expected or {}))
    mu, nu = M.paper_instance()
    cert = projcert.certify_all_directions_2d(mu, nu)
    verdict = ordernd.check_convex_order(mu, nu)
    f = ordernd.paper_witness()
    int_mu, int_nu, gap = ordernd.evaluate_witness(f, mu, nu)
    lhs, rhs, holds = ordernd.evaluate_inequality_1(*M.PAPER_POINTS, f)

    observed = {
        "certify2d": cert.overall.name,
        "checknd": verdict.name,
        "integral_mu": int_mu,
        "integral_nu": int_nu,
        "gap": gap,
        "lhs": lhs,
        "rhs": rhs,
        "holds": holds,
    }

    def show(v):
        return _q(v) if isinstance(v, (Fraction, int)) and not isinstance(v, bool) else v

    checks = {
        k: {"expected": show(expected[k]), "observed": show(observed[k]),
            "ok": expected[k] == observed[k]}
        for k in observed
    }
    lp_witness = {}
    if isinstance(verdict, ordernd.NotDominated):
        sys_ = ordernd.build_martingale_system(mu, nu)
        lp_witness = {"pieces": _witness_dict(verdict.witness), "gap": _q(verdict.gap)}
        checks["lp_witness_gap_positive"] = {"ok": verdict.gap > 0}
        out = solve_feasibility(sys_.lp)
        checks["farkas_certificate_valid"] = {"ok": verify_outcome(sys_.lp, out)}
    report = {
        "command": "paper-repro",
        "points": {"x": _vec(M.PAPER_POINTS[0]), "y": _vec(M.PAPER_POINTS[1]),
                   "z": _vec(M.PAPER_POINTS[2])},
        "mu": M.measure_to_dict(mu),
        "nu": M.measure_to_dict(nu),
        "barycenter": _vec(M.barycenter(mu)),
        "projections": {
            "critical_directions": len(cert.critical_directions),
            "arcs": len(cert.arcs),
            "arcs_verified": sum(arc.verified for arc in cert.arcs),
            "verdict": cert.overall.name,
        },
        "lp_witness": lp_witness,
        "paper_witness": _witness_dict(f),
        "checks": checks,
    }
    ok = all(c["ok"] for c in checks.values())
    report["result"] = "ok" if ok else "expectation failure"
    return report, ok


def cmd_paper_repro(args, out) -> int:
    expected = {}
    if args.expect_gap is not None:
        try:
            expected["gap"] = parse_rational(args.expect_gap, "--expect-gap")
        except MeasureError as exc:
            raise UsageError(str(exc)) from None
    report, ok = paper_repro(expected)
    _emit(report, out)
    return EXIT_OK if ok else EXIT_EXPECTATION


def cmd_project(args, out) -> int:
    m = _load(args.file)
    try:
        v = tuple(parse_rational(c.strip(), f"direction[{k}]")
                  for k, c in enumerate(args.direction.split(",")))
    except MeasureError as exc:
        raise UsageError(str(exc)) from None
    if len(v) != m.dim:
        raise UsageError(f"direction has {len(v)} coordinates, measure has dimension {m.dim}")
    text = M.dumps_measure(M.project(m, v))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvxorder",
        description="Exact convex-order checks for finitely supported measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check1d", help="convex order of two 1-D measures")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_check1d)

    p = sub.add_parser("checknd", help="convex order in R^d via a martingale coupling LP")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--witness", action="store_true", help="print the separating convex function")
    p.set_defaults(func=cmd_checknd)

    p = sub.add_parser("certify2d", help="certify order of all 1-D projections in R^2")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_certify2d)

    p = sub.add_parser("popoviciu", help="three-point majorization check for r, s, t")
    p.add_argument("values", nargs=3, metavar="R")
    p.set_defaults(func=cmd_popoviciu)

    p = sub.add_parser("paper-repro", help="reproduce the triangle counterexample")
    p.add_argument("--expect-gap", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_paper_repro)

    p = sub.add_parser("project", help="project a measure onto a direction")
    p.add_argument("file")
    p.add_argument("direction", help="comma-separated rationals, e.g. 1,-1/2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)
    return parser


def _protect_negatives(argv: list[str]) -> list[str]:
    # let "popoviciu 0 -1/2 2" and "project f.json -1,0" through argparse
    if argv and argv[0] in ("popoviciu", "project") and "--" not in argv:
        opts = [a for a in argv[1:] if a.startswith("--")]
        rest = [a for a in argv[1:] if not a.startswith("--")]
        if argv[0] == "project":
            # keep "--out PATH" together
            opts, rest, it = [], [], iter(argv[1:])
            for a in it:
                if a == "--out":
                    opts += [a, next(it, "")]
                elif a.startswith("--"):
                    opts.append(a)
                else:
                    rest.append(a)
        return [argv[0], *opts, "--", *rest]
    return argv


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_negatives(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"cvxorder {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
