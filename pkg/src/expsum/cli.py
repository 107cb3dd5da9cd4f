"""Command-line front end.

Exit codes: 0 success, 1 usage / I-O / parse error, 2 sequence not
admissible, 3 no counterexample at the requested theta.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import core, extremal, formats, kuzmin_geometry, landau_identity, sharpness_search
from .errors import ExpsumError, InvalidParameterError, NoCounterexampleError, NotAdmissibleError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_ADMISSIBLE = 2
EXIT_NO_COUNTEREXAMPLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def parse_theta(text: str) -> tuple[float, Optional[Fraction]]:
    """'P/Q' gives an exact fraction as well as its float; decimals give a float."""
    text = text.strip()
    if "/" in text:
        try:
            p, q = (int(t) for t in text.split("/"))
            f = Fraction(p, q)
        except (ValueError, ZeroDivisionError):
            raise InvalidParameterError(f"bad fraction {text!r}") from None
        return core.validate_theta(float(f)), f
    try:
        value = float(text)
    except ValueError:
        raise InvalidParameterError(f"bad theta {text!r}") from None
    return core.validate_theta(value), None


def _load_phases(args) -> core.PhaseSequence:
    if getattr(args, "inline", None) is not None:
        return formats.parse_inline(args.inline)
    if args.phases == "-":
        return formats.parse_phase_text(sys.stdin.read())
    return formats.read_phases(args.phases)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj, out: Optional[str] = None) -> None:
    _emit(formats.dumps(obj) + "\n", out)


def _add_input(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--phases", metavar="FILE", help="phase file (JSON array or one per line; '-' = stdin)")
    g.add_argument("--inline", metavar="LIST", help='comma-separated phases, e.g. "0,0.2,0.5"')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expsum", description="Kuzmin-Landau exponential sum toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="bound ladder at theta, and a full report when phases are given")
    p.add_argument("--theta", required=True)
    _add_input(p, required=False)
    p.add_argument("--out")

    p = sub.add_parser("check", help="admissibility report; exit 2 if not admissible")
    p.add_argument("--theta", required=True)
    _add_input(p)
    p.add_argument("--out")

    p = sub.add_parser("extremal", help="bound-attaining sequence for theta = P/Q odd/odd or 1/2")
    p.add_argument("--theta", required=True)
    p.add_argument("--emit-phases", metavar="FILE")
    p.add_argument("--out")

    p = sub.add_parser("near-extremal", help="sequence within epsilon of the bound")
    p.add_argument("--theta", required=True)
    p.add_argument("--epsilon", required=True, type=float)
    p.add_argument("--emit-phases", metavar="FILE")
    p.add_argument("--out")

    p = sub.add_parser("decompose", help="Landau or Kuzmin decomposition with residuals")
    p.add_argument("--method", choices=("landau", "kuzmin"), required=True)
    _add_input(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--csv", metavar="FILE", help="also write the per-term CSV here")
    p.add_argument("--out")

    p = sub.add_parser("refute", help="counterexample to |S| <= 1/(pi theta) + 1")
    p.add_argument("--theta", required=True)
    p.add_argument("--at-theta-only", action="store_true",
                   help="do not search smaller theta'; exit 3 if theta itself gives no counterexample")
    p.add_argument("--out")

    p = sub.add_parser("search", help="numerical maximization of |S| for fixed n and theta")
    p.add_argument("--theta", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=None, help="default: $EXPSUM_SEED or 0")
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--step-init", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-construction-seed", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("plot", help="SVG of the partial-sum chain and its circumcenters")
    _add_input(p)
    p.add_argument("--out", required=True)
    p.add_argument("--circles", action="store_true")

    p = sub.add_parser("best-constant", help="CSV of theta_j * cot(pi theta_j / 2), theta_j = 1/(2j+1)")
    p.add_argument("--jmax", required=True, type=int)
    p.add_argument("--out")
    return parser


def _cmd_bound(args) -> int:
    theta, _ = parse_theta(args.theta)
    if args.phases is None and args.inline is None:
        _json(core.bound_ladder(theta).to_dict(), args.out)
        return EXIT_OK
    a = _load_phases(args)
    try:
        report = core.bound_report(a, theta)
    except NotAdmissibleError as exc:
        _json(exc.report.to_dict(), args.out)
        print(f"expsum: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    _json(report.to_dict(), args.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    theta, _ = parse_theta(args.theta)
    report = core.check_admissible(_load_phases(args), theta)
    _json(report.to_dict(), args.out)
    return EXIT_OK if report.admissible else EXIT_NOT_ADMISSIBLE


def _cmd_extremal(args) -> int:
    theta, frac = parse_theta(args.theta)
    if frac is None:
        raise InvalidParameterError("extremal needs theta as a fraction P/Q")
    if frac == Fraction(1, 2):
        w = extremal.extremal_half()
    else:
        w = extremal.extremal_sequence(extremal.OddFraction.from_fraction(frac))
    if args.emit_phases:
        formats.write_phases(args.emit_phases, w.sequence)
    _json(w.to_dict(), args.out)
    return EXIT_OK


def _cmd_near_extremal(args) -> int:
    theta, _ = parse_theta(args.theta)
    w = extremal.near_extremal(theta, args.epsilon)
    if args.emit_phases:
        formats.write_phases(args.emit_phases, w.sequence)
    _json(w.to_dict(), args.out)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    a = _load_phases(args)
    if args.method == "landau":
        dec = landau_identity.landau_decompose(a)
        table = landau_identity.decomposition_csv(dec)
        summary = {
            "method": "landau",
            **dec.to_dict(),
            "shift_identity_residual": landau_identity.verify_shift_identity(a),
        }
        try:
            summary["refined_bound"] = landau_identity.refined_bound(a)
        except ExpsumError:
            summary["refined_bound"] = None
    else:
        g = kuzmin_geometry.build_chain(a)
        table = kuzmin_geometry.chain_csv(g)
        s = g.partial_sums[-1]
        summary = {
            "method": "kuzmin",
            "n": g.n,
            "sum_re": s.real,
            "sum_im": s.imag,
            "abs_sum": abs(s),
            "residuals": dict(g.residuals),
        }
    if args.csv:
        Path(args.csv).write_text(table)
    if args.format == "csv":
        _emit(table, args.out)
    else:
        _json(summary, args.out)
    return EXIT_OK


def _cmd_refute(args) -> int:
    theta, frac = parse_theta(args.theta)
    try:
        r = extremal.refute_false_bound(frac if frac is not None else theta,
                                        search_below=not args.at_theta_only)
    except NoCounterexampleError as exc:
        _json(exc.diagnostics, args.out)
        print(f"expsum: {exc}", file=sys.stderr)
        return EXIT_NO_COUNTEREXAMPLE
    ok, margin = extremal.verify_refutation(r)
    d = r.to_dict()
    d["reverified_margin"] = margin
    d["verified"] = ok
    _json(d, args.out)
    return EXIT_OK


def _cmd_search(args) -> int:
    theta, _ = parse_theta(args.theta)
    seed = args.seed if args.seed is not None else sharpness_search.default_seed()
    cfg = sharpness_search.SearchConfig(
        n=args.n,
        theta=theta,
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_init=args.step_init,
        tol=args.tol,
        seed=seed,
        seed_construction=not args.no_construction_seed,
        workers=args.workers,
    )
    _json(sharpness_search.maximize(cfg).to_dict(), args.out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    g = kuzmin_geometry.build_chain(_load_phases(args))
    Path(args.out).write_text(kuzmin_geometry.chain_svg(g, circles=args.circles))
    return EXIT_OK


def _cmd_best_constant(args) -> int:
    rows = extremal.best_constant_scan(args.jmax)
    lines = ["j,theta,theta_cot"]
    lines += [f"{r.j},{formats.fmt(r.theta)},{formats.fmt(r.scaled)}" for r in rows]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "bound": _cmd_bound,
    "check": _cmd_check,
    "extremal": _cmd_extremal,
    "near-extremal": _cmd_near_extremal,
    "decompose": _cmd_decompose,
    "refute": _cmd_refute,
    "search": _cmd_search,
    "plot": _cmd_plot,
    "best-constant": _cmd_best_constant,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"expsum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAdmissibleError as exc:
        print(f"expsum: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (ExpsumError, OSError, ArithmeticError) as exc:
        print(f"expsum: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
