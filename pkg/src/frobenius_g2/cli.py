"""Command-line front end.

    frobenius-g2 verify   [--n N ...] [--seed S] [--trials T] [--precision-bits B] [--tol X]
                          [--output report.json] [--json] [--threads W]
    frobenius-g2 eval     (--input point.json | --n N --seed S) [--output out.json] [--json]
    frobenius-g2 residues (--input point.json | --n N --seed S) [--tol X] [--json]

With no arguments the verification sweep runs with its defaults.  Exit codes:
0 success, 1 a mathematical failure or a caustic point, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys

import mpmath

from . import g2_function as g2
from . import residue_engine as re_
from . import verify_suite as vs
from .frobenius_an import CausticError, Jet2, ParamPoint, build_point, random_jet, sample_admissible
from .mp_series import DEFAULT_PRECISION, from_decimal_pair, precision, to_decimal_pair
from .polynomial import NonConvergence

log = logging.getLogger("frobenius_g2")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _precision_arg(text: str) -> int:
    bits = int(text)
    if bits < vs.MIN_SUITE_PRECISION:
        raise argparse.ArgumentTypeError(f"must be at least {vs.MIN_SUITE_PRECISION}, got {bits}")
    return bits


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frobenius-g2",
        description="Check the vanishing of the genus-two G-function of the A_n Frobenius manifold.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command")

    def common(p, n_many=False):
        if n_many:
            p.add_argument("--n", type=_positive, nargs="+", help="restrict to these n")
        else:
            p.add_argument("--n", type=_positive, help="rank of the sampled point")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--precision-bits", type=_precision_arg, default=DEFAULT_PRECISION)
        p.add_argument("--output", help="write the JSON result to this file")
        p.add_argument("--json", action="store_true", help="print JSON to stdout")

    pv = sub.add_parser("verify", help="run the check registry over random samples")
    common(pv, n_many=True)
    pv.add_argument("--trials", type=_positive, help="override trials per n")
    pv.add_argument("--tol", type=_tol, help="override every check's tolerance")
    pv.add_argument("--threads", type=_positive, default=1, help="worker processes")
    pv.add_argument("--only", nargs="+", metavar="PREFIX", help="keep checks whose id starts so")

    pe = sub.add_parser("eval", help="evaluate all G2 data at one point")
    common(pe)
    pe.add_argument("--input", help='JSON with "n", "t", and optionally "ux", "uxx"')

    pr = sub.add_parser("residues", help="tabulate closed residue formulas against the oracle")
    common(pr)
    pr.add_argument("--input", help='JSON with "n" and "t"')
    pr.add_argument("--tol", type=_tol, default=1e-40, help="fail above this relative difference")
    return parser


def _emit(args, payload: dict, text: str) -> None:
    doc = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(doc + "\n")
    if args.json:
        print(doc)
    else:
        print(text)


def _point_from_args(args) -> tuple:
    """(ParamPoint, Jet2 or None) from --input, or a sampled point from --n/--seed."""
    if args.input:
        try:
            with open(args.input) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {args.input}: {exc}")
        try:
            point = ParamPoint.from_json(data)
            jet = Jet2.from_json(data) if "ux" in data else None
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"bad point file: {exc}")
        if jet is not None and len(jet.ux) != point.n:
            raise UsageError("jet length does not match n")
        return point, jet
    if args.n is None:
        raise UsageError("give --input or --n")
    point = sample_admissible(args.n, args.seed, 1)[0]
    return point, None


def cmd_verify(args) -> int:
    registry = vs.filter_registry(vs.default_registry(), n_values=args.n, trials=args.trials,
                                  tolerance=args.tol, select=args.only)
    if not registry:
        raise UsageError("no checks selected")

    def progress(n, trial):
        log.info("n=%d trial=%d done", n, trial)

    report = vs.run_suite(registry, seed=args.seed, precision_bits=args.precision_bits,
                          threads=args.threads, progress=progress)
    summ = report.summary
    lines = []
    for spec in registry:
        rows = [e for e in report.entries if e["check_id"] == spec.check_id]
        if not rows:
            continue
        worst = max(rows, key=lambda e: mpmath.mpf(e["rel_residual"]))
        bad = sum(1 for e in rows if not e["passed"])
        tag = "ok  " if bad == 0 else ("FAIL" if spec.gating else "warn")
        lines.append(f"{tag} {spec.check_id:34s} worst {mpmath.nstr(mpmath.mpf(worst['rel_residual']), 3):>10s}"
                     f"  tol {worst['tolerance']}  ({len(rows)} runs)")
    lines.append(f"{summ['passed']}/{summ['total']} passed, {summ['gating_failed']} gating failures, "
                 f"{summ['wall_time_seconds']} s")
    _emit(args, report.to_json(), "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


def _pairs_json(xs):
    return [to_decimal_pair(x) for x in xs]


def _terms_json(t: g2.TermSum) -> dict:
    return {"value": to_decimal_pair(t.value), "termscale": mpmath.nstr(t.scale, 40),
            "rel": mpmath.nstr(t.rel, 6)}


def cmd_eval(args) -> int:
    point, jet = _point_from_args(args)
    with precision(args.precision_bits):
        fp = build_point(point)
        if jet is None:
            jet = random_jet(point.n, random.Random(f"jet:{args.seed}:{point.n}:0"))
        jet.check_nonzero()
        n = fp.n
        coeffs = g2.g2_coefficients(fp, jet)
        total = g2.g2_total_terms(fp, jet, coeffs)
        payload = {
            "n": n,
            "t": _pairs_json(fp.t),
            "ux": _pairs_json(jet.ux),
            "uxx": _pairs_json(jet.uxx),
            "precision_bits": args.precision_bits,
            "z": _pairs_json(fp.z),
            "u": _pairs_json(fp.u),
            "hsq": _pairs_json(fp.hsq),
            "C": {str(k): [to_decimal_pair(fp.C[i][k]) for i in range(n)] for k in range(3, fp.kmax + 1)},
            "H": _pairs_json(fp.H),
            "Gi": [_terms_json(t) for t in coeffs.Gi],
            "Gij": [[_terms_json(t) if t is not None else None for t in row] for row in coeffs.Gij],
            "Pij": [[_terms_json(t) for t in row] for row in coeffs.Pij],
            "Qi": [_terms_json(t) for t in coeffs.Qi],
            "G2_total": _terms_json(total),
        }
        fmt = lambda x: mpmath.nstr(x, 12)
        text = "\n".join([
            f"n = {n}",
            "z   = " + ", ".join(fmt(x) for x in fp.z),
            "u   = " + ", ".join(fmt(x) for x in fp.u),
            "hsq = " + ", ".join(fmt(x) for x in fp.hsq),
            "H   = " + ", ".join(fmt(x) for x in fp.H),
            f"G2 total = {mpmath.nstr(total.value, 6)}  termscale {mpmath.nstr(total.scale, 6)}"
            f"  relative {mpmath.nstr(total.rel, 3)}",
        ])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_residues(args) -> int:
    point, _ = _point_from_args(args)
    rows = []
    worst = mpmath.mpf(0)
    with precision(args.precision_bits):
        fp = build_point(point)
        for name, fargs in re_.residue_rows(fp):
            closed = re_.CLOSED[name](fp, *fargs)
            orac = re_.ORACLE[name](fp, *fargs)
            mag = max(abs(closed), abs(orac), mpmath.mpf(1))
            rel = abs(closed - orac) / mag
            worst = max(worst, rel)
            rows.append({"formula": name, "args": list(fargs), "closed": to_decimal_pair(closed),
                         "oracle": to_decimal_pair(orac), "rel_diff": mpmath.nstr(rel, 6)})
    ok = worst <= args.tol
    payload = {"n": fp.n, "t": _pairs_json(fp.t), "rows": rows,
               "max_rel_diff": mpmath.nstr(worst, 6), "passed": bool(ok)}
    lines = [f"{r['formula']}{tuple(r['args'])}: closed {mpmath.nstr(from_decimal_pair(r['closed']), 10)}"
             f"  rel diff {r['rel_diff']}" for r in rows]
    lines.append(f"{len(rows)} rows, max relative difference {mpmath.nstr(worst, 3)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "eval": cmd_eval, "residues": cmd_residues}


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS and argv[0] not in ("-h", "--help", "-v", "--verbose"):
        argv = ["verify"] + argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command is None:
        args = parser.parse_args(argv + ["verify"])
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        # inputs are parsed at the requested precision too
        with precision(args.precision_bits):
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CausticError as exc:
        print(f"caustic: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ZeroDivisionError, NonConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
