"""Command line front end: ``finadd <command> <instance.json> [options]``.

Every command prints a certificate as JSON.  Exit status is 0 on a positive
answer, 1 on a negative branch (violation, infeasibility, failed verify)
and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import comb
from typing import Sequence

from .certificates import certify, explain_certificate, is_negative
from .core import Certificate, FamilyMatrix, ParseError, jsonable

EXIT_OK, EXIT_NEGATIVE, EXIT_PARSE = 0, 1, 2


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # flags are accepted before or after the subcommand
    flag = argparse.SUPPRESS if suppress else False
    parser.add_argument("--oracle", action="store_true", default=flag,
                        help="append independent brute-force and floating-point checks")
    parser.add_argument("--transpose", action="store_true", default=flag,
                        help="swap the roles of functions and points")
    parser.add_argument("--output", metavar="FILE", default=argparse.SUPPRESS if suppress else None,
                        help="write the JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finadd", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("instance", help="instance JSON file")
        _common(p, suppress=True)
        return p

    p = add("minimax", "lower, upper and hull minimax values with witnesses")
    p.add_argument("--subfamilies", help="local minimax over groups, e.g. 'f1,f2;f3'")
    p.add_argument("--check-concave", dest="check_concave", action=argparse.BooleanOptionalAction, default=True,
                   help="decide concave-likeness (default on)")
    add("dominate", "dominating mixture or balance violation")
    p = add("hull", "membership of a target in the mixture hull")
    p.add_argument("--target", required=True, help="function name or comma-separated values")
    p = add("fan", "norm-bounded linear domination of values at vectors")
    p.add_argument("--rho", required=True, help="radius, e.g. 3/2")
    p.add_argument("--norm", choices=("l1", "linf"), default="l1")
    p = add("suffice", "sufficiency of a subset, with representing measures")
    p.add_argument("--subset", required=True, help="comma-separated point labels")
    p = add("strassen", "decomposition of a linear functional below sublinear ones")
    p.add_argument("--phi", required=True, help="comma-separated coordinates")
    p = add("exhaust", "exhaustion report for given or default pieces")
    p.add_argument("--pieces", help="groups of points, e.g. 'x1,x2;x3'")
    p = add("summing", "summing constant and witness measure")
    p.add_argument("--target", required=True, help="function name or comma-separated values")
    p = add("pietsch", "net-relaxed Pietsch estimate for an operator")
    p.add_argument("--p", required=True, help="exponent (integer for exact arithmetic)")
    p.add_argument("--net", required=True, help="JSON file with dual vectors")
    p.add_argument("--sample", required=True, help="JSON file with sample vectors")
    p.add_argument("--norm", choices=("linf", "l1", "l2"), default="linf")

    p = sub.add_parser("verify", help="re-check a certificate against its instance")
    p.add_argument("certificate", help="certificate JSON file")
    p.add_argument("--instance", required=True, help="instance JSON file")
    _common(p, suppress=True)
    return parser


def _params(args) -> dict:
    keys = ("subfamilies", "check_concave", "target", "rho", "norm", "subset", "phi", "pieces", "p")
    out = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    out["transpose"] = args.transpose
    if args.command == "pietsch":
        out["net"] = _load_json(args.net)
        out["sample"] = _load_json(args.sample)
    return out


def _summary(cert: Certificate) -> str:
    P = cert.payload
    k = cert.kind
    if k == "minimax_report":
        return f"lower {P['lower']}, hull {P['hull_value']}, upper {P['upper']}"
    if k == "summing_witness":
        return f"summing constant {P['C']}"
    if k == "exhaustion_report":
        return "exhaustion verified" if P["ok"] else "exhaustion fails"
    return k.replace("_", " ")


def _oracle(cert: Certificate, data) -> dict:
    from . import oracle

    out = {"float_check": oracle.float_check(cert.to_json(), data, 1e-9)}
    if cert.command == "minimax":
        A = FamilyMatrix.from_json(data)
        A = A.transpose() if cert.params.get("transpose") else A
        r = len(A.rows)
        N = next((n for n in (50, 20, 10, 5, 2, 1) if r <= 8 or comb(n + r - 1, r - 1) <= 2_000_000), 1)
        grid = oracle.grid_minimax(A, N)
        tol = oracle.grid_tolerance(A, N)
        hull = cert.payload["hull_value"]
        out["grid"] = {"resolution": N, "value": grid, "bound": tol, "agrees": abs(grid - hull) <= tol}
    elif cert.command == "dominate":
        from .domination import DominationInstance

        inst = DominationInstance.from_json(data)
        k = oracle.support_budget(inst)
        margin, pairs = oracle.enumerate_balance(inst, k)
        found = margin is not None and margin > 0
        out["enumeration"] = {
            "max_support": k,
            "margin": margin,
            "pairs": [list(p) for p in pairs],
            "agrees": not found or cert.kind == "balance_violation",
        }
    elif cert.kind == "summing_witness" and cert.arithmetic == "exact" and cert.command == "summing":
        from .summability import summing_constant

        A = FamilyMatrix.from_json(data)
        A = A.transpose() if cert.params.get("transpose") else A
        C = summing_constant(A, cert.params["target"]).C
        out["recomputed_C"] = C
    return jsonable(out)


def _emit(obj, args) -> None:
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            raw = _load_json(args.certificate)
            data = _load_json(args.instance)
            reason = explain_certificate(raw, data)
            _emit({"valid": reason is None, "reason": reason}, args)
            return EXIT_OK if reason is None else EXIT_NEGATIVE
        data = _load_json(args.instance)
        cert = certify(args.command, data, _params(args))
    except ParseError as exc:
        print(f"finadd: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (KeyError, ValueError) as exc:
        print(f"finadd: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out = cert.to_json()
    if args.oracle:
        out["oracle"] = _oracle(cert, data)
    _emit(out, args)
    print(_summary(cert), file=sys.stderr)
    return EXIT_NEGATIVE if is_negative(cert) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
