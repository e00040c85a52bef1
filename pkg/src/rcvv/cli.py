"""Command-line interface.

Exit codes: 0 success, 2 validation failure (bad inputs, schema
violations, meta mismatches), 3 verification failure (a verify suite ran
and did not pass).  Reports and forms are written atomically as JSON.
The environment variable RCVV_FLOAT_PREC sets the float-backend precision
in bits (minimum 64).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .errors import RcvvError
from .fixtures import fixtures
from .formfile import (
    file_hash,
    load_form,
    numeric_form,
    save_form,
    split_uniform_scale,
    write_json,
)
from .jacobi import ThetaComponentForm, jacobi_rc_bracket, theta_decompose, theta_recompose
from .pairing import (
    PairingResult,
    bracket_adjoint,
    bracket_pairing,
    jacobi_bracket_adjoint,
    jacobi_bracket_pairing,
    poincare_pairing,
    skew_bracket_adjoint,
    skew_bracket_pairing,
)
from .qseries import SYMBOLIC
from .skewjacobi import SkewThetaForm, skew_rc_bracket, skew_theta_decompose, skew_theta_recompose
from .symbolic import SymbolicValue
from .verify import SUITES, run_suite
from .vvforms import MultiplierData, VVForm, as_tensor, rc_bracket

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError("not a rational: %r" % text) from exc


def _offsets_list(text: str):
    return tuple(Fraction(part) for part in text.split(","))


def _apply_float_prec():
    raw = os.environ.get("RCVV_FLOAT_PREC")
    if raw:
        try:
            prec = int(raw)
        except ValueError:
            raise RcvvError("RCVV_FLOAT_PREC must be an integer, got %r" % raw)
        if prec < 64:
            raise RcvvError("RCVV_FLOAT_PREC must be >= 64 bits")
        mpmath.mp.prec = prec


def _provenance(paths, **params):
    prov = {"inputs": {os.path.basename(p): file_hash(p) for p in paths}}
    if params:
        prov["params"] = {k: str(v) for k, v in params.items() if v is not None}
    return prov


def _value_doc(value):
    if isinstance(value, SymbolicValue):
        numeric = complex(value.evaluate())
        return {"symbolic": value.as_string(), "re": numeric.real, "im": numeric.imag}
    numeric = complex(value)
    return {"symbolic": None, "re": numeric.real, "im": numeric.imag}


def _pairing_doc(result: PairingResult) -> dict:
    return {
        "formula_id": result.formula_id,
        "value": _value_doc(result.value),
        "truncation_N": result.truncation_N,
        "tail_bound": result.tail_bound,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_fixtures(args) -> int:
    os.makedirs(args.emit, exist_ok=True)
    bundle = fixtures(args.precision)
    for name, form in bundle.items():
        path = os.path.join(args.emit, "%s.json" % name)
        save_form(path, form, provenance={"generator": "fixtures", "precision": args.precision})
        print(path)
    return EXIT_OK


def cmd_bracket(args) -> int:
    f1 = load_form(args.form1)
    f2 = load_form(args.form2)
    if not isinstance(f1, VVForm) or not isinstance(f2, VVForm):
        raise RcvvError("bracket expects two vvform documents")
    out = rc_bracket(f1, f2, args.nu)
    save_form(args.out, out, provenance=_provenance([args.form1, args.form2], nu=args.nu))
    return EXIT_OK


def cmd_jacobi_bracket(args) -> int:
    f = load_form(args.form)
    g = load_form(args.scalar)
    if not isinstance(g, VVForm) or g.dim != 1:
        raise RcvvError("the second operand must be a scalar vvform document")
    if args.skew:
        if not isinstance(f, SkewThetaForm):
            raise RcvvError("--skew expects a skew-kind document")
        out = skew_rc_bracket(f, g, args.nu)
        mode = "skew"
    else:
        if not isinstance(f, ThetaComponentForm):
            raise RcvvError("--hol expects a jacobi-kind document")
        out = jacobi_rc_bracket(f, g, args.nu)
        mode = "hol"
    save_form(
        args.out,
        out,
        provenance=_provenance([args.form, args.scalar], nu=args.nu, mode=mode),
    )
    return EXIT_OK


def cmd_theta_decompose(args) -> int:
    f = load_form(args.form)
    if isinstance(f, ThetaComponentForm):
        out = theta_decompose(f)
    elif isinstance(f, SkewThetaForm):
        out = skew_theta_decompose(f)
    else:
        raise RcvvError("theta-decompose expects a jacobi or skew document")
    save_form(args.out, out, provenance=_provenance([args.form]))
    return EXIT_OK


def cmd_theta_recompose(args) -> int:
    f = load_form(args.form)
    if not isinstance(f, VVForm):
        raise RcvvError("theta-recompose expects a vvform document")
    out = theta_recompose(f) if args.kind == "jacobi" else skew_theta_recompose(f)
    save_form(args.out, out, provenance=_provenance([args.form], kind=args.kind))
    return EXIT_OK


def _derive_scalar_offset2(f: VVForm, g: VVForm) -> Fraction:
    offs = {(fo - go) % 1 for fo, go in zip(f.meta.offsets, g.meta.offsets)}
    if len(offs) != 1:
        raise RcvvError("cannot derive the extraction-side offset; pass --offsets2")
    return offs.pop()


def cmd_pair(args) -> int:
    inputs = []
    report = {
        "schema": "rcvv-pair-report/1",
        "formula": args.formula,
        "mode": args.mode,
        "params": {},
    }
    if args.formula == "thm2":
        g = load_form(args.inputs[0])
        inputs = [args.inputs[0]]
        if not isinstance(g, VVForm):
            raise RcvvError("thm2 expects a vvform document")
        result = poincare_pairing(g, g.weight, args.s, args.u)
        report["params"] = {"k": str(g.weight), "s": args.s, "u": args.u}
        report["result"] = _pairing_doc(result)
    elif args.formula == "thm3":
        if len(args.inputs) != 2:
            raise RcvvError("thm3 expects F.json G.json")
        f, g = load_form(args.inputs[0]), load_form(args.inputs[1])
        inputs = list(args.inputs)
        if not isinstance(f, VVForm) or not isinstance(g, VVForm):
            raise RcvvError("thm3 expects vvform documents")
        if args.k2 is None:
            raise RcvvError("thm3 requires --k2")
        if args.offsets2 is not None:
            offsets2 = args.offsets2
        elif f.dim == g.dim:
            offsets2 = (_derive_scalar_offset2(f, g),)
        else:
            raise RcvvError("pass --offsets2 for a non-scalar extraction side")
        meta2 = MultiplierData(args.k2, offsets2)
        ft = as_tensor(f, g.meta, meta2)
        result = bracket_pairing(
            ft, g, k1=g.weight, k2=args.k2, nu=args.nu, s=args.s, r=args.r
        )
        report["params"] = {
            "k1": str(g.weight),
            "k2": str(args.k2),
            "nu": args.nu,
            "s": args.s,
            "r": args.r,
        }
        report["result"] = _pairing_doc(result)
    elif args.formula in ("thm9", "thm10"):
        if len(args.inputs) != 2:
            raise RcvvError("%s expects F.json G.json" % args.formula)
        f, g = load_form(args.inputs[0]), load_form(args.inputs[1])
        inputs = list(args.inputs)
        if args.k2 is None:
            raise RcvvError("%s requires --k2" % args.formula)
        if args.formula == "thm9":
            if not isinstance(f, ThetaComponentForm) or not isinstance(g, ThetaComponentForm):
                raise RcvvError("thm9 expects jacobi documents")
            dual = jacobi_bracket_pairing(f, g, k2=args.k2, nu=args.nu, s=args.s, mode="both")
        else:
            if not isinstance(f, SkewThetaForm) or not isinstance(g, SkewThetaForm):
                raise RcvvError("thm10 expects skew documents")
            dual = skew_bracket_pairing(f, g, k2=args.k2, nu=args.nu, s=args.s, mode="both")
        report["params"] = {
            "k1": str(g.weight),
            "k2": str(args.k2),
            "nu": args.nu,
            "s": args.s,
        }
        report["canonical"] = _pairing_doc(dual.canonical)
        report["as_printed"] = _pairing_doc(dual.as_printed)
        report["modes_identical"] = dual.identical
        report["note"] = dual.note
        report["term_comparison"] = dual.rows
        headline = dual.as_printed if args.mode == "as-printed" else dual.canonical
        report["result"] = _pairing_doc(headline)
    else:
        raise RcvvError("unknown pairing formula %r" % args.formula)
    report["provenance"] = _provenance(inputs)
    write_json(args.out, report)
    print(args.out)
    return EXIT_OK


def _adjoint_consistency_probe(h, g, adjoint_form, k2, nu):
    """Dual-code-path spot check recorded in the output provenance: the
    first in-range coefficient probe recovered through the extraction
    pairing must equal the closed pairing formula with the order sign."""
    from fractions import Fraction as _F

    for l in range(1, adjoint_form.dim + 1):
        for n in (1, 2):
            if n > adjoint_form.component(l).precision:
                continue
            try:
                via_extraction = poincare_pairing(adjoint_form, k2, n, l)
                via_formula = bracket_pairing(h, g, k1=g.weight, k2=k2, nu=nu, s=n, r=l)
            except RcvvError:
                continue
            want = via_formula.value * _F((-1) ** nu)
            agree = via_extraction.value == want
            return {"n": n, "component": l, "agree": bool(agree)}
    return {"skipped": "no in-range probe"}


def cmd_adjoint(args) -> int:
    h = load_form(args.inputs[0])
    g = load_form(args.inputs[1])
    if not isinstance(g, VVForm):
        raise RcvvError("the second operand must be a vvform document")
    if args.k2 is None:
        raise RcvvError("adjoint requires --k2")
    consistency = None
    if args.formula == "thm4":
        if not isinstance(h, VVForm):
            raise RcvvError("thm4 expects a vvform input")
        if args.offsets2 is not None:
            offsets2 = args.offsets2
        elif h.dim == g.dim:
            offsets2 = (_derive_scalar_offset2(h, g),)
        else:
            raise RcvvError("pass --offsets2 for a non-scalar second factor")
        meta2 = MultiplierData(args.k2, offsets2)
        ht = as_tensor(h, g.meta, meta2)
        result = bracket_adjoint(ht, g, k1=g.weight, k2=args.k2, nu=args.nu)
        out_form = result.form
        consistency = _adjoint_consistency_probe(ht, g, result.form, args.k2, args.nu)
    elif args.formula == "prop2":
        if not isinstance(h, ThetaComponentForm):
            raise RcvvError("prop2 expects a jacobi input")
        result = jacobi_bracket_adjoint(h, g, k2=args.k2, nu=args.nu, mode="canonical")
        out_form = result.form
    elif args.formula == "thm11":
        if not isinstance(h, SkewThetaForm):
            raise RcvvError("thm11 expects a skew input")
        result = skew_bracket_adjoint(h, g, k2=args.k2, nu=args.nu, mode="canonical")
        out_form = result.form
    else:
        raise RcvvError("unknown adjoint formula %r" % args.formula)
    prov = _provenance(args.inputs, formula=args.formula, nu=args.nu, k2=args.k2)
    max_tail = max(result.tail_bounds.values(), default=0.0)
    prov["max_tail_bound"] = max_tail
    if consistency is not None:
        prov["consistency_probe"] = consistency
    if out_form.backend == SYMBOLIC:
        try:
            scale, rational_form = split_uniform_scale(out_form)
        except RcvvError:
            # per-index radical factors: persist the numeric evaluation
            prov["scale_note"] = (
                "coefficients evaluated numerically at %d bits; exact values "
                "carry per-index radical factors" % mpmath.mp.prec
            )
            save_form(args.out, numeric_form(out_form), provenance=prov)
        else:
            prov["scale_note"] = (
                "stored coefficients are relative to the symbolic scale field"
            )
            save_form(args.out, rational_form, provenance=prov, scale=scale)
    else:
        save_form(args.out, out_form, provenance=prov)
    print(args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.count is not None:
        if args.suite not in ("thm1", "swap", "thm7", "thm8"):
            raise RcvvError("--count applies to the randomised suites only")
        kwargs["count"] = args.count
    report = run_suite(args.suite, seed=args.seed, **kwargs)
    if args.out:
        write_json(args.out, report)
    print(
        "suite %s: %s (%d instances, %.1fs)"
        % (
            args.suite,
            "pass" if report["passed"] else "FAIL",
            report["count"],
            report.get("runtime_sec", 0.0),
        )
    )
    if not report["passed"]:
        for failure in report["failures"][:10]:
            print("  failure: %s" % json.dumps(failure, default=str))
        return EXIT_VERIFICATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcvv",
        description="Exact brackets, pairings and adjoints for vector-valued "
        "and two-variable modular forms on truncated expansions.",
    )
    parser.add_argument("--version", action="version", version="rcvv %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="emit the classical fixture forms")
    p.add_argument("--emit", required=True, help="output directory")
    p.add_argument("--precision", type=int, default=20)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("bracket", help="bracket of two vvform files")
    p.add_argument("form1")
    p.add_argument("form2")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("jacobi-bracket", help="extended bracket with a scalar form")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--hol", action="store_true")
    group.add_argument("--skew", action="store_true")
    p.add_argument("form")
    p.add_argument("scalar")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_jacobi_bracket)

    p = sub.add_parser("theta-decompose", help="two-variable form to component vector")
    p.add_argument("form")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_theta_decompose)

    p = sub.add_parser("theta-recompose", help="component vector to two-variable form")
    p.add_argument("form")
    p.add_argument("--kind", choices=("jacobi", "skew"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_theta_recompose)

    p = sub.add_parser("pair", help="evaluate a pairing formula, write a report")
    p.add_argument("--formula", choices=("thm2", "thm3", "thm9", "thm10"), required=True)
    p.add_argument("--mode", choices=("canonical", "as-printed"), default="canonical")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--k2", type=_fraction)
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--u", type=int, default=1)
    p.add_argument("--offsets2", type=_offsets_list)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("adjoint", help="adjoint coefficient family, write a form file")
    p.add_argument("--formula", choices=("thm4", "prop2", "thm11"), required=True)
    p.add_argument("inputs", nargs=2, metavar=("H", "G"))
    p.add_argument("--k2", type=_fraction)
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--offsets2", type=_offsets_list)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_adjoint)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_float_prec()
        return args.func(args)
    except RcvvError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
