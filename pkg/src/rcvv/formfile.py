"""JSON persistence for forms (schema tag ``rcvv/1``).

Rationals are stored as explicit numerator/denominator integer pairs, never
as decimals, so rational-backend round trips are bit-exact.  Float-backend
coefficients are stored as JSON floats (double precision); exact round
trips are promised for the rational backend only.

The document stores one container-level precision: the minimum of the
component bounds (components are truncated to it on write).  Two-variable
kinds store the two-variable weight; the expansion offset is recovered
from the component offsets, which determine it for either convention.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction

import mpmath

from .errors import MetaMismatchError, RcvvError
from .jacobi import ThetaComponentForm, component_offset
from .qseries import FLOAT, RATIONAL, FourierSeries
from .skewjacobi import SkewThetaForm, skew_component_offset
from .symbolic import SymbolicValue
from .vvforms import MultiplierData, VVForm

__all__ = [
    "form_to_doc",
    "doc_to_form",
    "save_form",
    "load_form",
    "validate_doc",
    "file_hash",
    "write_json",
    "split_uniform_scale",
]

SCHEMA = "rcvv/1"


def _frac_doc(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def _doc_frac(doc, what: str) -> Fraction:
    if not isinstance(doc, dict) or "num" not in doc or "den" not in doc:
        raise RcvvError("invalid rational for %s: %r" % (what, doc))
    if not isinstance(doc["num"], int) or not isinstance(doc["den"], int):
        raise RcvvError("rational parts of %s must be integers" % what)
    if doc["den"] == 0:
        raise RcvvError("zero denominator in %s" % what)
    return Fraction(doc["num"], doc["den"])


def _coeff_doc(value, backend: str) -> dict:
    if backend == RATIONAL:
        return {"re": _frac_doc(value), "im": _frac_doc(0)}
    return {"re": float(value.real), "im": float(value.imag)}


def _doc_coeff(doc, backend: str, where: str):
    if backend == RATIONAL:
        re = _doc_frac(doc.get("re"), where + ".re")
        im = _doc_frac(doc.get("im", {"num": 0, "den": 1}), where + ".im")
        if im != 0:
            raise RcvvError("rational backend cannot hold a nonzero imaginary part at %s" % where)
        return re
    if not isinstance(doc.get("re"), (int, float)) or not isinstance(doc.get("im"), (int, float)):
        raise RcvvError("float backend needs numeric re/im at %s" % where)
    return mpmath.mpc(doc["re"], doc["im"])


def form_to_doc(form, provenance=None, scale: SymbolicValue | None = None) -> dict:
    """Serialise a form; ``scale`` records a common symbolic factor that has
    been divided out of the stored coefficients (adjoint outputs)."""
    if isinstance(form, VVForm):
        kind, weight, index, comps, cusp = "vvform", form.weight, None, form.components, form.cusp_flag
    elif isinstance(form, ThetaComponentForm):
        kind, weight, index, comps, cusp = "jacobi", form.weight, form.index, form.components, form.cusp_flag
    elif isinstance(form, SkewThetaForm):
        kind, weight, index, comps, cusp = "skew", form.weight, form.index, form.components, form.cusp_flag
    else:
        raise RcvvError("cannot serialise %r" % (form,))
    backend = comps[0].backend
    if backend not in (RATIONAL, FLOAT):
        raise RcvvError(
            "only rational/float backends are serialisable; factor the symbolic scale out first"
        )
    precision = min(s.precision for s in comps)
    comps = [s.truncate(precision) for s in comps]
    doc = {
        "schema": SCHEMA,
        "kind": kind,
        "weight": _frac_doc(weight),
        "dim": len(comps),
        "offsets": [_frac_doc(s.offset) for s in comps],
        "precision": precision,
        "backend": backend,
        "components": [
            [dict(n=n, **_coeff_doc(c, backend)) for n, c in s.items()] for s in comps
        ],
        "cusp": bool(cusp),
    }
    if index is not None:
        doc["index"] = index
    if scale is not None:
        doc["scale"] = scale.as_string()
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def validate_doc(doc: dict):
    """Structural validation; raises naming the violated invariant."""
    if not isinstance(doc, dict):
        raise RcvvError("document is not a JSON object")
    if doc.get("schema") != SCHEMA:
        raise RcvvError("missing or unsupported schema tag (need %r)" % SCHEMA)
    kind = doc.get("kind")
    if kind not in ("vvform", "jacobi", "skew"):
        raise RcvvError("kind must be vvform/jacobi/skew, got %r" % kind)
    backend = doc.get("backend")
    if backend not in (RATIONAL, FLOAT):
        raise RcvvError("backend must be rational/float, got %r" % backend)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise RcvvError("dim must be a positive integer")
    offsets = doc.get("offsets")
    if not isinstance(offsets, list) or len(offsets) != dim:
        raise RcvvError("offsets length must equal dim")
    comps = doc.get("components")
    if not isinstance(comps, list) or len(comps) != dim:
        raise RcvvError("components length must equal dim")
    precision = doc.get("precision")
    if not isinstance(precision, int):
        raise RcvvError("precision must be an integer")
    for j, entries in enumerate(comps, start=1):
        if not isinstance(entries, list):
            raise RcvvError("component %d is not a list" % j)
        for entry in entries:
            if not isinstance(entry, dict) or not isinstance(entry.get("n"), int):
                raise RcvvError("component %d carries a malformed entry" % j)
            if entry["n"] > precision:
                raise RcvvError(
                    "component %d stores index %d beyond precision %d"
                    % (j, entry["n"], precision)
                )
    if kind in ("jacobi", "skew"):
        index = doc.get("index")
        if not isinstance(index, int) or index < 1 or 2 * index != dim:
            raise RcvvError("two-variable kinds need index with dim = 2*index")
    if not isinstance(doc.get("cusp"), bool):
        raise RcvvError("cusp flag must be a boolean")
    _doc_frac(doc.get("weight"), "weight")
    for j, off in enumerate(offsets, start=1):
        o = _doc_frac(off, "offset %d" % j)
        if not 0 <= o < 1:
            raise RcvvError("offset %d outside [0,1)" % j)


def doc_to_form(doc: dict):
    validate_doc(doc)
    backend = doc["backend"]
    precision = doc["precision"]
    weight = _doc_frac(doc["weight"], "weight")
    offsets = [_doc_frac(o, "offset") for o in doc["offsets"]]
    comps = []
    for j, (off, entries) in enumerate(zip(offsets, doc["components"]), start=1):
        coeffs = {}
        for entry in entries:
            coeffs[entry["n"]] = _doc_coeff(entry, backend, "component %d" % j)
        comps.append(FourierSeries(off, coeffs, precision, backend))
    kind = doc["kind"]
    cusp = doc["cusp"]
    if kind == "vvform":
        return VVForm(MultiplierData(weight, tuple(offsets)), comps, cusp_flag=cusp)
    m = doc["index"]
    if kind == "jacobi":
        kappa = offsets[2 * m - 1]
        for mu in range(1, 2 * m + 1):
            if offsets[mu - 1] != component_offset(m, mu, kappa):
                raise MetaMismatchError(
                    "offsets inconsistent with a two-variable expansion offset at component %d" % mu
                )
        return ThetaComponentForm(m, weight, kappa, comps, cusp_flag=cusp)
    kappa = (-offsets[2 * m - 1]) % 1
    for mu in range(1, 2 * m + 1):
        if offsets[mu - 1] != skew_component_offset(m, mu, kappa):
            raise MetaMismatchError(
                "offsets inconsistent with a skew expansion offset at component %d" % mu
            )
    return SkewThetaForm(m, weight, kappa, comps, cusp_flag=cusp)


def write_json(path: str, doc: dict):
    """Atomic JSON write."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(doc, handle, indent=1, sort_keys=True, default=str)
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_form(path: str, form, provenance=None, scale=None):
    write_json(path, form_to_doc(form, provenance=provenance, scale=scale))


def load_form(path: str):
    with open(path) as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise RcvvError("not valid JSON: %s" % exc) from exc
    return doc_to_form(doc)


def file_hash(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def numeric_form(form, prec: int | None = None):
    """Evaluate a symbolic-backend form to the float backend at ``prec``
    bits (used to persist adjoint families whose exact coefficients carry
    per-index radical factors the rational document cannot hold)."""
    with mpmath.workprec(prec or mpmath.mp.prec):
        comps = []
        for series in form.components:
            coeffs = {}
            for n, value in series.items():
                if not isinstance(value, SymbolicValue):
                    raise RcvvError("form is not on the symbolic backend")
                coeffs[n] = mpmath.mpc(value.evaluate())
            comps.append(FourierSeries(series.offset, coeffs, series.precision, FLOAT))
    if isinstance(form, VVForm):
        return VVForm(form.meta, comps, cusp_flag=form.cusp_flag)
    if isinstance(form, ThetaComponentForm):
        return ThetaComponentForm(form.index, form.weight, form.kappa, comps, form.cusp_flag)
    return SkewThetaForm(form.index, form.weight, form.kappa, comps, form.cusp_flag)


def split_uniform_scale(form):
    """Factor a symbolic-backend form into (scale, rational form).

    Succeeds when every coefficient is a single product term and all terms
    share one transcendental signature (the integral-weight adjoint case);
    otherwise the data genuinely carries per-coefficient radicals and is
    reported as unserialisable.
    """
    signature = None
    for series in form.components:
        for _, value in series.items():
            if not isinstance(value, SymbolicValue):
                raise RcvvError("form is not on the symbolic backend")
            terms = value._terms
            if len(terms) != 1:
                raise RcvvError("coefficients are not single products; no uniform scale")
            sig = next(iter(terms))
            if signature is None:
                signature = sig
            elif sig != signature:
                raise RcvvError("coefficients carry non-uniform transcendental factors")
    if signature is None or signature == ((), Fraction(0), ()):
        scale = SymbolicValue.one()
        signature = ((), Fraction(0), ())
    else:
        scale = SymbolicValue({signature: Fraction(1)})
    comps = []
    for series in form.components:
        coeffs = {n: value._terms[signature] for n, value in series.items()}
        comps.append(FourierSeries(series.offset, coeffs, series.precision, RATIONAL))
    if isinstance(form, VVForm):
        out = VVForm(form.meta, comps, cusp_flag=form.cusp_flag)
    elif isinstance(form, ThetaComponentForm):
        out = ThetaComponentForm(form.index, form.weight, form.kappa, comps, form.cusp_flag)
    else:
        out = SkewThetaForm(form.index, form.weight, form.kappa, comps, form.cusp_flag)
    return scale, out
