"""JSON field documents and JSON-ready rendering of reports.

A field document looks like::

    {"n": 2, "truncation": 3,
     "A": [["0", "1"], ["-1", "0"]],
     "terms": [{"component": 1, "exponents": [3, 0], "coeff": "1"}, ...],
     "eigen": {"values": ["i", "-i"], "P": [["1", "1"], ["i", "-i"]]}}

Components are 1-based on disk and 0-based in :class:`VectorField`.
Coefficients are strings in the grammar of :func:`parse_coefficient`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import IO, Any

from gmpy2 import mpq

from .algebra import ExactMatrix, GaussianRational, format_coefficient, parse_coefficient
from .analysis import IntegralBasis, OmegaReport, ShapeFit
from .normalform import EigenData
from .polyvec import ScalarPoly, VectorField, grlex_key

__all__ = [
    "FieldSpecError",
    "FieldSpecDocument",
    "parse_field_file",
    "parse_field_text",
    "parse_matrix_file",
    "document_from_field",
    "emit_document",
    "dumps",
    "to_jsonable",
]


class FieldSpecError(ValueError):
    """Malformed input document; ``where`` is a field path like ``terms[2].coeff``."""

    def __init__(self, message: str, where: str = "", line: int | None = None):
        self.where = where
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if where:
            prefix += f"{where}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class FieldSpecDocument:
    """A field document as written, coefficient strings kept verbatim."""

    n: int
    truncation: int
    A: tuple
    terms: tuple  # (component 1-based, exponents, coeff string)
    eigen_values: tuple | None = None
    eigen_P: tuple | None = None

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "n": self.n,
            "truncation": self.truncation,
            "A": [list(r) for r in self.A],
            "terms": [{"component": j, "exponents": list(q), "coeff": c} for j, q, c in self.terms],
        }
        if self.eigen_values is not None:
            eig: dict[str, Any] = {"values": list(self.eigen_values)}
            if self.eigen_P is not None:
                eig["P"] = [list(r) for r in self.eigen_P]
            doc["eigen"] = eig
        return doc

    def field(self) -> VectorField:
        A = ExactMatrix([[parse_coefficient(c) for c in r] for r in self.A])
        terms: dict = {}
        for j, q, c in self.terms:
            terms[(j - 1, tuple(q))] = parse_coefficient(c)
        return VectorField(self.n, self.truncation, A, terms)

    def eigen(self) -> EigenData | None:
        if self.eigen_values is None:
            return None
        values = tuple(parse_coefficient(c) for c in self.eigen_values)
        P = None
        if self.eigen_P is not None:
            P = ExactMatrix([[parse_coefficient(c) for c in r] for r in self.eigen_P])
        return EigenData(values, P)


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit_document(doc: FieldSpecDocument) -> str:
    return dumps(doc.to_json())


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise FieldSpecError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _load(text: str):
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise FieldSpecError(exc.msg, line=exc.lineno) from None


def _int(value, where: str, low: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FieldSpecError(f"expected an integer, got {value!r}", where)
    if low is not None and value < low:
        raise FieldSpecError(f"must be at least {low}, got {value}", where)
    return value


def _coeff(value, where: str) -> str:
    if not isinstance(value, str):
        raise FieldSpecError(f"coefficients are strings, got {value!r}", where)
    try:
        parse_coefficient(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise FieldSpecError(str(exc), where) from None
    return value


def _matrix(value, n: int | None, where: str) -> tuple:
    if not isinstance(value, list) or not value:
        raise FieldSpecError("expected a nonempty list of rows", where)
    n = len(value) if n is None else n
    if len(value) != n:
        raise FieldSpecError(f"expected {n} rows, got {len(value)}", where)
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise FieldSpecError(f"expected a row of {n} coefficients", f"{where}[{i}]")
        rows.append(tuple(_coeff(c, f"{where}[{i}][{j}]") for j, c in enumerate(row)))
    return tuple(rows)


def _check_keys(obj, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise FieldSpecError("expected an object", where)
    for k in obj:
        if k not in allowed:
            raise FieldSpecError(f"unknown key {k!r}", where)
    for k in sorted(required):
        if k not in obj:
            raise FieldSpecError(f"missing key {k!r}", where)


def parse_field_text(text: str) -> tuple[FieldSpecDocument, VectorField]:
    raw = _load(text)
    _check_keys(raw, {"n", "truncation", "A", "terms", "eigen"}, {"n", "truncation", "A", "terms"}, "")
    n = _int(raw["n"], "n", 1)
    N = _int(raw["truncation"], "truncation", 1)
    A = _matrix(raw["A"], n, "A")
    if not isinstance(raw["terms"], list):
        raise FieldSpecError("expected a list", "terms")
    terms, seen = [], {}
    for t, item in enumerate(raw["terms"]):
        where = f"terms[{t}]"
        _check_keys(item, {"component", "exponents", "coeff"}, {"component", "exponents", "coeff"}, where)
        j = _int(item["component"], f"{where}.component", 1)
        if j > n:
            raise FieldSpecError(f"component {j} is outside 1..{n}", f"{where}.component")
        q = item["exponents"]
        if not isinstance(q, list) or len(q) != n:
            raise FieldSpecError(f"exponent vector must have length {n}", f"{where}.exponents")
        q = tuple(_int(e, f"{where}.exponents", 0) for e in q)
        if not 2 <= sum(q) <= N:
            raise FieldSpecError(f"degree {sum(q)} is outside 2..{N}; linear terms belong in A", f"{where}.exponents")
        key = (j, q)
        if key in seen:
            raise FieldSpecError(f"duplicate term, first given at terms[{seen[key]}]", where)
        seen[key] = t
        terms.append((j, q, _coeff(item["coeff"], f"{where}.coeff")))
    values = P = None
    if "eigen" in raw:
        eig = raw["eigen"]
        _check_keys(eig, {"values", "P"}, {"values"}, "eigen")
        if not isinstance(eig["values"], list) or len(eig["values"]) != n:
            raise FieldSpecError(f"expected {n} eigenvalues", "eigen.values")
        values = tuple(_coeff(c, f"eigen.values[{i}]") for i, c in enumerate(eig["values"]))
        if "P" in eig:
            P = _matrix(eig["P"], n, "eigen.P")
    doc = FieldSpecDocument(n, N, A, tuple(terms), values, P)
    try:
        field = doc.field()
        eigen = doc.eigen()
    except (ValueError, ZeroDivisionError) as exc:
        raise FieldSpecError(str(exc), "eigen.P") from None
    if eigen is not None:
        try:
            eigen.verify(field.A)
        except ValueError as exc:
            raise FieldSpecError(str(exc), "eigen") from None
    return doc, field


def parse_field_file(source: str | Path | IO[str]) -> tuple[FieldSpecDocument, VectorField]:
    """Read a field document from a path or text stream."""
    if hasattr(source, "read"):
        return parse_field_text(source.read())
    return parse_field_text(Path(source).read_text(encoding="utf-8"))


def parse_matrix_file(source: str | Path, n: int | None = None) -> ExactMatrix:
    """A square matrix stored as a JSON list of rows of coefficient strings."""
    raw = _load(Path(source).read_text(encoding="utf-8"))
    rows = _matrix(raw, n, "M")
    return ExactMatrix([[parse_coefficient(c) for c in r] for r in rows])


def _matrix_strings(M: ExactMatrix) -> tuple:
    return tuple(tuple(format_coefficient(c) for c in r) for r in M.rows)


def document_from_field(f: VectorField, eigen: EigenData | None = None) -> FieldSpecDocument:
    """Canonical document: canonical coefficients, terms by component then graded-lex order."""
    terms = sorted(f.terms.items(), key=lambda kv: (kv[0][0], grlex_key(kv[0][1])))
    values = P = None
    if eigen is not None:
        values = tuple(format_coefficient(c) for c in eigen.values)
        if eigen.P is not None:
            P = _matrix_strings(eigen.P)
    return FieldSpecDocument(
        f.n,
        f.truncation,
        _matrix_strings(f.A),
        tuple((j + 1, q, format_coefficient(c)) for (j, q), c in terms),
        values,
        P,
    )


def approx(x: Decimal | None, precision: int) -> dict | None:
    if x is None:
        return None
    return {"approximation": True, "precision_digits": precision, "value": str(x)}


def _scalar(p: ScalarPoly) -> dict:
    terms = sorted(p.terms.items(), key=lambda kv: grlex_key(kv[0]))
    return {
        "n": p.n,
        "truncation": p.truncation,
        "terms": [{"exponents": list(q), "coeff": format_coefficient(c)} for q, c in terms],
    }


def _omega(rep: OmegaReport) -> dict:
    p = rep.precision
    records = []
    for r in rep.records:
        records.append(
            {
                "k": r.k,
                "omega_squared": None if r.omega_sq is None else str(r.omega_sq),
                "omega": approx(r.omega(p), p),
                "minimizer": None if r.minimizer is None else list(r.minimizer),
                "component": None if r.component is None else r.component + 1,
            }
        )
    return {
        "eigenvalues": [format_coefficient(a) for a in rep.eigenvalues],
        "variant": rep.variant,
        "strict_positive_q": rep.strict_positive,
        "k_max": rep.k_max,
        "precision": p,
        "threshold": str(rep.threshold),
        "verdict": rep.verdict,
        "records": records,
        "partial_sums": [{"k": k, "sum": approx(s, p)} for k, s in enumerate(rep.partial_sums, start=1)],
    }


def to_jsonable(obj, precision: int = 50):
    """Recursively convert library objects into JSON-ready values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, GaussianRational):
        return format_coefficient(obj)
    if isinstance(obj, type(mpq())):
        return str(obj)
    if isinstance(obj, Decimal):
        return approx(obj, precision)
    if isinstance(obj, ExactMatrix):
        return [list(r) for r in _matrix_strings(obj)]
    if isinstance(obj, VectorField):
        return document_from_field(obj).to_json()
    if isinstance(obj, ScalarPoly):
        return _scalar(obj)
    if isinstance(obj, OmegaReport):
        return _omega(obj)
    if isinstance(obj, ShapeFit):
        return {
            "A": to_jsonable(obj.A),
            "M": to_jsonable(obj.M),
            "alpha": _scalar(obj.alpha),
            "mu": _scalar(obj.mu),
            "residual_is_zero": obj.residual.is_zero(),
            "nonunique_degrees": list(obj.nonunique_degrees),
        }
    if isinstance(obj, IntegralBasis):
        return {"truncation": obj.truncation, "basis": [_scalar(p) for p in obj.basis]}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, precision) for v in obj]
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")
