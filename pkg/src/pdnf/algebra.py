"""Exact Gaussian-rational scalars and dense exact matrices.

Everything here is exact: real and imaginary parts are ``gmpy2.mpq``
rationals, and linear algebra is done by Gaussian elimination to the
reduced row echelon form, which is canonical (independent of the order in
which rows are supplied).
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "ExactMatrix",
    "as_gr",
    "parse_coefficient",
    "format_coefficient",
    "kernel_basis",
    "rank",
    "solve",
    "rref",
    "ZERO",
    "ONE",
    "I",
]

_MPQ = type(mpq(0))


def _q(x) -> mpq:
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use exact rationals")
    return mpq(x)


class GaussianRational:
    """Complex number ``re + im*i`` with exact rational parts.

    Instances are immutable. ``mpq`` keeps fractions in lowest terms with a
    positive denominator, so structural equality is mathematical equality.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational with an imaginary part")
            self.re, self.im = re.re, re.im
            return
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _new(cls, re, im) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._new(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._new(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            other = as_gr(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._new(a * c, b)
        return GaussianRational._new(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gr(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = as_gr(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return GaussianRational._new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, Integral):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._new(self.re, -self.im)

    def abs2(self) -> mpq:
        """Squared modulus ``re**2 + im**2`` (a nonnegative rational)."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._new(self.re / n, -self.im / n)

    # comparisons --------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (Rational, _MPQ)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({format_coefficient(self)!r})"

    def __str__(self):
        return format_coefficient(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def as_gr(x) -> GaussianRational:
    """Coerce ints, rationals, ``mpq`` and coefficient strings."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, str):
        return parse_coefficient(x)
    if isinstance(x, (Integral, Fraction, _MPQ)):
        return GaussianRational._new(mpq(x), mpq(0))
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact; use GaussianRational")
    raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")


# -- coefficient strings -----------------------------------------------------

_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?")


def _parse_rational(text: str, whole: str) -> mpq:
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"bad coefficient {whole!r}")
    try:
        return mpq(text.lstrip("+"))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in coefficient {whole!r}") from None


def parse_coefficient(text: str) -> GaussianRational:
    """Parse ``"a/b"``, ``"a/b+c/d*i"``, ``"c/d*i"``, ``"i"`` or ``"-i"``.

    Signs are optional and integers have arbitrary precision. Raises
    ``ValueError`` on anything outside this grammar.
    """
    if not isinstance(text, str):
        raise ValueError(f"coefficient must be a string, got {type(text).__name__}")
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    if not s.endswith("i"):
        return GaussianRational._new(_parse_rational(s, text), mpq(0))
    body = s[:-1]
    k = max(body.rfind("+"), body.rfind("-"))
    real_txt, imag_txt = (body[:k], body[k:]) if k >= 0 else ("", body)
    if imag_txt in ("", "+", "-"):
        im = mpq(-1 if imag_txt == "-" else 1)
    elif imag_txt.endswith("*"):
        im = _parse_rational(imag_txt[:-1], text)
        if imag_txt[:-1] in ("+", "-", ""):
            raise ValueError(f"bad coefficient {text!r}")
    else:
        raise ValueError(f"bad coefficient {text!r}")
    real = _parse_rational(real_txt, text) if real_txt else mpq(0)
    return GaussianRational._new(real, im)


def _fmt_q(x: mpq) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_coefficient(x: GaussianRational) -> str:
    """Canonical string form; ``parse_coefficient`` inverts it exactly."""
    x = as_gr(x)
    if not x.im:
        return _fmt_q(x.re)
    mag = abs(x.im)
    im_txt = "i" if mag == 1 else f"{_fmt_q(mag)}*i"
    if not x.re:
        return ("-" if x.im < 0 else "") + im_txt
    return _fmt_q(x.re) + ("-" if x.im < 0 else "+") + im_txt


# -- matrices -----------------------------------------------------------------


class ExactMatrix:
    """Dense immutable matrix of Gaussian rationals."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(as_gr(x) for x in r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix rows")
        self._rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "ExactMatrix":
        ncols = nrows if ncols is None else ncols
        return cls([[ZERO] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls([[as_gr(values[i]) if i == j else ZERO for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[GaussianRational, ...], ...]:
        return self._rows

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def column(self, j: int) -> tuple[GaussianRational, ...]:
        return tuple(r[j] for r in self._rows)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self._rows == other._rows and self.shape == other.shape

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"ExactMatrix([{body}])"

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __neg__(self):
        return ExactMatrix([[-a for a in r] for r in self._rows])

    def scale(self, c) -> "ExactMatrix":
        c = as_gr(c)
        return ExactMatrix([[c * a for a in r] for r in self._rows])

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.ncols)]
            return ExactMatrix([[_dot(r, c) for c in cols] for r in self._rows])
        vec = [as_gr(x) for x in other]
        if len(vec) != self.ncols:
            raise ValueError("vector length does not match matrix columns")
        return tuple(_dot(r, vec) for r in self._rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([self.column(j) for j in range(self.ncols)])

    def is_zero(self) -> bool:
        return not any(x for r in self._rows for x in r)

    def is_diagonal(self) -> bool:
        return all(not x for i, r in enumerate(self._rows) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> tuple[GaussianRational, ...]:
        return tuple(self._rows[i][i] for i in range(min(self.shape)))

    def flat(self) -> tuple[GaussianRational, ...]:
        """Row-major vectorization."""
        return tuple(x for r in self._rows for x in r)

    def inverse(self) -> "ExactMatrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("only square matrices are invertible")
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self._rows)]
        reduced, pivots = rref(aug, n + n)
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return ExactMatrix([[row.get(n + j, ZERO) for j in range(n)] for row in reduced[:n]])

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


def _dot(a, b) -> GaussianRational:
    acc = ZERO
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


# -- elimination ----------------------------------------------------------------


def _sparse_rows(m) -> list[dict[int, GaussianRational]]:
    if isinstance(m, ExactMatrix):
        m = m.rows
    out = []
    for r in m:
        if isinstance(r, dict):
            out.append({c: as_gr(v) for c, v in r.items() if v})
        else:
            out.append({c: as_gr(v) for c, v in enumerate(r) if v})
    return out


def rref(m, ncols: int | None = None) -> tuple[list[dict[int, GaussianRational]], list[int]]:
    """Reduced row echelon form.

    ``m`` is an ``ExactMatrix``, a list of dense rows, or a list of sparse
    ``{column: value}`` dicts. Returns the nonzero reduced rows as sparse
    dicts, sorted by pivot column, and the list of pivot columns.
    """
    pivots: dict[int, dict[int, GaussianRational]] = {}
    for row in _sparse_rows(m):
        r = row
        hits = [c for c in r if c in pivots]
        for c in hits:
            factor = r.get(c)
            if not factor:
                continue
            for cc, v in pivots[c].items():
                nv = r.get(cc, ZERO) - factor * v
                if nv:
                    r[cc] = nv
                else:
                    r.pop(cc, None)
        if not r:
            continue
        p = min(r)
        inv = r[p].inverse()
        r = {c: v * inv for c, v in r.items()}
        for prow in pivots.values():
            factor = prow.get(p)
            if factor:
                for cc, v in r.items():
                    nv = prow.get(cc, ZERO) - factor * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[p] = r
    order = sorted(pivots)
    return [pivots[p] for p in order], order


def _ncols(m, ncols):
    if ncols is not None:
        return ncols
    if isinstance(m, ExactMatrix):
        return m.ncols
    rows = list(m)
    if rows and not any(isinstance(r, dict) for r in rows):
        return len(rows[0])
    raise ValueError("ncols is required for sparse or list input")


def rank(m, ncols: int | None = None) -> int:
    """Exact rank via Gaussian elimination."""
    return len(rref(m, ncols)[1])


def kernel_basis(m, ncols: int | None = None) -> list[tuple[GaussianRational, ...]]:
    """Basis of the right null space ``{v : m v = 0}``.

    One vector per free column (ascending); each has a 1 in its own free
    coordinate, 0 in the other free coordinates, and the pivot coordinates
    follow from the reduced echelon form.
    """
    n = _ncols(m, ncols)
    reduced, pivots = rref(m, n)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [ZERO] * n
        v[free] = ONE
        for p, row in zip(pivots, reduced):
            c = row.get(free)
            if c:
                v[p] = -c
        basis.append(tuple(v))
    return basis


def solve(m, b: Sequence, ncols: int | None = None):
    """A particular solution of ``m x = b`` (free variables set to 0).

    Returns ``None`` when the system is inconsistent.
    """
    n = _ncols(m, ncols)
    rows = _sparse_rows(m)
    if len(rows) != len(b):
        raise ValueError("right-hand side length does not match the number of rows")
    for r, bi in zip(rows, b):
        bi = as_gr(bi)
        if bi:
            r[n] = bi
    reduced, pivots = rref(rows, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [ZERO] * n
    for p, row in zip(pivots, reduced):
        x[p] = row.get(n, ZERO)
    return tuple(x)
