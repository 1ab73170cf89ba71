"""Truncated polynomial scalars and vector fields over the Gaussian rationals.

Monomials are exponent tuples (``MultiIndex``). Terms are kept in the
graded-lexicographic order given by :func:`grlex_key`: lower total degree
first, and within a degree ``u1**2 < u1*u2 < u2**2`` (larger leading
exponents first). Every object carries an explicit truncation degree ``N``
and nothing above ``N`` is ever stored, so "zero" always means "zero up to
degree N".

Components and variables are 0-based in the Python API (``u[0]`` is the
first coordinate).
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

from .algebra import ONE, ZERO, ExactMatrix, GaussianRational, as_gr

MultiIndex = tuple  # tuple[int, ...] of nonnegative exponents

__all__ = [
    "MultiIndex",
    "grlex_key",
    "monomials",
    "unit",
    "ScalarPoly",
    "VectorField",
    "lie_bracket",
    "evaluate",
    "homogeneous_part",
]


def grlex_key(q: MultiIndex):
    return (sum(q), tuple(-e for e in q))


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if k == i else 0 for k in range(n))


def monomials(n: int, d: int) -> list[MultiIndex]:
    """All exponent vectors of total degree ``d`` in ``n`` variables, grlex order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    # stars and bars; bar positions in reverse give descending leading exponents
    for bars in combinations(range(d + n - 1), n - 1):
        prev = -1
        q = []
        for b in bars:
            q.append(b - prev - 1)
            prev = b
        q.append(d + n - 2 - prev)
        out.append(tuple(q))
    out.sort(key=grlex_key)
    return out


# -- raw polynomial dicts {MultiIndex: GaussianRational} ----------------------


def poly_add(p: Mapping, r: Mapping, sign: int = 1) -> dict:
    out = dict(p)
    for q, c in r.items():
        v = out.get(q)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v:
            out[q] = v
        else:
            out.pop(q, None)
    return out


def poly_scale(p: Mapping, c) -> dict:
    c = as_gr(c)
    if not c:
        return {}
    return {q: c * v for q, v in p.items()}


def poly_mul(p: Mapping, r: Mapping, N: int) -> dict:
    """Product truncated at total degree ``N``."""
    out: dict = {}
    if not p or not r:
        return out
    rl = [(qb, cb, sum(qb)) for qb, cb in r.items()]
    for qa, ca in p.items():
        room = N - sum(qa)
        if room < 0:
            continue
        for qb, cb, db in rl:
            if db > room:
                continue
            q = tuple([x + y for x, y in zip(qa, qb)])
            v = ca * cb
            prev = out.get(q)
            out[q] = v if prev is None else prev + v
    return {q: c for q, c in out.items() if c}


def poly_deriv(p: Mapping, i: int) -> dict:
    out = {}
    for q, c in p.items():
        e = q[i]
        if e:
            qq = q[:i] + (e - 1,) + q[i + 1 :]
            out[qq] = c * e
    return out


def poly_truncate(p: Mapping, N: int) -> dict:
    return {q: c for q, c in p.items() if sum(q) <= N}


def poly_eval(p: Mapping, point: Sequence[GaussianRational]) -> GaussianRational:
    acc = ZERO
    for q, c in p.items():
        term = c
        for x, e in zip(point, q):
            if e:
                term = term * x**e
        acc = acc + term
    return acc


class PowerCache:
    """Truncated products ``S^q`` of a fixed list of substitution polynomials."""

    def __init__(self, subs: Sequence[Mapping], N: int, dim: int | None = None):
        self.subs = [dict(s) for s in subs]
        self.N = N
        if dim is None:
            dim = len(subs)
        self._cache: dict = {tuple([0] * len(subs)): {tuple([0] * dim): ONE}}

    def __call__(self, q: MultiIndex) -> dict:
        hit = self._cache.get(q)
        if hit is not None:
            return hit
        i = next(k for k, e in enumerate(q) if e)
        rest = q[:i] + (q[i] - 1,) + q[i + 1 :]
        val = poly_mul(self(rest), self.subs[i], self.N)
        self._cache[q] = val
        return val

    def substitute(self, p: Mapping) -> dict:
        out: dict = {}
        for q, c in p.items():
            for qq, v in self(q).items():
                w = c * v
                prev = out.get(qq)
                out[qq] = w if prev is None else prev + w
        return {q: c for q, c in out.items() if c}


# -- scalar polynomials ---------------------------------------------------------


def _check_exponents(q, n):
    q = tuple(int(e) for e in q)
    if len(q) != n:
        raise ValueError(f"exponent vector {q} has length {len(q)}, expected {n}")
    if any(e < 0 for e in q):
        raise ValueError(f"negative exponent in {q}")
    return q


def _fmt_monomial(q: MultiIndex) -> str:
    parts = []
    for i, e in enumerate(q):
        if e == 1:
            parts.append(f"u{i + 1}")
        elif e:
            parts.append(f"u{i + 1}^{e}")
    return "*".join(parts)


def _fmt_terms(items) -> str:
    out = []
    for q, c in items:
        mono = _fmt_monomial(q)
        coeff = str(c)
        if not mono:
            out.append(coeff)
        elif c == 1:
            out.append(mono)
        elif c == -1:
            out.append("-" + mono)
        else:
            if not c.is_real() and c.re:
                coeff = f"({coeff})"
            out.append(f"{coeff}*{mono}")
    return " + ".join(out).replace("+ -", "- ") if out else "0"


class ScalarPoly:
    """Scalar polynomial in ``n`` variables, truncated at degree ``truncation``."""

    __slots__ = ("n", "truncation", "terms")

    def __init__(self, n: int, truncation: int, terms: Mapping | None = None):
        self.n = int(n)
        self.truncation = int(truncation)
        clean = {}
        for q, c in (terms or {}).items():
            q = _check_exponents(q, self.n)
            c = as_gr(c)
            if not c:
                continue
            if sum(q) > self.truncation:
                raise ValueError(f"term of degree {sum(q)} exceeds truncation {self.truncation}")
            clean[q] = clean[q] + c if q in clean else c
        self.terms = {q: clean[q] for q in sorted(clean, key=grlex_key) if clean[q]}

    @classmethod
    def _raw(cls, n, N, terms) -> "ScalarPoly":
        obj = object.__new__(cls)
        obj.n, obj.truncation = n, N
        obj.terms = {q: terms[q] for q in sorted(terms, key=grlex_key) if sum(q) <= N and terms[q]}
        return obj

    @classmethod
    def variable(cls, n: int, i: int, truncation: int) -> "ScalarPoly":
        return cls._raw(n, truncation, {unit(n, i): ONE})

    @classmethod
    def constant(cls, n: int, c, truncation: int) -> "ScalarPoly":
        return cls._raw(n, truncation, {tuple([0] * n): as_gr(c)})

    def __eq__(self, other):
        if not isinstance(other, ScalarPoly):
            return NotImplemented
        return (self.n, self.truncation, self.terms) == (other.n, other.truncation, other.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(q) for q in self.terms), default=-1)

    def homogeneous(self, d: int) -> "ScalarPoly":
        return ScalarPoly._raw(self.n, self.truncation, {q: c for q, c in self.terms.items() if sum(q) == d})

    def truncate(self, N: int) -> "ScalarPoly":
        return ScalarPoly._raw(self.n, min(N, self.truncation), self.terms)

    def _coerce(self, other):
        if isinstance(other, ScalarPoly):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            return other
        return ScalarPoly.constant(self.n, other, self.truncation)

    def __add__(self, other):
        other = self._coerce(other)
        return ScalarPoly._raw(self.n, min(self.truncation, other.truncation), poly_add(self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ScalarPoly._raw(self.n, min(self.truncation, other.truncation), poly_add(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ScalarPoly._raw(self.n, self.truncation, {q: -c for q, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, ScalarPoly):
            return ScalarPoly._raw(self.n, self.truncation, poly_scale(self.terms, other))
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        N = min(self.truncation, other.truncation)
        return ScalarPoly._raw(self.n, N, poly_mul(self.terms, other.terms, N))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = ScalarPoly.constant(self.n, 1, self.truncation)
        for _ in range(k):
            result = result * self
        return result

    def derivative(self, i: int) -> "ScalarPoly":
        return ScalarPoly._raw(self.n, self.truncation, poly_deriv(self.terms, i))

    def evaluate(self, point: Sequence) -> GaussianRational:
        point = [as_gr(x) for x in point]
        if len(point) != self.n:
            raise ValueError("point dimension mismatch")
        return poly_eval(self.terms, point)

    def compose(self, polys: Sequence["ScalarPoly"], truncation: int) -> "ScalarPoly":
        """Substitute ``polys[i]`` for variable ``i``."""
        if len(polys) != self.n:
            raise ValueError("need one substitution per variable")
        m = polys[0].n
        cache = PowerCache([p.terms for p in polys], truncation, m)
        return ScalarPoly._raw(m, truncation, cache.substitute(self.terms))

    def __repr__(self):
        return f"ScalarPoly(n={self.n}, N={self.truncation}: {_fmt_terms(self.terms.items())})"


# -- vector fields --------------------------------------------------------------


def _term_key(item):
    (j, q), _ = item
    return (j, grlex_key(q))


class VectorField:
    """``u' = A u + F(u)`` with ``F`` a polynomial of degrees ``2..N``.

    ``terms`` maps ``(component, exponents)`` to a nonzero coefficient, for
    nonlinear monomials only; the linear part lives in ``A``.
    """

    __slots__ = ("n", "truncation", "A", "terms", "_comps")

    def __init__(self, n: int, truncation: int, A: ExactMatrix | None = None, terms: Mapping | None = None):
        self.n = int(n)
        self.truncation = int(truncation)
        if self.truncation < 1:
            raise ValueError("truncation degree must be at least 1")
        if A is None:
            A = ExactMatrix.zeros(self.n)
        elif not isinstance(A, ExactMatrix):
            A = ExactMatrix(A)
        if A.shape != (self.n, self.n):
            raise ValueError(f"linear part has shape {A.shape}, expected {(self.n, self.n)}")
        self.A = A
        clean: dict = {}
        for (j, q), c in (terms or {}).items():
            j = int(j)
            if not 0 <= j < self.n:
                raise ValueError(f"component {j} out of range")
            q = _check_exponents(q, self.n)
            d = sum(q)
            if d < 2:
                raise ValueError(f"term {q} in component {j} has degree {d}; use A for linear terms")
            if d > self.truncation:
                raise ValueError(f"term of degree {d} exceeds truncation {self.truncation}")
            c = as_gr(c)
            key = (j, q)
            clean[key] = clean[key] + c if key in clean else c
        self.terms = dict(sorted(((k, v) for k, v in clean.items() if v), key=_term_key))
        self._comps = None

    @classmethod
    def _raw(cls, n, N, A, terms) -> "VectorField":
        obj = object.__new__(cls)
        obj.n, obj.truncation, obj.A, obj._comps = n, N, A, None
        obj.terms = dict(sorted(((k, v) for k, v in terms.items() if v), key=_term_key))
        return obj

    @classmethod
    def zero(cls, n: int, truncation: int) -> "VectorField":
        return cls._raw(n, truncation, ExactMatrix.zeros(n), {})

    @classmethod
    def linear(cls, A, truncation: int) -> "VectorField":
        A = A if isinstance(A, ExactMatrix) else ExactMatrix(A)
        return cls._raw(A.nrows, truncation, A, {})

    @classmethod
    def from_components(cls, n: int, truncation: int, comps: Sequence[Mapping]) -> "VectorField":
        """Build from ``n`` polynomial dicts; terms above ``truncation`` are dropped."""
        if len(comps) != n:
            raise ValueError("need one polynomial per component")
        rows = [[ZERO] * n for _ in range(n)]
        terms = {}
        for j, p in enumerate(comps):
            for q, c in p.items():
                d = sum(q)
                if not c or d > truncation:
                    continue
                if d == 0:
                    raise ValueError("vector fields must vanish at the origin")
                if d == 1:
                    rows[j][q.index(1)] = as_gr(c)
                else:
                    terms[(j, q)] = as_gr(c)
        return cls._raw(n, truncation, ExactMatrix(rows), terms)

    def components(self) -> list[dict]:
        """Per-component polynomial dicts, linear part included."""
        if self._comps is None:
            comps = [{} for _ in range(self.n)]
            for j, row in enumerate(self.A.rows):
                for i, c in enumerate(row):
                    if c:
                        comps[j][unit(self.n, i)] = c
            for (j, q), c in self.terms.items():
                comps[j][q] = c
            self._comps = comps
        return [dict(c) for c in self._comps]

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self.n, self.truncation, self.A, self.terms) == (other.n, other.truncation, other.A, other.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms and self.A.is_zero()

    def degrees(self) -> list[int]:
        ds = sorted({sum(q) for _, q in self.terms})
        return ([1] if not self.A.is_zero() else []) + ds

    def linear_part(self) -> "VectorField":
        return VectorField._raw(self.n, self.truncation, self.A, {})

    def nonlinear_part(self) -> "VectorField":
        return VectorField._raw(self.n, self.truncation, ExactMatrix.zeros(self.n), self.terms)

    def truncate(self, N: int) -> "VectorField":
        N = min(N, self.truncation)
        return VectorField._raw(self.n, N, self.A, {k: c for k, c in self.terms.items() if sum(k[1]) <= N})

    def _check(self, other):
        if not isinstance(other, VectorField):
            raise TypeError("expected a VectorField")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        N = min(self.truncation, other.truncation)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return VectorField._raw(self.n, N, self.A + other.A, {k: c for k, c in terms.items() if sum(k[1]) <= N})

    def __neg__(self):
        return VectorField._raw(self.n, self.truncation, -self.A, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VectorField":
        c = as_gr(c)
        return VectorField._raw(self.n, self.truncation, self.A.scale(c), {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, ScalarPoly):
            return self.times_scalar(c)
        return self.scale(c)

    def times_scalar(self, s: ScalarPoly) -> "VectorField":
        """Pointwise product ``s(u) * f(u)``; truncation ``min`` of the two."""
        if s.n != self.n:
            raise ValueError("dimension mismatch")
        N = min(self.truncation, s.truncation)
        return VectorField.from_components(self.n, N, [poly_mul(s.terms, p, N) for p in self.components()])

    def __repr__(self):
        comps = self.components()
        body = "; ".join(f"u{j + 1}' = {_fmt_terms(sorted(p.items(), key=lambda t: grlex_key(t[0])))}" for j, p in enumerate(comps))
        return f"VectorField(n={self.n}, N={self.truncation}: {body})"


def lie_bracket(f: VectorField, g: VectorField) -> VectorField:
    """``{f, g}_k = (f . grad) g_k - (g . grad) f_k``.

    The result is truncated at ``min(f.truncation, g.truncation)``: beyond
    that degree the unknown tails of the inputs would contribute.
    """
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")
    n = f.n
    N = min(f.truncation, g.truncation)
    cf, cg = f.components(), g.components()
    out = []
    for k in range(n):
        acc: dict = {}
        for i in range(n):
            if cf[i]:
                acc = poly_add(acc, poly_mul(cf[i], poly_deriv(cg[k], i), N))
            if cg[i]:
                acc = poly_add(acc, poly_mul(cg[i], poly_deriv(cf[k], i), N), -1)
        out.append(acc)
    return VectorField.from_components(n, N, out)


def evaluate(f: VectorField, point: Sequence) -> tuple[GaussianRational, ...]:
    """Exact value of the truncated polynomial map at ``point``."""
    point = [as_gr(x) for x in point]
    if len(point) != f.n:
        raise ValueError(f"point has dimension {len(point)}, field has {f.n}")
    return tuple(poly_eval(p, point) for p in f.components())


def homogeneous_part(f: VectorField, d: int) -> VectorField:
    """Degree-``d`` slice of ``f`` (the linear part when ``d == 1``)."""
    if not 1 <= d <= f.truncation:
        raise ValueError(f"degree {d} outside 1..{f.truncation}")
    if d == 1:
        return f.linear_part()
    return VectorField._raw(f.n, f.truncation, ExactMatrix.zeros(f.n), {k: c for k, c in f.terms.items() if sum(k[1]) == d})
