"""Small divisors, condition A, normal-form shape fits and first integrals.

All decisions are exact. Real logarithms only appear in the condition-omega
partial sums, which are evaluated with ``decimal`` at a caller-chosen
precision.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from functools import lru_cache
from math import comb, lcm
from typing import NamedTuple, Sequence

import numpy as np
from gmpy2 import mpq

from .algebra import ExactMatrix, GaussianRational, as_gr, kernel_basis, rref
from .normalform import _values
from .polyvec import ScalarPoly, VectorField, monomials

__all__ = [
    "BudgetExceeded",
    "OmegaRecord",
    "OmegaReport",
    "check_omega",
    "check_condition_A",
    "ShapeFit",
    "fit_nf_shape",
    "fit_nf_shape_candidates",
    "IntegralBasis",
    "common_linear_integrals",
    "Proportionality",
    "constant_proportionality",
]

DEFAULT_BUDGET = 10**7
DEFAULT_THRESHOLD = Decimal(-50)


class BudgetExceeded(RuntimeError):
    """The lattice enumeration would visit more points than allowed."""


# -- condition omega ------------------------------------------------------------


@dataclass(frozen=True)
class OmegaRecord:
    k: int
    omega_sq: mpq | None  # exact |divisor|**2; None when the search set has no admissible q
    minimizer: tuple | None
    component: int | None = None  # shifted variant only

    def omega(self, precision: int = 50) -> Decimal | None:
        if self.omega_sq is None:
            return None
        with localcontext(Context(prec=precision)):
            return (Decimal(int(self.omega_sq.numerator)) / Decimal(int(self.omega_sq.denominator))).sqrt()


@dataclass(frozen=True)
class OmegaReport:
    eigenvalues: tuple
    variant: str
    strict_positive: bool
    k_max: int
    precision: int
    threshold: Decimal
    records: tuple
    partial_sums: tuple
    verdict: str  # holds-at-horizon | violated | indeterminate

    def omega_sq(self, k: int):
        return self.records[k - 1].omega_sq


def _stack(s: int, n: int) -> np.ndarray:
    # compositions of s into n parts, rows in descending lexicographic order
    if n == 1:
        return np.array([[s]], dtype=np.int64)
    blocks = []
    for t in range(s, -1, -1):
        rest = _compositions(s - t, n - 1)
        blocks.append(np.hstack([np.full((len(rest), 1), t, dtype=np.int64), rest]))
    return np.vstack(blocks)


_compositions = lru_cache(maxsize=None)(_stack)


def _shell(s: int, sizes: tuple, positive: bool) -> np.ndarray:
    """Group-sum vectors of total ``s``; with ``positive`` group ``g`` holds at least ``sizes[g]``."""
    ng = len(sizes)
    if positive:
        base = sum(sizes)
        if s < base:
            return np.zeros((0, ng), dtype=np.int64)
        return _stack(s - base, ng) + np.array(sizes, dtype=np.int64)
    return _stack(s, ng)


def _shell_size(s: int, sizes: tuple, positive: bool) -> int:
    ng = len(sizes)
    if positive:
        s -= sum(sizes)
        if s < 0:
            return 0
    return comb(s + ng - 1, ng - 1)


def _shell_min(s, sizes, positive, re_int, im_int, shifted, dtype):
    shell = _shell(s, sizes, positive)
    if not len(shell):
        return None
    G = shell.astype(object) if dtype is object else shell
    X = G @ re_int
    Y = G @ im_int
    if shifted:
        X = X[:, None] - re_int[None, :]
        Y = Y[:, None] - im_int[None, :]
    norm = (X * X + Y * Y).reshape(-1)
    idx = np.flatnonzero(norm != 0)
    if not len(idx):
        return None
    best = idx[int(np.argmin(norm[idx]))]
    if shifted:
        row, g = divmod(int(best), len(sizes))
    else:
        row, g = int(best), None
    return int(norm[best]), tuple(int(e) for e in shell[row]), g


def _representative(group_sums, groups, n, positive):
    # lexicographically largest q with the given sums over equal-eigenvalue groups
    q = [0] * n
    for total, members in zip(group_sums, groups):
        if positive:
            for i in members[1:]:
                q[i] = 1
            q[members[0]] = total - (len(members) - 1)
        else:
            q[members[0]] = total
    return tuple(q)


def check_omega(
    a: Sequence,
    k_max: int = 8,
    variant: str = "paper",
    *,
    strict_positive: bool = False,
    precision: int = 50,
    threshold: Decimal | int = DEFAULT_THRESHOLD,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> OmegaReport:
    """Small divisors ``omega_k`` and the partial sums of ``sum 2^-k ln omega_k``.

    ``omega_k`` is the minimum of ``|(q, a)|`` (variant ``"paper"``) or of
    ``|(q, a) - a_j|`` over ``j`` (variant ``"shifted"``), taken over
    ``q >= 0`` with ``1 <= |q| < 2**k`` and a nonzero divisor. With
    ``strict_positive`` every ``q_i`` must be at least 1. Ties go to the
    lowest degree, then to the largest leading exponents.

    Since ``(q, a)`` only depends on the sums of ``q`` over groups of equal
    eigenvalues, the lattice is enumerated over those group sums; the
    reported minimizer is the lexicographically largest ``q`` realizing
    them, which is the one a full enumeration would report first.

    A finite horizon cannot prove convergence: the verdict is
    ``"holds-at-horizon"`` when every partial sum stays at or above
    ``threshold``, ``"violated"`` otherwise, and ``"indeterminate"`` when
    no admissible divisor exists at any ``k``.
    """
    if variant not in ("paper", "shifted"):
        raise ValueError(f"unknown variant {variant!r}")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    a = _values(a)
    n = len(a)
    if not n:
        raise ValueError("empty eigenvalue vector")
    if not any(a):
        raise ValueError("at least one eigenvalue must be nonzero")
    distinct: list = []
    groups: list = []
    for i, x in enumerate(a):
        if x in distinct:
            groups[distinct.index(x)].append(i)
        else:
            distinct.append(x)
            groups.append([i])
    sizes = tuple(len(g) for g in groups)
    top = 2**k_max - 1
    points = sum(_shell_size(s, sizes, strict_positive) for s in range(1, top + 1))
    if points > budget:
        raise BudgetExceeded(f"omega enumeration needs {points} lattice points, budget is {budget}")

    L = lcm(*(int(x.re.denominator) for x in distinct), *(int(x.im.denominator) for x in distinct))
    re_l = [int(x.re * L) for x in distinct]
    im_l = [int(x.im * L) for x in distinct]
    bound = (top + 1) * max(max(map(abs, re_l)), max(map(abs, im_l)), 1)
    dtype = np.int64 if 2 * bound * bound < 2**62 else object
    re_int = np.array(re_l, dtype=dtype)
    im_int = np.array(im_l, dtype=dtype)

    def work(s):
        return _shell_min(s, sizes, strict_positive, re_int, im_int, variant == "shifted", dtype)

    shells = range(1, top + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, shells))
    else:
        results = [work(s) for s in shells]

    records = []
    best = None
    L2 = mpq(L * L)
    for k in range(1, k_max + 1):
        for s in range(2 ** (k - 1), 2**k):
            r = results[s - 1]
            if r is not None and (best is None or r[0] < best[0]):
                best = r
        if best is None:
            records.append(OmegaRecord(k, None, None, None))
        else:
            q = _representative(best[1], groups, n, strict_positive)
            j = None if best[2] is None else groups[best[2]][0]
            records.append(OmegaRecord(k, mpq(best[0]) / L2, q, j))

    threshold = Decimal(threshold)
    sums = []
    with localcontext(Context(prec=precision + 10)):
        acc = Decimal(0)
        for rec in records:
            if rec.omega_sq is not None:
                ln_sq = Decimal(int(rec.omega_sq.numerator)).ln() - Decimal(int(rec.omega_sq.denominator)).ln()
                acc += ln_sq / 2 / Decimal(2) ** rec.k
            sums.append(acc)
    out = Context(prec=precision)
    sums = tuple(out.plus(x) for x in sums)

    if all(r.omega_sq is None for r in records):
        verdict = "indeterminate"
    elif min(sums) < threshold:
        verdict = "violated"
    else:
        verdict = "holds-at-horizon"
    return OmegaReport(a, variant, strict_positive, k_max, precision, threshold, tuple(records), sums, verdict)


# -- linear fits of scalar-times-linear shapes ----------------------------------------


def _scalar_times_linear(n: int, r: tuple, B: ExactMatrix) -> dict:
    """Coefficients of ``u^r * (B u)`` keyed by ``(component, exponents)``."""
    out = {}
    for j in range(n):
        for i in range(n):
            c = B[j, i]
            if c:
                q = tuple(x + (1 if k == i else 0) for k, x in enumerate(r))
                key = (j, q)
                out[key] = out[key] + c if key in out else c
    return {k: v for k, v in out.items() if v}


def _fit_degree(columns: list[dict], target: dict):
    """Least-pivot exact solution of ``sum_c x_c * columns[c] == target``.

    Returns ``(solution or None, nullity)``; free unknowns are set to zero.
    """
    keys = sorted({k for col in columns for k in col} | set(target))
    index = {k: i for i, k in enumerate(keys)}
    rows = [dict() for _ in keys]
    for c, col in enumerate(columns):
        for k, v in col.items():
            rows[index[k]][c] = v
    m = len(columns)
    for k, v in target.items():
        rows[index[k]][m] = v
    reduced, pivots = rref(rows, m + 1)
    if pivots and pivots[-1] == m:
        return None, None
    x = [as_gr(0)] * m
    for p, row in zip(pivots, reduced):
        x[p] = row.get(m, as_gr(0))
    return x, m - len(pivots)


def _shape_field(n: int, N: int, A: ExactMatrix, pairs) -> VectorField:
    """``A u + sum_s s(u) * (B u)`` for ``pairs`` of ``(ScalarPoly, B)``, up to degree ``N``."""
    terms: dict = {}
    for s, B in pairs:
        for r, c in s.terms.items():
            if sum(r) + 1 > N:
                continue
            for key, v in _scalar_times_linear(n, r, B).items():
                w = c * v
                terms[key] = terms[key] + w if key in terms else w
    return VectorField._raw(n, N, A, {k: v for k, v in terms.items() if v})


def check_condition_A(fhat: VectorField) -> ScalarPoly | None:
    """The scalar series ``alpha`` with ``fhat = A u + alpha(u) A u``, if any.

    Solved degree by degree; ``alpha`` is returned with truncation
    ``N - 1`` (its degree-``N-1`` part is what degree ``N`` of the field
    determines). ``None`` when some degree is inconsistent.
    """
    A = fhat.A
    if A.is_zero():
        raise ValueError("condition A needs a nonzero linear part")
    n, N = fhat.n, fhat.truncation
    alpha = {}
    for d in range(2, N + 1):
        mons = monomials(n, d - 1)
        cols = [_scalar_times_linear(n, r, A) for r in mons]
        target = {k: c for k, c in fhat.terms.items() if sum(k[1]) == d}
        x, _ = _fit_degree(cols, target)
        if x is None:
            return None
        alpha.update({r: c for r, c in zip(mons, x) if c})
    return ScalarPoly._raw(n, N - 1, alpha)


@dataclass(frozen=True)
class ShapeFit:
    """``h = A u + alpha(u) A u + mu(u) M u`` with its (zero) residual."""

    A: ExactMatrix
    M: ExactMatrix
    alpha: ScalarPoly
    mu: ScalarPoly
    residual: VectorField
    nonunique_degrees: tuple = ()

    def reconstruct(self) -> VectorField:
        return _shape_field(self.residual.n, self.residual.truncation, self.A, [(self.alpha, self.A), (self.mu, self.M)])


def fit_nf_shape(h: VectorField, M: ExactMatrix) -> ShapeFit | None:
    """Fit ``h`` to ``A u + alpha A u + mu M u``; ``None`` when no fit exists.

    When ``A u`` and ``M u`` images overlap at some degree the solution with
    free unknowns set to zero is taken and the degree is recorded in
    ``nonunique_degrees``.
    """
    M = M if isinstance(M, ExactMatrix) else ExactMatrix(M)
    A = h.A
    if M.shape != A.shape:
        raise ValueError("M must have the shape of the linear part")
    if constant_proportionality(M, A) is not None:
        raise ValueError("M is proportional to the linear part A")
    n, N = h.n, h.truncation
    alpha, mu, nonunique = {}, {}, []
    for d in range(2, N + 1):
        mons = monomials(n, d - 1)
        cols = [_scalar_times_linear(n, r, A) for r in mons] + [_scalar_times_linear(n, r, M) for r in mons]
        target = {k: c for k, c in h.terms.items() if sum(k[1]) == d}
        x, nullity = _fit_degree(cols, target)
        if x is None:
            return None
        if nullity:
            nonunique.append(d)
        m = len(mons)
        alpha.update({r: c for r, c in zip(mons, x[:m]) if c})
        mu.update({r: c for r, c in zip(mons, x[m:]) if c})
    fit = ShapeFit(A, M, ScalarPoly._raw(n, N - 1, alpha), ScalarPoly._raw(n, N - 1, mu), VectorField.zero(n, N), tuple(nonunique))
    residual = h - fit.reconstruct()
    return ShapeFit(A, M, fit.alpha, fit.mu, residual, fit.nonunique_degrees)


def fit_nf_shape_candidates(h: VectorField, candidates: Sequence[ExactMatrix] | None = None) -> ShapeFit | None:
    """First exact shape fit over ``candidates`` (default: the identity)."""
    if candidates is None:
        candidates = [ExactMatrix.identity(h.n)]
    for M in candidates:
        if constant_proportionality(M, h.A) is not None:
            continue
        fit = fit_nf_shape(h, M)
        if fit is not None:
            return fit
    return None


# -- common first integrals of two linear flows ---------------------------------


@dataclass(frozen=True)
class IntegralBasis:
    """Polynomials ``kappa`` (degrees ``1..N``) killed by both ``(Au).grad`` and ``(Mu).grad``."""

    truncation: int
    basis: tuple

    def is_empty(self) -> bool:
        return not self.basis


def common_linear_integrals(a: Sequence, M: ExactMatrix, N: int) -> IntegralBasis:
    """Common polynomial constants of motion of ``u' = diag(a) u`` and ``u' = M u``.

    Both derivations preserve degree, so the kernel is computed degree by
    degree; an empty basis means there is no common polynomial integral with
    zero constant term up to degree ``N``.
    """
    if N < 1:
        raise ValueError("degree bound must be at least 1")
    a = _values(a)
    n = len(a)
    M = M if isinstance(M, ExactMatrix) else ExactMatrix(M)
    if M.shape != (n, n):
        raise ValueError("M must be n x n")
    basis = []
    for d in range(1, N + 1):
        mons = monomials(n, d)
        index = {q: c for c, q in enumerate(mons)}
        rows: dict = {}
        for c, q in enumerate(mons):
            lam = sum((x * e for x, e in zip(a, q) if e), as_gr(0))
            if lam:
                rows.setdefault(("A", q), {})[c] = lam
            for i in range(n):
                if not q[i]:
                    continue
                for j in range(n):
                    mij = M[i, j]
                    if mij:
                        qq = tuple(e - (k == i) + (k == j) for k, e in enumerate(q))
                        row = rows.setdefault(("M", qq), {})
                        v = row.get(c, as_gr(0)) + mij * q[i]
                        if v:
                            row[c] = v
                        else:
                            row.pop(c, None)
        ordered = [rows[k] for k in sorted(rows, key=lambda k: (k[0], index.get(k[1], -1), k[1]))]
        for v in kernel_basis(ordered, len(mons)):
            basis.append(ScalarPoly._raw(n, N, {q: c for q, c in zip(mons, v) if c}))
    return IntegralBasis(N, tuple(basis))


# -- proportionality --------------------------------------------------------------


class Proportionality(NamedTuple):
    factor: GaussianRational
    ambiguous: bool = False  # both inputs zero: any factor works


def _entries(X) -> dict:
    if isinstance(X, ExactMatrix):
        return {("A", i, j): x for i, r in enumerate(X.rows) for j, x in enumerate(r) if x}
    if isinstance(X, VectorField):
        out = {("A", i, j): x for i, r in enumerate(X.A.rows) for j, x in enumerate(r) if x}
        out.update({("F", j, q): c for (j, q), c in X.terms.items()})
        return out
    raise TypeError("expected an ExactMatrix or a VectorField")


def constant_proportionality(X, Y) -> Proportionality | None:
    """``lam`` with ``X == lam * Y`` exactly, or ``None``.

    Fields are compared up to the smaller of their truncations.
    """
    if type(X) is not type(Y):
        raise TypeError("inputs must be of the same kind")
    if isinstance(X, ExactMatrix):
        if X.shape != Y.shape:
            raise ValueError("shape mismatch")
    else:
        if X.n != Y.n:
            raise ValueError("dimension mismatch")
        N = min(X.truncation, Y.truncation)
        X, Y = X.truncate(N), Y.truncate(N)
    ex, ey = _entries(X), _entries(Y)
    if not ey:
        return Proportionality(as_gr(0), True) if not ex else None
    if not ex:
        return Proportionality(as_gr(0))
    if set(ex) - set(ey):
        return None
    key = min(ey, key=_entry_key)
    lam = ex.get(key, as_gr(0)) / ey[key]
    if not lam:
        return None
    for k, y in ey.items():
        if ex.get(k, as_gr(0)) != lam * y:
            return None
    return Proportionality(lam)


def _entry_key(k):
    kind, j, rest = k
    return (kind, j, rest if isinstance(rest, int) else (sum(rest), tuple(-e for e in rest)))
