"""Homological operator, resonances and degree-by-degree normalization.

The engine works in coordinates where the linear part is ``diag(a)``. A
field with a non-diagonal linear part is first conjugated by an exact
change of basis ``u = P v`` supplied through :class:`EigenData`.

At each degree ``d`` the nonresonant monomials of the degree-``d`` part
are removed by the near-identity change ``u = v + phi(v)``, where ``phi``
solves ``A(phi) = F_d - R_d`` and ``R_d`` keeps the resonant monomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import ONE, ZERO, ExactMatrix, GaussianRational, I, as_gr
from .polyvec import (
    PowerCache,
    VectorField,
    homogeneous_part,
    poly_add,
    poly_deriv,
    poly_mul,
    unit,
)

__all__ = [
    "EigenData",
    "NormalizationResult",
    "homological_apply",
    "is_resonant",
    "solve_homological",
    "pushforward",
    "change_basis",
    "normalize",
    "replay",
    "block_rotation_matrix",
    "eigenbasis_for_block_rotation",
]


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues of the linear part and an optional diagonalizing basis.

    When ``P`` is given, ``P^-1 A P`` must equal ``diag(values)``; when it is
    absent the linear part must already be diagonal.
    """

    values: tuple
    P: ExactMatrix | None = None
    P_inv: ExactMatrix | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_gr(a) for a in self.values))
        if self.P is not None:
            P = self.P if isinstance(self.P, ExactMatrix) else ExactMatrix(self.P)
            if P.shape != (self.n, self.n):
                raise ValueError("change of basis has the wrong shape")
            object.__setattr__(self, "P", P)
            if self.P_inv is None:
                try:
                    object.__setattr__(self, "P_inv", P.inverse())
                except ZeroDivisionError:
                    raise ValueError("change of basis P is singular") from None

    @property
    def n(self) -> int:
        return len(self.values)

    def diagonal(self) -> ExactMatrix:
        return ExactMatrix.diag(self.values)

    def verify(self, A: ExactMatrix) -> None:
        """Raise ``ValueError`` unless this data diagonalizes ``A`` exactly."""
        if A.shape != (self.n, self.n):
            raise ValueError(f"linear part is {A.shape[0]}x{A.shape[1]}, eigen data has {self.n} values")
        D = A if self.P is None else self.P_inv @ A @ self.P
        if D != self.diagonal():
            what = "linear part is not diag(values)" if self.P is None else "P^-1 A P is not diag(values)"
            raise ValueError(f"eigen data inconsistent with the linear part: {what}")

    def to_eigen(self, f: VectorField) -> VectorField:
        """The field in eigencoordinates ``v`` with ``u = P v``."""
        if self.P is None:
            return f
        return change_basis(f, self.P, self.P_inv)

    def matrix_to_eigen(self, M: ExactMatrix) -> ExactMatrix:
        return M if self.P is None else self.P_inv @ M @ self.P

    @classmethod
    def from_matrix(cls, A: ExactMatrix) -> "EigenData":
        """Eigen data for a diagonal ``A`` or the block rotation ``[[0, I], [-I, 0]]``."""
        if A.is_diagonal():
            return cls(A.diagonal())
        n = A.nrows
        if n % 2 == 0 and A == block_rotation_matrix(n // 2):
            return eigenbasis_for_block_rotation(n // 2)
        raise ValueError("cannot infer eigen data for a non-diagonal linear part; supply values and P")


def _values(a) -> tuple:
    if isinstance(a, EigenData):
        return a.values
    return tuple(as_gr(x) for x in a)


def _dot(q, a) -> GaussianRational:
    acc = ZERO
    for e, x in zip(q, a):
        if e:
            acc = acc + x * e
    return acc


def is_resonant(q, j: int, a) -> bool:
    """True iff ``(q, a) == a_j``, i.e. ``u^q e_j`` lies in the kernel of the homological operator."""
    a = _values(a)
    return _dot(q, a) == a[j]


def homological_apply(a, h: VectorField) -> VectorField:
    """``{Au, h} = (Au).grad h - A h`` for ``A = diag(a)``.

    Acts on ``u^q e_j`` by multiplication with ``(q, a) - a_j``; this covers
    the linear part of ``h`` as well.
    """
    a = _values(a)
    if len(a) != h.n:
        raise ValueError(f"dimension mismatch: {len(a)} eigenvalues, field of dimension {h.n}")
    n = h.n
    rows = [[(a[i] - a[j]) * h.A[j, i] for i in range(n)] for j in range(n)]
    terms = {(j, q): (_dot(q, a) - a[j]) * c for (j, q), c in h.terms.items()}
    return VectorField._raw(n, h.truncation, ExactMatrix(rows), terms)


def solve_homological(a, F_d: VectorField) -> tuple[VectorField, VectorField]:
    """Split ``F_d = A(generator) + resonant_remainder``.

    Each nonresonant monomial with coefficient ``c`` contributes
    ``c / ((q, a) - a_j)`` to the generator; resonant monomials go to the
    remainder unchanged.
    """
    a = _values(a)
    if len(a) != F_d.n:
        raise ValueError(f"dimension mismatch: {len(a)} eigenvalues, field of dimension {F_d.n}")
    if not F_d.A.is_zero():
        raise ValueError("solve_homological expects a field without linear part")
    gen, rem = {}, {}
    for (j, q), c in F_d.terms.items():
        div = _dot(q, a) - a[j]
        if div:
            gen[(j, q)] = c / div
        else:
            rem[(j, q)] = c
    zero = ExactMatrix.zeros(F_d.n)
    return (
        VectorField._raw(F_d.n, F_d.truncation, zero, gen),
        VectorField._raw(F_d.n, F_d.truncation, zero, rem),
    )


def pushforward(f: VectorField, generator: VectorField, N: int | None = None) -> VectorField:
    """The field ``f`` written in coordinates ``v`` where ``u = v + generator(v)``.

    ``v' = (I + D generator(v))^-1 f(v + generator(v))``, with the inverse
    expanded as a terminating Neumann series. Output truncation is
    ``min(N, f.truncation)``. The linear part is unchanged.
    """
    if generator.n != f.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {generator.n}")
    if not generator.A.is_zero():
        raise ValueError("generator must have zero linear part")
    N = f.truncation if N is None else min(N, f.truncation)
    if not generator.terms:
        return f.truncate(N)
    n = f.n
    phi = generator.components()
    subs = [poly_add({unit(n, i): ONE}, phi[i]) for i in range(n)]
    cache = PowerCache(subs, N)
    W = [cache.substitute(p) for p in f.components()]
    jac = [[poly_deriv(phi[j], i) for i in range(n)] for j in range(n)]
    total, T = W, W
    while any(T):
        nxt = []
        for j in range(n):
            acc: dict = {}
            for i in range(n):
                if jac[j][i] and T[i]:
                    acc = poly_add(acc, poly_mul(jac[j][i], T[i], N), -1)
            nxt.append(acc)
        T = nxt
        total = [poly_add(x, y) for x, y in zip(total, T)]
    return VectorField.from_components(n, N, total)


def change_basis(f: VectorField, P: ExactMatrix, P_inv: ExactMatrix | None = None) -> VectorField:
    """``v' = P^-1 f(P v)``: the same system in coordinates ``u = P v``."""
    if P.shape != (f.n, f.n):
        raise ValueError("change of basis has the wrong shape")
    P_inv = P.inverse() if P_inv is None else P_inv
    n, N = f.n, f.truncation
    subs = [{unit(n, j): P[i, j] for j in range(n) if P[i, j]} for i in range(n)]
    cache = PowerCache(subs, N)
    W = [cache.substitute(p) for p in f.components()]
    out = []
    for k in range(n):
        acc: dict = {}
        for i in range(n):
            c = P_inv[k, i]
            if c and W[i]:
                acc = poly_add(acc, {q: c * v for q, v in W[i].items()})
        out.append(acc)
    return VectorField.from_components(n, N, out)


@dataclass(frozen=True)
class NormalizationResult:
    """Normal form, per-degree generators and the data needed to replay them.

    ``generators[k]`` is the (possibly zero) generator used at degree
    ``k + 2``. ``eigen_field`` is the input written in eigencoordinates,
    which is where the generators act.
    """

    normal_form: VectorField
    generators: tuple
    eigen: EigenData
    truncation: int
    eigen_field: VectorField

    def generator(self, d: int) -> VectorField:
        return self.generators[d - 2]

    def nonzero_generators(self) -> list[tuple[int, VectorField]]:
        return [(d, g) for d, g in enumerate(self.generators, start=2) if g.terms]


def normalize(f: VectorField, eigen: EigenData | Sequence | None = None, N: int = 6) -> NormalizationResult:
    """Poincare-Dulac normal form of ``f`` up to degree ``N``."""
    if eigen is None:
        eigen = EigenData.from_matrix(f.A)
    elif not isinstance(eigen, EigenData):
        eigen = EigenData(tuple(eigen))
    if N < 2:
        raise ValueError("normalization degree must be at least 2")
    if N > f.truncation:
        raise ValueError(f"degree {N} exceeds the field truncation {f.truncation}")
    eigen.verify(f.A)
    start = eigen.to_eigen(f.truncate(N))
    a = eigen.values
    current = start
    gens = []
    for d in range(2, N + 1):
        gen, _ = solve_homological(a, homogeneous_part(current, d))
        gens.append(gen)
        if gen.terms:
            current = pushforward(current, gen, N)
    return NormalizationResult(current, tuple(gens), eigen, N, start)


def replay(result: NormalizationResult, f: VectorField | None = None) -> VectorField:
    """Apply the stored generators, in order, to ``f`` (default: the normalized input)."""
    current = result.eigen_field if f is None else result.eigen.to_eigen(f.truncate(result.truncation))
    for gen in result.generators:
        current = pushforward(current, gen, result.truncation)
    return current


def block_rotation_matrix(m: int) -> ExactMatrix:
    """``[[0, I_m], [-I_m, 0]]``, so that ``x' = y, y' = -x``."""
    n = 2 * m
    rows = [[ZERO] * n for _ in range(n)]
    for k in range(m):
        rows[k][m + k] = ONE
        rows[m + k][k] = -ONE
    return ExactMatrix(rows)


def eigenbasis_for_block_rotation(m: int) -> EigenData:
    """Eigenvalues ``(i,)*m + (-i,)*m`` with eigenvectors ``(e_k, +-i e_k)``."""
    if m < 1:
        raise ValueError("half-dimension must be positive")
    n = 2 * m
    rows = [[ZERO] * n for _ in range(n)]
    for k in range(m):
        rows[k][k] = ONE
        rows[k][m + k] = ONE
        rows[m + k][k] = I
        rows[m + k][m + k] = -I
    return EigenData((I,) * m + (-I,) * m, ExactMatrix(rows))
