"""Independent oracles and random generators shared by the tests.

The symbolic oracles go through sympy, which shares no code with the
package: fields are expanded as plain expressions, differentiated and
composed there, and the results converted back for comparison.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy as sp

from pdnf.algebra import ExactMatrix, GaussianRational
from pdnf.polyvec import VectorField, monomials


def gr(re, im=0) -> GaussianRational:
    return GaussianRational(Fraction(re), Fraction(im))


def to_sympy_number(c: GaussianRational):
    re = sp.Rational(int(c.re.numerator), int(c.re.denominator))
    im = sp.Rational(int(c.im.numerator), int(c.im.denominator))
    return re + sp.I * im


def from_sympy_number(x) -> GaussianRational:
    re, im = (sp.Rational(v) for v in sp.expand(x).as_real_imag())
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def symbols(n: int):
    return sp.symbols(f"u0:{n}")


def to_sympy(f: VectorField):
    u = symbols(f.n)
    out = []
    for p in f.components():
        expr = sp.Integer(0)
        for q, c in p.items():
            expr += to_sympy_number(c) * sp.Mul(*[x**e for x, e in zip(u, q)])
        out.append(expr)
    return out, u


def from_sympy(exprs, u, N: int) -> VectorField:
    """Back to a field, discarding degrees above ``N``."""
    n = len(u)
    comps = []
    for e in exprs:
        e = sp.expand(e)
        p = {}
        if e != 0:
            for q, c in sp.Poly(e, *u).terms():
                if sum(q) <= N and c != 0:
                    p[tuple(q)] = from_sympy_number(c)
        comps.append(p)
    return VectorField.from_components(n, N, comps)


def sympy_bracket(f: VectorField, g: VectorField) -> VectorField:
    """``(f.grad) g - (g.grad) f`` expanded symbolically."""
    F, u = to_sympy(f)
    G, _ = to_sympy(g)
    out = []
    for k in range(f.n):
        e = sum(F[i] * sp.diff(G[k], u[i]) - G[i] * sp.diff(F[k], u[i]) for i in range(f.n))
        out.append(e)
    return from_sympy(out, u, min(f.truncation, g.truncation))


def conjugacy_defect(f: VectorField, h: VectorField, phi: VectorField, N: int) -> VectorField:
    """``f(v + phi(v)) - (I + D phi(v)) h(v)`` up to degree ``N``.

    Zero exactly when ``u = v + phi(v)`` carries ``u' = f(u)`` to ``v' = h(v)``
    to that order.
    """
    F, u = to_sympy(f)
    H, _ = to_sympy(h)
    P, _ = to_sympy(phi)
    sub = {u[i]: u[i] + P[i] for i in range(f.n)}
    out = []
    for k in range(f.n):
        lhs = F[k].xreplace(sub)
        rhs = H[k] + sum(sp.diff(P[k], u[i]) * H[i] for i in range(f.n))
        out.append(sp.expand(lhs - rhs))
    return from_sympy(out, u, N)


# -- brute force enumerations ---------------------------------------------------------


def brute_omega_sq(a, k: int, variant: str = "paper", strict_positive: bool = False):
    """Minimum squared small divisor over every q with ``1 <= |q| < 2**k``."""
    def frac(x):
        return Fraction(int(x.numerator), int(x.denominator))

    exact = [(frac(x.re), frac(x.im)) for x in a]
    n = len(a)
    top = 2**k - 1
    best = None
    lo = 1 if strict_positive else 0
    for q in itertools.product(range(lo, top + 1), repeat=n):
        s = sum(q)
        if not 1 <= s <= top:
            continue
        re = sum(e * x[0] for e, x in zip(q, exact))
        im = sum(e * x[1] for e, x in zip(q, exact))
        shifts = [(Fraction(0), Fraction(0))] if variant == "paper" else exact
        for sr, si in shifts:
            v = (re - sr) ** 2 + (im - si) ** 2
            if v and (best is None or v < best):
                best = v
    return best


def brute_integral_monomials(a, m, N: int) -> set:
    """Monomials killed by both diagonal derivations: ``(q, a) = 0`` and ``(q, m) = 0``."""
    n = len(a)
    out = set()
    for d in range(1, N + 1):
        for q in monomials(n, d):
            if sum((e * x for e, x in zip(q, a)), gr(0)) == 0 and sum((e * x for e, x in zip(q, m)), gr(0)) == 0:
                out.add(q)
    return out


# -- random generators ------------------------------------------------------------------

SMALL = [gr(1), gr(-1), gr(2), gr(1, 2), gr(-3, 2), gr(0, 1), gr(0, -1), gr(1, 1), gr(2, -1), gr(1, -1)]


def random_coeff(rng: random.Random) -> GaussianRational:
    re = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    im = Fraction(rng.randint(-2, 2), rng.randint(1, 2)) if rng.random() < 0.4 else 0
    c = gr(re, im)
    return c if c else gr(1)


def random_field(rng: random.Random, n: int, N: int, max_degree: int, nterms: int, A=None, linear=True) -> VectorField:
    if A is None:
        if linear:
            A = ExactMatrix([[random_coeff(rng) if rng.random() < 0.5 else 0 for _ in range(n)] for _ in range(n)])
        else:
            A = ExactMatrix.zeros(n)
    terms = {}
    for _ in range(nterms):
        d = rng.randint(2, max_degree)
        q = rng.choice(monomials(n, d))
        terms[(rng.randrange(n), q)] = random_coeff(rng)
    return VectorField(n, N, A, terms)
