"""Builders for the block-rotation example systems.

With ``u = (x, y)``, ``x, y`` in ``R^m`` and ``A = [[0, I], [-I, 0]]``, the
systems are ``u' = A u + p(u) u`` where ``p`` is a homogeneous polynomial
of degree ``2k`` in the rotation invariants ``x.x``, ``y.y`` and ``x.y``,
together with the symmetry candidate ``g = (x.x + y.y)^k u``.
"""

from __future__ import annotations

from math import comb
from typing import Mapping

from .normalform import block_rotation_matrix
from .polyvec import ScalarPoly, VectorField, unit

__all__ = ["block_invariants", "build_example_rotation2d", "build_example_so3", "default_p_choice"]


def block_invariants(m: int, N: int) -> list[ScalarPoly]:
    """``[x.x, y.y, x.y]`` as polynomials in ``u = (x_1..x_m, y_1..y_m)``."""
    n = 2 * m
    xx = {tuple(2 if j == i else 0 for j in range(n)): 1 for i in range(m)}
    yy = {tuple(2 if j == m + i else 0 for j in range(n)): 1 for i in range(m)}
    xy = {tuple(a + b for a, b in zip(unit(n, i), unit(n, m + i))): 1 for i in range(m)}
    return [ScalarPoly(n, N, xx), ScalarPoly(n, N, yy), ScalarPoly(n, N, xy)]


def default_p_choice(k: int) -> dict:
    """``(x.x + y.y)^k`` in invariant exponents ``(e_xx, e_yy, e_xy)``."""
    return {(j, k - j, 0): comb(k, j) for j in range(k + 1)}


def _rotation_family(m: int, k: int, p_choice, N: int):
    if k < 1:
        raise ValueError("k must be a positive integer")
    if N < 2 * k + 1:
        raise ValueError(f"truncation {N} cannot hold the degree-{2 * k + 1} terms")
    n = 2 * m
    if p_choice is None:
        p_choice = default_p_choice(k)
    if isinstance(p_choice, ScalarPoly):
        if p_choice.n != 3:
            raise ValueError("p_choice must be a polynomial in the three invariants")
        p_choice = p_choice.terms
    if not isinstance(p_choice, Mapping) or not p_choice:
        raise ValueError("p_choice must be a nonempty mapping of invariant exponents to coefficients")
    for q in p_choice:
        if len(q) != 3 or sum(q) != k:
            raise ValueError(f"p_choice term {tuple(q)} is not of degree {k} in the invariants (degree {2 * k} in u)")
    rho = block_invariants(m, N)
    p = ScalarPoly(3, k, p_choice).compose(rho, N)
    if p.is_zero():
        raise ValueError("p_choice vanishes identically")
    euler = VectorField.linear([[1 if i == j else 0 for j in range(n)] for i in range(n)], N)
    f = VectorField.linear(block_rotation_matrix(m), N) + euler.times_scalar(p)
    r2k = (rho[0] + rho[1]) ** k
    g = euler.times_scalar(r2k).nonlinear_part()
    return f, g, rho


def build_example_rotation2d(k: int, N: int, p_choice=None) -> tuple[VectorField, VectorField]:
    """``f = A u + p(u) u`` in the plane and ``g = (x^2 + y^2)^k u``.

    ``p_choice`` maps invariant exponents ``(e_xx, e_yy, e_xy)`` to
    coefficients (total degree ``k``); the default ``(x^2 + y^2)^k`` gives
    ``f = A u + (x^2 + y^2)^k (x, y)``.
    """
    f, g, _ = _rotation_family(1, k, p_choice, N)
    return f, g


def build_example_so3(k: int, N: int, p_choice=None, m: int = 3):
    """Six-dimensional system with ``SO(3)`` acting diagonally on ``x`` and ``y``.

    Returns ``(f, g, [x.x, y.y, x.y])``.
    """
    if m != 3:
        raise ValueError("the SO(3) example is defined for m = 3")
    return _rotation_family(m, k, p_choice, N)
