"""
Three coupled rotations
=======================

Six-dimensional field x' = y + p(u) x, y' = -x + p(u) y with x, y in R^3.
In complex eigencoordinates the normal form has the shape
A u + alpha(u) A u + mu(u) u, and the rotation and Euler flows share no
polynomial first integral.
"""

from pdnf import (
    ExactMatrix,
    certify_theorem1,
    check_symmetry,
    common_linear_integrals,
    eigenbasis_for_block_rotation,
    fit_nf_shape,
    normalize,
)
from pdnf.systems import build_example_so3

f, g, (xx, yy, xy) = build_example_so3(1, 5, {(1, 0, 0): 1})
print("invariants:", xx, yy, xy, sep="\n  ")
print("bracket residual:", check_symmetry(f, g, 5).is_zero())

# eigenvalues (i, i, i, -i, -i, -i)
eigen = eigenbasis_for_block_rotation(3)
nr = normalize(f, eigen, 5)
print("normal form terms:", len(nr.normal_form.terms))

fit = fit_nf_shape(nr.normal_form, ExactMatrix.identity(6))
print("alpha:", fit.alpha)
print("mu:", fit.mu)
print("fit residual zero:", fit.residual.is_zero())

print("common integrals:", common_linear_integrals(eigen.values, ExactMatrix.identity(6), 5).basis)

rep = certify_theorem1(f, g, ExactMatrix.identity(6), 5, 8)
print("certificate:", rep.verdict)
