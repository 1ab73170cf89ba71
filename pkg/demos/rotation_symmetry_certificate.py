"""
A rotation field and its symmetries
===================================

f = A u + (x^2 + y^2)^k (x, y) with A a rotation commutes with every field
g = p(u) (x, y) built from an invariant-type polynomial p. The choice of p
decides which linearisation statement can be certified.
"""

from pdnf import certify_theorem1, check_symmetry, corollary_2d, normalize, transport_symmetry
from pdnf.polyvec import VectorField
from pdnf.systems import build_example_rotation2d

# default p = (x^2 + y^2)^k: g is the nonlinear part of f itself
f, g = build_example_rotation2d(1, 6)
print("bracket residual:", check_symmetry(f, g).is_zero())
print("g equals F:", g == f.nonlinear_part())

# in the plane a single nonlinear symmetry is enough
rep = corollary_2d(f, g, 6, 8)
print("planar certificate:", rep.verdict)

# the general certificate needs G not a multiple of F, so take p = x.x
f, g = build_example_rotation2d(1, 6, {(1, 0, 0): 1})
rep = certify_theorem1(f, g, N=6, k_max=8)
print("general certificate:", rep.verdict)
for e in rep.entries:
    print(f"  {e.name:32s} {e.status:16s} {e.detail}")

# g + f has linear part A and still commutes with the normal form once transported
nr = normalize(f, None, 6)
moved = transport_symmetry(g + f, nr)
print("transported symmetry commutes:", check_symmetry(nr.normal_form, moved).is_zero())

# a broken symmetry is detected
bad = g + VectorField(2, 6, None, {(0, (2, 0)): 1})
print("mutated g:", certify_theorem1(f, bad, N=6, k_max=4).verdict)
