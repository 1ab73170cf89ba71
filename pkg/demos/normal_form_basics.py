"""
Normal forms of a small resonant field
======================================

A two-dimensional field with eigenvalues (1, 2) has exactly one quadratic
resonance, u1^2 in the second component. Everything else is removed by a
near-identity change of coordinates.
"""

from pdnf import ExactMatrix, VectorField, is_resonant, normalize, replay
from pdnf.fieldspec import document_from_field, emit_document

# u1' = u1 + u2^2,  u2' = 2 u2 + u1^2 + u1 u2
A = ExactMatrix.diag([1, 2])
f = VectorField(2, 5, A, {(0, (0, 2)): 1, (1, (2, 0)): 1, (1, (1, 1)): 1})
print(f)

# normalize degree by degree up to degree 5
nr = normalize(f, [1, 2], 5)
print("normal form:", nr.normal_form)
for d, gen in nr.nonzero_generators():
    print(f"generator at degree {d}:", gen)

# every surviving monomial is resonant
for j, q in nr.normal_form.terms:
    print(f"component {j + 1}, exponent {q}: resonant = {is_resonant(q, j, (1, 2))}")

# replaying the recorded generators reproduces the normal form exactly
print("replay matches:", replay(nr, f) == nr.normal_form)

# the canonical JSON document of the result
print(emit_document(document_from_field(nr.normal_form)))
