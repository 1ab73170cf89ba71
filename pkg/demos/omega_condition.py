"""
Small divisors and the omega condition
======================================

For each horizon k the smallest divisor |(q, a) - a_j| over 2 <= |q| < 2^k
is computed exactly; the weighted sum of -log(omega_k) / 2^k is tracked in
high-precision decimal arithmetic.
"""

from fractions import Fraction

from pdnf import GaussianRational, I, check_omega

# a rotation pair: every divisor is an odd multiple of i, so omega_k = 1
rep = check_omega((I, -I), 6)
print(rep.verdict, [str(s) for s in rep.partial_sums])

# (1, -3/2): omega_1 = 1, then 1/2 from q = (1, 1) onwards
a = (GaussianRational(1), GaussianRational(Fraction(-3, 2)))
rep = check_omega(a, 6, precision=50)
for r in rep.records:
    print(f"k={r.k}  omega={r.omega(20)}  minimizer={r.minimizer}")
for k, s in enumerate(rep.partial_sums, start=1):
    print(f"partial sum to k={k}: {s}")

# the shifted variant and the strictly positive exponent filter
print(check_omega(a, 4, "shifted", strict_positive=True).verdict)
