import random
from decimal import Decimal
from fractions import Fraction

import pytest
from gmpy2 import mpq

from oracles import SMALL, brute_integral_monomials, brute_omega_sq, gr
from pdnf.algebra import ExactMatrix, I
from pdnf.analysis import (
    BudgetExceeded,
    check_condition_A,
    check_omega,
    common_linear_integrals,
    constant_proportionality,
    fit_nf_shape,
    fit_nf_shape_candidates,
)
from pdnf.polyvec import ScalarPoly, VectorField


def divisor_sq(q, a, j=None):
    v = sum((e * x for e, x in zip(q, a)), gr(0))
    if j is not None:
        v = v - a[j]
    return v.abs2()


# -- condition omega ---------------------------------------------------------------


def test_omega_rotation_pair():
    rep = check_omega((I, -I), 5)
    assert [r.omega_sq for r in rep.records] == [1] * 5
    assert all(s == 0 for s in rep.partial_sums)
    assert rep.verdict == "holds-at-horizon"


def test_omega_real_pairs():
    rep = check_omega((1, 2), 4)
    assert [r.omega_sq for r in rep.records] == [1] * 4
    assert rep.records[0].minimizer == (1, 0)
    rep = check_omega((1, gr(Fraction(-3, 2))), 4)
    assert rep.records[0].omega_sq == 1
    assert [r.omega_sq for r in rep.records[1:]] == [1 / mpq(4)] * 3
    assert rep.records[1].minimizer == (1, 1)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("variant", ["paper", "shifted"])
def test_omega_matches_brute_force(seed, variant):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a = [rng.choice(SMALL) for _ in range(n)]
    k_max = 4 if n == 3 else 5
    strict = seed % 3 == 0
    rep = check_omega(a, k_max, variant, strict_positive=strict)
    for r in rep.records:
        assert r.omega_sq == brute_omega_sq(a, r.k, variant, strict)
        if r.minimizer is not None:
            assert 1 <= sum(r.minimizer) < 2**r.k
            if strict:
                assert min(r.minimizer) >= 1
            assert divisor_sq(r.minimizer, a, r.component) == r.omega_sq
    values = [r.omega_sq for r in rep.records if r.omega_sq is not None]
    assert values == sorted(values, reverse=True)


def test_omega_grouped_matches_brute_force_with_repeats():
    a = (I, I, -I, gr(Fraction(1, 2)))
    rep = check_omega(a, 3, "shifted")
    assert [r.omega_sq for r in rep.records] == [brute_omega_sq(a, k, "shifted") for k in (1, 2, 3)]


def test_omega_shifted_strict_first_horizon_is_undefined():
    rep = check_omega((I, -I), 3, "shifted", strict_positive=True)
    assert rep.records[0].omega_sq is None
    assert rep.records[1].omega_sq == 1


def test_omega_verdicts_and_guards():
    rep = check_omega((1, gr(Fraction(-3, 2))), 3, threshold=Decimal("-0.1"))
    assert rep.verdict == "violated"
    assert check_omega((0, 0, 1), 2).verdict == "holds-at-horizon"
    with pytest.raises(BudgetExceeded):
        check_omega((1, 2, 3, 5), 12, budget=10**4)
    for bad in ((), (0, 0)):
        with pytest.raises(ValueError):
            check_omega(bad, 2)
    with pytest.raises(ValueError):
        check_omega((1,), 0)
    with pytest.raises(ValueError):
        check_omega((1,), 2, "other")


def test_omega_threads_do_not_change_results():
    a = (1, gr(Fraction(-3, 2)), I)
    assert check_omega(a, 5, threads=1) == check_omega(a, 5, threads=4)


def test_omega_precision():
    rep = check_omega((1, gr(Fraction(-3, 2))), 2, precision=30)
    assert len(rep.partial_sums[-1].as_tuple().digits) <= 30
    assert rep.records[1].omega(20) == Decimal("0.5")
    root = check_omega((gr(1, 1),), 1).records[0]  # sqrt 2
    assert len(root.omega(20).as_tuple().digits) == 20


# -- condition A -------------------------------------------------------------------


def test_condition_A_examples():
    A = ExactMatrix.diag([1, -1])
    assert check_condition_A(VectorField.linear(A, 4)).is_zero()
    s = ScalarPoly(2, 4, {(1, 1): 1})
    fhat = VectorField.linear(A, 4) + VectorField.linear(A, 4).times_scalar(s)
    alpha = check_condition_A(fhat)
    assert alpha == ScalarPoly(2, 3, {(1, 1): 1})
    f = VectorField(2, 4, ExactMatrix.diag([1, 2]), {(1, (2, 0)): 1})
    assert check_condition_A(f) is None
    with pytest.raises(ValueError):
        check_condition_A(VectorField.zero(2, 3))


# -- shape fits --------------------------------------------------------------------


def test_fit_examples():
    A = ExactMatrix.diag([I, -I])
    fit = fit_nf_shape(VectorField.linear(A, 5), ExactMatrix.identity(2))
    assert fit.alpha.is_zero() and fit.mu.is_zero() and fit.residual.is_zero()

    s = ScalarPoly(2, 5, {(1, 1): 1})
    lin = VectorField.linear(A, 5)
    euler = VectorField.linear(ExactMatrix.identity(2), 5)
    h = lin + lin.times_scalar(s).nonlinear_part() + euler.times_scalar(s).nonlinear_part()
    fit = fit_nf_shape(h, ExactMatrix.identity(2))
    assert fit.alpha == ScalarPoly(2, 4, {(1, 1): 1})
    assert fit.mu == ScalarPoly(2, 4, {(1, 1): 1})
    assert fit.residual.is_zero() and fit.reconstruct() == h

    h = VectorField(2, 4, ExactMatrix.diag([1, 2]), {(1, (2, 0)): 1})
    assert fit_nf_shape(h, ExactMatrix.identity(2)) is None
    with pytest.raises(ValueError):
        fit_nf_shape(lin, A.scale(3))


def test_fit_candidates():
    A = ExactMatrix.diag([I, -I])
    s = ScalarPoly(2, 5, {(1, 1): 2})
    euler = VectorField.linear(ExactMatrix.identity(2), 5)
    h = VectorField.linear(A, 5) + euler.times_scalar(s).nonlinear_part()
    fit = fit_nf_shape_candidates(h)
    assert fit is not None and fit.residual.is_zero()


# -- common integrals ------------------------------------------------------------


def test_integral_examples():
    a = (I, -I)
    assert common_linear_integrals(a, ExactMatrix.identity(2), 4).is_empty()
    ib = common_linear_integrals(a, ExactMatrix.diag([1, -1]), 4)
    assert [set(p.terms) for p in ib.basis] == [{(1, 1)}, {(2, 2)}]
    assert common_linear_integrals((1, 2), ExactMatrix.diag([0, 1]), 4).is_empty()
    with pytest.raises(ValueError):
        common_linear_integrals(a, ExactMatrix.identity(2), 0)


@pytest.mark.parametrize("seed", range(6))
def test_integrals_are_killed_by_both_flows(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    a = [gr(rng.randint(-2, 2)) for _ in range(n)]
    M = ExactMatrix([[gr(rng.randint(-1, 1)) if rng.random() < 0.4 else 0 for _ in range(n)] for _ in range(n)])
    ib = common_linear_integrals(a, M, 4)
    for p in ib.basis:
        assert (0,) * n not in p.terms
        for op in (ExactMatrix.diag(a), M):
            derived = ScalarPoly(n, 4)
            for i in range(n):
                for j in range(n):
                    if op[i, j]:
                        derived = derived + ScalarPoly.variable(n, j, 4) * p.derivative(i) * op[i, j]
            assert derived.is_zero()


def test_integrals_match_enumeration_for_diagonal_pairs():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(1, 3)
        a = [gr(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(n)]
        m = [gr(rng.randint(-2, 2)) for _ in range(n)]
        ib = common_linear_integrals(a, ExactMatrix.diag(m), 4)
        support = {q for p in ib.basis for q in p.terms}
        assert all(len(p.terms) == 1 for p in ib.basis)
        assert support == brute_integral_monomials(a, m, 4)


# -- proportionality ------------------------------------------------------------


def test_proportionality_examples():
    A = ExactMatrix([[0, 1], [-1, 0]])
    assert constant_proportionality(A.scale(2), A).factor == 2
    lam = constant_proportionality(ExactMatrix.zeros(2), A)
    assert lam.factor == 0 and not lam.ambiguous
    lam = constant_proportionality(ExactMatrix.zeros(2), ExactMatrix.zeros(2))
    assert lam.ambiguous
    F = VectorField(2, 3, None, {(0, (2, 0)): 1, (1, (0, 2)): 1})
    G = VectorField(2, 3, None, {(0, (2, 0)): 1, (1, (1, 1)): 1})
    assert constant_proportionality(G, F) is None
    assert constant_proportionality(F.scale(I), F).factor == I
    assert constant_proportionality(A, ExactMatrix.zeros(2)) is None
