"""Acceptance criteria 1-8.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion.
"""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from oracles import brute_integral_monomials, brute_omega_sq, gr, random_coeff, sympy_bracket
from pdnf.algebra import ExactMatrix, I
from pdnf.analysis import check_omega, common_linear_integrals, fit_nf_shape
from pdnf.fieldspec import document_from_field, emit_document
from pdnf.normalform import block_rotation_matrix, eigenbasis_for_block_rotation, normalize, replay
from pdnf.polyvec import VectorField, lie_bracket, monomials
from pdnf.symmetry import certify_theorem1, check_symmetry, corollary_2d
from pdnf.systems import build_example_rotation2d, build_example_so3

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
# p = x.x: a degree-2 invariant polynomial for which G is not a multiple of F
XX = {(1, 0, 0): 1}
CERTIFIED = ("convergent-certified", "convergent-certified-at-horizon")


def frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


def exact_divisor(q, a, j):
    """``(q, a) - a_j`` with plain Fractions, independent of the package."""
    re = sum(e * frac(x.re) for e, x in zip(q, a)) - frac(a[j].re)
    im = sum(e * frac(x.im) for e, x in zip(q, a)) - frac(a[j].im)
    return re, im


EIGEN_POOL = [gr(0), gr(1), gr(2), gr(3), gr(-1), gr(Fraction(1, 2)), gr(0, 1), gr(0, -1), gr(0, 2), gr(1, 1)]


def random_nonlinear(rng, n, N, max_degree, nterms):
    terms = {}
    for _ in range(nterms):
        q = rng.choice(monomials(n, rng.randint(2, max_degree)))
        terms[(rng.randrange(n), q)] = random_coeff(rng)
    return terms


def test_criterion_1_normalization_soundness():
    rng = random.Random(2024)
    start = time.perf_counter()
    resonant_seen = 0
    for _ in range(50):
        n = rng.randint(1, 3)
        a = [rng.choice(EIGEN_POOL) for _ in range(n)]
        f = VectorField(n, 6, ExactMatrix.diag(a), random_nonlinear(rng, n, 6, 4, rng.randint(2, 8)))
        nr = normalize(f, a, 6)
        for j, q in nr.normal_form.terms:
            assert exact_divisor(q, a, j) == (0, 0)
        resonant_seen += bool(nr.normal_form.terms)
        for gen in nr.generators:
            assert all(exact_divisor(q, a, j) != (0, 0) for j, q in gen.terms)
        again = normalize(f, a, 6)
        assert emit_document(document_from_field(replay(nr, f))) == emit_document(document_from_field(nr.normal_form))
        assert emit_document(document_from_field(again.normal_form)) == emit_document(document_from_field(nr.normal_form))
    assert resonant_seen >= 5  # the sample exercises genuinely resonant cases
    assert time.perf_counter() - start < 60


def random_bracket_field(rng, n):
    A = ExactMatrix([[random_coeff(rng) if rng.random() < 0.4 else 0 for _ in range(n)] for _ in range(n)])
    return VectorField(n, 7, A, random_nonlinear(rng, n, 7, 3, rng.randint(1, 4)))


def test_criterion_2_bracket_axioms():
    # degrees <= 3 and truncation 7: nested brackets reach degree 7 at most, nothing is cut
    rng = random.Random(7)
    start = time.perf_counter()
    for t in range(100):
        n = rng.randint(1, 3)
        f, g, h = (random_bracket_field(rng, n) for _ in range(3))
        s, r = random_coeff(rng), random_coeff(rng)
        assert lie_bracket(f.scale(s) + g.scale(r), h) == lie_bracket(f, h).scale(s) + lie_bracket(g, h).scale(r)
        assert lie_bracket(h, f.scale(s) + g.scale(r)) == lie_bracket(h, f).scale(s) + lie_bracket(h, g).scale(r)
        assert lie_bracket(f, g) == -lie_bracket(g, f)
        assert lie_bracket(f, f).is_zero()
        jacobi = lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f)) + lie_bracket(h, lie_bracket(f, g))
        assert jacobi.is_zero()
        if t < 10:
            assert lie_bracket(f, g) == sympy_bracket(f, g)
    assert time.perf_counter() - start < 30


def test_criterion_3_corollary_reproduction():
    start = time.perf_counter()
    for k in (1, 2, 3):
        N = max(6, 2 * k + 1)
        f, g = build_example_rotation2d(k, N)
        assert check_symmetry(f, g, N).is_zero()
        assert sympy_bracket(f, g).is_zero()
        rep = corollary_2d(f, g, N, 8)
        assert rep.verdict == "convergent-certified-at-horizon"
        assert rep.entry("symmetry").witness["residual"].is_zero()
    assert time.perf_counter() - start < 10


def test_criterion_4_so3_example():
    start = time.perf_counter()
    print("so3 example: g = (x.x + y.y) u, f built with p = x.x (the default p makes f = Au + g)")
    default_f, default_g, _ = build_example_so3(1, 5)
    assert check_symmetry(default_f, default_g, 5).is_zero()
    f, g, _ = build_example_so3(1, 5, XX)
    assert check_symmetry(f, g, 5).is_zero()
    assert sympy_bracket(f, g).is_zero()

    eigen = eigenbasis_for_block_rotation(3)
    nr = normalize(f, eigen, 5)
    fit = fit_nf_shape(nr.normal_form, ExactMatrix.identity(6))
    assert fit is not None and fit.residual.is_zero()
    assert fit.reconstruct() == nr.normal_form

    ib = common_linear_integrals(eigen.values, ExactMatrix.identity(6), 5)
    assert ib.is_empty()
    assert brute_integral_monomials(eigen.values, [gr(1)] * 6, 5) == set()

    rep = certify_theorem1(f, g, ExactMatrix.identity(6), 5, 8)
    assert rep.verdict == "convergent-certified-at-horizon"
    assert time.perf_counter() - start < 120


def test_criterion_5_omega_numerics():
    start = time.perf_counter()
    rot = check_omega((I, -I), 6)
    for r in rot.records:
        assert r.omega_sq == 1 == brute_omega_sq((I, -I), r.k)
    assert all(s == 0 and s.is_zero() for s in rot.partial_sums)

    a = (gr(1), gr(Fraction(-3, 2)))
    rep = check_omega(a, 6, precision=50)
    assert rep.records[0].omega_sq == 1
    for r in rep.records:
        assert r.omega_sq == brute_omega_sq(a, r.k)
        if r.k >= 2:
            assert r.omega_sq == Fraction(1, 4)
    mpmath.mp.dps = 60
    for K, s in enumerate(rep.partial_sums, start=1):
        expected = -mpmath.log(2) * mpmath.fsum(mpmath.mpf(2) ** -k for k in range(2, K + 1))
        assert abs(mpmath.mpf(str(s)) - expected) < mpmath.mpf("1e-40")
    assert time.perf_counter() - start < 30


def test_criterion_6_integral_kernel_oracle():
    rng = random.Random(99)
    start = time.perf_counter()
    nonempty = 0
    pool = (gr(1), gr(-1), gr(2), gr(-2), gr(0, 1), gr(0, -1), gr(0))
    for t in range(20):
        N = rng.randint(1, 5)
        if t % 2:
            n = rng.randint(1, 3)
            a = [rng.choice(pool) for _ in range(n)]
            m = [gr(rng.choice((-1, 0, 1, 2))) for _ in range(n)]
        else:
            # planted opposite pairs, so z1 z2 is a common integral once N >= 2
            x, c = rng.choice(pool[:-1]), gr(rng.choice((1, 2)))
            a, m = [x, -x], [c, -c]
            if rng.random() < 0.5:
                a.append(rng.choice(pool))
                m.append(gr(rng.choice((-1, 0, 1))))
        ib = common_linear_integrals(a, ExactMatrix.diag(m), N)
        expected = brute_integral_monomials(a, m, N)
        assert len(ib.basis) == len(expected)
        assert all(len(p.terms) == 1 for p in ib.basis)
        assert {q for p in ib.basis for q in p.terms} == expected
        nonempty += bool(expected)
    assert nonempty >= 3
    assert time.perf_counter() - start < 30


def test_criterion_7_mutation_robustness():
    start = time.perf_counter()
    f, g = build_example_rotation2d(1, 6, XX)
    base = certify_theorem1(f, g, N=6, k_max=6)
    assert base.verdict == "convergent-certified-at-horizon"

    mutations = {
        "bracket killed": (f, g + VectorField(2, 6, None, {(0, (2, 0)): 1}), None, "i.symmetry"),
        "g proportional to f": (f, f.scale(2), None, "i.not-proportional-to-f"),
        "G proportional to F": (*build_example_rotation2d(1, 6), None, "i.linear-part"),
        "M with common integrals": (f, g, block_rotation_matrix(1), "ii.no-common-integrals"),
    }
    for name, (ff, gg, M, broken) in mutations.items():
        rep = certify_theorem1(ff, gg, M, N=6, k_max=6)
        assert rep.verdict not in CERTIFIED, name
        assert rep.entry(broken).status == "fail", name

    # six-dimensional member: M with common integrals but not proportional to A
    f3, g3, _ = build_example_so3(1, 5, XX)
    e = eigenbasis_for_block_rotation(3)
    M = e.P @ ExactMatrix.diag([1, -1, 0, -1, 1, 0]) @ e.P_inv
    rep = certify_theorem1(f3, g3, M, 5, 6)
    assert rep.entry("ii.M-not-proportional-to-A").status == "pass"
    assert rep.entry("ii.no-common-integrals").status == "fail"
    assert rep.verdict not in CERTIFIED
    assert time.perf_counter() - start < 30


def _cli(args, seed, tmp):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    proc = subprocess.run([sys.executable, "-m", "pdnf", *args], capture_output=True, cwd=tmp, env=env, check=False)
    outs = {p.name: p.read_bytes() for p in sorted(Path(tmp).glob("*.json"))}
    return proc.returncode, proc.stdout, outs


def test_criterion_8_cli_determinism(tmp_path):
    rot, rot_g = str(SAMPLES / "rotation2d_k1_pxx.json"), str(SAMPLES / "rotation2d_k1_pxx_g.json")
    so3, so3_g = str(SAMPLES / "so3_k1_pxx.json"), str(SAMPLES / "so3_k1_pxx_g.json")
    commands = [
        ["normalize", rot, "--degree", "6", "--out", "nf.json"],
        ["check-omega", "--eigenvalues", "1,-3/2,i", "--kmax", "6"],
        ["check-omega", so3, "--kmax", "8", "--omega-variant", "shifted"],
        ["check-condition-a", rot],
        ["check-symmetry", rot, rot_g],
        ["fit-shape", so3, "--degree", "5"],
        ["integrals", rot, "--degree", "5"],
        ["certify", rot, rot_g, "--theorem", "1", "--kmax", "6"],
        ["certify", so3, so3_g, "--theorem", "1", "--degree", "5"],
        ["certify", rot, rot_g, "--theorem", "corollary"],
        ["example", "so3", "--k", "1", "--degree", "5", "--p", "xx=1"],
    ]
    for i, cmd in enumerate(commands):
        runs = []
        for j, (seed, threads) in enumerate([(1, "1"), (2, "1"), (3, "4")]):
            work = tmp_path / f"{i}-{j}"
            work.mkdir()
            runs.append(_cli(cmd + ["--threads", threads], seed, work))
        assert runs[0][1], cmd
        assert runs[0] == runs[1] == runs[2], cmd


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
