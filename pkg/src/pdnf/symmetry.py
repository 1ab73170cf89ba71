"""Lie point symmetries and certification of the convergence hypotheses.

A certificate never claims more than a truncated computation can show.
Symmetry residuals and shape fits are exact statements up to degree ``N``;
condition omega and the absence of common integrals are only checked up to
a horizon, so entries of that kind are marked ``horizon-limited`` and the
best possible verdict is ``convergent-certified-at-horizon``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import ExactMatrix, kernel_basis, rank
from .analysis import (
    check_condition_A,
    check_omega,
    common_linear_integrals,
    constant_proportionality,
    fit_nf_shape,
)
from .normalform import EigenData, NormalizationResult, normalize, pushforward
from .polyvec import VectorField, lie_bracket, poly_add, poly_deriv, poly_mul, unit

__all__ = [
    "Evidence",
    "CertificateReport",
    "check_symmetry",
    "transport_symmetry",
    "linear_symmetries",
    "certify_theorem1",
    "certify_theorem2",
    "corollary_2d",
]

PASS, FAIL, HORIZON, INCONCLUSIVE, INFO = "pass", "fail", "horizon-limited", "inconclusive", "info"


@dataclass(frozen=True)
class Evidence:
    name: str
    status: str
    detail: str
    witness: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CertificateReport:
    theorem: str
    verdict: str
    truncation: int
    k_max: int
    entries: tuple

    def entry(self, name: str) -> Evidence:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [e.name for e in self.entries if e.status == FAIL]

    @property
    def certified(self) -> bool:
        return self.verdict.startswith("convergent-certified")


def _verdict(entries) -> str:
    statuses = {e.status for e in entries}
    if FAIL in statuses:
        return "hypothesis-failed"
    if INCONCLUSIVE in statuses:
        return "inconclusive"
    if HORIZON in statuses:
        return "convergent-certified-at-horizon"
    return "convergent-certified"


def check_symmetry(f: VectorField, g: VectorField, N: int | None = None) -> VectorField:
    """The bracket ``{f, g}`` up to degree ``N``; zero certifies a symmetry up to ``N``."""
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")
    top = min(f.truncation, g.truncation)
    N = top if N is None else N
    if not 1 <= N <= top:
        raise ValueError(f"degree {N} is outside 1..{top} (the common truncation)")
    return lie_bracket(f.truncate(N), g.truncate(N))


def transport_symmetry(g: VectorField, nr: NormalizationResult) -> VectorField:
    """Carry ``g`` through the same coordinate changes that normalized the system."""
    if g.n != nr.normal_form.n:
        raise ValueError("dimension mismatch")
    if g.truncation < nr.truncation:
        raise ValueError(f"symmetry truncation {g.truncation} is below the normalization degree {nr.truncation}")
    current = nr.eigen.to_eigen(g.truncate(nr.truncation))
    for gen in nr.generators:
        current = pushforward(current, gen, nr.truncation)
    return current


def linear_symmetries(h: VectorField) -> list[ExactMatrix]:
    """Basis of matrices ``B`` with ``{h, Bu} = 0`` up to ``h``'s truncation."""
    n, N = h.n, h.truncation
    comps = h.components()
    derivs = [[poly_deriv(comps[k], i) for i in range(n)] for k in range(n)]
    rows: dict = {}
    for a in range(n):
        for b in range(n):
            col = a * n + b
            # {h, E_ab u}: component a gains h_b, every component k loses u_b d_a h_k
            out = [dict() for _ in range(n)]
            out[a] = poly_add(out[a], comps[b])
            ub = {unit(n, b): 1}
            for k in range(n):
                if derivs[k][a]:
                    out[k] = poly_add(out[k], poly_mul(ub, derivs[k][a], N), -1)
            for k, p in enumerate(out):
                for q, c in p.items():
                    rows.setdefault((k, q), {})[col] = c
    keys = sorted(rows, key=lambda key: (key[0], sum(key[1]), tuple(-e for e in key[1])))
    basis = kernel_basis([rows[k] for k in keys], n * n)
    return [ExactMatrix([v[i * n : (i + 1) * n] for i in range(n)]) for v in basis]


# -- shared pieces ------------------------------------------------------------------


def _eigen(f, eigen, entries):
    try:
        if eigen is None:
            eigen = EigenData.from_matrix(f.A)
        elif not isinstance(eigen, EigenData):
            eigen = EigenData(tuple(eigen))
        eigen.verify(f.A)
    except (ValueError, ZeroDivisionError) as exc:
        entries.append(Evidence("eigen-data", FAIL, str(exc)))
        return None
    return eigen


def _standing(f, eigen, N, k_max, omega_opts, entries):
    """Condition omega up to ``k_max`` and (informational) failure of condition A."""
    if eigen is not None:
        rep = check_omega(eigen.values, k_max, **omega_opts)
        status = {"holds-at-horizon": HORIZON, "violated": FAIL, "indeterminate": INCONCLUSIVE}[rep.verdict]
        entries.append(Evidence("omega", status, f"condition omega {rep.verdict} up to k_max={k_max}", {"report": rep}))
    if f.A.is_zero():
        entries.append(Evidence("not-condition-A", INFO, "linear part is zero; condition A does not apply"))
        return
    alpha = check_condition_A(f.truncate(N))
    if alpha is None:
        entries.append(Evidence("not-condition-A", INFO, f"f is not of the form Au + alpha(u) Au up to degree {N}"))
    else:
        entries.append(
            Evidence(
                "not-condition-A",
                INFO,
                f"f already satisfies condition A up to degree {N}; convergence then follows classically",
                {"alpha": alpha},
            )
        )


def _symmetry_entry(name, f, g, N, entries):
    residual = check_symmetry(f, g, N)
    ok = residual.is_zero()
    entries.append(Evidence(name, PASS if ok else FAIL, f"{{f, g}} {'vanishes' if ok else 'is nonzero'} up to degree {N}", {"residual": residual}))
    return ok


def _not_proportional_entry(name, f, g, N, entries):
    lam = constant_proportionality(g.truncate(N), f.truncate(N))
    if lam is None:
        entries.append(Evidence(name, PASS, "g is not a constant multiple of f"))
    else:
        entries.append(Evidence(name, FAIL, "g is a constant multiple of f", {"factor": lam.factor}))


def _normalize_entry(f, eigen, N, entries):
    if eigen is None:
        entries.append(Evidence("normalization", FAIL, "no eigen data; cannot normalize"))
        return None
    nr = normalize(f, eigen, N)
    entries.append(
        Evidence(
            "normalization",
            PASS,
            f"normal form computed up to degree {N} with {len(nr.nonzero_generators())} nonzero generators",
            {"normal_form": nr.normal_form},
        )
    )
    return nr


def _hypothesis_ii(nr, eigen, M, N, entries):
    if nr is None:
        return
    M_eig = eigen.matrix_to_eigen(M)
    h = nr.normal_form
    if constant_proportionality(M_eig, h.A) is not None:
        entries.append(Evidence("ii.M-not-proportional-to-A", FAIL, "M is proportional to A", {"M": M_eig}))
        fit = None
    else:
        entries.append(Evidence("ii.M-not-proportional-to-A", PASS, "M is not proportional to A", {"M": M_eig}))
        fit = fit_nf_shape(h, M_eig)
    if fit is None:
        entries.append(Evidence("ii.shape", FAIL, "normal form is not of the form Au + alpha Au + mu Mu"))
    else:
        entries.append(Evidence("ii.shape", PASS, f"normal form equals Au + alpha Au + mu Mu up to degree {N}", {"fit": fit}))
    ib = common_linear_integrals(eigen.values, M_eig, N)
    if ib.is_empty():
        entries.append(Evidence("ii.no-common-integrals", HORIZON, f"no common polynomial integral of u'=Au, u'=Mu up to degree {N}", {"integrals": ib}))
    else:
        entries.append(Evidence("ii.no-common-integrals", FAIL, f"{len(ib.basis)} common polynomial integrals up to degree {N}", {"integrals": ib}))


def _check_degree(N, *fields):
    top = min(f.truncation for f in fields)
    if N > top:
        raise ValueError(f"degree {N} exceeds the input truncation {top}")
    if N < 2:
        raise ValueError("degree must be at least 2")


def _omega_opts(variant, strict_positive, precision, threads, budget):
    opts = {"variant": variant, "strict_positive": strict_positive, "precision": precision, "threads": threads}
    if budget is not None:
        opts["budget"] = budget
    return opts


# -- certifiers --------------------------------------------------------------------------


def certify_theorem1(
    f: VectorField,
    g: VectorField,
    M: ExactMatrix | None = None,
    N: int = 6,
    k_max: int = 8,
    *,
    eigen: EigenData | None = None,
    omega_variant: str = "paper",
    strict_positive: bool = False,
    precision: int = 50,
    threads: int = 1,
    budget: int | None = None,
) -> CertificateReport:
    """Check the hypotheses of the single-symmetry convergence theorem.

    (i) ``g`` is a symmetry, not a multiple of ``f``, and either its linear
    part ``B`` is a nonzero multiple of ``A`` or ``B = 0`` and its nonlinear
    part is not a multiple of ``F``. (ii) the normal form fits
    ``Au + alpha Au + mu Mu`` and the linear flows of ``A`` and ``M`` have
    no common polynomial integral. ``M`` is given in the input coordinates
    (default: identity).
    """
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    _check_degree(N, f, g)
    M = ExactMatrix.identity(f.n) if M is None else M
    entries: list = []
    eigen = _eigen(f, eigen, entries)
    _standing(f, eigen, N, k_max, _omega_opts(omega_variant, strict_positive, precision, threads, budget), entries)

    _symmetry_entry("i.symmetry", f, g, N, entries)
    _not_proportional_entry("i.not-proportional-to-f", f, g, N, entries)
    A, B = f.A, g.A
    aux = g
    if B.is_zero():
        F, G = f.truncate(N).nonlinear_part(), g.truncate(N).nonlinear_part()
        lam = constant_proportionality(G, F)
        aux = (g + f).truncate(N)
        if lam is None:
            entries.append(Evidence("i.linear-part", PASS, "B = 0 and G is not a constant multiple of F", {"auxiliary_symmetry": aux}))
        else:
            entries.append(Evidence("i.linear-part", FAIL, "B = 0 but G is a constant multiple of F", {"factor": lam.factor}))
    else:
        lam = constant_proportionality(B, A)
        if lam is not None and lam.factor:
            entries.append(Evidence("i.linear-part", PASS, "B is a nonzero multiple of A", {"factor": lam.factor}))
        else:
            entries.append(Evidence("i.linear-part", FAIL, "B is neither zero nor a multiple of A", {"B": B}))

    nr = _normalize_entry(f, eigen, N, entries)
    if nr is not None:
        moved = transport_symmetry(aux, nr)
        residual = lie_bracket(nr.normal_form, moved)
        entries.append(
            Evidence(
                "transported-symmetry",
                INFO,
                f"bracket of the normal form with the transported symmetry {'vanishes' if residual.is_zero() else 'is nonzero'}",
                {"transported": moved, "residual": residual},
            )
        )
    _hypothesis_ii(nr, eigen, M, N, entries)
    return CertificateReport("theorem1", _verdict(entries), N, k_max, tuple(entries))


def certify_theorem2(
    f: VectorField,
    gs: Sequence[VectorField],
    M: ExactMatrix | None = None,
    N: int = 6,
    k_max: int = 8,
    ell: int | None = None,
    *,
    eigen: EigenData | None = None,
    omega_variant: str = "paper",
    strict_positive: bool = False,
    precision: int = 50,
    threads: int = 1,
    budget: int | None = None,
) -> CertificateReport:
    """Check the hypotheses of the several-symmetries convergence theorem.

    The symmetries ``gs`` must have nonzero, linearly independent linear
    parts ``B_j``, no nonzero combination of them may be a multiple of
    ``f``, and ``ell = len(gs)`` must equal the dimension of the space of
    linear symmetries of the normal form (``Au`` included; the count
    without ``Au`` is reported alongside). Hypothesis (ii) is as for the
    single-symmetry theorem.
    """
    gs = list(gs)
    if ell is None:
        ell = len(gs)
    if ell < 1 or not gs:
        raise ValueError("need ell >= 1 and at least one symmetry")
    if any(g.n != f.n for g in gs):
        raise ValueError("dimension mismatch")
    _check_degree(N, f, *gs)
    M = ExactMatrix.identity(f.n) if M is None else M
    entries: list = []
    eigen = _eigen(f, eigen, entries)
    _standing(f, eigen, N, k_max, _omega_opts(omega_variant, strict_positive, precision, threads, budget), entries)

    for j, g in enumerate(gs):
        _symmetry_entry(f"symmetry[{j}]", f, g, N, entries)
        if g.A.is_zero():
            entries.append(Evidence(f"nonzero-linear-part[{j}]", FAIL, "B_j = 0"))
        else:
            entries.append(Evidence(f"nonzero-linear-part[{j}]", PASS, "B_j != 0"))
    if len(gs) == ell:
        entries.append(Evidence("count", PASS, f"{ell} symmetries supplied"))
    else:
        entries.append(Evidence("count", FAIL, f"{len(gs)} symmetries supplied but ell = {ell}"))
    r = rank([g.A.flat() for g in gs], f.n * f.n)
    entries.append(
        Evidence("linear-independence", PASS if r == len(gs) else FAIL, f"rank of the B_j is {r} for {len(gs)} symmetries", {"rank": r})
    )

    # sum_j c_j g_j + c f = 0 with some c_j != 0 means a combination is a multiple of f
    fields = [g.truncate(N) for g in gs] + [f.truncate(N)]
    keys = sorted({k for fld in fields for k in _field_keys(fld)}, key=_key_order)
    rows = []
    for k in keys:
        rows.append({c: v for c, fld in enumerate(fields) if (v := _field_entry(fld, k))})
    bad = [v for v in kernel_basis(rows, len(fields)) if any(v[:-1])]
    if bad:
        entries.append(Evidence("no-combination-proportional-to-f", FAIL, "a linear combination of the g_j is a multiple of f", {"combination": bad[0]}))
    else:
        entries.append(Evidence("no-combination-proportional-to-f", PASS, "no combination of the g_j is a multiple of f"))

    nr = _normalize_entry(f, eigen, N, entries)
    if nr is not None:
        basis = linear_symmetries(nr.normal_form)
        count = len(basis)
        A_eig = nr.normal_form.A
        with_A = rank([B.flat() for B in basis] + [A_eig.flat()], f.n * f.n)
        without = count - 1 if with_A == count else count
        status = PASS if count == ell else FAIL
        entries.append(
            Evidence(
                "nf-linear-symmetries",
                status,
                f"normal form has {count} independent linear symmetries ({without} excluding Au); ell = {ell}",
                {"count_including_A": count, "count_excluding_A": without, "basis": basis},
            )
        )
        moved = [transport_symmetry(g, nr) for g in gs]
        ok = all(lie_bracket(nr.normal_form, m).is_zero() for m in moved)
        entries.append(
            Evidence("transported-symmetries", INFO, f"transported symmetries {'commute' if ok else 'do not all commute'} with the normal form")
        )
    _hypothesis_ii(nr, eigen, M, N, entries)
    return CertificateReport("theorem2", _verdict(entries), N, k_max, tuple(entries))


def _field_keys(f: VectorField):
    for i in range(f.n):
        for j in range(f.n):
            if f.A[i, j]:
                yield (i, unit(f.n, j))
    yield from f.terms


def _field_entry(f: VectorField, key):
    j, q = key
    if sum(q) == 1:
        return f.A[j, q.index(1)]
    return f.terms.get(key)


def _key_order(key):
    j, q = key
    return (j, sum(q), tuple(-e for e in q))


def corollary_2d(
    f: VectorField,
    g: VectorField,
    N: int = 6,
    k_max: int = 8,
    *,
    eigen: EigenData | None = None,
    omega_variant: str = "paper",
    strict_positive: bool = False,
    precision: int = 50,
    threads: int = 1,
    budget: int | None = None,
) -> CertificateReport:
    """Planar case: a nontrivial symmetry suffices, hypothesis (ii) is automatic."""
    if f.n != 2 or g.n != 2:
        raise ValueError("the planar corollary needs dimension 2")
    _check_degree(N, f, g)
    entries: list = []
    eigen = _eigen(f, eigen, entries)
    _standing(f, eigen, N, k_max, _omega_opts(omega_variant, strict_positive, precision, threads, budget), entries)
    _symmetry_entry("symmetry", f, g, N, entries)
    _not_proportional_entry("not-proportional-to-f", f, g, N, entries)
    entries.append(Evidence("ii.automatic", INFO, "hypothesis (ii) holds automatically in dimension 2"))
    return CertificateReport("corollary", _verdict(entries), N, k_max, tuple(entries))
