"""Command-line front end.

Every subcommand prints a JSON report on stdout (or to ``--report``) and a
short human summary on stderr. Exit codes: 0 success or certified,
2 a checked hypothesis failed, 3 input error, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
from decimal import Decimal
from pathlib import Path

from .algebra import ExactMatrix, as_gr, parse_coefficient
from .analysis import (
    DEFAULT_BUDGET,
    DEFAULT_THRESHOLD,
    BudgetExceeded,
    check_condition_A,
    check_omega,
    common_linear_integrals,
    fit_nf_shape,
)
from .fieldspec import (
    FieldSpecError,
    document_from_field,
    dumps,
    emit_document,
    parse_field_file,
    parse_matrix_file,
    to_jsonable,
)
from .normalform import EigenData, eigenbasis_for_block_rotation, normalize
from .symmetry import certify_theorem1, certify_theorem2, check_symmetry, corollary_2d
from .systems import build_example_rotation2d, build_example_so3, default_p_choice

__all__ = ["main", "run_command", "build_parser"]

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


# -- argument parsing ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, degree=True, omega=False, M=False):
    if degree:
        p.add_argument("--degree", type=int, default=6, help="truncation degree N (default 6)")
    if omega:
        p.add_argument("--kmax", type=int, default=8, help="condition-omega horizon (default 8)")
        p.add_argument("--omega-variant", choices=("paper", "shifted"), default="paper")
        p.add_argument("--strict-positive-q", action="store_true", help="require every q_i >= 1")
        p.add_argument("--precision", type=int, default=50, help="decimal digits (default 50)")
        p.add_argument("--threshold", default=str(DEFAULT_THRESHOLD), help="partial-sum threshold for a violation")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="lattice point budget")
    if M:
        p.add_argument("--M", default="identity", help="'identity' or a JSON matrix file, in input coordinates")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the omega search (default 1)")
    p.add_argument("--report", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdnf", description="Normal forms, symmetries and convergence certificates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("normalize", help="normal form up to a degree")
    p.add_argument("field")
    p.add_argument("--out", help="write the normal form as a field document")
    _common(p)

    p = sub.add_parser("check-omega", help="condition omega up to a horizon")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("field", nargs="?")
    src.add_argument("--eigenvalues", help="comma-separated coefficients, e.g. 'i,-i'")
    _common(p, degree=False, omega=True)

    p = sub.add_parser("check-condition-a", help="is f = Au + alpha(u) Au up to a degree")
    p.add_argument("field")
    _common(p)

    p = sub.add_parser("check-symmetry", help="bracket {f, g} up to a degree")
    p.add_argument("field")
    p.add_argument("symmetry")
    _common(p)

    p = sub.add_parser("fit-shape", help="normalize, then fit Au + alpha Au + mu Mu")
    p.add_argument("field")
    _common(p, M=True)

    p = sub.add_parser("integrals", help="common polynomial integrals of u' = Au and u' = Mu")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("field", nargs="?")
    src.add_argument("--eigenvalues")
    _common(p, M=True)

    p = sub.add_parser("certify", help="check the hypotheses of a convergence theorem")
    p.add_argument("field")
    p.add_argument("symmetries", nargs="+")
    p.add_argument("--theorem", choices=("1", "2", "corollary"), default="1")
    p.add_argument("--ell", type=int, help="number of symmetries claimed (theorem 2; default: as given)")
    _common(p, omega=True, M=True)

    p = sub.add_parser("example", help="write the block-rotation example systems")
    p.add_argument("name", choices=("rotation2d", "so3"))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", help="p as invariant monomials, e.g. 'xx=1' or 'xx^2=1,xx*yy=-1/2'")
    p.add_argument("--outdir", default=".")
    p.add_argument("--stem", help="file name stem (default <name>_k<k>)")
    _common(p)
    return parser


# -- helpers --------------------------------------------------------------------------------

_INVARIANTS = {"xx": 0, "yy": 1, "xy": 2}


def parse_p_choice(text: str) -> dict:
    """``'xx^2=1,xx*yy=-1/2'`` -> ``{(2, 0, 0): 1, (1, 1, 0): -1/2}``."""
    out: dict = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        mono, sep, coeff = item.partition("=")
        if not sep:
            raise InputError(f"--p term {item!r} needs the form monomial=coeff")
        e = [0, 0, 0]
        for factor in mono.strip().split("*"):
            m = re.fullmatch(r"\s*(xx|yy|xy)\s*(?:\^\s*(\d+))?\s*", factor)
            if not m:
                raise InputError(f"--p factor {factor!r} is not xx, yy or xy with an optional ^power")
            e[_INVARIANTS[m.group(1)]] += int(m.group(2) or 1)
        key = tuple(e)
        if key in out:
            raise InputError(f"--p monomial {mono.strip()!r} given twice")
        try:
            out[key] = parse_coefficient(coeff.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"--p: {exc}") from None
    if not out:
        raise InputError("--p is empty")
    return out


def _eigenvalues(text: str) -> tuple:
    try:
        return tuple(parse_coefficient(s.strip()) for s in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--eigenvalues: {exc}") from None


def _load(path):
    doc, f = parse_field_file(path)
    eigen = doc.eigen()
    if eigen is None:
        try:
            eigen = EigenData.from_matrix(f.A)
        except ValueError as exc:
            raise FieldSpecError(str(exc), "eigen") from None
    return f, eigen


def _matrix(arg: str, n: int) -> ExactMatrix:
    if arg == "identity":
        return ExactMatrix.identity(n)
    return parse_matrix_file(arg, n)


def _omega_settings(args) -> dict:
    return {
        "kmax": args.kmax,
        "omega_variant": args.omega_variant,
        "strict_positive_q": args.strict_positive_q,
        "precision": args.precision,
        "threshold": str(Decimal(args.threshold)),
        "budget": args.budget,
    }


def _omega_kwargs(args) -> dict:
    return {
        "strict_positive": args.strict_positive_q,
        "precision": args.precision,
        "threads": args.threads,
        "budget": args.budget,
    }


# -- subcommands -----------------------------------------------------------------------------


def cmd_normalize(args):
    f, eigen = _load(args.field)
    nr = normalize(f, eigen, args.degree)
    h = nr.normal_form
    if args.out:
        Path(args.out).write_text(emit_document(document_from_field(h)), encoding="utf-8")
    report = {
        "eigenvalues": list(eigen.values),
        "normal_form": h,
        "generators": [{"degree": d, "generator": g} for d, g in nr.nonzero_generators()],
    }
    summary = f"normal form up to degree {args.degree}; {len(report['generators'])} nonzero generators"
    return EXIT_OK, report, summary


def cmd_check_omega(args):
    if args.eigenvalues:
        a = _eigenvalues(args.eigenvalues)
    else:
        a = _load(args.field)[1].values
    rep = check_omega(a, args.kmax, args.omega_variant, threshold=Decimal(args.threshold), **_omega_kwargs(args))
    code = EXIT_FAILED if rep.verdict == "violated" else EXIT_OK
    return code, {"omega": rep}, f"condition omega: {rep.verdict} (k_max={args.kmax})"


def cmd_check_condition_a(args):
    f, _ = _load(args.field)
    if args.degree > f.truncation:
        raise ValueError(f"degree {args.degree} exceeds the field truncation {f.truncation}")
    alpha = check_condition_A(f.truncate(args.degree))
    holds = alpha is not None
    report = {"holds": holds, "alpha": alpha}
    return (EXIT_OK if holds else EXIT_FAILED), report, f"condition A {'holds' if holds else 'fails'} up to degree {args.degree}"


def cmd_check_symmetry(args):
    f, _ = _load(args.field)
    g = parse_field_file(args.symmetry)[1]
    residual = check_symmetry(f, g, args.degree)
    ok = residual.is_zero()
    report = {"residual": residual, "residual_is_zero": ok}
    return (EXIT_OK if ok else EXIT_FAILED), report, f"bracket {'vanishes' if ok else 'is nonzero'} up to degree {args.degree}"


def cmd_fit_shape(args):
    f, eigen = _load(args.field)
    M = _matrix(args.M, f.n)
    nr = normalize(f, eigen, args.degree)
    M_eig = eigen.matrix_to_eigen(M)
    try:
        fit = fit_nf_shape(nr.normal_form, M_eig)
    except ValueError as exc:
        return EXIT_FAILED, {"fit": None, "reason": str(exc), "normal_form": nr.normal_form}, f"shape fit rejected: {exc}"
    report = {"fit": fit, "normal_form": nr.normal_form}
    ok = fit is not None
    return (EXIT_OK if ok else EXIT_FAILED), report, f"shape fit {'succeeds' if ok else 'fails'} up to degree {args.degree}"


def cmd_integrals(args):
    if args.eigenvalues:
        a = _eigenvalues(args.eigenvalues)
        M = _matrix(args.M, len(a))
    else:
        f, eigen = _load(args.field)
        a = eigen.values
        M = eigen.matrix_to_eigen(_matrix(args.M, f.n))
    ib = common_linear_integrals(a, M, args.degree)
    return EXIT_OK, {"integrals": ib}, f"{len(ib.basis)} common integrals up to degree {args.degree}"


def cmd_certify(args):
    f, eigen = _load(args.field)
    gs = [parse_field_file(p)[1] for p in args.symmetries]
    M = _matrix(args.M, f.n)
    opts = dict(
        eigen=eigen,
        omega_variant=args.omega_variant,
        strict_positive=args.strict_positive_q,
        precision=args.precision,
        threads=args.threads,
        budget=args.budget,
    )
    if args.theorem == "2":
        rep = certify_theorem2(f, gs, M, args.degree, args.kmax, args.ell, **opts)
    else:
        if len(gs) != 1:
            raise InputError(f"--theorem {args.theorem} takes exactly one symmetry")
        if args.theorem == "1":
            rep = certify_theorem1(f, gs[0], M, args.degree, args.kmax, **opts)
        else:
            rep = corollary_2d(f, gs[0], args.degree, args.kmax, **opts)
    report = {
        "theorem": rep.theorem,
        "verdict": rep.verdict,
        "truncation": rep.truncation,
        "k_max": rep.k_max,
        "entries": [{"name": e.name, "status": e.status, "detail": e.detail, "witness": e.witness} for e in rep.entries],
    }
    lines = [f"{rep.theorem}: {rep.verdict}"] + [f"  {e.status:16} {e.name}: {e.detail}" for e in rep.entries]
    return (EXIT_OK if rep.certified else EXIT_FAILED), report, "\n".join(lines)


def cmd_example(args):
    p = parse_p_choice(args.p) if args.p else default_p_choice(args.k)
    if args.name == "rotation2d":
        f, g = build_example_rotation2d(args.k, args.degree, p)
        eigen = eigenbasis_for_block_rotation(1)
    else:
        f, g, _ = build_example_so3(args.k, args.degree, p)
        eigen = eigenbasis_for_block_rotation(3)
    stem = args.stem or f"{args.name}_k{args.k}"
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = {"field": f"{stem}.json", "symmetry": f"{stem}_g.json"}
    (outdir / files["field"]).write_text(emit_document(document_from_field(f, eigen)), encoding="utf-8")
    (outdir / files["symmetry"]).write_text(emit_document(document_from_field(g)), encoding="utf-8")
    report = {"example": args.name, "k": args.k, "p": {",".join(map(str, q)): as_gr(c) for q, c in sorted(p.items())}, "files": files}
    return EXIT_OK, report, f"wrote {files['field']} and {files['symmetry']} to {outdir}"


COMMANDS = {
    "normalize": cmd_normalize,
    "check-omega": cmd_check_omega,
    "check-condition-a": cmd_check_condition_a,
    "check-symmetry": cmd_check_symmetry,
    "fit-shape": cmd_fit_shape,
    "integrals": cmd_integrals,
    "certify": cmd_certify,
    "example": cmd_example,
}


def _settings(args) -> dict:
    out = {}
    for key in ("degree", "M", "theorem", "ell"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    if hasattr(args, "kmax"):
        out.update(_omega_settings(args))
    return out


def run_command(argv=None, stdout=None, stderr=None) -> int:
    """Run one subcommand and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "degree", 2) < 1:
            raise InputError("--degree must be positive")
        code, body, summary = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except (FieldSpecError, OSError) as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=stderr)
        return EXIT_BUDGET
    except (ValueError, ArithmeticError) as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_INPUT
    precision = getattr(args, "precision", 50)
    report = {"command": args.command, "settings": _settings(args), "exit_code": code}
    report.update(body)
    text = dumps(to_jsonable(report, precision))
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    print(summary, file=stderr)
    return code


def main(argv=None) -> None:
    try:
        code = run_command(argv)
    except SystemExit as exc:  # --help
        code = exc.code if isinstance(exc.code, int) else EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
