"""Command-line interface: ``python -m siccat <command> ...``.

Exit codes: 0 success, 1 invalid input or unknown label, 2 no branch
assignment certifies, 3 file I/O failure, 4 verification failed,
5 a dimension n^2+3 broke the prime-factor pattern.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .catalogue import NotFound, character_count, galois_pairing_report, list_entries, lookup
from .catalogue.recipe import RecipeError
from .evaluation import (
    DivisionByNearZero,
    MissingBranch,
    NoPassingBranch,
    NormalizationFailure,
    build_fiducial,
    canonical_branches,
    certify_branches,
)
from .fileio import FiducialFileError, dumps, read_fiducial
from .numeric import DEFAULT_DIGITS, MIN_DIGITS, DegenerateRoots, kernel
from .number_theory import (
    ClassificationViolation,
    InvalidDimension,
    classify_dimension,
    dimension_sequence,
    fundamental_unit,
    is_n2_plus_3,
    is_squarefree,
    positive_norm_unit,
)
from .verification import verify_fiducial

EXIT_OK, EXIT_INVALID, EXIT_NO_BRANCH, EXIT_IO, EXIT_VERIFY, EXIT_CLASSIFICATION = range(6)
DIGITS_ENV = "SICCAT_DIGITS"


class UsageError(Exception):
    pass


def resolve_digits(flag: int | None) -> int:
    """--digits wins over $SICCAT_DIGITS, which wins over the default."""
    if flag is not None:
        digits = flag
    elif os.environ.get(DIGITS_ENV):
        try:
            digits = int(os.environ[DIGITS_ENV])
        except ValueError:
            raise UsageError(f"{DIGITS_ENV} must be an integer, got {os.environ[DIGITS_ENV]!r}") from None
    else:
        digits = DEFAULT_DIGITS
    if digits < MIN_DIGITS:
        raise UsageError(f"precision must be at least {MIN_DIGITS} digits")
    return digits


def parse_branches(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep or not value.strip().isdigit():
            raise UsageError(f"--branches expects name=k,...; got {part!r}")
        out[name.strip()] = int(value)
    return out


def _emit(args, text: str, data: dict) -> None:
    if args.json:
        data = {"tool": "siccat", "version": __version__, **data}
        print(json.dumps(data, indent=1, default=str))
    else:
        print(text)


def _num(x, digits: int, n: int = 6) -> str:
    return "n/a" if x is None else kernel(digits).ctx.nstr(x, n)


def _branches_for(recipe, branches, digits, workers):
    """Explicit branches, else certify and take the canonical assignment."""
    if branches is not None or not recipe.search_generators:
        return branches or {}, None
    certs = certify_branches(recipe, digits, workers)
    return canonical_branches(certs), certs


def cmd_list(args) -> int:
    rows = []
    for label in list_entries():
        r = lookup(label).recipe
        rows.append({"label": label, "d": r.d, "layout": list(r.layout),
                     "search_generators": [g.name for g in r.search_generators]})
    text = "\n".join(
        f"{row['label']:>5}  d={row['d']:<4} layout={'x'.join(map(str, row['layout']))}"
        + (f"  search: {', '.join(row['search_generators'])}" if row["search_generators"] else "")
        for row in rows
    )
    _emit(args, text, {"entries": rows})
    return EXIT_OK


def cmd_build(args) -> int:
    digits = resolve_digits(args.digits)
    recipe = lookup(args.label).recipe
    branches, _ = _branches_for(recipe, parse_branches(args.branches), digits, args.workers)
    fid = build_fiducial(recipe, branches, digits)
    payload = dumps(fid)
    if args.out:
        try:
            Path(args.out).write_text(payload, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
        if not args.json:
            print(f"wrote {args.label} (d={fid.d}, {digits} digits) to {args.out}")
        else:
            _emit(args, "", {"label": fid.label, "d": fid.d, "digits": digits, "out": args.out,
                             "branches": fid.branches})
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def _report_text(rep, source: str) -> str:
    d = rep.to_dict()
    lines = [
        f"{rep.label} (d={rep.d}) from {source}, {rep.digits} digits, siccat {__version__}",
        f"  target |<psi,D psi>|^2 = {d['target']}",
        f"  overlaps checked: {rep.overlap_count}",
        f"  max deviation:  {d['max_deviation']}  (pass below {d['epsilon_pass']})",
        f"  mean deviation: {d['mean_deviation']}",
        f"  worst label:    {d['worst_label']}",
        f"  norm residue:   {d['norm_residue']}",
    ]
    if rep.branches:
        lines.append("  branches:       " + ", ".join(f"{k}={v}" for k, v in sorted(rep.branches.items())))
    for name, r in d["relation_residues"].items():
        lines.append(f"  relation {name}: {r}")
    for name, table in d["ratio_residues"].items():
        hits = [q for q, r in table.items() if float(r) < 1e-30]
        lines.append(f"  {name}: vanishes on {len(hits)} of {len(table)} ratios: {' '.join(hits)}")
    for name, q in d["unit_norms"].items():
        lines.append(f"  unit check {name}: exact norm {q}")
    probe = d["conjugation_probe"]
    if probe == "not run":
        lines.append("  conjugation probe: not run")
    elif probe is None:
        lines.append("  conjugation probe: no Weyl-Heisenberg match (inconclusive)")
    else:
        lines.append(f"  conjugation probe: match at {probe['label']}, phase {probe['phase'][0]} + {probe['phase'][1]}i")
    lines.append(f"  verdict: {rep.verdict.upper()}" + (f" ({', '.join(rep.failures)})" if rep.failures else ""))
    return "\n".join(lines)


def cmd_verify(args) -> int:
    digits = resolve_digits(args.digits) if args.digits is not None or os.environ.get(DIGITS_ENV) else None
    target = args.target
    if Path(target).is_file():
        try:
            fid = read_fiducial(target, digits)
        except OSError as exc:
            print(f"error: cannot read {target}: {exc}", file=sys.stderr)
            return EXIT_IO
        recipe = None
        try:
            recipe = lookup(fid.label).recipe
            if recipe.d != fid.d:
                recipe = None
        except NotFound:
            pass
        # the file has no environment, so only exact unit checks come from the recipe
        rep = verify_fiducial(fid, recipe, probe=not args.no_probe, workers=args.workers)
        source = target
    else:
        digits = digits or DEFAULT_DIGITS
        recipe = lookup(target).recipe
        branches, _ = _branches_for(recipe, parse_branches(args.branches), digits, args.workers)
        fid = build_fiducial(recipe, branches, digits)
        rep = verify_fiducial(fid, recipe, probe=not args.no_probe, workers=args.workers)
        source = "catalogue"
    _emit(args, _report_text(rep, source), {"report": rep.to_dict(), "source": source})
    return EXIT_OK if rep.verdict == "pass" else EXIT_VERIFY


def cmd_certify(args) -> int:
    digits = resolve_digits(args.digits)
    recipe = lookup(args.label).recipe
    certs = certify_branches(recipe, digits, args.workers)
    rows = [{"branches": dict(c.branches), "max_deviation": _num(c.max_deviation, digits, 12),
             "verdict": c.verdict, "reason": c.reason} for c in certs]
    passing = [c for c in certs if c.passed]
    canonical = dict(min(c.branches for c in passing)) if passing else None
    lines = [f"{recipe.label}: {len(certs)} branch assignment(s), {len(passing)} passing, {digits} digits"]
    for c in certs:
        name = ", ".join(f"{k}={v}" for k, v in c.branches) or "(no search generators)"
        lines.append(f"  {name:<24} {c.verdict:<4}  max deviation {_num(c.max_deviation, digits)}"
                     + (f"  {c.reason}" if c.reason else ""))
    if canonical is not None:
        lines.append("  canonical: " + (", ".join(f"{k}={v}" for k, v in canonical.items()) or "(none needed)"))
    _emit(args, "\n".join(lines), {"label": recipe.label, "digits": digits, "certificates": rows,
                                   "canonical_branches": canonical})
    if not passing:
        print(f"error: no branch assignment of {recipe.label} passes", file=sys.stderr)
        return EXIT_NO_BRANCH
    return EXIT_OK


def _check_d0(d0: int) -> None:
    if d0 < 2 or not is_squarefree(d0):
        raise UsageError(f"D0 must be a squarefree integer >= 2, got {d0}")


def cmd_sequences(args) -> int:
    _check_d0(args.d0)
    if args.count < 1:
        raise UsageError("--count must be positive")
    seq = dimension_sequence(args.d0, args.count)
    _emit(args, " ".join(map(str, seq)), {"D0": args.d0, "u0": str(positive_norm_unit(args.d0)), "dimensions": seq})
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.n is not None:
        n = args.n
        if n < 1:
            raise UsageError("n must be positive")
    else:
        if args.d is None:
            raise UsageError("give a dimension d or --n")
        n = is_n2_plus_3(args.d)
        if n is None:
            raise UsageError(f"{args.d} is not of the form n^2 + 3")
    c = classify_dimension(n)
    text = f"{c.factor_string().replace('=', ' = ')}, n={n}, conforms"
    _emit(args, text, {"d": c.d, "n": n, "a2": c.a2, "a1": c.a1,
                       "odd_primes": [list(p) for p in c.odd_primes], "factorization": c.factor_string(),
                       "conforms": True})
    return EXIT_OK


def cmd_units(args) -> int:
    _check_d0(args.d0)
    eta, norm = fundamental_unit(args.d0)
    u0 = positive_norm_unit(args.d0)
    sign = "−" if norm < 0 else "+"
    text = f"{eta}, norm {sign}1\npositive-norm unit u0 = {u0}"
    _emit(args, text, {"D0": args.d0, "fundamental_unit": str(eta), "norm": norm,
                       "x": str(eta.x), "y": str(eta.y), "u0": str(u0)})
    return EXIT_OK


def cmd_report(args) -> int:
    recipe = lookup(args.label).recipe
    pairing = galois_pairing_report(recipe)
    count = character_count(recipe)
    lines = [f"{recipe.label} (d={recipe.d})", f"  character count: {count}", "  generators under a -> -a:"]
    for p in pairing:
        lines.append(f"    {p.generator:<6} {p.partner}" + (f"  ({p.detail})" if p.detail else ""))
    units = recipe.unit_claims
    lines.append("  unit claims: " + (", ".join(units) if units else "none"))
    for uc in recipe.unit_checks:
        lines.append(f"  unit check: {uc.name}")
    _emit(args, "\n".join(lines), {
        "label": recipe.label,
        "d": recipe.d,
        "character_count": count,
        "pairing": [{"generator": p.generator, "partner": p.partner, "detail": p.detail} for p in pairing],
        "unit_claims": units,
        "unit_checks": [uc.name for uc in recipe.unit_checks],
    })
    return EXIT_OK


def cmd_import(args) -> int:
    digits = resolve_digits(args.digits) if args.digits is not None else None
    try:
        fid = read_fiducial(args.file, digits)
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out:
        try:
            Path(args.out).write_text(dumps(fid), encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    text = f"{fid.label}: d={fid.d}, layout {'x'.join(map(str, fid.layout))}, {fid.digits} digits"
    if args.out:
        text += f", rewritten to {args.out}"
    _emit(args, text, {"label": fid.label, "d": fid.d, "digits": fid.digits, "block_layout": list(fid.layout),
                       "branches": fid.branches, "out": args.out})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    prec = argparse.ArgumentParser(add_help=False)
    prec.add_argument("--digits", type=int, default=None, help=f"working precision (default {DEFAULT_DIGITS}, or ${DIGITS_ENV})")
    prec.add_argument("--workers", type=int, default=1, help="processes for overlap computations")

    parser = argparse.ArgumentParser(prog="siccat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"siccat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", parents=[common], help="catalogue labels").set_defaults(func=cmd_list)

    p = sub.add_parser("build", parents=[common, prec], help="evaluate an entry and export it")
    p.add_argument("label")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--branches", help="root choices, e.g. c2=1")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", parents=[common, prec], help="certify a catalogue entry or a fiducial file")
    p.add_argument("target", help="catalogue label or path to a fiducial file")
    p.add_argument("--branches", help="root choices, e.g. c2=1")
    p.add_argument("--no-probe", action="store_true", help="skip the conjugation probe")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", parents=[common, prec], help="test every branch assignment")
    p.add_argument("label")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sequences", parents=[common], help="dimensions 1 + u0^k + conj(u0)^k")
    p.add_argument("--d0", type=int, required=True)
    p.add_argument("--count", type=int, default=7)
    p.set_defaults(func=cmd_sequences)

    p = sub.add_parser("classify", parents=[common], help="factor d = n^2 + 3")
    p.add_argument("d", type=int, nargs="?")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("units", parents=[common], help="fundamental unit of Q(sqrt D0)")
    p.add_argument("--d0", type=int, required=True)
    p.set_defaults(func=cmd_units)

    p = sub.add_parser("report", parents=[common], help="pairing, character count and unit claims")
    p.add_argument("label")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("import", parents=[common], help="read and validate a fiducial file")
    p.add_argument("file")
    p.add_argument("--out", help="write the validated file here")
    p.add_argument("--digits", type=int, default=None)
    p.set_defaults(func=cmd_import)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, RecipeError, InvalidDimension, MissingBranch, FiducialFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NoPassingBranch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_BRANCH
    except ClassificationViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CLASSIFICATION
    except (NormalizationFailure, DivisionByNearZero, DegenerateRoots) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
