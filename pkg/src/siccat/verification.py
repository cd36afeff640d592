"""Certificates for a fiducial: equiangularity, norm, stated identities.

A unit vector whose d^2 - 1 nontrivial overlaps all have modulus squared
1/(d+1) generates a SIC: the d^2 rank-one projectors then sum to d times
the identity (a standard frame-theory fact), so no separate completeness
check is made.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .catalogue.expr import evaluate
from .catalogue.recipe import FiducialRecipe
from .evaluation import Environment, Fiducial, _eval, build_fiducial, norm_squared
from .heisenberg import DisplacementLabel, all_overlaps, check_layout, enumerate_displacements
from .numeric import DEFAULT_DIGITS, from_raw, kernel, pass_epsilon, to_raw
from .number_theory import QuadElem


@dataclass
class VerificationReport:
    label: str
    d: int
    digits: int
    epsilon_pass: object
    target: Fraction
    max_deviation: object
    mean_deviation: object
    worst_label: DisplacementLabel | None
    overlap_count: int
    norm_residue: object = None
    relation_residues: dict = field(default_factory=dict)
    ratio_residues: dict = field(default_factory=dict)
    unit_norms: dict = field(default_factory=dict)
    conjugation_match: tuple | None = None
    conjugation_checked: bool = False
    branches: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def equiangular(self) -> bool:
        return self.max_deviation < self.epsilon_pass

    @property
    def failures(self) -> list[str]:
        out = []
        eps = self.epsilon_pass
        if not self.equiangular:
            out.append("equiangularity")
        if self.norm_residue is not None and not self.norm_residue < eps:
            out.append("normalization")
        out += [f"relation {n}" for n, r in self.relation_residues.items() if not r < eps]
        out += [f"unit check {n}" for n, q in self.unit_norms.items() if abs(q) != 1]
        return out

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    def to_dict(self) -> dict:
        k = kernel(self.digits)

        def num(x):
            return None if x is None else k.ctx.nstr(x, 12, min_fixed=1, max_fixed=0)

        match = None
        if self.conjugation_match is not None:
            lab, phase = self.conjugation_match
            match = {"label": str(lab), "phase": [num(phase.real), num(phase.imag)]}
        return {
            "label": self.label,
            "d": self.d,
            "digits": self.digits,
            "epsilon_pass": num(self.epsilon_pass),
            "target": str(self.target),
            "overlaps_checked": self.overlap_count,
            "max_deviation": num(self.max_deviation),
            "mean_deviation": num(self.mean_deviation),
            "worst_label": str(self.worst_label) if self.worst_label else None,
            "norm_residue": num(self.norm_residue),
            "relation_residues": {n: num(r) for n, r in self.relation_residues.items()},
            "ratio_residues": {n: {q: num(r) for q, r in rs.items()} for n, rs in self.ratio_residues.items()},
            "unit_norms": {n: str(q) for n, q in self.unit_norms.items()},
            "conjugation_probe": match if self.conjugation_checked else "not run",
            "branches": dict(self.branches),
            "elapsed_seconds": round(self.elapsed, 3),
            "verdict": self.verdict,
            "failures": self.failures,
        }


def _overlap_chunk(args):
    psi, layout, digits, conjugate_bra, labels = args
    psi = [from_raw(x, digits) for x in psi]
    return [(lab, to_raw(c)) for lab, c in all_overlaps(psi, layout, digits, conjugate_bra, labels)]


def _overlaps(psi, layout, digits, conjugate_bra=True, workers=1):
    """all_overlaps, optionally split over inner labels between processes."""
    if workers <= 1:
        return all_overlaps(psi, layout, digits, conjugate_bra)
    rest = layout[1:] if layout[0] != 4 else layout
    inner = list(enumerate_displacements(rest)) if rest else [DisplacementLabel(())]
    chunks = [inner[i::workers] for i in range(workers) if inner[i::workers]]
    raw = [to_raw(kernel(digits).convert(x)) for x in psi]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        parts = pool.map(_overlap_chunk, [(raw, layout, digits, conjugate_bra, c) for c in chunks])
        merged = [(lab, from_raw(c, digits)) for part in parts for lab, c in part]
    # same order as the single-process call
    return sorted(merged, key=lambda pair: pair[0])


def verify_equiangular(fiducial: Fiducial, layout=None, epsilon=None, workers: int = 1) -> VerificationReport:
    """Max and mean of ||<psi, D psi>|^2 - 1/(d+1)| over the non-identity labels.

    An unnormalised vector is measured through |<psi, D psi>|^2 / |psi|^4.
    """
    start = time.perf_counter()
    digits = fiducial.digits
    k = kernel(digits)
    ctx = k.ctx
    layout = check_layout(layout or fiducial.layout, fiducial.d)
    eps = pass_epsilon(digits) if epsilon is None else epsilon
    target = ctx.mpf(1) / (fiducial.d + 1)
    scale = ctx.mpf(1)
    if not fiducial.normalized:
        scale = 1 / norm_squared(fiducial.components, k) ** 2
    worst, worst_label, total, count = ctx.mpf(-1), None, ctx.mpf(0), 0
    for label, c in _overlaps(fiducial.components, layout, digits, True, workers):
        if label.is_identity:
            continue
        dev = abs(k.abs2(c) * scale - target)
        total += dev
        count += 1
        if dev > worst:
            worst, worst_label = dev, label
    return VerificationReport(
        label=fiducial.label,
        d=fiducial.d,
        digits=digits,
        epsilon_pass=eps,
        target=Fraction(1, fiducial.d + 1),
        max_deviation=worst,
        mean_deviation=total / count,
        worst_label=worst_label,
        overlap_count=count,
        branches=dict(fiducial.branches),
        elapsed=time.perf_counter() - start,
    )


def verify_norm(fiducial: Fiducial, epsilon=None):
    """|sum |c_i|^2 - 1|."""
    k = kernel(fiducial.digits)
    return abs(norm_squared(fiducial.components, k) - 1)


def verify_relations(recipe: FiducialRecipe, env: Environment, epsilon=None) -> dict:
    """Residue |lhs - rhs| of every relation.  Each ratio polynomial
    contributes its smallest residue over all ordered ratios; the full
    table is in :func:`ratio_polynomial_residues`."""
    k = env.kernel
    out = {}
    for rel in recipe.relations:
        out[rel.name] = abs(_eval(rel.lhs, env.values, k) - _eval(rel.rhs, env.values, k))
    for name, table in ratio_polynomial_residues(recipe, env).items():
        out[name] = min(table.values())
    return out


def ratio_polynomial_residues(recipe: FiducialRecipe, env: Environment) -> dict:
    k = env.kernel
    ctx = k.ctx
    out = {}
    for rp in recipe.ratio_polynomials:
        table = {}
        for s, t in itertools.permutations(rp.symbols, 2):
            r = env[s] / env[t]
            table[f"{s}/{t}"] = abs(ctx.polyval([ctx.mpf(c) for c in rp.coeffs[::-1]], r))
        out[rp.name] = table
    return out


def exact_unit_norms(recipe: FiducialRecipe) -> dict:
    """Field norms of the unit-check elements, computed exactly in Q(sqrt D0)."""
    D0 = recipe.D0
    if recipe.unit_checks and D0 is None:
        raise ValueError(f"{recipe.label}: unit checks need a base generator 'a = sqrt(D0)'")
    out = {}
    a = QuadElem.sqrt(D0) if D0 else None
    for uc in recipe.unit_checks:
        z = evaluate(uc.value, lambda name: a, lambda q: QuadElem(q, 0, D0))
        out[uc.name] = z.norm()
    return out


def conjugation_probe(fiducial: Fiducial, layout=None, epsilon=None, workers: int = 1):
    """First label with |<conj(psi), D psi>| = 1, as (label, phase) with
    conj(psi) = phase * D psi; None when no label matches (inconclusive)."""
    digits = fiducial.digits
    k = kernel(digits)
    layout = check_layout(layout or fiducial.layout, fiducial.d)
    eps = pass_epsilon(digits) if epsilon is None else epsilon
    for label, c in _overlaps(fiducial.components, layout, digits, False, workers):
        if abs(abs(c) - 1) < eps:
            return label, k.ctx.conj(c) / abs(c)
    return None


def verify_fiducial(fiducial: Fiducial, recipe: FiducialRecipe | None = None, probe: bool = True,
                    workers: int = 1) -> VerificationReport:
    """Everything at once: overlaps, norm, relations (when a recipe and its
    environment are available), exact unit checks and the conjugation probe."""
    start = time.perf_counter()
    report = verify_equiangular(fiducial, workers=workers)
    report.norm_residue = verify_norm(fiducial)
    if recipe is not None and fiducial.environment is not None:
        report.relation_residues = verify_relations(recipe, fiducial.environment)
        report.ratio_residues = ratio_polynomial_residues(recipe, fiducial.environment)
    if recipe is not None:
        report.unit_norms = exact_unit_norms(recipe)
    if probe:
        report.conjugation_match = conjugation_probe(fiducial, workers=workers)
        report.conjugation_checked = True
    report.elapsed = time.perf_counter() - start
    return report


def verify_entry(recipe: FiducialRecipe, digits: int = DEFAULT_DIGITS, branches=None, probe: bool = True,
                 workers: int = 1) -> VerificationReport:
    fid = build_fiducial(recipe, branches, digits)
    return verify_fiducial(fid, recipe, probe, workers)
