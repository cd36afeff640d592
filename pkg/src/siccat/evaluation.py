"""Turn a recipe into numbers.

Evaluation happens in three steps: generators in tower order
(:func:`evaluate_generators`), derived quantities in file order
(:func:`resolve_derived`), then the components and the normalising factor
(:func:`assemble_fiducial`).  :func:`build_fiducial` runs all three.

Some recipes leave a polynomial root unspecified ("branch search").
:func:`certify_branches` tries every assignment of real roots and keeps the
ones whose vector passes the equiangularity test.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

from .catalogue.expr import evaluate
from .catalogue.recipe import POLYROOT, ROOTOFUNITY, SEARCH, SQRT, FiducialRecipe, GeneratorDef
from .numeric import DEFAULT_DIGITS, DegenerateRoots, Kernel, from_raw, kernel, pass_epsilon, to_raw

PASS, FAIL = "pass", "fail"


class MissingBranch(LookupError):
    """A search generator has no branch index, or the index is out of range."""


class DivisionByNearZero(ArithmeticError):
    pass


class NormalizationFailure(ArithmeticError):
    def __init__(self, message: str, residue=None):
        super().__init__(message)
        self.residue = residue


class NoPassingBranch(RuntimeError):
    def __init__(self, message: str, certificates=()):
        super().__init__(message)
        self.certificates = list(certificates)


@dataclass
class Environment:
    values: dict
    digits: int
    branches: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.values[name]

    def __contains__(self, name):
        return name in self.values

    @property
    def kernel(self) -> Kernel:
        return kernel(self.digits)


@dataclass
class Fiducial:
    label: str
    d: int
    components: list
    layout: tuple[int, ...]
    digits: int
    environment: Environment | None = None
    normalized: bool = True
    branches: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BranchCertificate:
    label: str
    branches: tuple[tuple[str, int], ...]
    max_deviation: object  # mpf, or None when evaluation itself failed
    verdict: str
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _number(k: Kernel):
    ctx = k.ctx
    return lambda q: ctx.mpf(q.numerator) / q.denominator if q.denominator != 1 else ctx.mpf(q.numerator)


def _eval(expr, values: Mapping, k: Kernel):
    return evaluate(expr, values.__getitem__, _number(k))


def _real_part(x, k: Kernel):
    if hasattr(x, "imag"):
        if abs(x.imag) > k.tolerance * max(1, abs(x.real)):
            return x
        return x.real
    return x


def candidate_roots(g: GeneratorDef, values: Mapping, k: Kernel) -> list:
    return k.real_roots([_eval(c, values, k) for c in g.coeffs])


def _evaluate_generator(g: GeneratorDef, values: dict, branches: Mapping, k: Kernel):
    if g.kind == SQRT:
        return k.sqrt_branch(_real_part(_eval(g.operand, values, k), k), g.branch)
    if g.kind == ROOTOFUNITY:
        return k.root_of_unity(*g.root)
    index = branches.get(g.name, g.branch)
    if index == SEARCH:
        raise MissingBranch(f"generator {g.name} needs a branch index (it is a 'branch search' root)")
    roots = candidate_roots(g, values, k)
    if not 0 <= index < len(roots):
        raise MissingBranch(f"generator {g.name} has {len(roots)} real roots, branch index {index} is out of range")
    return roots[index]


def evaluate_generators(recipe: FiducialRecipe, branches: Mapping[str, int] | None = None,
                        digits: int = DEFAULT_DIGITS) -> Environment:
    """Evaluate every generator; ``branches`` maps search generators to root indices."""
    branches = dict(branches or {})
    for name in branches:
        g = recipe.generator(name)
        if g.kind != POLYROOT:
            raise MissingBranch(f"{name} is not a polynomial-root generator")
    k = kernel(digits)
    values: dict = {}
    used = {}
    for g in recipe.generators:
        values[g.name] = _evaluate_generator(g, values, branches, k)
        if g.kind == POLYROOT:
            used[g.name] = branches.get(g.name, g.branch)
    return Environment(values, digits, used)


def resolve_derived(env: Environment, recipe: FiducialRecipe) -> Environment:
    k = env.kernel
    guard = k.eps(-(env.digits // 2))
    values = dict(env.values)
    for x in recipe.derived:
        value = _eval(x.value, values, k)
        if x.is_constraint:
            divisor = k.ctx.mpf(1)
            for s in x.product:
                if s != x.name:
                    divisor *= values[s]
            if abs(divisor) < guard:
                raise DivisionByNearZero(f"solving for {x.name}: divisor {k.ctx.nstr(abs(divisor), 5)} is below 10^-{env.digits // 2}")
            value = value / divisor
        values[x.name] = value
    return Environment(values, env.digits, dict(env.branches))


def normalization_factor(recipe: FiducialRecipe, env: Environment):
    k = env.kernel
    n = _eval(recipe.norm, env.values, k)
    if recipe.norm_radicand is not None:
        n = n * k.sqrt_branch(_real_part(_eval(recipe.norm_radicand, env.values, k), k))
    return n


def norm_squared(components, k: Kernel):
    return k.ctx.fsum(k.abs2(c) for c in components)


def assemble_fiducial(recipe: FiducialRecipe, env: Environment, normalize: bool = True,
                      check: bool = True) -> Fiducial:
    """Evaluate the components; with ``normalize`` multiply by N and (with
    ``check``) insist that the result has unit norm.  N is never adjusted."""
    k = env.kernel
    ctx = k.ctx
    raw = [_eval(c, env.values, k) for c in recipe.components]
    raw = [ctx.mpc(c) for c in raw]
    if not normalize:
        return Fiducial(recipe.label, recipe.d, raw, recipe.layout, env.digits, env, False, dict(env.branches))
    n = normalization_factor(recipe, env)
    comps = [n * c for c in raw]
    if check:
        residue = abs(norm_squared(comps, k) - 1)
        if residue >= pass_epsilon(env.digits):
            raise NormalizationFailure(
                f"{recipe.label}: |norm^2 - 1| = {ctx.nstr(residue, 5)} with the recipe's normalising factor", residue
            )
    return Fiducial(recipe.label, recipe.d, comps, recipe.layout, env.digits, env, True, dict(env.branches))


def build_fiducial(recipe: FiducialRecipe, branches: Mapping[str, int] | None = None,
                   digits: int = DEFAULT_DIGITS, check: bool = True) -> Fiducial:
    if branches is None:
        branches = dict(recipe.canonical_branches)
    env = resolve_derived(evaluate_generators(recipe, branches, digits), recipe)
    return assemble_fiducial(recipe, env, check=check)


def branch_assignments(recipe: FiducialRecipe, digits: int = DEFAULT_DIGITS) -> list[dict]:
    """Every assignment of real-root indices to the search generators."""
    search = recipe.search_generators
    if len(search) > 4:
        raise ValueError(f"{recipe.label}: {len(search)} search generators, at most 4 are supported")
    k = kernel(digits)
    out = []

    def walk(assigned: dict):
        # evaluate generators in order until the next unassigned search root
        values: dict = {}
        for g in recipe.generators:
            if g.is_search and g.name not in assigned:
                for i in range(len(candidate_roots(g, values, k))):
                    walk({**assigned, g.name: i})
                return
            values[g.name] = _evaluate_generator(g, values, assigned, k)
        out.append(assigned)

    walk({})
    return out


def _certify_one(args) -> BranchCertificate:
    recipe, branches, digits = args
    from .verification import verify_equiangular, verify_norm

    key = tuple(sorted(branches.items()))
    try:
        fid = build_fiducial(recipe, branches, digits, check=False)
    except (DivisionByNearZero, DegenerateRoots, MissingBranch) as exc:
        return BranchCertificate(recipe.label, key, None, FAIL, f"{type(exc).__name__}: {exc}")
    report = verify_equiangular(fid)
    norm_residue = verify_norm(fid)
    eps = pass_epsilon(digits)
    reason = ""
    ok = report.max_deviation < eps
    if norm_residue >= eps:
        ok = False
        reason = "normalising factor does not give a unit vector"
    return BranchCertificate(recipe.label, key, report.max_deviation, PASS if ok else FAIL, reason)


def _certify_remote(args):
    cert = _certify_one(args)
    return replace(cert, max_deviation=None if cert.max_deviation is None else to_raw(cert.max_deviation))


def certify_branches(recipe: FiducialRecipe, digits: int = DEFAULT_DIGITS, workers: int = 1) -> list[BranchCertificate]:
    """One certificate per branch assignment, in lexicographic order of assignment."""
    jobs = [(recipe, b, digits) for b in branch_assignments(recipe, digits)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            certs = [replace(c, max_deviation=None if c.max_deviation is None else from_raw(c.max_deviation, digits))
                     for c in pool.map(_certify_remote, jobs)]
    else:
        certs = [_certify_one(j) for j in jobs]
    return sorted(certs, key=lambda c: c.branches)


def canonical_branches(certificates) -> dict:
    passing = [c for c in certificates if c.passed]
    if not passing:
        label = certificates[0].label if certificates else "?"
        raise NoPassingBranch(f"{label}: no branch assignment passes certification", certificates)
    return dict(min(c.branches for c in passing))


def certified_recipe(recipe: FiducialRecipe, digits: int = DEFAULT_DIGITS, workers: int = 1):
    """Certify and return (recipe with canonical branches, certificates)."""
    certs = certify_branches(recipe, digits, workers)
    return recipe.with_canonical_branches(canonical_branches(certs)), certs
