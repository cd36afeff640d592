import pytest

from siccat.catalogue import lookup, parse_recipe
from siccat.evaluation import (
    PASS,
    DivisionByNearZero,
    MissingBranch,
    NoPassingBranch,
    NormalizationFailure,
    assemble_fiducial,
    branch_assignments,
    build_fiducial,
    canonical_branches,
    certify_branches,
    evaluate_generators,
    normalization_factor,
    resolve_derived,
)

DIGITS = 60


def test_generators_7b():
    env = evaluate_generators(lookup("7b").recipe, digits=DIGITS)
    k = env.kernel
    assert abs(env["a"] ** 2 - 2) < k.tolerance
    assert abs(env["m2"] ** 2 - (2 * env["a"] - 1)) < k.tolerance


def test_derived_units_7b():
    r = lookup("7b").recipe
    env = resolve_derived(evaluate_generators(r, digits=DIGITS), r)
    assert abs(env["eta"] * env["etainv"] - 1) < env.kernel.tolerance


def test_norm_identity_7b():
    # N^2 (1 + 3 eta^2 + 3 eta^-2) = 1
    r = lookup("7b").recipe
    env = resolve_derived(evaluate_generators(r, digits=DIGITS), r)
    n = normalization_factor(r, env)
    assert abs(n**2 * (1 + 3 * env["eta"] ** 2 + 3 * env["etainv"] ** 2) - 1) < env.kernel.tolerance


def test_search_generator_needs_branch():
    r = lookup("28c").recipe
    with pytest.raises(MissingBranch):
        build_fiducial(r, None, DIGITS)
    with pytest.raises(MissingBranch):
        build_fiducial(r, {"c2": 7}, DIGITS)
    with pytest.raises(MissingBranch):
        build_fiducial(r, {"a": 0}, DIGITS)


def test_branch_assignments():
    assert branch_assignments(lookup("7b").recipe, DIGITS) == [{}]
    assert branch_assignments(lookup("28c").recipe, DIGITS) == [{"c2": 0}, {"c2": 1}, {"c2": 2}]
    assert len(branch_assignments(lookup("39i").recipe, DIGITS)) == 2


def test_certify_28c():
    certs = certify_branches(lookup("28c").recipe, DIGITS)
    assert [c.branches for c in certs] == [(("c2", 0),), (("c2", 1),), (("c2", 2),)]
    assert any(c.verdict == PASS for c in certs)
    assert canonical_branches(certs) == {"c2": 0}


def test_parallel_certification_is_deterministic():
    r = lookup("28c").recipe
    serial = certify_branches(r, 40)
    parallel = certify_branches(r, 40, workers=3)
    assert [(c.branches, c.verdict, c.max_deviation) for c in serial] == \
        [(c.branches, c.verdict, c.max_deviation) for c in parallel]


WRONG = """\
entry 4z dim 4 layout 4
gen a = sqrt(5)
gen t = polyroot(-2,0,1) branch search
component 1 = 1
component 2 = t
component 3 = a
component 4 = 2
norm = 1/4
"""


def test_no_passing_branch():
    certs = certify_branches(parse_recipe(WRONG), 30)
    assert len(certs) == 2 and not any(c.passed for c in certs)
    with pytest.raises(NoPassingBranch):
        canonical_branches(certs)


def test_bad_normalization_is_not_repaired():
    r = parse_recipe(WRONG.replace("branch search", "branch index 1"))
    env = resolve_derived(evaluate_generators(r, digits=30), r)
    with pytest.raises(NormalizationFailure) as info:
        assemble_fiducial(r, env)
    assert info.value.residue > 0
    raw = assemble_fiducial(r, env, normalize=False)
    assert not raw.normalized


def test_constraint_divisor_guard():
    text = WRONG.replace("gen t = polyroot(-2,0,1) branch search\n", "let z = a-a\nconstraint z*w = 1 solve w\n")
    r = parse_recipe(text.replace("component 2 = t", "component 2 = w"))
    with pytest.raises(DivisionByNearZero):
        resolve_derived(evaluate_generators(r, digits=30), r)
