import itertools

import pytest

from siccat.catalogue import LayoutMismatch
from siccat.heisenberg import (
    SPECIAL_DIM4,
    DisplacementLabel,
    GroupFactor,
    all_overlaps,
    apply_displacement,
    check_layout,
    enumerate_displacements,
    factor_generators,
    inner_label_count,
)
from siccat.numeric import kernel

DIGITS = 30


def matmul(a, b):
    n = len(a)
    return [[sum(a[r][t] * b[t][c] for t in range(n)) for c in range(n)] for r in range(n)]


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_weyl_commutation(n):
    k = kernel(DIGITS)
    X, Z = factor_generators(n, DIGITS)
    zx, xz = matmul(Z, X), matmul(X, Z)
    w = k.root_of_unity(2, n) if n != 4 else k.ctx.mpc(0, 1)
    for r, c in itertools.product(range(n), repeat=2):
        assert abs(zx[r][c] - w * xz[r][c]) < k.tolerance


def test_dim4_generators_have_order_four():
    X, Z = factor_generators(4, DIGITS)
    for M in (X, Z):
        P = matmul(matmul(M, M), matmul(M, M))
        assert all(abs(P[r][c] - (r == c)) < 1e-25 for r in range(4) for c in range(4))
    assert GroupFactor(4).representation == SPECIAL_DIM4


def test_bad_factors():
    with pytest.raises(LayoutMismatch):
        GroupFactor(6)
    with pytest.raises(LayoutMismatch):
        check_layout((4, 3), 12)


def test_enumeration_order_and_count():
    labels = list(enumerate_displacements((3, 4)))
    assert len(labels) == 144
    assert labels[0].is_identity
    assert labels == sorted(labels)
    assert inner_label_count((3, 4)) == 16 and inner_label_count((4,)) == 16


def test_label_text_and_compose():
    lab = DisplacementLabel.parse("(2:1,3:0)")
    assert str(lab) == "(2:1,3:0)"
    assert lab.compose(lab, (3, 4)) == DisplacementLabel(((1, 2), (2, 0)))


def test_unitarity():
    k = kernel(DIGITS)
    v = [k.ctx.mpc(i + 1, -i) for i in range(12)]
    n0 = sum(abs(x) ** 2 for x in v)
    for lab in list(enumerate_displacements((3, 4)))[::7]:
        w = apply_displacement(lab, v, (3, 4), DIGITS)
        assert abs(sum(abs(x) ** 2 for x in w) - n0) < 1e-25


@pytest.mark.parametrize("layout", [(3,), (7,), (4,), (3, 4), (5, 3), (5, 3, 4)])
def test_fast_overlaps_match_direct(layout):
    k = kernel(DIGITS)
    d = 1
    for f in layout:
        d *= f
    v = [k.ctx.mpc(k.ctx.sin(i + 1), k.ctx.cos(3 * i)) for i in range(d)]
    fast = all_overlaps(v, layout, DIGITS)
    labels = list(enumerate_displacements(layout))
    assert [lab for lab, _ in fast] == labels
    for lab, c in fast[:: max(1, len(fast) // 40)]:
        w = apply_displacement(lab, v, layout, DIGITS)
        direct = sum(k.ctx.conj(x) * y for x, y in zip(v, w))
        assert abs(direct - c) < 1e-25


def test_unconjugated_bra():
    k = kernel(DIGITS)
    v = [k.ctx.mpc(1, 2), k.ctx.mpc(0, 1), k.ctx.mpc(3, 0)]
    (lab, c), *_ = all_overlaps(v, (3,), DIGITS, conjugate_bra=False)
    assert lab.is_identity
    assert abs(c - sum(x * x for x in v)) < 1e-25
