from fractions import Fraction

import pytest

from siccat.number_theory import (
    ClassificationViolation,
    InvalidDimension,
    QuadElem,
    classify_dimension,
    dimension_sequence,
    discriminant_split,
    factorize,
    fundamental_unit,
    is_n2_plus_3,
    is_squarefree,
    negative_norm_dimension,
    positive_norm_unit,
    squarefree_split,
    trace_and_unit,
)


def test_factorize_small():
    assert factorize(1) == []
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(97) == [(97, 1)]


def test_squarefree_split():
    assert squarefree_split(8) == (2, 2)
    assert squarefree_split(125) == (5, 5)
    assert squarefree_split(40) == (10, 2)
    assert is_squarefree(30) and not is_squarefree(12)


def test_quad_arithmetic():
    a = QuadElem.sqrt(5)
    phi = (1 + a) / 2
    assert phi * phi == phi + 1
    assert phi.norm() == -1
    assert phi.trace() == 1
    assert (phi * phi.conjugate()).y == 0
    assert (1 / phi) * phi == QuadElem(1, 0, 5)


def test_quad_mixed_fields_rejected():
    with pytest.raises(ValueError):
        QuadElem.sqrt(2) + QuadElem.sqrt(3)


@pytest.mark.parametrize("D0, x, y, norm", [
    (2, 1, 1, -1),
    (3, 2, 1, 1),
    (5, Fraction(1, 2), Fraction(1, 2), -1),
    (13, Fraction(3, 2), Fraction(1, 2), -1),
    (10, 3, 1, -1),
    (29, Fraction(5, 2), Fraction(1, 2), -1),
    (53, Fraction(7, 2), Fraction(1, 2), -1),
    (7, 8, 3, 1),
    (61, Fraction(39, 2), Fraction(5, 2), -1),
])
def test_fundamental_unit(D0, x, y, norm):
    eta, n = fundamental_unit(D0)
    assert (eta.x, eta.y, n) == (x, y, norm)


def test_fundamental_unit_rejects_squares():
    with pytest.raises(ValueError):
        fundamental_unit(4)


def test_positive_norm_unit():
    assert positive_norm_unit(5) == QuadElem(Fraction(3, 2), Fraction(1, 2), 5)
    assert positive_norm_unit(3) == QuadElem(2, 1, 3)


def test_trace_and_unit_reproduces_d():
    for d in (4, 7, 12, 19, 28, 39, 52, 124):
        u = trace_and_unit(d)
        assert u.norm() == 1
        assert 1 + u.trace() == d


def test_discriminant_split():
    assert discriminant_split(7) == (32, 2, 4)
    assert discriminant_split(19) == (320, 5, 8)
    with pytest.raises(InvalidDimension):
        discriminant_split(3)


def test_dimension_sequence_recurrence():
    seq = dimension_sequence(13, 6)
    assert seq[:2] == [12, 120]
    # d_k - 1 satisfies t_{k+1} = t_1 t_k - t_{k-1}
    t = [2] + [d - 1 for d in seq]
    assert all(t[k + 1] == t[1] * t[k] - t[k - 1] for k in range(1, len(t) - 1))


def test_negative_norm_dimension():
    d, eta = negative_norm_dimension(3)
    assert d == 12 and eta.D0 == 13 and eta.norm() == -1
    assert eta * eta == positive_norm_unit(13)


def test_is_n2_plus_3():
    assert is_n2_plus_3(39) == 6
    assert is_n2_plus_3(40) is None
    assert is_n2_plus_3(3) is None


def test_classify_dimension():
    c = classify_dimension(15)
    assert c.d == 228 and (c.a2, c.a1) == (2, 1) and c.odd_primes == ((19, 1),)
    assert c.factor_string() == "228=4·3·19"
    assert classify_dimension(2).factor_string() == "7"


def test_classification_violation_is_exception():
    assert issubclass(ClassificationViolation, ArithmeticError)
