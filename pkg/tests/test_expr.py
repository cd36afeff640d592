from fractions import Fraction

import pytest

from siccat.catalogue.expr import (
    BinOp,
    ExpressionError,
    Neg,
    Num,
    Pow,
    Sym,
    evaluate,
    parse_expression,
    substitute,
    symbols,
    to_text,
)


def ev(text, **env):
    return evaluate(parse_expression(text), env.__getitem__, lambda q: q)


def test_precedence():
    assert ev("1+2*3") == 7
    assert ev("(1+2)*3") == 9
    assert ev("2*3^2") == 18
    assert ev("-2^2") == -4
    assert ev("8/2/2") == 2
    assert ev("1-2-3") == -4


def test_decimal_literals_are_exact():
    assert parse_expression("0.25") == Num(Fraction(1, 4))
    assert ev("0.1+0.2") == Fraction(3, 10)


def test_negative_exponent():
    assert ev("x^-2", x=Fraction(2)) == Fraction(1, 4)
    assert ev("x^(-1)", x=Fraction(3)) == Fraction(1, 3)


def test_symbols_and_substitute():
    e = parse_expression("a*m1 + b/(a-1)")
    assert set(symbols(e)) == {"a", "m1", "b"}
    f = substitute(e, {"a": Neg(Sym("a"))})
    assert to_text(f) == "-a*m1+b/(-a-1)"


def test_tree_shape():
    assert parse_expression("a-b^2") == BinOp("-", Sym("a"), Pow(Sym("b"), 2))


@pytest.mark.parametrize("text", [
    "(13-a)/156",
    "r2/24*(3*(a-3)*m1+(a-5)*m2)",
    "-(x-y)",
    "a-(b-c)",
    "a/(b*c)",
    "(-a)^3",
    "0.125*x",
    "enu1^-1",
])
def test_round_trip(text):
    e = parse_expression(text)
    assert parse_expression(to_text(e)) == e


@pytest.mark.parametrize("text, col", [
    ("1 + $", 5),
    ("(1+2", 5),
    ("1 +", 4),
    ("x^y", 3),
])
def test_errors_carry_column(text, col):
    with pytest.raises(ExpressionError) as info:
        parse_expression(text)
    assert info.value.col == col
