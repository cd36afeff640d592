import mpmath
import pytest

from siccat.numeric import MIN_DIGITS, NEGATED, DegenerateRoots, Kernel, kernel, pass_epsilon


def test_private_context():
    before = mpmath.mp.dps
    k = Kernel(200)
    assert k.ctx.dps == 200
    assert mpmath.mp.dps == before


def test_minimum_precision():
    with pytest.raises(ValueError):
        Kernel(MIN_DIGITS - 1)


def test_convert_rounds_between_kernels():
    hi, lo = kernel(100), kernel(30)
    x = hi.ctx.sqrt(2)
    y = lo.convert(x)
    assert abs(y - lo.ctx.sqrt(2)) == 0


def test_sqrt_branches():
    k = kernel(40)
    assert k.sqrt_branch(4) == 2
    assert k.sqrt_branch(4, NEGATED) == -2
    r = k.sqrt_branch(-9)
    assert r.real == 0 and r.imag == 3
    with pytest.raises(ValueError):
        k.sqrt_branch(2, "sideways")


def test_roots_of_unity_exact_quarters():
    k = kernel(40)
    assert k.root_of_unity(1, 2) == k.ctx.mpc(0, 1)
    assert k.root_of_unity(3, 1) == -1
    z = k.root_of_unity(1, 3)
    assert abs(z**6 - 1) < k.tolerance
    assert abs(k.tau(7) ** 7 - 1) < k.tolerance  # (-e^{i pi/7})^7 = 1


def test_real_roots_cubic():
    k = kernel(50)
    # (t - 1)(t + 2)(t - 3) = t^3 - 2t^2 - 5t + 6
    roots = k.real_roots([6, -5, -2, 1])
    assert [k.ctx.nint(r) for r in roots] == [-2, 1, 3]
    assert all(abs(r - k.ctx.nint(r)) < k.tolerance for r in roots)


def test_real_roots_skips_complex_pair():
    k = kernel(30)
    roots = k.real_roots([1, 0, 1, 0, 0])  # t^2 + 1 padded by zero leading terms
    assert roots == []
    assert len(k.real_roots([-2, 0, 0, 1])) == 1


def test_real_roots_double_root():
    with pytest.raises(DegenerateRoots):
        kernel(30).real_roots([1, -2, 1])


def test_real_roots_28c_cubic():
    k = kernel(60)
    a = k.ctx.sqrt(29)
    roots = k.real_roots([-a - 27, -42, 0, 7])
    assert len(roots) == 3
    for r in roots:
        assert abs(7 * r**3 - 42 * r - a - 27) < k.tolerance
    partner = k.real_roots([a - 27, -42, 0, 7])
    assert [k.ctx.nstr(r, 5) for r in partner] == ["-2.1337", "-0.54103", "2.6748"]


def test_pass_epsilon():
    assert pass_epsilon(120) == kernel(120).eps(-80)
    # low precision keeps half the digits
    assert pass_epsilon(50) == kernel(50).eps(-25)
