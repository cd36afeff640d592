"""Arbitrary-precision arithmetic shared by every other module.

All numbers are mpmath ``mpf``/``mpc`` values that belong to a
:class:`Kernel`.  A kernel owns a private ``MPContext`` with a fixed
decimal working precision, so two kernels at different precisions never
interfere with each other (the global ``mpmath.mp`` context is never
touched).  Values produced by a kernel carry that kernel's precision; to
move a value between kernels use :meth:`Kernel.convert`, which rounds to
the receiving precision.

The three operations the catalogue needs beyond field arithmetic are
square roots with an explicit branch, real roots of small polynomials,
and roots of unity.
"""

from __future__ import annotations

import functools
from typing import Sequence

import mpmath

DEFAULT_DIGITS = 120
MIN_DIGITS = 10

PRINCIPAL = "principal"
NEGATED = "negated"


class DegenerateRoots(ArithmeticError):
    """Real roots could not be separated at the working precision."""


class Kernel:
    """Arithmetic at ``digits`` significant decimal digits.

    >>> k = Kernel(30)
    >>> k.sqrt_branch(2)
    mpf('1.41421356237309504880168872421')
    """

    def __init__(self, digits: int = DEFAULT_DIGITS):
        if digits < MIN_DIGITS:
            raise ValueError(f"precision must be at least {MIN_DIGITS} digits, got {digits}")
        self.digits = int(digits)
        self.ctx = mpmath.MPContext()
        self.ctx.dps = self.digits

    def __repr__(self):
        return f"Kernel(digits={self.digits})"

    @property
    def tolerance(self):
        """Residual bound 10^(5-P) promised by the refinement routines."""
        return self.ctx.mpf(10) ** (5 - self.digits)

    def eps(self, exponent: int):
        """Return 10**exponent at working precision."""
        return self.ctx.mpf(10) ** exponent

    def convert(self, x):
        if isinstance(x, str):
            return self.ctx.mpmathify(x)
        if isinstance(x, complex):
            return self.ctx.mpc(x.real, x.imag)
        # mpmath values from another context are rounded to our precision
        if hasattr(x, "_mpc_"):
            return self.ctx.make_mpc(tuple(mpmath.libmp.mpf_pos(p, self.ctx.prec, "n") for p in x._mpc_))
        if hasattr(x, "_mpf_"):
            return self.ctx.make_mpf(mpmath.libmp.mpf_pos(x._mpf_, self.ctx.prec, "n"))
        return self.ctx.mpmathify(x)

    def complex(self, re, im=0):
        return self.ctx.mpc(re, im)

    def abs2(self, z):
        """|z|^2 as re^2 + im^2 (no square root, no cancellation)."""
        if hasattr(z, "imag") and z.imag:
            return z.real * z.real + z.imag * z.imag
        r = z.real if hasattr(z, "real") else z
        return r * r

    # -- square roots -------------------------------------------------

    def sqrt_branch(self, x, branch: str = PRINCIPAL):
        """Square root of ``x`` on the requested branch.

        The principal root has positive real part, or zero real part and
        non-negative imaginary part; a negative real maps to +i*sqrt(|x|).
        ``negated`` returns minus the principal root.
        """
        x = self.convert(x)
        if hasattr(x, "imag") and x.imag == 0:
            x = x.real
        if x == 0:
            return self.ctx.zero
        if isinstance(x, self.ctx.mpf) and x < 0:
            root = self.ctx.mpc(0, self.ctx.sqrt(-x))
        else:
            root = self.ctx.sqrt(x)
        if branch == PRINCIPAL:
            return root
        if branch == NEGATED:
            return -root
        raise ValueError(f"unknown square-root branch {branch!r}")

    # -- roots of unity -----------------------------------------------

    def root_of_unity(self, num: int, den: int):
        """Return exp(i*pi*num/den).

        Multiples of a quarter turn are returned exactly.
        """
        if den < 1:
            raise ValueError("den must be a positive integer")
        ctx = self.ctx
        q, r = divmod(2 * num, den)
        if r == 0:
            # num/den is a multiple of 1/2
            return (ctx.mpc(1, 0), ctx.mpc(0, 1), ctx.mpc(-1, 0), ctx.mpc(0, -1))[q % 4]
        return ctx.expjpi(ctx.mpf(num) / den)

    def tau(self, d: int):
        """The cyclotomic unit tau_d = -exp(i*pi/d)."""
        return -self.root_of_unity(1, d)

    # -- real roots -----------------------------------------------------

    def real_roots(self, coeffs: Sequence) -> list:
        """All real roots of ``sum(coeffs[k] * t**k)``, ascending.

        Roots are bracketed by sign changes on a uniform grid over the
        Cauchy interval; the number of brackets must equal the Sturm
        count of distinct real roots.  Each bracket is bisected to about
        ten digits and then polished by Newton's method.

        Raises :class:`DegenerateRoots` for multiple roots or roots that
        cannot be separated by more than 10^(-P/2).
        """
        ctx = self.ctx
        cs = [self._real_coefficient(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if len(cs) < 2:
            raise ValueError("polynomial must be nonconstant")
        deg = len(cs) - 1
        scale = max(abs(c) for c in cs)
        lead = cs[-1]
        bound = 1 + max(abs(c / lead) for c in cs[:-1])

        expected = self._sturm_count(cs, -bound, bound, scale)

        def p(t):
            return ctx.polyval(cs[::-1], t)

        n = max(4 * deg * deg, 16)
        for _ in range(12):
            grid = [-bound + 2 * bound * k / n for k in range(n + 1)]
            values = [p(t) for t in grid]
            brackets = []
            for k in range(n):
                if values[k] == 0:
                    brackets.append((grid[k], grid[k]))
                elif values[k] * values[k + 1] < 0:
                    brackets.append((grid[k], grid[k + 1]))
            if values[n] == 0:
                brackets.append((grid[n], grid[n]))
            if len(brackets) == expected:
                break
            n *= 2
        else:
            raise DegenerateRoots(
                f"found {len(brackets)} sign changes but {expected} distinct real roots"
            )

        dcs = [k * cs[k] for k in range(1, len(cs))]
        roots = [self._polish(cs, dcs, lo, hi) for lo, hi in brackets]
        roots.sort()
        gap = self.eps(-(self.digits // 2))
        for r0, r1 in zip(roots, roots[1:]):
            if r1 - r0 < gap:
                raise DegenerateRoots(f"roots {ctx.nstr(r0, 15)} and {ctx.nstr(r1, 15)} coincide")
        return roots

    def _real_coefficient(self, c):
        c = self.convert(c)
        if hasattr(c, "imag") and c.imag != 0:
            if abs(c.imag) > self.tolerance * max(1, abs(c.real)):
                raise ValueError(f"coefficient {c} is not real")
        return c.real if hasattr(c, "imag") else c

    def _polish(self, cs, dcs, lo, hi):
        ctx = self.ctx
        p = lambda t: ctx.polyval(cs[::-1], t)
        if lo == hi:
            return lo
        plo = p(lo)
        coarse = self.eps(-10) * max(1, abs(lo), abs(hi))
        while hi - lo > coarse:
            mid = (lo + hi) / 2
            pm = p(mid)
            if pm == 0:
                return mid
            if (pm < 0) == (plo < 0):
                lo, plo = mid, pm
            else:
                hi = mid
        x = (lo + hi) / 2
        stop = self.eps(-self.digits) * max(1, abs(x))
        for _ in range(100):
            step = p(x) / ctx.polyval(dcs[::-1], x)
            x -= step
            if abs(step) <= stop:
                break
        if abs(p(x)) > self.tolerance * max(1, max(abs(c) for c in cs)):
            raise DegenerateRoots(f"Newton refinement did not converge near {ctx.nstr(x, 15)}")
        return x

    def _sturm_count(self, cs, a, b, scale):
        """Number of distinct real roots in (a, b] by Sturm's theorem."""
        ctx = self.ctx
        tiny = self.eps(10 - self.digits) * scale
        seq = [list(cs), [k * cs[k] for k in range(1, len(cs))]]
        while len(seq[-1]) > 1:
            r = _poly_rem(seq[-2], seq[-1])
            while r and abs(r[-1]) <= tiny:
                r.pop()
            if not r:
                raise DegenerateRoots("polynomial has a repeated root")
            seq.append([-c for c in r])

        def changes(t):
            signs = [ctx.sign(ctx.polyval(q[::-1], t)) for q in seq]
            signs = [s for s in signs if s != 0]
            return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)

        return changes(a) - changes(b)


def _poly_rem(num, den):
    """Remainder of ascending-coefficient polynomial division."""
    num = list(num)
    while len(num) >= len(den):
        factor = num[-1] / den[-1]
        shift = len(num) - len(den)
        for k, c in enumerate(den):
            num[shift + k] -= factor * c
        num.pop()
    return num


@functools.lru_cache(maxsize=None)
def kernel(digits: int = DEFAULT_DIGITS) -> Kernel:
    """Shared kernel for ``digits``; contexts are never mutated after creation."""
    return Kernel(digits)


def sqrt_branch(x, branch: str = PRINCIPAL, digits: int = DEFAULT_DIGITS):
    return kernel(digits).sqrt_branch(x, branch)


def real_roots(coeffs, digits: int = DEFAULT_DIGITS):
    return kernel(digits).real_roots(coeffs)


def root_of_unity(num: int, den: int, digits: int = DEFAULT_DIGITS):
    return kernel(digits).root_of_unity(num, den)


def pass_epsilon(digits: int = DEFAULT_DIGITS):
    """Certification threshold 10^-(P-40), leaving 40 digits for rounding.

    Below P = 80 that would leave fewer digits than it spends, so the
    threshold becomes 10^-(P/2) there.
    """
    return kernel(digits).eps(-max(digits - 40, digits // 2))


def to_raw(x):
    """Picklable form of a kernel value (private-context classes do not pickle)."""
    if hasattr(x, "_mpc_"):
        return ("c", x._mpc_)
    if hasattr(x, "_mpf_"):
        return ("f", x._mpf_)
    return ("p", x)


def from_raw(raw, digits: int):
    kind, value = raw
    ctx = kernel(digits).ctx
    if kind == "c":
        return ctx.make_mpc(value)
    if kind == "f":
        return ctx.make_mpf(value)
    return value
