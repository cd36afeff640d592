"""Exact arithmetic in real quadratic fields Q(sqrt(D0)).

Everything here is exact: rationals are :class:`fractions.Fraction`,
field elements are :class:`QuadElem`.  The dimension bookkeeping follows
the relation D = (d+1)(d-3) = m^2 * D0 between a SIC dimension d and
the squarefree part D0 of the discriminant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath


class InvalidDimension(ValueError):
    pass


class ClassificationViolation(ArithmeticError):
    """n^2 + 3 has a prime factor other than 2 or 3 that is 2 mod 3."""


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, as (prime, multiplicity) pairs."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def squarefree_split(n: int) -> tuple[int, int]:
    """Write n = m^2 * n0 with n0 squarefree; returns (n0, m)."""
    n0, m = 1, 1
    for p, k in factorize(n):
        m *= p ** (k // 2)
        if k % 2:
            n0 *= p
    return n0, m


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(k == 1 for _, k in factorize(n))


@dataclass(frozen=True)
class QuadElem:
    """The number x + y*sqrt(D0) with rational x, y."""

    x: Fraction
    y: Fraction
    D0: int

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.D0 < 2 or not is_squarefree(self.D0):
            raise ValueError(f"D0 must be a squarefree integer >= 2, got {self.D0}")

    @classmethod
    def sqrt(cls, D0: int) -> "QuadElem":
        return cls(Fraction(0), Fraction(1), D0)

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.D0 != self.D0:
                raise ValueError(f"cannot mix Q(sqrt({self.D0})) and Q(sqrt({other.D0}))")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(Fraction(other), Fraction(0), self.D0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.x + other.x, self.y + other.y, self.D0)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.x, -self.y, self.D0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(
            self.x * other.x + self.D0 * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.D0,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        c = other.conjugate()
        return QuadElem((self * c).x / n, (self * c).y / n, self.D0)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (1 / self) ** (-k)
        result = QuadElem(Fraction(1), Fraction(0), self.D0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "QuadElem":
        """Galois conjugate: sqrt(D0) -> -sqrt(D0)."""
        return QuadElem(self.x, -self.y, self.D0)

    def norm(self) -> Fraction:
        return self.x * self.x - self.D0 * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def is_integral(self) -> bool:
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def to_mpf(self, digits: int = 50):
        ctx = mpmath.MPContext()
        ctx.dps = digits
        return ctx.mpf(self.x.numerator) / self.x.denominator + ctx.mpf(
            self.y.numerator
        ) / self.y.denominator * ctx.sqrt(self.D0)

    def __float__(self):
        return float(self.to_mpf(30))

    def sign(self) -> int:
        """Sign of the real embedding with sqrt(D0) > 0, decided exactly."""
        sx, sy = _sgn(self.x), _sgn(self.y)
        if sy == 0 or sx == sy:
            return sx if sx else sy
        # x and y*sqrt(D0) have opposite signs: compare squares
        diff = self.x * self.x - self.D0 * self.y * self.y
        return sx if diff > 0 else (sy if diff < 0 else 0)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __str__(self):
        def frac(q):
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

        if self.y == 0:
            return frac(self.x)
        # common denominator so (3+sqrt(5))/2 prints that way
        den = math.lcm(self.x.denominator, self.y.denominator)
        X, Y = self.x * den, self.y * den
        rad = f"√{self.D0}" if abs(Y) == 1 else f"{abs(Y.numerator)}√{self.D0}"
        if X == 0:
            body = ("-" if Y < 0 else "") + rad
        else:
            body = f"{X.numerator}{'-' if Y < 0 else '+'}{rad}"
        return body if den == 1 else f"({body})/{den}"


def _sgn(q) -> int:
    return (q > 0) - (q < 0)


def quad_norm(z: QuadElem) -> Fraction:
    return z.norm()


def discriminant_split(d: int) -> tuple[int, int, int]:
    """Return (D, D0, m) with D = (d+1)(d-3) = m^2 * D0, D0 squarefree."""
    if d < 4:
        raise InvalidDimension(f"dimension must be at least 4, got {d}")
    D = (d + 1) * (d - 3)
    D0, m = squarefree_split(D)
    return D, D0, m


def trace_and_unit(d: int) -> QuadElem:
    """The unit u = ((d-1) + sqrt(D))/2, so that d = 1 + u + conj(u)."""
    _, D0, m = discriminant_split(d)
    return QuadElem(Fraction(d - 1, 2), Fraction(m, 2), D0)


def _cf_pell(D0: int) -> tuple[int, int]:
    """Smallest positive solution of x^2 - D0*y^2 = +-1 (continued fraction of sqrt(D0))."""
    a0 = math.isqrt(D0)
    P, Q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D0 * q * q not in (1, -1):
        P = a * Q - P
        Q = (D0 - P * P) // Q
        a = (a0 + P) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def fundamental_unit(D0: int) -> tuple[QuadElem, int]:
    """Smallest unit > 1 of the ring of integers of Q(sqrt(D0)), with its norm.

    Computed from the continued fraction of sqrt(D0), which yields the
    fundamental unit of Z[sqrt(D0)].  When D0 = 1 mod 4 the ring of
    integers is larger and its fundamental unit may be a cube root of
    that one; the cube root is found among half-integer candidates and
    confirmed exactly.
    """
    if D0 < 2 or not is_squarefree(D0):
        raise ValueError(f"D0 must be a squarefree integer >= 2, got {D0}")
    x, y = _cf_pell(D0)
    eps = QuadElem(Fraction(x), Fraction(y), D0)
    if D0 % 4 == 1:
        root = _half_integer_cube_root(eps)
        if root is not None:
            eps = root
    return eps, int(eps.norm())


def _half_integer_cube_root(eps: QuadElem) -> QuadElem | None:
    digits = 30 + 2 * len(str(eps.x.numerator))
    ctx = mpmath.MPContext()
    ctx.dps = digits
    val = ctx.mpf(eps.x.numerator) + ctx.mpf(eps.y.numerator) * ctx.sqrt(eps.D0)
    r = ctx.cbrt(val)
    # r + conj(r) = X where conj(r) = norm/r and norm = norm(eps)
    X = int(ctx.nint(r + int(eps.norm()) / r))
    Y = int(ctx.nint((r - int(eps.norm()) / r) / ctx.sqrt(eps.D0)))
    cand = QuadElem(Fraction(X, 2), Fraction(Y, 2), eps.D0)
    return cand if cand**3 == eps else None


def positive_norm_unit(D0: int) -> QuadElem:
    """Fundamental unit of positive norm u0 (eta0 or eta0^2)."""
    eta0, n = fundamental_unit(D0)
    return eta0 if n == 1 else eta0 * eta0


def dimension_sequence(D0: int, count: int) -> list[int]:
    """Dimensions d_k = 1 + u0^k + conj(u0)^k for k = 1..count."""
    if count < 1:
        raise ValueError("count must be positive")
    t1 = int(positive_norm_unit(D0).trace())
    prev, cur = 2, t1
    out = []
    for _ in range(count):
        out.append(1 + cur)
        prev, cur = cur, t1 * cur - prev
    return out


def negative_norm_dimension(n: int) -> tuple[int, QuadElem]:
    """d = n^2 + 3 together with eta = (n + sqrt(n^2 + 4))/2, a unit of norm -1."""
    if n < 1:
        raise ValueError("n must be positive")
    D0, m = squarefree_split(n * n + 4)
    if D0 == 1:
        raise InvalidDimension(f"n^2+4 = {n * n + 4} is a perfect square")
    return n * n + 3, QuadElem(Fraction(n, 2), Fraction(m, 2), D0)


def is_n2_plus_3(d: int) -> int | None:
    """Return n >= 1 with d = n^2 + 3, or None."""
    if d < 4:
        return None
    n = math.isqrt(d - 3)
    return n if n * n == d - 3 else None


@dataclass(frozen=True)
class DimensionClassification:
    d: int
    n: int
    a2: int
    a1: int
    odd_primes: tuple[tuple[int, int], ...]

    def factor_string(self) -> str:
        """Factorization in the 4·3·p style, e.g. '228=4·3·19' or '7'."""
        parts = []
        if self.a2:
            parts.append("4")
        if self.a1:
            parts.append("3")
        for p, r in self.odd_primes:
            parts.append(f"{p}^{r}" if r > 1 else str(p))
        if len(parts) == 1:
            return str(self.d)
        return f"{self.d}=" + "·".join(parts)


def classify_dimension(n: int) -> DimensionClassification:
    """Factor d = n^2 + 3 as 2^a2 * 3^a1 * prod p_i^r_i with every p_i = 1 mod 3."""
    if n < 1:
        raise ValueError("n must be positive")
    d = n * n + 3
    a2 = a1 = 0
    odd = []
    for p, k in factorize(d):
        if p == 2:
            a2 = k
        elif p == 3:
            a1 = k
        else:
            if p % 3 != 1:
                raise ClassificationViolation(f"{d} = {n}^2+3 has prime factor {p} = 2 mod 3")
            odd.append((p, k))
    if a2 not in (0, 2) or a1 not in (0, 1):
        raise ClassificationViolation(f"{d} = {n}^2+3 has 2-adic/3-adic exponents ({a2}, {a1})")
    return DimensionClassification(d, n, a2, a1, tuple(odd))
