"""Weyl-Heisenberg displacements on block-structured vectors.

The group is a tensor product of factors, listed outermost first: an odd
prime p, then 3, then 4 (each optional).  A vector of length d is indexed
as v[k1, k2, k3] with k1 the block index.  Odd factors use the clock and
shift matrices

    Z = diag(1, w, ..., w^(n-1)),  w = exp(2*pi*i/n),   X e_k = e_(k+1),

and the size-4 factor uses a monomial representation (its Z and X are
permutation matrices with entries 1, -1, i).  A displacement with
exponents (i, j) in a factor acts as X^i Z^j.  Phases are left as they
are; only overlap moduli matter for equiangularity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .catalogue.recipe import LayoutMismatch, validate_layout
from .numeric import DEFAULT_DIGITS, Kernel, kernel

STANDARD = "standard_clock_shift"
SPECIAL_DIM4 = "special_dim4"

# entries as (row, col) -> value; value 1j stands for i
_Z4 = {(0, 2): 1, (1, 3): 1j, (2, 0): 1, (3, 1): 1j}
_X4 = {(0, 1): 1, (1, 0): 1, (2, 3): -1, (3, 2): 1}


@dataclass(frozen=True)
class GroupFactor:
    size: int

    def __post_init__(self):
        if self.size != 4 and (self.size < 3 or self.size % 2 == 0):
            raise LayoutMismatch(f"group factor of size {self.size} is not 4 or odd")

    @property
    def representation(self) -> str:
        return SPECIAL_DIM4 if self.size == 4 else STANDARD


@dataclass(frozen=True, order=True)
class DisplacementLabel:
    """Exponent pairs (i, j), one per factor, outermost factor first."""

    exponents: tuple[tuple[int, int], ...]

    @property
    def is_identity(self) -> bool:
        return all(i == 0 and j == 0 for i, j in self.exponents)

    def compose(self, other: "DisplacementLabel", layout: Sequence[int]) -> "DisplacementLabel":
        """Exponent-wise sum modulo the factor sizes."""
        return DisplacementLabel(
            tuple(((i1 + i2) % n, (j1 + j2) % n) for (i1, j1), (i2, j2), n in zip(self.exponents, other.exponents, layout))
        )

    def __str__(self):
        return "(" + ",".join(f"{i}:{j}" for i, j in self.exponents) + ")"

    @classmethod
    def parse(cls, text: str) -> "DisplacementLabel":
        body = text.strip().strip("()")
        pairs = [tuple(int(x) for x in part.split(":")) for part in body.split(",")]
        return cls(tuple(pairs))


def _matrix(entries: dict, k: Kernel):
    ctx = k.ctx
    m = [[ctx.mpc(0) for _ in range(4)] for _ in range(4)]
    for (r, c), v in entries.items():
        m[r][c] = ctx.mpc(0, 1) if v == 1j else ctx.mpc(v)
    return m


def _matmul(a, b):
    n = len(a)
    return [[sum((a[r][t] * b[t][c] for t in range(n)), a[0][0] * 0) for c in range(n)] for r in range(n)]


def factor_generators(factor: GroupFactor | int, digits: int = DEFAULT_DIGITS):
    """(X, Z) of one factor as nested lists of mpc values."""
    if isinstance(factor, int):
        factor = GroupFactor(factor)
    k = kernel(digits)
    n = factor.size
    if n == 4:
        return _matrix(_X4, k), _matrix(_Z4, k)
    ctx = k.ctx
    zero = ctx.mpc(0)
    X = [[zero] * n for _ in range(n)]
    Z = [[zero] * n for _ in range(n)]
    for r in range(n):
        X[(r + 1) % n][r] = ctx.mpc(1)
        Z[r][r] = k.root_of_unity(2 * r, n)
    return X, Z


def _power(m, e):
    n = len(m)
    out = [[m[0][0] * 0 + (1 if r == c else 0) for c in range(n)] for r in range(n)]
    for _ in range(e):
        out = _matmul(out, m)
    return out


class _Dim4Table:
    """All sixteen products X^i Z^j of the size-4 factor, as sparse rows."""

    def __init__(self, k: Kernel):
        X, Z = _matrix(_X4, k), _matrix(_Z4, k)
        self.ops = {}
        for i in range(4):
            for j in range(4):
                m = _matmul(_power(X, i), _power(Z, j))
                # monomial: each row has one nonzero entry
                self.ops[i, j] = [next((c, m[r][c]) for c in range(4) if m[r][c] != 0) for r in range(4)]


_DIM4_CACHE: dict[int, _Dim4Table] = {}


def _dim4(k: Kernel) -> _Dim4Table:
    if k.digits not in _DIM4_CACHE:
        _DIM4_CACHE[k.digits] = _Dim4Table(k)
    return _DIM4_CACHE[k.digits]


def check_layout(layout: Sequence[int], d: int | None = None) -> tuple[int, ...]:
    layout = tuple(int(f) for f in layout)
    validate_layout(math.prod(layout), layout)
    if d is not None and math.prod(layout) != d:
        raise LayoutMismatch(f"layout {layout} does not fit a vector of length {d}")
    return layout


def enumerate_displacements(layout: Sequence[int]) -> Iterator[DisplacementLabel]:
    """All d^2 labels, identity first, in lexicographic exponent order."""
    per_factor = [list(itertools.product(range(n), range(n))) for n in layout]
    for combo in itertools.product(*per_factor):
        yield DisplacementLabel(tuple(combo))


def _apply_factor(v: list, n: int, i: int, j: int, outer: int, inner: int, k: Kernel) -> list:
    """Apply X^i Z^j on the middle index of v viewed as (outer, n, inner)."""
    if i == 0 and j == 0:
        return v
    out = [None] * len(v)
    if n == 4:
        rows = _dim4(k).ops[i, j]
        for o in range(outer):
            base = o * 4 * inner
            for r, (c, val) in enumerate(rows):
                for t in range(inner):
                    out[base + r * inner + t] = val * v[base + c * inner + t]
        return out
    phases = [k.root_of_unity(2 * ((j * m) % n), n) for m in range(n)]
    for o in range(outer):
        base = o * n * inner
        for r in range(n):
            src = (r - i) % n
            ph = phases[src]
            for t in range(inner):
                out[base + r * inner + t] = ph * v[base + src * inner + t]
    return out


def apply_displacement(label: DisplacementLabel, v: Sequence, layout: Sequence[int], digits: int = DEFAULT_DIGITS) -> list:
    """Return (X^i1 Z^j1 (x) X^i2 Z^j2 (x) ...) v without forming d x d matrices."""
    layout = check_layout(layout, len(v))
    if len(label.exponents) != len(layout):
        raise LayoutMismatch(f"label {label} has {len(label.exponents)} factors, layout has {len(layout)}")
    k = kernel(digits)
    out = [k.convert(x) for x in v]
    outer = 1
    inner = len(v)
    for (i, j), n in zip(label.exponents, layout):
        inner //= n
        out = _apply_factor(out, n, i % n, j % n, outer, inner, k)
        outer *= n
    return out


def all_overlaps(psi: Sequence, layout: Sequence[int], digits: int = DEFAULT_DIGITS, conjugate_bra: bool = True,
                 inner_labels: Sequence[DisplacementLabel] | None = None):
    """Overlaps <bra, D psi> for every label, in :func:`enumerate_displacements` order.

    ``bra`` is psi itself (``conjugate_bra=True``, the usual inner product)
    or the complex conjugate of psi.  When the outermost factor is odd of
    size p, the p values of j for a fixed shift i are one discrete Fourier
    sum, so each inner displacement costs O(p^2 + d) instead of O(p d).
    ``inner_labels`` restricts the work to a subset of the inner labels
    (used to split the computation between worker processes); the result
    then covers only those.
    """
    layout = check_layout(layout, len(psi))
    k = kernel(digits)
    ctx = k.ctx
    psi = [k.convert(x) for x in psi]
    bra = [ctx.conj(x) for x in psi] if conjugate_bra else psi
    p = layout[0]
    if p == 4:
        labels = inner_labels if inner_labels is not None else list(enumerate_displacements(layout))
        return [(lab, _dot(bra, apply_displacement(lab, psi, layout, digits), ctx)) for lab in labels]
    rest = layout[1:]
    q = math.prod(rest)
    if inner_labels is None:
        inner_labels = list(enumerate_displacements(rest)) if rest else [DisplacementLabel(())]
    omega = [k.root_of_unity(2 * m, p) for m in range(p)]
    results = {}
    for lab in inner_labels:
        # w = (1 (x) D_inner) psi, block by block
        if rest:
            w = []
            for b in range(p):
                w.extend(apply_displacement(lab, psi[b * q:(b + 1) * q], rest, digits))
        else:
            w = psi
        for i in range(p):
            g = []
            for m in range(p):
                src = ((m + i) % p) * q
                g.append(ctx.fsum((bra[src + t] * w[m * q + t] for t in range(q))))
            for j in range(p):
                s = ctx.fsum(omega[(j * m) % p] * g[m] for m in range(p))
                results[((i, j),) + lab.exponents] = s
    order = [((i, j),) + lab.exponents for i in range(p) for j in range(p) for lab in inner_labels]
    order.sort()
    return [(DisplacementLabel(e), results[e]) for e in order]


def _dot(bra, ket, ctx):
    return ctx.fsum(b * x for b, x in zip(bra, ket))


def inner_label_count(layout: Sequence[int]) -> int:
    layout = tuple(layout)
    if layout[0] == 4:
        return 16
    return math.prod(n * n for n in layout[1:])
