"""Behaviour of the generators under the Galois map a -> -a.

For each generator the defining data (square-root operand or polynomial
coefficients) is transformed by a -> -a and by renaming every generator to
its declared partner.  If the result equals the partner's own definition
the pair is reported; if it reproduces the generator itself it is
invariant; otherwise it is UNPAIRED.  Equality is decided by sympy after
clearing denominators, so ``(6+a)`` and ``(a+6)`` compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from .expr import Expression, evaluate
from .recipe import POLYROOT, ROOTOFUNITY, SQRT, FiducialRecipe, GeneratorDef

UNPAIRED = "UNPAIRED"
INVARIANT = "invariant"


@dataclass(frozen=True)
class PairingLine:
    generator: str
    partner: str  # a generator name, INVARIANT or UNPAIRED
    detail: str = ""

    @property
    def paired(self) -> bool:
        return self.partner != UNPAIRED


def _to_sympy(expr: Expression, rename: dict[str, str], flip: bool):
    def lookup(name):
        s = sympy.Symbol(rename.get(name, name))
        return -s if flip and name == "a" else s

    return evaluate(expr, lookup, lambda q: sympy.Rational(q.numerator, q.denominator))


def _same(x, y) -> bool:
    return sympy.simplify(sympy.cancel(x - y)) == 0


def _defining_data(g: GeneratorDef, rename: dict[str, str], flip: bool):
    if g.kind == SQRT:
        return [_to_sympy(g.operand, rename, flip)]
    if g.kind == POLYROOT:
        return [_to_sympy(c, rename, flip) for c in g.coeffs]
    return None


def _transform_matches(g: GeneratorDef, target: GeneratorDef, rename: dict[str, str]) -> bool:
    if g.kind != target.kind:
        return False
    if g.kind == ROOTOFUNITY:
        return g.root == target.root
    mine = _defining_data(g, rename, flip=True)
    theirs = _defining_data(target, {}, flip=False)
    return len(mine) == len(theirs) and all(_same(x, y) for x, y in zip(mine, theirs))


def galois_pairing_report(recipe: FiducialRecipe) -> list[PairingLine]:
    rename = {g.name: g.partner for g in recipe.generators if g.partner}
    by_name = {g.name: g for g in recipe.generators}
    lines = []
    for g in recipe.generators:
        if g.name == "a" and g.kind == SQRT:
            lines.append(PairingLine(g.name, INVARIANT, "a -> -a is the Galois map itself"))
            continue
        if g.partner:
            partner = by_name[g.partner]
            if _transform_matches(g, partner, rename):
                lines.append(PairingLine(g.name, g.partner))
            else:
                lines.append(PairingLine(g.name, UNPAIRED, f"image under a -> -a differs from {g.partner}"))
            continue
        if _transform_matches(g, g, rename):
            lines.append(PairingLine(g.name, INVARIANT))
        else:
            lines.append(PairingLine(g.name, UNPAIRED, "no partner declared and not invariant"))
    return lines
