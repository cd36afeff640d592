"""The bundled catalogue of eight fiducial recipes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .expr import Expression, ExpressionError, parse_expression, to_text
from .pairing import INVARIANT, UNPAIRED, PairingLine, galois_pairing_report
from .recipe import (
    DerivedDef,
    FiducialRecipe,
    GeneratorDef,
    LayoutMismatch,
    NonTriangularConstraints,
    RatioPolynomial,
    RecipeError,
    RecipeSyntaxError,
    Relation,
    UnitCheck,
    UnknownSymbol,
    canonical_text,
    character_count,
    parse_recipe,
    serialize,
)


class NotFound(KeyError):
    """No catalogue entry with this label."""

    def __str__(self):
        return f"no catalogue entry {self.args[0]!r}"


@dataclass(frozen=True)
class CatalogueEntry:
    recipe: FiducialRecipe
    notes: tuple[str, ...]
    source: str

    @property
    def label(self) -> str:
        return self.recipe.label


@lru_cache(maxsize=None)
def _load() -> dict[str, CatalogueEntry]:
    entries = {}
    for item in resources.files(__package__).joinpath("data").iterdir():
        if not item.name.endswith(".sic"):
            continue
        text = item.read_text(encoding="utf-8")
        recipe = parse_recipe(text)
        if recipe.label in entries:
            raise RecipeError(f"duplicate catalogue label {recipe.label!r}")
        entries[recipe.label] = CatalogueEntry(recipe, recipe.notes, text)
    return dict(sorted(entries.items(), key=lambda kv: (kv[1].recipe.d, kv[0])))


def list_entries() -> list[str]:
    """Labels in order of increasing dimension."""
    return list(_load())


def lookup(label: str) -> CatalogueEntry:
    try:
        return _load()[label]
    except KeyError:
        raise NotFound(label) from None


def recipe(label: str) -> FiducialRecipe:
    return lookup(label).recipe


__all__ = [
    "CatalogueEntry",
    "DerivedDef",
    "Expression",
    "ExpressionError",
    "FiducialRecipe",
    "GeneratorDef",
    "INVARIANT",
    "LayoutMismatch",
    "NonTriangularConstraints",
    "NotFound",
    "PairingLine",
    "RatioPolynomial",
    "RecipeError",
    "RecipeSyntaxError",
    "Relation",
    "UNPAIRED",
    "UnitCheck",
    "UnknownSymbol",
    "canonical_text",
    "character_count",
    "galois_pairing_report",
    "list_entries",
    "lookup",
    "parse_expression",
    "parse_recipe",
    "recipe",
    "serialize",
    "to_text",
]
