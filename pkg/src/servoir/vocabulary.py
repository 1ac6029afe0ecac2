"""Vocabularies: typed, documented catalogs of selection criteria.

A vocabulary declares the properties services in one category may assign
(with documentation and a 1..5 importance rating) plus named feature sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from servoir.values import Money, Quantity, Value

SCALAR_KINDS = ("string", "text", "boolean", "integer", "decimal", "money", "url")

# importance: 1 = indispensable .. 5 = irrelevant
IMPORTANCE_RANGE = (1, 5)

NUMERIC_KINDS = ("integer", "decimal", "quantity", "money")

FACETABLE_KINDS = ("enum", "boolean", "features")


@dataclass(frozen=True)
class PropertyType:
    """One of the language's property types.

    ``kind`` is a scalar kind, or ``quantity`` (with ``unit``), ``enum``
    (with ``members``), or ``features`` (with ``feature_set``).
    """

    kind: str
    unit: str | None = None
    members: tuple[str, ...] = ()
    feature_set: str | None = None

    def __str__(self) -> str:
        if self.kind == "quantity":
            return f"quantity<{self.unit}>"
        if self.kind == "enum":
            return f"enum({', '.join(self.members)})"
        if self.kind == "features":
            return f"features({self.feature_set})"
        return self.kind


@dataclass(frozen=True)
class PropertyDef:
    name: str
    type: PropertyType
    doc: str
    relevance: str = ""
    importance: int = 3
    # source position, for diagnostics only
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Vocabulary:
    id: str
    properties: tuple[PropertyDef, ...]
    feature_sets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def property(self, name: str) -> PropertyDef | None:
        for prop in self.properties:
            if prop.name == name:
                return prop
        return None

    def features_of(self, prop: PropertyDef) -> tuple[str, ...]:
        assert prop.type.kind == "features" and prop.type.feature_set is not None
        return self.feature_sets.get(prop.type.feature_set, ())


def value_matches_type(value: Value, ptype: PropertyType) -> bool:
    """Structural type check of a parsed value against a property type.

    Quantities match when their unit shares the declared unit's dimension
    (magnitudes are normalized to the declared unit downstream).
    """
    kind = ptype.kind
    if kind in ("string", "text", "url"):
        return isinstance(value, str)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "decimal":
        return isinstance(value, Decimal) or (
            isinstance(value, int) and not isinstance(value, bool)
        )
    if kind == "money":
        return isinstance(value, Money)
    if kind == "quantity":
        return isinstance(value, Quantity) and value.dimension == Quantity(
            Decimal(0), ptype.unit or "GB"
        ).dimension
    if kind == "enum":
        return isinstance(value, str) and value in ptype.members
    if kind == "features":
        return isinstance(value, frozenset)
    raise AssertionError(f"unhandled property kind {kind}")


def normalize_value(value: Value, ptype: PropertyType) -> Value:
    """Normalize a type-checked value to its canonical representation.

    Quantities convert to the declared unit; integers assigned to decimal
    properties widen to Decimal. Everything else passes through.
    """
    if ptype.kind == "quantity" and isinstance(value, Quantity):
        if value.unit != ptype.unit:
            return value.converted_to(ptype.unit or value.unit)
        return value
    if ptype.kind == "decimal" and isinstance(value, int) and not isinstance(value, bool):
        return Decimal(value)
    return value
