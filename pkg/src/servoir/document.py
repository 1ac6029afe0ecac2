"""Parsed service descriptions: base values, dimensions, exclusions, prices.

AST equality ignores source positions, so a description compares equal to
its re-parsed pretty-printed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from servoir.fetch import FetchRule
from servoir.pricing import PriceComponent
from servoir.values import Value

Pos = tuple[int, int]


@dataclass(frozen=True)
class OptionDef:
    """One option of a dimension: property overrides plus price additions."""

    id: str
    overrides: dict[str, Value] = field(default_factory=dict)
    prices: tuple[PriceComponent, ...] = ()
    positions: dict[str, Pos] = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class Dimension:
    name: str
    options: tuple[OptionDef, ...]
    pos: Pos = field(default=(0, 0), compare=False, repr=False)

    def option(self, option_id: str) -> OptionDef | None:
        for opt in self.options:
            if opt.id == option_id:
                return opt
        return None


@dataclass(frozen=True)
class Exclusion:
    """A conjunctive partial assignment dimension=option; any variant whose
    choices complete all bindings is excluded."""

    bindings: tuple[tuple[str, str], ...]
    pos: Pos = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ServiceDescription:
    id: str
    vocabulary_id: str
    base_properties: dict[str, Value] = field(default_factory=dict)
    dimensions: tuple[Dimension, ...] = ()
    exclusions: tuple[Exclusion, ...] = ()
    price_components: tuple[PriceComponent, ...] = ()
    fetch_rules: tuple[FetchRule, ...] = ()
    positions: dict[str, Pos] = field(default_factory=dict, compare=False, repr=False)

    def dimension(self, name: str) -> Dimension | None:
        for dim in self.dimensions:
            if dim.name == name:
                return dim
        return None

    def with_properties(self, overrides: dict[str, Value]) -> "ServiceDescription":
        merged = dict(self.base_properties)
        merged.update(overrides)
        return replace(self, base_properties=merged)
