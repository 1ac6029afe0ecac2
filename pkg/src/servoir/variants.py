"""Expansion of compact descriptions into concrete service variants.

A variant picks one option per dimension. Merge order is base properties
first, then each dimension's overrides in declaration order (later
dimensions win on conflicts). Price components are the base components
followed by per-option additions in dimension order. Exclusions are
conjunctive partial assignments; a combination matched by any exclusion is
dropped. Output order is lexicographic over option index tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from servoir.document import ServiceDescription
from servoir.errors import ExpansionLimitError
from servoir.pricing import PriceComponent
from servoir.values import Value

# hard cap: protects the service from combinatorial blow-up
MAX_VARIANTS = 10**6


@dataclass(frozen=True)
class ResolvedVariant:
    """One concrete configuration of a service."""

    service_id: str
    variant_id: str  # option ids joined by "/" in dimension order
    option_ids: tuple[str, ...]
    properties: dict[str, Value]
    price_components: tuple[PriceComponent, ...]


def _excluded(service: ServiceDescription, chosen: dict[str, str]) -> bool:
    for exclusion in service.exclusions:
        if all(chosen.get(dim) == opt for dim, opt in exclusion.bindings):
            return True
    return False


def expand(service: ServiceDescription) -> list[ResolvedVariant]:
    """All non-excluded variants, in deterministic lexicographic order."""
    space = 1
    for dimension in service.dimensions:
        space *= len(dimension.options)
    if space > MAX_VARIANTS:
        raise ExpansionLimitError(
            f"{service.id}: {space} combinations exceed the cap of {MAX_VARIANTS}"
        )

    variants: list[ResolvedVariant] = []
    option_lists = [dimension.options for dimension in service.dimensions]
    names = [dimension.name for dimension in service.dimensions]
    for combo in itertools.product(*option_lists):
        chosen = {name: option.id for name, option in zip(names, combo)}
        if _excluded(service, chosen):
            continue
        properties = dict(service.base_properties)
        prices = list(service.price_components)
        for option in combo:
            properties.update(option.overrides)
            prices.extend(option.prices)
        option_ids = tuple(option.id for option in combo)
        variants.append(
            ResolvedVariant(
                service_id=service.id,
                variant_id="/".join(option_ids),
                option_ids=option_ids,
                properties=properties,
                price_components=tuple(prices),
            )
        )
    return variants


def count(service: ServiceDescription) -> int:
    """Number of variants, via inclusion-exclusion (no materialization)."""
    sizes = {d.name: len(d.options) for d in service.dimensions}
    total = 1
    for size in sizes.values():
        total *= size

    exclusions = [dict(e.bindings) for e in service.exclusions]
    if len(exclusions) > 20:
        # inclusion-exclusion is exponential in the exclusion count; walk
        # the (capped) combination space instead
        if total > MAX_VARIANTS:
            raise ExpansionLimitError(
                f"{service.id}: {total} combinations exceed the cap of {MAX_VARIANTS}"
            )
        names = [d.name for d in service.dimensions]
        id_lists = [[o.id for o in d.options] for d in service.dimensions]
        return sum(
            1
            for combo in itertools.product(*id_lists)
            if not _excluded(service, dict(zip(names, combo)))
        )
    excluded = 0
    for r in range(1, len(exclusions) + 1):
        for subset in itertools.combinations(exclusions, r):
            merged: dict[str, str] = {}
            consistent = True
            for assignment in subset:
                for dim, opt in assignment.items():
                    if merged.get(dim, opt) != opt:
                        consistent = False
                        break
                    merged[dim] = opt
                if not consistent:
                    break
            if not consistent:
                continue
            matching = 1
            for dim, size in sizes.items():
                if dim not in merged:
                    matching *= size
            excluded += matching if r % 2 == 1 else -matching
    return total - excluded


def find_variant(service: ServiceDescription, variant_id: str) -> ResolvedVariant | None:
    """Resolve one variant by id without expanding the whole space."""
    parts = tuple(variant_id.split("/")) if variant_id else ()
    if len(parts) != len(service.dimensions):
        return None
    chosen: dict[str, str] = {}
    combo = []
    for dimension, option_id in zip(service.dimensions, parts):
        option = dimension.option(option_id)
        if option is None:
            return None
        chosen[dimension.name] = option_id
        combo.append(option)
    if _excluded(service, chosen):
        return None
    properties = dict(service.base_properties)
    prices = list(service.price_components)
    for option in combo:
        properties.update(option.overrides)
        prices.extend(option.prices)
    return ResolvedVariant(
        service_id=service.id,
        variant_id=variant_id,
        option_ids=tuple(parts),
        properties=properties,
        price_components=tuple(prices),
    )
