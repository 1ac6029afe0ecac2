"""Canonical formatter: renders parsed documents back to source text.

This is the reference formatting; parsing the printed form yields a
structurally equal document (positions aside).
"""

from __future__ import annotations

import re
from decimal import Decimal

from servoir.document import Dimension, Exclusion, OptionDef, ServiceDescription
from servoir.fetch import FetchRule
from servoir.pricing import PriceComponent, TierSchedule
from servoir.values import Money, Quantity, Value, format_decimal
from servoir.vocabulary import PropertyDef, Vocabulary

_INDENT = "  "


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Money):
        return f"{format_decimal(value.amount)} {value.currency}"
    if isinstance(value, Quantity):
        return f"{format_decimal(value.magnitude)} {value.unit}"
    if isinstance(value, Decimal):
        text = format_decimal(value)
        return text if "." in text else text + ".0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, frozenset):
        return "[" + ", ".join(sorted(value)) + "]"
    if value.startswith(("http://", "https://")) and not any(
        c.isspace() for c in value
    ):
        return value
    # enum members round-trip as bare identifiers, everything else quoted
    if _is_bare_ident(value):
        return value
    return f'"{_escape(value)}"'


def _is_bare_ident(text: str) -> bool:
    return bool(re.fullmatch(r"[a-z][a-z0-9_]*", text)) and text not in (
        "true",
        "false",
    )


def format_vocabulary(vocab: Vocabulary) -> str:
    lines = [f"vocabulary {vocab.id} {{"]
    for name, members in vocab.feature_sets.items():
        lines.append(f"{_INDENT}features {name} {{ {' '.join(members)} }}")
    for prop in vocab.properties:
        lines.extend(_format_property(prop))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _format_property(prop: PropertyDef) -> list[str]:
    lines = [f"{_INDENT}property {prop.name} : {prop.type} {{"]
    lines.append(f'{_INDENT * 2}doc "{_escape(prop.doc)}"')
    if prop.relevance:
        lines.append(f'{_INDENT * 2}relevance "{_escape(prop.relevance)}"')
    lines.append(f"{_INDENT * 2}importance {prop.importance}")
    lines.append(f"{_INDENT}}}")
    return lines


def format_service(service: ServiceDescription) -> str:
    lines = [f"service {service.id} uses {service.vocabulary_id} {{"]
    for name, value in service.base_properties.items():
        lines.append(f"{_INDENT}set {name} {format_value(value)}")
    for component in service.price_components:
        lines.append(_INDENT + format_price(component))
    for dimension in service.dimensions:
        lines.extend(_format_dimension(dimension))
    for exclusion in service.exclusions:
        lines.append(_format_exclusion(exclusion))
    for rule in service.fetch_rules:
        lines.append(_INDENT + format_fetch(rule))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _format_dimension(dimension: Dimension) -> list[str]:
    lines = [f"{_INDENT}dimension {dimension.name} {{"]
    for option in dimension.options:
        lines.extend(_format_option(option))
    lines.append(f"{_INDENT}}}")
    return lines


def _format_option(option: OptionDef) -> list[str]:
    lines = [f"{_INDENT * 2}option {option.id} {{"]
    for name, value in option.overrides.items():
        lines.append(f"{_INDENT * 3}set {name} {format_value(value)}")
    for component in option.prices:
        lines.append(_INDENT * 3 + format_price(component))
    lines.append(f"{_INDENT * 2}}}")
    return lines


def _format_exclusion(exclusion: Exclusion) -> str:
    pairs = " ".join(f"{dim} = {opt}" for dim, opt in exclusion.bindings)
    return f"{_INDENT}exclude {{ {pairs} }}"


def format_price(component: PriceComponent) -> str:
    money = f"{format_decimal(component.amount.amount)} {component.amount.currency}"
    if component.kind == "fixed":
        return f"price fixed {money} per {component.period}"
    if component.kind == "one_time":
        return f"price one_time {money}"
    parts = [f"price per_unit {component.metric} {money} per {component.period}"]
    if component.included:
        parts.append(f"included {format_decimal(component.included)}")
    if component.tiers is not None:
        parts.append(_format_tiers(component.tiers))
    return " ".join(parts)


def _format_tiers(tiers: TierSchedule) -> str:
    bands = []
    for upper, price in tiers.bands:
        bound = "inf" if upper is None else format_decimal(upper)
        bands.append(f"upto {bound} {format_decimal(price.amount)} {price.currency}")
    return f"tiers {tiers.mode} {{ {' '.join(bands)} }}"


def format_fetch(rule: FetchRule) -> str:
    interval = rule.interval_s
    if interval % 3600 == 0:
        every = f"{interval // 3600} h"
    elif interval % 60 == 0:
        every = f"{interval // 60} m"
    else:
        every = f"{interval} s"
    return (
        f'fetch {rule.target_property} from "{_escape(rule.url)}" '
        f'extract {rule.extractor} "{_escape(rule.expr)}" '
        f"as {rule.parse_as} every {every}"
    )


def format_file(items: list) -> str:
    chunks = []
    for item in items:
        if isinstance(item, Vocabulary):
            chunks.append(format_vocabulary(item))
        else:
            chunks.append(format_service(item))
    return "\n".join(chunks)
