"""Deterministic canonical JSON.

Rules: object keys sorted lexicographically by their UTF-8 bytes, no
insignificant whitespace, numbers in shortest round-trip decimal form,
UTF-8 output. Identical inputs produce identical bytes, across runs and
restarts.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal

from servoir.document import Dimension, Exclusion, OptionDef, ServiceDescription
from servoir.fetch import FetchRule
from servoir.pricing import PriceComponent, TierSchedule
from servoir.values import Money, Quantity, Value, format_decimal
from servoir.vocabulary import SCALAR_KINDS, PropertyType, Vocabulary


def _encode_number(value) -> str:
    if isinstance(value, bool):
        raise AssertionError("bool handled before numbers")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError("JSON cannot represent non-finite numbers")
        return format_decimal(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValueError("JSON cannot represent non-finite numbers")
        if value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    raise TypeError(f"not a JSON number: {value!r}")


def _write(value, out: list[str]):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (int, float, Decimal)):
        out.append(_encode_number(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for index, item in enumerate(value):
            if index:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for index, key in enumerate(sorted(value, key=lambda k: k.encode("utf-8"))):
            if index:
                out.append(",")
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}: {value!r}")


def canonical_json_bytes(value) -> bytes:
    """Serialize a JSON-able structure to canonical UTF-8 bytes."""
    out: list[str] = []
    _write(value, out)
    return "".join(out).encode("utf-8")


# ---------------------------------------------------------------------------
# Document JSON shapes
# ---------------------------------------------------------------------------

def value_to_json(value: Value):
    if isinstance(value, Money):
        return {"amount": value.amount, "currency": value.currency}
    if isinstance(value, Quantity):
        return {"magnitude": value.magnitude, "unit": value.unit}
    if isinstance(value, frozenset):
        return sorted(value)
    return value


def price_to_json(component: PriceComponent) -> dict:
    doc: dict = {
        "kind": component.kind,
        "amount": {
            "amount": component.amount.amount,
            "currency": component.amount.currency,
        },
    }
    if component.period is not None:
        doc["period"] = component.period
    if component.kind == "per_unit":
        doc["metric"] = component.metric
        doc["included"] = component.included
        if component.tiers is not None:
            doc["tiers"] = _tiers_to_json(component.tiers)
    return doc


def _tiers_to_json(tiers: TierSchedule) -> dict:
    return {
        "mode": tiers.mode,
        "bands": [
            {
                "upto": upper,
                "price": {"amount": price.amount, "currency": price.currency},
            }
            for upper, price in tiers.bands
        ],
    }


def fetch_to_json(rule: FetchRule) -> dict:
    return {
        "property": rule.target_property,
        "url": rule.url,
        "extract": {"kind": rule.extractor, "expr": rule.expr},
        "as": str(rule.parse_as),
        "every_s": rule.interval_s,
    }


def service_to_json(service: ServiceDescription) -> dict:
    return {
        "id": service.id,
        "vocabulary": service.vocabulary_id,
        "properties": {
            name: value_to_json(value)
            for name, value in service.base_properties.items()
        },
        "prices": [price_to_json(c) for c in service.price_components],
        "dimensions": [
            {
                "name": dimension.name,
                "options": [
                    {
                        "id": option.id,
                        "properties": {
                            name: value_to_json(value)
                            for name, value in option.overrides.items()
                        },
                        "prices": [price_to_json(c) for c in option.prices],
                    }
                    for option in dimension.options
                ],
            }
            for dimension in service.dimensions
        ],
        "exclusions": [dict(excl.bindings) for excl in service.exclusions],
        "fetch_rules": [fetch_to_json(rule) for rule in service.fetch_rules],
    }


def export_canonical_json(service: ServiceDescription) -> bytes:
    """Canonical JSON bytes of a validated service description."""
    return canonical_json_bytes(service_to_json(service))


# ---------------------------------------------------------------------------
# Decoding (inverse of the shapes above; used to load stored records)
# ---------------------------------------------------------------------------

def value_from_json(value):
    if isinstance(value, dict):
        if "currency" in value:
            return Money(_as_decimal(value["amount"]), value["currency"])
        if "unit" in value:
            return Quantity(_as_decimal(value["magnitude"]), value["unit"])
        raise ValueError(f"unrecognized value object {value!r}")
    if isinstance(value, list):
        return frozenset(value)
    if isinstance(value, float):
        return Decimal(str(value))
    return value


def _as_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


def type_from_string(text: str) -> PropertyType:
    text = text.strip()
    if text in SCALAR_KINDS:
        return PropertyType(kind=text)
    if text.startswith("quantity<") and text.endswith(">"):
        return PropertyType(kind="quantity", unit=text[len("quantity<"):-1])
    if text.startswith("enum(") and text.endswith(")"):
        members = tuple(m.strip() for m in text[len("enum("):-1].split(","))
        return PropertyType(kind="enum", members=members)
    if text.startswith("features(") and text.endswith(")"):
        return PropertyType(kind="features", feature_set=text[len("features("):-1])
    raise ValueError(f"unrecognized type string {text!r}")


def price_from_json(doc: dict) -> PriceComponent:
    amount = Money(_as_decimal(doc["amount"]["amount"]), doc["amount"]["currency"])
    tiers = None
    if doc.get("tiers"):
        tiers = TierSchedule(
            mode=doc["tiers"]["mode"],
            bands=tuple(
                (
                    None if band["upto"] is None else _as_decimal(band["upto"]),
                    Money(
                        _as_decimal(band["price"]["amount"]),
                        band["price"]["currency"],
                    ),
                )
                for band in doc["tiers"]["bands"]
            ),
        )
    return PriceComponent(
        kind=doc["kind"],
        amount=amount,
        period=doc.get("period"),
        metric=doc.get("metric"),
        included=_as_decimal(doc.get("included", 0)),
        tiers=tiers,
    )


def fetch_from_json(doc: dict) -> FetchRule:
    return FetchRule(
        target_property=doc["property"],
        url=doc["url"],
        extractor=doc["extract"]["kind"],
        expr=doc["extract"]["expr"],
        parse_as=type_from_string(doc["as"]),
        interval_s=doc["every_s"],
    )


def service_from_json(doc: dict) -> ServiceDescription:
    return ServiceDescription(
        id=doc["id"],
        vocabulary_id=doc["vocabulary"],
        base_properties={
            name: value_from_json(value)
            for name, value in doc.get("properties", {}).items()
        },
        price_components=tuple(
            price_from_json(entry) for entry in doc.get("prices", [])
        ),
        dimensions=tuple(
            Dimension(
                name=dim["name"],
                options=tuple(
                    OptionDef(
                        id=opt["id"],
                        overrides={
                            name: value_from_json(value)
                            for name, value in opt.get("properties", {}).items()
                        },
                        prices=tuple(
                            price_from_json(entry) for entry in opt.get("prices", [])
                        ),
                    )
                    for opt in dim["options"]
                ),
            )
            for dim in doc.get("dimensions", [])
        ),
        exclusions=tuple(
            Exclusion(bindings=tuple(sorted(entry.items())))
            for entry in doc.get("exclusions", [])
        ),
        fetch_rules=tuple(
            fetch_from_json(entry) for entry in doc.get("fetch_rules", [])
        ),
    )


def service_from_canonical(data: bytes) -> ServiceDescription:
    return service_from_json(json.loads(data.decode("utf-8"), parse_float=Decimal))


def vocabulary_to_json(vocab: Vocabulary) -> dict:
    return {
        "id": vocab.id,
        "properties": [
            {
                "name": prop.name,
                "type": str(prop.type),
                "doc": prop.doc,
                "relevance": prop.relevance,
                "importance": prop.importance,
            }
            for prop in vocab.properties
        ],
        "feature_sets": {name: list(members) for name, members in vocab.feature_sets.items()},
    }


def export_vocabulary_json(vocab: Vocabulary) -> bytes:
    return canonical_json_bytes(vocabulary_to_json(vocab))
