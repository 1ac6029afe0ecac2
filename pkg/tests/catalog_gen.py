"""Seeded random catalogs for matchmaker and facet equivalence testing.

Each generated variant exists twice: as a typed ResolvedVariant for the
implementation and as a plain dict for the enumeration oracle. Numeric
values live on a quarter-integer lattice (k/4), which is exact in both
decimal and binary floating point, so the two sides see identical numbers.
Money is uniformly EUR here; mixed-currency behavior has dedicated tests.
"""

from __future__ import annotations

import random
from decimal import Decimal

from servoir.values import Money, Quantity
from servoir.variants import ResolvedVariant
from servoir.vocabulary import PropertyType

FEATURES = ("f1", "f2", "f3", "f4", "f5")
ENUM_MEMBERS = ("alpha", "beta", "gamma", "delta")

PROPERTY_POOL: dict[str, PropertyType] = {
    "tier": PropertyType(kind="enum", members=ENUM_MEMBERS),
    "region": PropertyType(kind="enum", members=("de", "us", "eu")),
    "cost": PropertyType(kind="money"),
    "size": PropertyType(kind="quantity", unit="GB"),
    "slots": PropertyType(kind="integer"),
    "ratio": PropertyType(kind="decimal"),
    "secure": PropertyType(kind="boolean"),
    "caps": PropertyType(kind="features", feature_set="fs"),
    "label": PropertyType(kind="string"),
}

NUMERIC_PROPS = ("cost", "size", "slots", "ratio")
DISCRETE_PROPS = ("tier", "region", "secure", "label")


def _quarter(rng: random.Random) -> Decimal:
    return Decimal(rng.randint(0, 400)) / 4


def _typed_and_plain(rng: random.Random, name: str):
    """(implementation value, oracle value) for one property."""
    kind = PROPERTY_POOL[name].kind
    if kind == "enum":
        member = rng.choice(PROPERTY_POOL[name].members)
        return member, member
    if kind == "money":
        amount = _quarter(rng)
        return Money(amount, "EUR"), float(amount)
    if kind == "quantity":
        magnitude = _quarter(rng)
        return Quantity(magnitude, "GB"), float(magnitude)
    if kind == "integer":
        value = rng.randint(0, 50)
        return value, float(value)
    if kind == "decimal":
        value = _quarter(rng)
        return value, float(value)
    if kind == "boolean":
        value = rng.random() < 0.5
        return value, value
    if kind == "features":
        subset = frozenset(
            f for f in FEATURES if rng.random() < 0.5
        ) or frozenset({FEATURES[0]})
        return subset, subset
    value = "w" + str(rng.randint(0, 5))
    return value, value


def generate_variants(
    rng: random.Random, max_variants: int = 200
) -> tuple[list[ResolvedVariant], list[dict]]:
    total = rng.randint(1, max_variants)
    impl: list[ResolvedVariant] = []
    plain: list[dict] = []
    service_count = rng.randint(1, 8)
    for index in range(total):
        service_id = f"s{rng.randint(0, service_count - 1)}"
        variant_id = f"v{index}"
        properties = {}
        props_plain = {}
        for name in PROPERTY_POOL:
            if rng.random() < 0.8:  # some values are missing on purpose
                typed, bare = _typed_and_plain(rng, name)
                properties[name] = typed
                props_plain[name] = bare
        impl.append(
            ResolvedVariant(
                service_id=service_id,
                variant_id=variant_id,
                option_ids=(variant_id,),
                properties=properties,
                price_components=(),
            )
        )
        plain.append(
            {"service_id": service_id, "variant_id": variant_id, "props": props_plain}
        )
    return impl, plain


def _range_bounds(rng: random.Random):
    low = _quarter(rng)
    high = low + Decimal(rng.randint(0, 200)) / 4
    bounds = {}
    if rng.random() < 0.8:
        bounds["min"] = low
    if rng.random() < 0.8 or not bounds:
        bounds["max"] = high
    return bounds


def generate_request(
    rng: random.Random, max_constraints: int = 6
) -> tuple[dict, list[dict], list[dict]]:
    """(wire request object, oracle hard list, oracle soft list)."""
    hard_wire: list[dict] = []
    hard_oracle: list[dict] = []
    soft_wire: list[dict] = []
    soft_oracle: list[dict] = []
    tendency_used: set[str] = set()

    for _ in range(rng.randint(0, max_constraints)):
        if rng.random() < 0.5:
            op = rng.choice(["equals_one_of", "in_range", "has_all_features"])
            if op == "equals_one_of":
                name = rng.choice(DISCRETE_PROPS)
                ptype = PROPERTY_POOL[name]
                if ptype.kind == "enum":
                    values = rng.sample(
                        list(ptype.members), rng.randint(1, len(ptype.members))
                    )
                elif ptype.kind == "boolean":
                    values = [rng.random() < 0.5]
                else:
                    values = ["w" + str(rng.randint(0, 5)) for _ in range(2)]
                hard_wire.append({"op": op, "property": name, "values": values})
                hard_oracle.append({"op": op, "property": name, "values": values})
            elif op == "in_range":
                name = rng.choice(NUMERIC_PROPS)
                bounds = _range_bounds(rng)
                hard_wire.append({"op": op, "property": name, **bounds})
                hard_oracle.append(
                    {
                        "op": op,
                        "property": name,
                        "min": float(bounds["min"]) if "min" in bounds else None,
                        "max": float(bounds["max"]) if "max" in bounds else None,
                    }
                )
            else:
                features = rng.sample(FEATURES, rng.randint(1, 3))
                hard_wire.append(
                    {"op": op, "property": "caps", "features": features}
                )
                hard_oracle.append(
                    {"op": op, "property": "caps", "features": features}
                )
        else:
            weight = rng.randint(1, 5)
            kind = rng.choice(["prefer_values", "tendency", "cover_features"])
            if kind == "tendency":
                candidates = [p for p in NUMERIC_PROPS if p not in tendency_used]
                if not candidates:
                    continue
                name = rng.choice(candidates)
                tendency_used.add(name)
                direction = rng.choice(["positive", "negative"])
                soft_wire.append(
                    {
                        "weight": weight,
                        "goal": {
                            "kind": kind,
                            "property": name,
                            "direction": direction,
                        },
                    }
                )
                soft_oracle.append(
                    {
                        "weight": weight,
                        "kind": kind,
                        "property": name,
                        "direction": direction,
                    }
                )
            elif kind == "prefer_values":
                name = rng.choice(("tier", "region"))
                members = PROPERTY_POOL[name].members
                values = rng.sample(list(members), rng.randint(1, len(members)))
                soft_wire.append(
                    {
                        "weight": weight,
                        "goal": {"kind": kind, "property": name, "values": values},
                    }
                )
                soft_oracle.append(
                    {"weight": weight, "kind": kind, "property": name, "values": values}
                )
            else:
                features = rng.sample(FEATURES, rng.randint(1, 4))
                soft_wire.append(
                    {
                        "weight": weight,
                        "goal": {
                            "kind": kind,
                            "property": "caps",
                            "features": features,
                        },
                    }
                )
                soft_oracle.append(
                    {
                        "weight": weight,
                        "kind": kind,
                        "property": "caps",
                        "features": features,
                    }
                )

    return (
        {"hard": hard_wire, "soft": soft_wire},
        hard_oracle,
        soft_oracle,
    )
