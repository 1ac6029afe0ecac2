"""Hypothesis strategies building valid-by-construction documents."""

from __future__ import annotations

from decimal import Decimal

from hypothesis import strategies as st

from servoir.document import Dimension, Exclusion, OptionDef, ServiceDescription
from servoir.pricing import Money, PriceComponent, TierSchedule
from servoir.values import UNIT_TABLE, Quantity
from servoir.vocabulary import PropertyDef, PropertyType, Vocabulary

idents = st.from_regex(r"[a-z][a-z0-9_]{0,7}", fullmatch=True)
_currencies = st.sampled_from(["EUR", "USD", "GBP", "CHF"])
_units = st.sampled_from(sorted(UNIT_TABLE))
_doc_text = st.text(
    alphabet=st.characters(
        codec="utf-8", exclude_characters="\n\r", exclude_categories=("C",)
    ),
    min_size=1,
    max_size=24,
)


def _places_decimals(max_places: int, max_value: int = 10**6):
    return st.integers(0, max_places).flatmap(
        lambda places: st.decimals(
            min_value=Decimal(0), max_value=Decimal(max_value), places=places
        )
    )


moneys = st.builds(Money, amount=_places_decimals(4), currency=_currencies)
quantities = st.builds(Quantity, magnitude=_places_decimals(3), unit=_units)


@st.composite
def property_types(draw, feature_sets: dict[str, tuple[str, ...]]):
    kinds = ["string", "text", "boolean", "integer", "decimal", "money", "url",
             "quantity", "enum"]
    if feature_sets:
        kinds.append("features")
    kind = draw(st.sampled_from(kinds))
    if kind == "quantity":
        return PropertyType(kind="quantity", unit=draw(_units))
    if kind == "enum":
        members = draw(
            st.lists(idents, min_size=1, max_size=4, unique=True)
        )
        return PropertyType(kind="enum", members=tuple(members))
    if kind == "features":
        return PropertyType(
            kind="features", feature_set=draw(st.sampled_from(sorted(feature_sets)))
        )
    return PropertyType(kind=kind)


@st.composite
def vocabularies(draw) -> Vocabulary:
    feature_sets = {}
    for name in draw(st.lists(idents, max_size=2, unique=True)):
        feature_sets[name] = tuple(
            draw(st.lists(idents, min_size=1, max_size=4, unique=True))
        )
    names = draw(st.lists(idents, min_size=1, max_size=6, unique=True))
    properties = tuple(
        PropertyDef(
            name=name,
            type=draw(property_types(feature_sets)),
            doc=draw(_doc_text),
            relevance=draw(st.one_of(st.just(""), _doc_text)),
            importance=draw(st.integers(1, 5)),
        )
        for name in names
    )
    return Vocabulary(
        id=draw(idents), properties=properties, feature_sets=feature_sets
    )


@st.composite
def values_for(draw, vocab: Vocabulary, prop: PropertyDef):
    kind = prop.type.kind
    if kind in ("string", "text"):
        return draw(_doc_text)
    if kind == "url":
        return "https://" + draw(st.from_regex(r"[a-z]{1,8}\.example", fullmatch=True))
    if kind == "boolean":
        return draw(st.booleans())
    if kind == "integer":
        return draw(st.integers(0, 10**6))
    if kind == "decimal":
        return draw(_places_decimals(3))
    if kind == "money":
        return draw(moneys)
    if kind == "quantity":
        # any unit of the declared dimension is valid at parse time
        dimension = UNIT_TABLE[prop.type.unit][0]
        unit = draw(
            st.sampled_from(
                [u for u, (d, _) in sorted(UNIT_TABLE.items()) if d == dimension]
            )
        )
        return Quantity(draw(_places_decimals(3, 10**4)), unit)
    if kind == "enum":
        return draw(st.sampled_from(list(prop.type.members)))
    # features
    declared = vocab.feature_sets[prop.type.feature_set]
    subset = draw(st.lists(st.sampled_from(list(declared)), min_size=1, unique=True))
    return frozenset(subset)


@st.composite
def assignments(draw, vocab: Vocabulary, max_props: int = 6):
    chosen = draw(
        st.lists(
            st.sampled_from(list(vocab.properties)),
            max_size=max_props,
            unique_by=lambda p: p.name,
        )
    )
    return {prop.name: draw(values_for(vocab, prop)) for prop in chosen}


@st.composite
def tier_schedules(draw, currency: str) -> TierSchedule:
    mode = draw(st.sampled_from(["graduated", "volume"]))
    bound_count = draw(st.integers(0, 3))
    bounds = sorted(
        draw(
            st.lists(
                st.integers(1, 500),
                min_size=bound_count,
                max_size=bound_count,
                unique=True,
            )
        )
    )
    bands = [
        (Decimal(bound), Money(draw(_places_decimals(4, 100)), currency))
        for bound in bounds
    ]
    bands.append((None, Money(draw(_places_decimals(4, 100)), currency)))
    return TierSchedule(mode=mode, bands=tuple(bands))


@st.composite
def price_components(draw, currency: str | None = None) -> PriceComponent:
    currency = currency or draw(_currencies)
    kind = draw(st.sampled_from(["fixed", "one_time", "per_unit"]))
    amount = Money(draw(_places_decimals(4, 1000)), currency)
    if kind == "one_time":
        return PriceComponent(kind="one_time", amount=amount)
    period = draw(st.sampled_from(["hour", "month", "year"]))
    if kind == "fixed":
        return PriceComponent(kind="fixed", amount=amount, period=period)
    tiers = draw(st.one_of(st.none(), tier_schedules(currency)))
    return PriceComponent(
        kind="per_unit",
        amount=amount,
        period=period,
        metric=draw(idents),
        included=draw(_places_decimals(0, 50)),
        tiers=tiers,
    )


@st.composite
def service_descriptions(draw, vocab: Vocabulary) -> ServiceDescription:
    currency = draw(_currencies)
    dimension_names = draw(st.lists(idents, max_size=3, unique=True))
    dimensions = []
    for name in dimension_names:
        option_ids = draw(st.lists(idents, min_size=1, max_size=3, unique=True))
        options = tuple(
            OptionDef(
                id=option_id,
                overrides=draw(assignments(vocab, max_props=2)),
                prices=tuple(
                    draw(st.lists(price_components(currency), max_size=1))
                ),
            )
            for option_id in option_ids
        )
        dimensions.append(Dimension(name=name, options=options))

    exclusions = []
    if dimensions:
        for _ in range(draw(st.integers(0, 2))):
            subset = draw(
                st.lists(
                    st.sampled_from(dimensions),
                    min_size=1,
                    max_size=len(dimensions),
                    unique_by=lambda d: d.name,
                )
            )
            exclusions.append(
                Exclusion(
                    bindings=tuple(
                        (dim.name, draw(st.sampled_from(dim.options)).id)
                        for dim in subset
                    )
                )
            )

    return ServiceDescription(
        id=draw(idents),
        vocabulary_id=vocab.id,
        base_properties=draw(assignments(vocab)),
        dimensions=tuple(dimensions),
        exclusions=tuple(exclusions),
        price_components=tuple(
            draw(st.lists(price_components(currency), max_size=2))
        ),
    )


@st.composite
def documents(draw):
    vocab = draw(vocabularies())
    service = draw(service_descriptions(vocab))
    return vocab, service
