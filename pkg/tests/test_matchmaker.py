from __future__ import annotations

import random
from decimal import Decimal

import pytest

from servoir.errors import MixedCurrencyError
from servoir.matchmaker import (
    HardConstraint,
    MatchRequest,
    RequestError,
    SoftConstraint,
    filter_variants,
    match,
    rank,
    request_from_json,
    score,
    validate_request,
)
from servoir.values import Money, Quantity
from servoir.variants import ResolvedVariant
from servoir.vocabulary import PropertyType
from tests.catalog_gen import PROPERTY_POOL, generate_request, generate_variants
from tests.oracles import match_by_enumeration

TYPES = {
    "jurisdiction": PropertyType(kind="enum", members=("de", "us", "eu")),
    "price": PropertyType(kind="money"),
    "quota": PropertyType(kind="quantity", unit="GB"),
    "flags": PropertyType(kind="features", feature_set="fs"),
    "slots": PropertyType(kind="integer"),
    "name": PropertyType(kind="string"),
}


def variant(vid: str, **props) -> ResolvedVariant:
    return ResolvedVariant(
        service_id="svc",
        variant_id=vid,
        option_ids=(vid,),
        properties=props,
        price_components=(),
    )


def eur(text: str) -> Money:
    return Money(Decimal(text), "EUR")


class TestValidateRequest:
    def test_empty_request_ok(self):
        assert validate_request(MatchRequest(), TYPES) == []

    def test_tendency_on_enum_rejected(self):
        request = MatchRequest(
            soft=(
                SoftConstraint(
                    weight=Decimal(1), kind="tendency", property="jurisdiction"
                ),
            )
        )
        errors = validate_request(request, TYPES)
        assert any("tendency needs a numeric property" in e for e in errors)

    def test_zero_weight_rejected(self):
        request = MatchRequest(
            soft=(
                SoftConstraint(weight=Decimal(0), kind="tendency", property="price"),
            )
        )
        errors = validate_request(request, TYPES)
        assert any("weight: must be > 0" in e for e in errors)

    def test_unknown_property(self):
        request = MatchRequest(
            hard=(HardConstraint(op="equals_one_of", property="nope", values=("x",)),)
        )
        errors = validate_request(request, TYPES)
        assert any("unknown property 'nope'" in e for e in errors)

    def test_empty_value_set_rejected(self):
        request = MatchRequest(
            hard=(HardConstraint(op="equals_one_of", property="name"),)
        )
        errors = validate_request(request, TYPES)
        assert any("must not be empty" in e for e in errors)

    def test_two_tendencies_on_one_property_rejected(self):
        request = MatchRequest(
            soft=(
                SoftConstraint(weight=Decimal(1), kind="tendency", property="price"),
                SoftConstraint(
                    weight=Decimal(2),
                    kind="tendency",
                    property="price",
                    direction="negative",
                ),
            )
        )
        errors = validate_request(request, TYPES)
        assert any("more than one tendency" in e for e in errors)

    def test_wire_decode_errors(self):
        with pytest.raises(RequestError) as failure:
            request_from_json({"hard": [{"op": "wat", "property": "x"}]})
        assert any(".op" in e for e in failure.value.errors)
        with pytest.raises(RequestError):
            request_from_json({"soft": [{"weight": "heavy", "goal": {}}]})
        with pytest.raises(RequestError):
            request_from_json("not an object")


class TestFilter:
    def test_no_hard_constraints_all_survive(self):
        variants = [variant("a"), variant("b")]
        assert filter_variants(variants, (), TYPES) == variants

    def test_equals_one_of_jurisdiction(self):
        variants = [
            variant("de", jurisdiction="de"),
            variant("us", jurisdiction="us"),
            variant("eu", jurisdiction="eu"),
        ]
        surviving = filter_variants(
            variants,
            (
                HardConstraint(
                    op="equals_one_of", property="jurisdiction", values=("de", "eu")
                ),
            ),
            TYPES,
        )
        assert [v.variant_id for v in surviving] == ["de", "eu"]

    def test_has_all_features_subset_rule(self):
        offering_sync = variant("a", flags=frozenset({"sync"}))
        offering_both = variant("b", flags=frozenset({"sync", "share"}))
        surviving = filter_variants(
            [offering_sync, offering_both],
            (
                HardConstraint(
                    op="has_all_features",
                    property="flags",
                    features=frozenset({"sync", "share"}),
                ),
            ),
            TYPES,
        )
        assert [v.variant_id for v in surviving] == ["b"]

    def test_missing_property_fails_constraint(self):
        surviving = filter_variants(
            [variant("a"), variant("b", slots=3)],
            (HardConstraint(op="in_range", property="slots", min=Decimal(1)),),
            TYPES,
        )
        assert [v.variant_id for v in surviving] == ["b"]

    def test_in_range_on_quantity_uses_declared_unit(self):
        variants = [
            variant("small", quota=Quantity(Decimal(100), "GB")),
            variant("large", quota=Quantity(Decimal(2000), "GB")),
        ]
        surviving = filter_variants(
            variants,
            (HardConstraint(op="in_range", property="quota", max=Decimal(1000)),),
            TYPES,
        )
        assert [v.variant_id for v in surviving] == ["small"]

    def test_mixed_currency_in_range_rejected(self):
        variants = [
            variant("a", price=eur("10")),
            variant("b", price=Money(Decimal(5), "USD")),
        ]
        with pytest.raises(MixedCurrencyError):
            filter_variants(
                variants,
                (HardConstraint(op="in_range", property="price", max=Decimal(20)),),
                TYPES,
            )


class TestScore:
    def test_negative_tendency_three_point_cohort(self):
        cohort = [
            variant("a", price=eur("10")),
            variant("b", price=eur("20")),
            variant("c", price=eur("30")),
        ]
        soft = (
            SoftConstraint(
                weight=Decimal(1), kind="tendency", property="price",
                direction="negative",
            ),
        )
        totals = [score(v, soft, cohort, TYPES)[0] for v in cohort]
        assert totals == [1.0, 0.5, 0.0]

    def test_positive_tendency(self):
        cohort = [variant("a", slots=0), variant("b", slots=3), variant("c", slots=4)]
        soft = (
            SoftConstraint(weight=Decimal(1), kind="tendency", property="slots"),
        )
        totals = [score(v, soft, cohort, TYPES)[0] for v in cohort]
        assert totals == [0.0, 0.75, 1.0]

    def test_all_equal_cohort_scores_one_for_present(self):
        cohort = [variant("a", slots=7), variant("b", slots=7), variant("c")]
        soft = (
            SoftConstraint(weight=Decimal(1), kind="tendency", property="slots"),
        )
        assert score(cohort[0], soft, cohort, TYPES)[0] == 1.0
        assert score(cohort[2], soft, cohort, TYPES)[0] == 0.0  # missing value

    def test_cover_features_ratio(self):
        cohort = [variant("a", flags=frozenset({"a", "b"}))]
        soft = (
            SoftConstraint(
                weight=Decimal(1),
                kind="cover_features",
                property="flags",
                features=frozenset({"a", "b", "c", "d"}),
            ),
        )
        assert score(cohort[0], soft, cohort, TYPES)[0] == 0.5

    def test_prefer_values_binary(self):
        cohort = [variant("a", name="x"), variant("b", name="y")]
        soft = (
            SoftConstraint(
                weight=Decimal(2), kind="prefer_values", property="name",
                values=("x",),
            ),
        )
        assert score(cohort[0], soft, cohort, TYPES)[0] == 1.0
        assert score(cohort[1], soft, cohort, TYPES)[0] == 0.0

    def test_weighted_mean_bounds(self):
        cohort = [variant("a", name="x", flags=frozenset({"f"}))]
        all_match = (
            SoftConstraint(
                weight=Decimal(3), kind="prefer_values", property="name", values=("x",)
            ),
            SoftConstraint(
                weight=Decimal(1),
                kind="cover_features",
                property="flags",
                features=frozenset({"f"}),
            ),
        )
        assert score(cohort[0], all_match, cohort, TYPES)[0] == 1.0
        none_match = (
            SoftConstraint(
                weight=Decimal(3), kind="prefer_values", property="name", values=("z",)
            ),
            SoftConstraint(
                weight=Decimal(1),
                kind="cover_features",
                property="flags",
                features=frozenset({"nope"}),
            ),
        )
        assert score(cohort[0], none_match, cohort, TYPES)[0] == 0.0

    def test_empty_soft_scores_one(self):
        cohort = [variant("a")]
        assert score(cohort[0], (), cohort, TYPES) == (1.0, ())


class TestMatch:
    def test_empty_catalog(self):
        result = match([], {}, MatchRequest())
        assert result.ranked == ()
        assert result.excluded_count == 0

    def test_three_service_catalog_against_oracle(self, catalog):
        vocabularies, services = catalog
        request = request_from_json(
            {
                "hard": [
                    {
                        "op": "equals_one_of",
                        "property": "company_jurisdiction",
                        "values": ["de", "eu"],
                    }
                ],
                "soft": [
                    {
                        "weight": 2,
                        "goal": {
                            "kind": "tendency",
                            "property": "monthly_price",
                            "direction": "negative",
                        },
                    }
                ],
            }
        )
        result = match(list(services.values()), vocabularies, request)
        assert result.ranked, "fixture catalog must produce survivors"
        scores = [entry.score for entry in result.ranked]
        assert scores == sorted(scores, reverse=True)
        assert all(0.0 <= s <= 1.0 for s in scores)
        # cheapest surviving variant (free plan at 0 EUR) ranks first
        assert result.ranked[0].service_id == "boxcloud"
        assert result.ranked[0].variant_id == "free/de"
        assert result.ranked[0].score == 1.0

    def test_duplicate_scores_tie_break_lexicographically(self):
        variants = [
            variant("b"),
            variant("a"),
        ]
        result = rank(variants, MatchRequest(), TYPES)
        assert [e.variant_id for e in result.ranked] == ["a", "b"]

    def test_unknown_vocabulary_rejected(self, catalog):
        vocabularies, services = catalog
        request = MatchRequest(vocabulary="nope")
        with pytest.raises(RequestError):
            match(list(services.values()), vocabularies, request)


class TestOracleEquivalence:
    def test_random_catalogs_match_enumeration(self):
        rng = random.Random(20240811)
        for round_index in range(120):
            impl_variants, plain_variants = generate_variants(rng)
            wire, hard_oracle, soft_oracle = generate_request(rng)
            request = request_from_json(wire)
            assert validate_request(request, PROPERTY_POOL) == []
            result = rank(impl_variants, request, PROPERTY_POOL)
            expected, excluded = match_by_enumeration(
                plain_variants, hard_oracle, soft_oracle
            )
            assert result.excluded_count == excluded, round_index
            assert len(result.ranked) == len(expected), round_index
            for ours, theirs in zip(result.ranked, expected):
                assert ours.service_id == theirs["service_id"]
                assert ours.variant_id == theirs["variant_id"]
                assert abs(ours.score - theirs["score"]) < 1e-9
                for a, b in zip(ours.constraint_scores, theirs["constraint_scores"]):
                    assert abs(a - b) < 1e-9

    def test_filter_antitone(self):
        rng = random.Random(7)
        impl_variants, _ = generate_variants(rng)
        wire, _, _ = generate_request(rng)
        request = request_from_json(wire)
        survivors = impl_variants
        for take in range(len(request.hard) + 1):
            subset = request.hard[:take]
            now = filter_variants(impl_variants, subset, PROPERTY_POOL)
            assert len(now) <= len(survivors)
            survivors = now


class TestAffineInvariance:
    def test_tendency_scale_invariant(self):
        rng = random.Random(99)
        for _ in range(60):
            values = [Decimal(rng.randint(0, 400)) / 4 for _ in range(rng.randint(1, 20))]
            cohort = [
                variant(f"v{i}", ratio=value) for i, value in enumerate(values)
            ]
            soft = (
                SoftConstraint(
                    weight=Decimal(1),
                    kind="tendency",
                    property="ratio",
                    direction=rng.choice(["positive", "negative"]),
                ),
            )
            types = {"ratio": PropertyType(kind="decimal")}
            baseline = [score(v, soft, cohort, types)[0] for v in cohort]
            a = Decimal(rng.randint(1, 16))
            b = Decimal(rng.randint(-100, 100))
            transformed_cohort = [
                variant(f"v{i}", ratio=a * value + b)
                for i, value in enumerate(values)
            ]
            transformed = [
                score(v, soft, transformed_cohort, types)[0]
                for v in transformed_cohort
            ]
            for before, after in zip(baseline, transformed):
                assert abs(before - after) < 1e-12
