"""Constraint-based matchmaking over resolved service variants.

Three constraint families:

- discrete value matching (hard ``equals_one_of`` / soft ``prefer_values``),
- interval matching for positive/negative tendencies over numeric
  properties (min-max normalized over the surviving cohort),
- feature-list matching (hard ``has_all_features`` / soft ``cover_features``
  scored as coverage ratio).

Variants must satisfy every hard constraint to survive; survivors are
ranked by the weighted arithmetic mean of per-constraint scores in [0, 1].
A missing property fails hard constraints and scores 0 on soft ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from servoir.document import ServiceDescription
from servoir.errors import MixedCurrencyError
from servoir.values import Money, Quantity, Value
from servoir.variants import ResolvedVariant, expand
from servoir.vocabulary import NUMERIC_KINDS, PropertyType, Vocabulary

HARD_OPS = ("equals_one_of", "in_range", "has_all_features")
SOFT_GOALS = ("prefer_values", "tendency", "cover_features")
TENDENCY_DIRECTIONS = ("positive", "negative")


class RequestError(ValueError):
    """A match request failed validation; carries one message per defect."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(errors))


@dataclass(frozen=True)
class HardConstraint:
    op: str
    property: str
    values: tuple = ()  # equals_one_of
    min: Decimal | None = None  # in_range
    max: Decimal | None = None  # in_range
    features: frozenset = frozenset()  # has_all_features


@dataclass(frozen=True)
class SoftConstraint:
    weight: Decimal
    kind: str
    property: str
    values: tuple = ()  # prefer_values
    direction: str = "positive"  # tendency
    features: frozenset = frozenset()  # cover_features


@dataclass(frozen=True)
class MatchRequest:
    hard: tuple[HardConstraint, ...] = ()
    soft: tuple[SoftConstraint, ...] = ()
    vocabulary: str | None = None


@dataclass(frozen=True)
class RankedVariant:
    service_id: str
    variant_id: str
    score: float
    constraint_scores: tuple[float, ...]


@dataclass(frozen=True)
class MatchResult:
    ranked: tuple[RankedVariant, ...]
    excluded_count: int

    def to_json(self) -> dict:
        return {
            "ranked": [
                {
                    "service_id": entry.service_id,
                    "variant_id": entry.variant_id,
                    "score": entry.score,
                    "constraint_scores": list(entry.constraint_scores),
                }
                for entry in self.ranked
            ],
            "excluded_count": self.excluded_count,
        }


# ---------------------------------------------------------------------------
# Request decoding (wire schema used by the REST API and CLI)
# ---------------------------------------------------------------------------

def request_from_json(obj) -> MatchRequest:
    """Decode ``{"hard": [...], "soft": [...]}``; raises RequestError."""
    errors: list[str] = []
    if not isinstance(obj, dict):
        raise RequestError(["request must be a JSON object"])
    hard: list[HardConstraint] = []
    soft: list[SoftConstraint] = []

    for index, entry in enumerate(obj.get("hard", []) or []):
        path = f"hard[{index}]"
        if not isinstance(entry, dict):
            errors.append(f"{path}: must be an object")
            continue
        op = entry.get("op")
        prop = entry.get("property")
        if op not in HARD_OPS:
            errors.append(f"{path}.op: expected one of {', '.join(HARD_OPS)}")
            continue
        if not isinstance(prop, str):
            errors.append(f"{path}.property: required string")
            continue
        if op == "equals_one_of":
            values = entry.get("values")
            if not isinstance(values, list):
                errors.append(f"{path}.values: required array")
                continue
            hard.append(
                HardConstraint(op=op, property=prop, values=tuple(values))
            )
        elif op == "in_range":
            try:
                low = _decimal_or_none(entry.get("min"))
                high = _decimal_or_none(entry.get("max"))
            except (InvalidOperation, TypeError):
                errors.append(f"{path}: min/max must be numbers")
                continue
            hard.append(HardConstraint(op=op, property=prop, min=low, max=high))
        else:
            features = entry.get("features")
            if not isinstance(features, list) or not all(
                isinstance(f, str) for f in features
            ):
                errors.append(f"{path}.features: required array of strings")
                continue
            hard.append(
                HardConstraint(op=op, property=prop, features=frozenset(features))
            )

    for index, entry in enumerate(obj.get("soft", []) or []):
        path = f"soft[{index}]"
        if not isinstance(entry, dict):
            errors.append(f"{path}: must be an object")
            continue
        weight = entry.get("weight")
        goal = entry.get("goal")
        if not isinstance(weight, (int, Decimal, float)) or isinstance(weight, bool):
            errors.append(f"{path}.weight: required number")
            continue
        if not isinstance(goal, dict):
            errors.append(f"{path}.goal: required object")
            continue
        kind = goal.get("kind")
        prop = goal.get("property")
        if kind not in SOFT_GOALS:
            errors.append(f"{path}.goal.kind: expected one of {', '.join(SOFT_GOALS)}")
            continue
        if not isinstance(prop, str):
            errors.append(f"{path}.goal.property: required string")
            continue
        weight_dec = weight if isinstance(weight, Decimal) else Decimal(str(weight))
        if kind == "prefer_values":
            values = goal.get("values")
            if not isinstance(values, list):
                errors.append(f"{path}.goal.values: required array")
                continue
            soft.append(
                SoftConstraint(
                    weight=weight_dec, kind=kind, property=prop, values=tuple(values)
                )
            )
        elif kind == "tendency":
            direction = goal.get("direction")
            if direction not in TENDENCY_DIRECTIONS:
                errors.append(
                    f"{path}.goal.direction: expected 'positive' or 'negative'"
                )
                continue
            soft.append(
                SoftConstraint(
                    weight=weight_dec, kind=kind, property=prop, direction=direction
                )
            )
        else:
            features = goal.get("features")
            if not isinstance(features, list) or not all(
                isinstance(f, str) for f in features
            ):
                errors.append(f"{path}.goal.features: required array of strings")
                continue
            soft.append(
                SoftConstraint(
                    weight=weight_dec,
                    kind=kind,
                    property=prop,
                    features=frozenset(features),
                )
            )

    vocabulary = obj.get("vocabulary")
    if vocabulary is not None and not isinstance(vocabulary, str):
        errors.append("vocabulary: must be a string when present")
    if errors:
        raise RequestError(errors)
    return MatchRequest(hard=tuple(hard), soft=tuple(soft), vocabulary=vocabulary)


def _decimal_or_none(value) -> Decimal | None:
    if value is None:
        return None
    if isinstance(value, bool):
        raise TypeError("bool is not a number")
    if isinstance(value, Decimal):
        return value
    if isinstance(value, (int, float)):
        return Decimal(str(value))
    raise TypeError(f"not a number: {value!r}")


# ---------------------------------------------------------------------------
# Validation against a vocabulary
# ---------------------------------------------------------------------------

def validate_request(request: MatchRequest, types: dict[str, PropertyType]) -> list[str]:
    """Structural and type errors of a request; empty list = ok."""
    errors: list[str] = []
    tendency_seen: set[str] = set()

    def check_property(path: str, name: str) -> PropertyType | None:
        ptype = types.get(name)
        if ptype is None:
            errors.append(f"{path}: unknown property {name!r}")
        return ptype

    for index, constraint in enumerate(request.hard):
        path = f"hard[{index}]"
        ptype = check_property(path, constraint.property)
        if constraint.op == "equals_one_of" and not constraint.values:
            errors.append(f"{path}.values: must not be empty")
        if constraint.op == "in_range":
            if constraint.min is None and constraint.max is None:
                errors.append(f"{path}: needs min or max")
            if (
                constraint.min is not None
                and constraint.max is not None
                and constraint.min > constraint.max
            ):
                errors.append(f"{path}: min must be <= max")
            if ptype is not None and ptype.kind not in NUMERIC_KINDS:
                errors.append(
                    f"{path}: in_range needs a numeric property, "
                    f"{constraint.property!r} is {ptype}"
                )
        if constraint.op == "has_all_features":
            if not constraint.features:
                errors.append(f"{path}.features: must not be empty")
            if ptype is not None and ptype.kind != "features":
                errors.append(
                    f"{path}: has_all_features needs a features property, "
                    f"{constraint.property!r} is {ptype}"
                )

    for index, constraint in enumerate(request.soft):
        path = f"soft[{index}]"
        if constraint.weight <= 0:
            errors.append(f"{path}.weight: must be > 0")
        ptype = check_property(path, constraint.property)
        if constraint.kind == "prefer_values" and not constraint.values:
            errors.append(f"{path}.goal.values: must not be empty")
        if constraint.kind == "tendency":
            if constraint.property in tendency_seen:
                errors.append(
                    f"{path}: more than one tendency on {constraint.property!r}"
                )
            tendency_seen.add(constraint.property)
            if ptype is not None and ptype.kind not in NUMERIC_KINDS:
                errors.append(
                    f"{path}: tendency needs a numeric property, "
                    f"{constraint.property!r} is {ptype}"
                )
        if constraint.kind == "cover_features":
            if not constraint.features:
                errors.append(f"{path}.goal.features: must not be empty")
            if ptype is not None and ptype.kind != "features":
                errors.append(
                    f"{path}: cover_features needs a features property, "
                    f"{constraint.property!r} is {ptype}"
                )

    return errors


# ---------------------------------------------------------------------------
# Value access
# ---------------------------------------------------------------------------

def _numeric(value: Value, ptype: PropertyType) -> Decimal:
    if isinstance(value, Money):
        return value.amount
    if isinstance(value, Quantity):
        if ptype.unit and value.unit != ptype.unit:
            value = value.converted_to(ptype.unit)
        return value.magnitude
    if isinstance(value, bool):
        raise TypeError("boolean is not numeric")
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, Decimal):
        return value
    raise TypeError(f"{value!r} is not numeric")


def _value_in_set(value: Value, requested: tuple, ptype: PropertyType) -> bool:
    for item in requested:
        if _value_equals(value, item, ptype):
            return True
    return False


def _value_equals(value: Value, literal, ptype: PropertyType) -> bool:
    kind = ptype.kind
    if kind in ("string", "text", "url", "enum"):
        return isinstance(literal, str) and value == literal
    if kind == "boolean":
        return isinstance(literal, bool) and value is literal
    if kind in ("integer", "decimal"):
        if isinstance(literal, bool) or not isinstance(
            literal, (int, float, Decimal)
        ):
            return False
        return _numeric(value, ptype) == Decimal(str(literal))
    if kind == "money":
        assert isinstance(value, Money)
        if isinstance(literal, dict):
            return (
                str(literal.get("currency")) == value.currency
                and Decimal(str(literal.get("amount"))) == value.amount
            )
        if isinstance(literal, bool) or not isinstance(
            literal, (int, float, Decimal)
        ):
            return False
        return Decimal(str(literal)) == value.amount
    if kind == "quantity":
        assert isinstance(value, Quantity)
        magnitude = _numeric(value, ptype)
        if isinstance(literal, dict):
            try:
                other = Quantity(
                    Decimal(str(literal.get("magnitude"))), str(literal.get("unit"))
                )
                return _numeric(other, ptype) == magnitude
            except (ValueError, InvalidOperation):
                return False
        if isinstance(literal, bool) or not isinstance(
            literal, (int, float, Decimal)
        ):
            return False
        return Decimal(str(literal)) == magnitude
    if kind == "features":
        return isinstance(literal, str) and literal in value  # type: ignore[operator]
    return False


def _check_uniform_currency(
    variants: list[ResolvedVariant], prop: str, ptype: PropertyType
):
    if ptype.kind != "money":
        return
    currencies = {
        v.properties[prop].currency  # type: ignore[union-attr]
        for v in variants
        if prop in v.properties and isinstance(v.properties[prop], Money)
    }
    if len(currencies) > 1:
        raise MixedCurrencyError(
            f"property {prop!r} mixes currencies across variants: "
            f"{', '.join(sorted(currencies))}"
        )


# ---------------------------------------------------------------------------
# Filter and score
# ---------------------------------------------------------------------------

def satisfies(
    variant: ResolvedVariant,
    constraint: HardConstraint,
    types: dict[str, PropertyType],
) -> bool:
    """Hard-constraint check; a missing property fails the constraint."""
    ptype = types[constraint.property]
    value = variant.properties.get(constraint.property)
    if value is None:
        return False
    if constraint.op == "equals_one_of":
        return _value_in_set(value, constraint.values, ptype)
    if constraint.op == "in_range":
        try:
            magnitude = _numeric(value, ptype)
        except TypeError:
            return False
        if constraint.min is not None and magnitude < constraint.min:
            return False
        if constraint.max is not None and magnitude > constraint.max:
            return False
        return True
    # has_all_features
    if not isinstance(value, frozenset):
        return False
    return constraint.features <= value


def filter_variants(
    variants: list[ResolvedVariant],
    hard: tuple[HardConstraint, ...] | list[HardConstraint],
    types: dict[str, PropertyType],
) -> list[ResolvedVariant]:
    """Variants satisfying every hard constraint, in input order."""
    for constraint in hard:
        if constraint.op == "in_range":
            _check_uniform_currency(variants, constraint.property, types[constraint.property])
    survivors = variants
    for constraint in hard:
        survivors = [v for v in survivors if satisfies(v, constraint, types)]
    return survivors


@dataclass
class _TendencyStats:
    lo: float
    hi: float


def _cohort_stats(
    cohort: list[ResolvedVariant],
    soft: tuple[SoftConstraint, ...],
    types: dict[str, PropertyType],
) -> dict[str, _TendencyStats]:
    stats: dict[str, _TendencyStats] = {}
    for constraint in soft:
        if constraint.kind != "tendency" or constraint.property in stats:
            continue
        ptype = types[constraint.property]
        _check_uniform_currency(cohort, constraint.property, ptype)
        present = [
            float(_numeric(v.properties[constraint.property], ptype))
            for v in cohort
            if constraint.property in v.properties
        ]
        if present:
            stats[constraint.property] = _TendencyStats(min(present), max(present))
    return stats


def constraint_score(
    variant: ResolvedVariant,
    constraint: SoftConstraint,
    types: dict[str, PropertyType],
    stats: dict[str, _TendencyStats],
) -> float:
    """Score of one soft constraint for one variant, in [0, 1]."""
    ptype = types[constraint.property]
    value = variant.properties.get(constraint.property)
    if value is None:
        return 0.0
    if constraint.kind == "prefer_values":
        return 1.0 if _value_in_set(value, constraint.values, ptype) else 0.0
    if constraint.kind == "tendency":
        span = stats.get(constraint.property)
        if span is None:
            return 0.0
        if span.hi == span.lo:
            return 1.0  # all present values equal
        v = float(_numeric(value, ptype))
        if constraint.direction == "positive":
            return (v - span.lo) / (span.hi - span.lo)
        return (span.hi - v) / (span.hi - span.lo)
    # cover_features
    if not isinstance(value, frozenset):
        return 0.0
    return len(constraint.features & value) / len(constraint.features)


def score(
    variant: ResolvedVariant,
    soft: tuple[SoftConstraint, ...],
    cohort: list[ResolvedVariant],
    types: dict[str, PropertyType],
) -> tuple[float, tuple[float, ...]]:
    """Weighted total in [0, 1] and the per-constraint scores."""
    stats = _cohort_stats(cohort, soft, types)
    per_constraint = tuple(
        constraint_score(variant, constraint, types, stats) for constraint in soft
    )
    if not soft:
        return 1.0, per_constraint
    total_weight = float(sum(c.weight for c in soft))
    weighted = sum(
        float(c.weight) * s for c, s in zip(soft, per_constraint)
    )
    return weighted / total_weight, per_constraint


# ---------------------------------------------------------------------------
# End-to-end match
# ---------------------------------------------------------------------------

def build_type_map(
    services: list[ServiceDescription],
    vocabularies: dict[str, Vocabulary],
    request: MatchRequest,
) -> dict[str, PropertyType]:
    """Property types visible to the request; ambiguous names are errors."""
    referenced = {c.property for c in request.hard}
    referenced.update(c.property for c in request.soft)
    types: dict[str, PropertyType] = {}
    errors: list[str] = []
    vocab_ids = {s.vocabulary_id for s in services}
    if request.vocabulary is not None:
        vocab_ids = {request.vocabulary}
    for vocab_id in sorted(vocab_ids):
        vocab = vocabularies.get(vocab_id)
        if vocab is None:
            errors.append(f"unknown vocabulary {vocab_id!r}")
            continue
        for prop in vocab.properties:
            existing = types.get(prop.name)
            if existing is not None and existing != prop.type:
                if prop.name in referenced:
                    errors.append(
                        f"property {prop.name!r} is ambiguous across vocabularies "
                        f"({existing} vs {prop.type}); pass \"vocabulary\""
                    )
                continue
            types[prop.name] = prop.type
    if errors:
        raise RequestError(sorted(set(errors)))
    return types


def rank(
    variants: list[ResolvedVariant],
    request: MatchRequest,
    types: dict[str, PropertyType],
) -> MatchResult:
    """Filter, score, and order a variant list against a validated request."""
    survivors = filter_variants(variants, request.hard, types)
    stats = _cohort_stats(survivors, request.soft, types)

    entries: list[RankedVariant] = []
    total_weight = float(sum(c.weight for c in request.soft)) if request.soft else 0.0
    for variant in survivors:
        per_constraint = tuple(
            constraint_score(variant, constraint, types, stats)
            for constraint in request.soft
        )
        if request.soft:
            total = (
                sum(float(c.weight) * s for c, s in zip(request.soft, per_constraint))
                / total_weight
            )
        else:
            total = 1.0
        entries.append(
            RankedVariant(
                service_id=variant.service_id,
                variant_id=variant.variant_id,
                score=total,
                constraint_scores=per_constraint,
            )
        )
    entries.sort(key=lambda e: (-e.score, e.service_id, e.variant_id))
    return MatchResult(
        ranked=tuple(entries), excluded_count=len(variants) - len(survivors)
    )


def match(
    services: list[ServiceDescription],
    vocabularies: dict[str, Vocabulary],
    request: MatchRequest,
) -> MatchResult:
    """Expand, filter, score, and rank the catalog against a request."""
    if request.vocabulary is not None:
        services = [s for s in services if s.vocabulary_id == request.vocabulary]
    types = build_type_map(services, vocabularies, request)
    errors = validate_request(request, types)
    if errors:
        raise RequestError(errors)

    variants: list[ResolvedVariant] = []
    for service in services:
        variants.extend(expand(service))
    return rank(variants, request, types)
