"""Type-checking of service descriptions against their vocabulary.

``validate`` returns diagnostics (empty list = ok); ``normalized`` returns
a copy with values normalized (quantities converted to the declared unit).
A description that validates can be expanded, priced, and matched without
type failures downstream.
"""

from __future__ import annotations

from dataclasses import replace

from servoir.document import Pos, ServiceDescription
from servoir.errors import Diagnostic, ValidationFailed
from servoir.values import Value
from servoir.vocabulary import Vocabulary, normalize_value, value_matches_type


def validate(service: ServiceDescription, vocab: Vocabulary) -> list[Diagnostic]:
    """All type and reference errors in the description, in source order."""
    issues: list[Diagnostic] = []

    def check_assignment(name: str, value: Value, pos: Pos):
        prop = vocab.property(name)
        if prop is None:
            issues.append(
                Diagnostic(*pos, f"unknown property {name!r} (vocabulary {vocab.id!r})")
            )
            return
        if not value_matches_type(value, prop.type):
            if prop.type.kind == "enum" and isinstance(value, str):
                issues.append(
                    Diagnostic(
                        *pos,
                        f"{value!r} is not a member of enum property {name!r} "
                        f"({', '.join(prop.type.members)})",
                    )
                )
            else:
                issues.append(
                    Diagnostic(
                        *pos,
                        f"property {name!r} expects {prop.type}, got "
                        f"{_describe_value(value)}",
                    )
                )
            return
        if prop.type.kind == "features" and isinstance(value, frozenset):
            declared = set(vocab.features_of(prop))
            for feature in sorted(value - declared):
                issues.append(
                    Diagnostic(
                        *pos,
                        f"feature {feature!r} is not in set "
                        f"{prop.type.feature_set!r} of property {name!r}",
                    )
                )

    if service.vocabulary_id != vocab.id:
        issues.append(
            Diagnostic(
                1,
                1,
                f"service uses vocabulary {service.vocabulary_id!r} but was "
                f"validated against {vocab.id!r}",
            )
        )

    for name, value in service.base_properties.items():
        check_assignment(name, value, service.positions.get(name, (1, 1)))

    for dimension in service.dimensions:
        for option in dimension.options:
            for name, value in option.overrides.items():
                check_assignment(name, value, option.positions.get(name, dimension.pos))

    for exclusion in service.exclusions:
        for dim_name, option_id in exclusion.bindings:
            dimension = service.dimension(dim_name)
            if dimension is None:
                issues.append(
                    Diagnostic(
                        *exclusion.pos,
                        f"exclusion references unknown dimension {dim_name!r}",
                    )
                )
            elif dimension.option(option_id) is None:
                issues.append(
                    Diagnostic(
                        *exclusion.pos,
                        f"exclusion references unknown option {option_id!r} "
                        f"of dimension {dim_name!r}",
                    )
                )

    for rule in service.fetch_rules:
        prop = vocab.property(rule.target_property)
        if prop is None:
            issues.append(
                Diagnostic(
                    *rule.pos,
                    f"fetch targets unknown property {rule.target_property!r}",
                )
            )
        elif prop.type != rule.parse_as:
            issues.append(
                Diagnostic(
                    *rule.pos,
                    f"fetch for {rule.target_property!r} parses as "
                    f"{rule.parse_as} but the property is {prop.type}",
                )
            )

    currencies = _currencies(service)
    if len(currencies) > 1:
        issues.append(
            Diagnostic(
                1,
                1,
                "description mixes currencies "
                f"({', '.join(sorted(currencies))}); all price components of "
                "a service must share one currency",
            )
        )

    return issues


def _currencies(service: ServiceDescription) -> set[str]:
    found = {c.currency for c in service.price_components}
    for dimension in service.dimensions:
        for option in dimension.options:
            found.update(c.currency for c in option.prices)
    return found


def _describe_value(value: Value) -> str:
    if isinstance(value, bool):
        return f"boolean {value}"
    if isinstance(value, frozenset):
        return "feature list"
    return f"{type(value).__name__.lower()} {value!r}"


def is_valid(service: ServiceDescription, vocab: Vocabulary) -> bool:
    return not any(d.severity == "error" for d in validate(service, vocab))


def normalized(service: ServiceDescription, vocab: Vocabulary) -> ServiceDescription:
    """A validated copy with values in canonical form (declared units).

    Raises :class:`ValidationFailed` if the description has errors.
    """
    issues = [d for d in validate(service, vocab) if d.severity == "error"]
    if issues:
        raise ValidationFailed(issues)

    def normalize_map(values: dict[str, Value]) -> dict[str, Value]:
        result = {}
        for name, value in values.items():
            prop = vocab.property(name)
            assert prop is not None
            result[name] = normalize_value(value, prop.type)
        return result

    dimensions = tuple(
        replace(
            dimension,
            options=tuple(
                replace(option, overrides=normalize_map(option.overrides))
                for option in dimension.options
            ),
        )
        for dimension in service.dimensions
    )
    return replace(
        service,
        base_properties=normalize_map(service.base_properties),
        dimensions=dimensions,
    )
