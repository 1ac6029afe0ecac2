"""Catalog reads: service listings, faceted search, match and quote glue.

Filters select facet values per property: a variant passes when, for every
filtered property, its value matches at least one selected value
(conjunctive across properties, disjunctive within one property). A service
is listed when at least one of its variants survives. Facet counts for a
property are computed over the catalog filtered by every selection except
that property's own (standard disjunctive facet counting) and count
variants.

Read responses are cached under a generation tag; any write to the store
bumps the generation, so a cached response is never older than the latest
write. Cached and uncached responses are byte-identical.
"""

from __future__ import annotations

import threading
from decimal import Decimal

from servoir.canonical import canonical_json_bytes, service_from_canonical
from servoir.document import ServiceDescription
from servoir.matchmaker import (
    MatchRequest,
    RequestError,
    match,
    request_from_json,
)
from servoir.pricing import UsageProfile, quote
from servoir.store import Store, UnknownServiceError
from servoir.values import Value
from servoir.variants import ResolvedVariant, expand, find_variant
from servoir.vocabulary import FACETABLE_KINDS


class FilterError(ValueError):
    """A facet filter references an unknown or non-facetable property."""


def _facet_values(value: Value) -> list[str]:
    """Facet keys contributed by one property value."""
    if isinstance(value, bool):
        return ["true" if value else "false"]
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, str):
        return [value]
    return []


class Repository:
    def __init__(self, store: Store, cache_enabled: bool = True):
        self.store = store
        self.cache_enabled = cache_enabled
        self._lock = threading.Lock()
        self._ast_cache: dict[tuple[str, int], ServiceDescription] = {}
        self._variant_cache: dict[tuple[str, int], list[ResolvedVariant]] = {}
        self._response_cache: dict[str, tuple[int, bytes]] = {}

    # -- cached building blocks ------------------------------------------------

    def service_ast(self, service_id: str, version: int) -> ServiceDescription:
        key = (service_id, version)
        with self._lock:
            cached = self._ast_cache.get(key)
        if cached is not None:
            return cached
        record = self.store.get(service_id, version)
        ast = service_from_canonical(record.resolved_json)
        with self._lock:
            self._ast_cache[key] = ast
        return ast

    def variants_of(self, service_id: str, version: int) -> list[ResolvedVariant]:
        key = (service_id, version)
        with self._lock:
            cached = self._variant_cache.get(key)
        if cached is not None:
            return cached
        variants = expand(self.service_ast(service_id, version))
        with self._lock:
            self._variant_cache[key] = variants
        return variants

    def _catalog(
        self, vocabulary: str | None
    ) -> list[tuple[str, int, ServiceDescription]]:
        entries = []
        for service_id in self.store.list_services():
            version = self.store.latest_version(service_id)
            if version is None:
                continue
            ast = self.service_ast(service_id, version)
            if vocabulary is not None and ast.vocabulary_id != vocabulary:
                continue
            entries.append((service_id, version, ast))
        return entries

    def cached_response(self, key: str, producer) -> bytes:
        if not self.cache_enabled:
            return producer()
        generation = self.store.generation
        with self._lock:
            entry = self._response_cache.get(key)
            if entry is not None and entry[0] == generation:
                return entry[1]
        body = producer()
        with self._lock:
            # a concurrent write may have bumped the generation; tag with
            # the generation read before producing so the entry expires
            self._response_cache[key] = (generation, body)
        return body

    # -- facets and listings -----------------------------------------------------

    def _facet_types(self, vocabulary: str | None) -> dict[str, str]:
        """Facetable property name -> kind, across relevant vocabularies."""
        kinds: dict[str, str] = {}
        vocabularies = self.store.vocabularies()
        for vocab_id, vocab in sorted(vocabularies.items()):
            if vocabulary is not None and vocab_id != vocabulary:
                continue
            for prop in vocab.properties:
                if prop.type.kind in FACETABLE_KINDS:
                    kinds.setdefault(prop.name, prop.type.kind)
        return kinds

    def _check_filters(self, filters: dict[str, set[str]], vocabulary: str | None):
        facetable = self._facet_types(vocabulary)
        for name in filters:
            if name not in facetable:
                raise FilterError(
                    f"property {name!r} is unknown or not facetable"
                )

    @staticmethod
    def variant_passes(
        variant: ResolvedVariant, filters: dict[str, set[str]]
    ) -> bool:
        for name, selected in filters.items():
            value = variant.properties.get(name)
            if value is None:
                return False
            if not set(_facet_values(value)) & selected:
                return False
        return True

    def list_services(
        self, filters: dict[str, set[str]], vocabulary: str | None = None
    ) -> list[dict]:
        """Service summaries with at least one variant surviving the filters."""
        self._check_filters(filters, vocabulary)
        summaries = []
        for service_id, version, ast in self._catalog(vocabulary):
            variants = self.variants_of(service_id, version)
            surviving = [v for v in variants if self.variant_passes(v, filters)]
            if not surviving:
                continue
            summaries.append(
                {
                    "id": service_id,
                    "vocabulary": ast.vocabulary_id,
                    "version": version,
                    "variant_count": len(variants),
                    "matching_variants": len(surviving),
                }
            )
        return summaries

    def compute_facets(
        self, filters: dict[str, set[str]], vocabulary: str | None = None
    ) -> dict[str, dict[str, int]]:
        """Per-value variant counts with the own-filter-exclusion rule."""
        self._check_filters(filters, vocabulary)
        facet_kinds = self._facet_types(vocabulary)
        all_variants: list[ResolvedVariant] = []
        for service_id, version, _ast in self._catalog(vocabulary):
            all_variants.extend(self.variants_of(service_id, version))

        result: dict[str, dict[str, int]] = {}
        for name in sorted(facet_kinds):
            others = {k: v for k, v in filters.items() if k != name}
            counts: dict[str, int] = {}
            for variant in all_variants:
                if not self.variant_passes(variant, others):
                    continue
                value = variant.properties.get(name)
                if value is None:
                    continue
                for key in _facet_values(value):
                    counts[key] = counts.get(key, 0) + 1
            result[name] = dict(sorted(counts.items()))
        return result

    # -- match and quote ----------------------------------------------------------

    def match_result(self, request: MatchRequest):
        services = [ast for _sid, _version, ast in self._catalog(None)]
        return match(services, self.store.vocabularies(), request)

    def match_response(self, request_obj) -> bytes:
        request = request_from_json(request_obj)
        result = self.match_result(request)
        return canonical_json_bytes(result.to_json())

    def quote_response(self, service_id: str, variant_id: str, usage_obj) -> bytes:
        version = self.store.latest_version(service_id)
        if version is None or self.store.is_deleted(service_id):
            raise UnknownServiceError(service_id)
        ast = self.service_ast(service_id, version)
        variant = find_variant(ast, variant_id)
        if variant is None:
            raise UnknownServiceError(f"{service_id} variant {variant_id!r}")
        usage = _usage_from_json(usage_obj)
        result = quote(variant.price_components, usage)
        return canonical_json_bytes(result.to_json())


def _usage_from_json(obj) -> UsageProfile:
    if not isinstance(obj, dict):
        raise RequestError(["usage must be a JSON object"])
    errors = []
    horizon = obj.get("horizon_months", 1)
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        errors.append("horizon_months: must be an integer >= 1")
    metrics_obj = obj.get("metrics", {}) or {}
    metrics: dict[str, Decimal] = {}
    if not isinstance(metrics_obj, dict):
        errors.append("metrics: must be an object")
    else:
        for name, quantity in metrics_obj.items():
            if isinstance(quantity, bool) or not isinstance(
                quantity, (int, float, Decimal)
            ):
                errors.append(f"metrics.{name}: must be a number")
                continue
            value = quantity if isinstance(quantity, Decimal) else Decimal(str(quantity))
            if value < 0:
                errors.append(f"metrics.{name}: must be >= 0")
                continue
            metrics[name] = value
    if errors:
        raise RequestError(errors)
    return UsageProfile(horizon_months=horizon, metrics=metrics)
