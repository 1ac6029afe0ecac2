from __future__ import annotations

import json
from decimal import Decimal

import pytest

from servoir.evaluator import (
    FAILED,
    SUCCEEDED,
    Evaluator,
    Scheduler,
    evaluate_source,
    resolve,
)
from servoir.fetch import FetchedValue
from servoir.parser import parse_service, parse_vocabulary
from servoir.store import Store
from servoir.values import Money

VOCAB_SOURCE = (
    "vocabulary v {"
    ' property price : money { doc "d" }'
    ' property name : string { doc "d" }'
    " }"
)

PLAIN_SERVICE = 'service svc uses v {\n  set name plain\n  set price 5 EUR\n}\n'

FETCHING_SERVICE = (
    "service svc uses v {\n"
    "  set name fetched\n"
    "  set price 5 EUR\n"
    '  fetch price from "https://quotes.example/spot"'
    ' extract json_pointer "/price" as money every 5 m\n'
    "}\n"
)


class StubFetcher:
    """Programmable body per URL; raises on unknown URLs."""

    def __init__(self):
        self.bodies: dict[str, bytes] = {}

    def __call__(self, url: str) -> bytes:
        from servoir.fetch import FetchError

        if url not in self.bodies:
            raise FetchError("stub: no route")
        return self.bodies[url]


@pytest.fixture()
def store(tmp_path):
    store = Store(tmp_path)
    store.put_vocabulary("v", VOCAB_SOURCE, parse_vocabulary(VOCAB_SOURCE))
    return store


@pytest.fixture()
def fetcher():
    stub = StubFetcher()
    stub.bodies["https://quotes.example/spot"] = b'{"price":"0.12 EUR"}'
    return stub


@pytest.fixture()
def evaluator(store, fetcher):
    ev = Evaluator(store, fetcher, workers=2)
    ev.start()
    yield ev
    ev.stop()


class TestEvaluateSource:
    def lookup(self, store):
        return lambda vid: (store.get_vocabulary(vid) or (None, None))[1]

    def test_deterministic_hash(self, store, fetcher):
        one = evaluate_source(PLAIN_SERVICE, self.lookup(store), fetcher)
        two = evaluate_source(PLAIN_SERVICE, self.lookup(store), fetcher)
        assert one.content_hash == two.content_hash
        assert one.resolved_json == two.resolved_json

    def test_fetched_value_overrides_static(self, store, fetcher):
        outcome = evaluate_source(FETCHING_SERVICE, self.lookup(store), fetcher)
        resolved = json.loads(outcome.resolved_json)
        assert resolved["properties"]["price"] == {
            "amount": 0.12,
            "currency": "EUR",
        }
        assert "price" in outcome.fetch_snapshot

    def test_fetch_failure_keeps_static_value_with_warning(self, store):
        broken = StubFetcher()  # no routes at all
        outcome = evaluate_source(FETCHING_SERVICE, self.lookup(store), broken)
        resolved = json.loads(outcome.resolved_json)
        assert resolved["properties"]["price"] == {"amount": 5, "currency": "EUR"}
        assert any("static value retained" in w.message for w in outcome.warnings)

    def test_unknown_vocabulary_fails(self, store, fetcher):
        from servoir.errors import ParseFailed

        with pytest.raises(ParseFailed, match="unknown vocabulary"):
            evaluate_source(
                "service s uses ghost { }", self.lookup(store), fetcher
            )


class TestResolve:
    def test_empty_snapshot_is_identity(self):
        service = parse_service(PLAIN_SERVICE)
        assert resolve(service, {}) == service

    def test_override(self):
        service = parse_service(PLAIN_SERVICE)
        resolved = resolve(
            service,
            {
                "price": FetchedValue(
                    raw="0.12 EUR",
                    value=Money(Decimal("0.12"), "EUR"),
                    fetched_at="2026-01-01T00:00:00+00:00",
                )
            },
        )
        assert resolved.base_properties["price"] == Money(Decimal("0.12"), "EUR")
        assert resolved.base_properties["name"] == "plain"


class TestJobs:
    def test_happy_path_creates_record(self, evaluator, store):
        job = evaluator.submit("svc", PLAIN_SERVICE)
        assert evaluator.drain()
        assert job.state == SUCCEEDED
        assert job.result_version == 1
        assert store.latest("svc").version == 1

    def test_broken_source_fails_with_positions_and_no_record(
        self, evaluator, store
    ):
        job = evaluator.submit("svc", "service svc uses v { set }")
        assert evaluator.drain()
        assert job.state == FAILED
        assert job.errors and job.errors[0].line == 1 and job.errors[0].column > 1
        assert store.latest("svc") is None
        payload = job.to_json()
        assert set(payload) == {"job_id", "state", "errors"}
        assert set(payload["errors"][0]) == {"line", "column", "message"}

    def test_type_error_fails(self, evaluator, store):
        job = evaluator.submit("svc", "service svc uses v { set price true }")
        assert evaluator.drain()
        assert job.state == FAILED
        assert any("expects money" in d.message for d in job.errors)

    def test_two_rapid_submits_serialize_to_versions_1_and_2(
        self, evaluator, store
    ):
        first = evaluator.submit("svc", PLAIN_SERVICE)
        second = evaluator.submit(
            "svc", PLAIN_SERVICE.replace("5 EUR", "6 EUR")
        )
        assert evaluator.drain()
        assert first.state == SUCCEEDED and second.state == SUCCEEDED
        assert first.result_version == 1
        assert second.result_version == 2
        assert store.versions("svc") == [1, 2]

    def test_identical_resubmit_is_unchanged(self, evaluator, store):
        evaluator.submit("svc", PLAIN_SERVICE)
        assert evaluator.drain()
        job = evaluator.submit("svc", PLAIN_SERVICE)
        assert evaluator.drain()
        assert job.state == SUCCEEDED
        assert job.unchanged is True
        assert store.versions("svc") == [1]

    def test_submit_after_stop_refused(self, store, fetcher):
        ev = Evaluator(store, fetcher, workers=1)
        ev.start()
        ev.stop()
        with pytest.raises(RuntimeError, match="queue unavailable"):
            ev.submit("svc", PLAIN_SERVICE)

    def test_parallel_services_make_progress(self, evaluator, store):
        jobs = []
        for index in range(6):
            sid = f"svc{index}"
            jobs.append(
                evaluator.submit(sid, PLAIN_SERVICE.replace("svc", sid))
            )
        assert evaluator.drain()
        assert all(j.state == SUCCEEDED for j in jobs)
        assert len(store.list_services()) == 6


class FakeClock:
    def __init__(self):
        self.time = 0.0

    def now(self) -> float:
        return self.time

    def advance(self, seconds: float):
        self.time += seconds


class TestScheduler:
    def setup_scheduler(self, store, evaluator, seed=1):
        import random

        clock = FakeClock()
        scheduler = Scheduler(
            store, evaluator, clock=clock, rng=random.Random(seed)
        )
        return scheduler, clock

    def seed_service(self, evaluator, source=FETCHING_SERVICE):
        evaluator.submit("svc", source)
        assert evaluator.drain()

    def test_two_evaluations_within_700_simulated_seconds(
        self, store, evaluator, fetcher
    ):
        self.seed_service(evaluator)
        scheduler, clock = self.setup_scheduler(store, evaluator)

        evaluations = 0
        original_submit = evaluator.submit

        def counting_submit(sid, source):
            nonlocal evaluations
            evaluations += 1
            return original_submit(sid, source)

        evaluator.submit = counting_submit
        try:
            while clock.now() <= 700:
                scheduler.tick()
                evaluator.drain()
                clock.advance(10)
        finally:
            evaluator.submit = original_submit
        # interval 300 s: catch-up run plus at least one scheduled run
        assert evaluations >= 2

    def test_cadence_respects_minimum_interval(self, store, evaluator, fetcher):
        self.seed_service(evaluator)
        scheduler, clock = self.setup_scheduler(store, evaluator)
        scheduler.tick()  # catch-up submit at t=0
        evaluator.drain()
        due = scheduler._planned["svc"][2]
        # next run within interval +/- 10% jitter
        assert 270 <= due <= 330

    def test_no_fetch_rules_never_scheduled(self, store, evaluator):
        self.seed_service(evaluator, PLAIN_SERVICE)
        scheduler, clock = self.setup_scheduler(store, evaluator)
        for _ in range(10):
            scheduler.tick()
            clock.advance(1000)
        assert "svc" not in scheduler._planned

    def test_smallest_rule_interval_wins(self, store, evaluator):
        source = (
            "service svc uses v {\n"
            "  set price 5 EUR\n"
            '  fetch price from "https://quotes.example/spot"'
            ' extract json_pointer "/price" as money every 10 m\n'
            '  fetch name from "https://quotes.example/name"'
            ' extract json_pointer "/name" as string every 1 m\n'
            "}\n"
        )
        self.seed_service(evaluator, source)
        scheduler, clock = self.setup_scheduler(store, evaluator)
        scheduler.tick()
        evaluator.drain()
        due = scheduler._planned["svc"][2]
        assert due <= 66  # 60 s + 10% jitter

    def test_plan_rebuilt_from_store_on_fresh_scheduler(
        self, store, evaluator, fetcher
    ):
        self.seed_service(evaluator)
        # a brand-new scheduler (fresh process) picks the service up again
        scheduler, clock = self.setup_scheduler(store, evaluator, seed=42)
        scheduler.tick()
        assert "svc" in scheduler._planned
