"""Asynchronous evaluation of submitted sources.

Submissions enqueue jobs; worker threads parse, validate, run fetch rules,
resolve dynamic values over static ones, and persist a new version when the
canonical content hash changed. At most one evaluation per service is in
flight at any time (per-service serialization); jobs for the same service
run in submission order.

The scheduler re-evaluates services that declare fetch rules at their
smallest rule interval (with jitter), and rebuilds its plan from stored
descriptions on startup.
"""

from __future__ import annotations

import hashlib
import queue
import random
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone

from servoir.canonical import export_canonical_json
from servoir.errors import Diagnostic, ParseFailed
from servoir.fetch import FetchedValue, run_fetchers
from servoir.parser import parse_service
from servoir.store import Store
from servoir.validate import normalized, validate

PENDING = "pending"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"

_TRANSITIONS = {
    PENDING: (RUNNING,),
    RUNNING: (SUCCEEDED, FAILED),
    SUCCEEDED: (),
    FAILED: (),
}


@dataclass
class EvaluationJob:
    job_id: str
    service_id: str
    source: str
    state: str = PENDING
    errors: list[Diagnostic] = dataclass_field(default_factory=list)
    warnings: list[Diagnostic] = dataclass_field(default_factory=list)
    submitted_at: str = ""
    finished_at: str | None = None
    result_version: int | None = None
    unchanged: bool = False

    def transition(self, state: str):
        if state not in _TRANSITIONS[self.state]:
            raise RuntimeError(f"illegal job transition {self.state} -> {state}")
        self.state = state

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "errors": [
                {"line": d.line, "column": d.column, "message": d.message}
                for d in self.errors
            ],
        }


@dataclass(frozen=True)
class EvaluationOutcome:
    resolved_json: bytes
    content_hash: str
    fetch_snapshot: dict
    warnings: tuple[Diagnostic, ...]


def resolve(service, snapshot: dict[str, FetchedValue]):
    """Fetched values override static values for their target properties."""
    overrides = {name: fetched.value for name, fetched in snapshot.items()}
    return service.with_properties(overrides) if overrides else service


def evaluate_source(source: str, vocab_lookup, fetcher) -> EvaluationOutcome:
    """The deterministic evaluation pipeline for one source text.

    Raises :class:`ParseFailed` with positioned diagnostics on parse or
    validation errors. Fetch failures degrade to warnings (the static value
    is retained).
    """
    service = parse_service(source)
    vocab = vocab_lookup(service.vocabulary_id)
    if vocab is None:
        raise ParseFailed(
            [
                Diagnostic(
                    1, 1, f"unknown vocabulary {service.vocabulary_id!r}"
                )
            ]
        )
    issues = validate(service, vocab)
    errors = [d for d in issues if d.severity == "error"]
    if errors:
        raise ParseFailed(errors)
    warnings = [d for d in issues if d.severity == "warning"]

    snapshot, fetch_errors = run_fetchers(service.fetch_rules, fetcher)
    for message in fetch_errors:
        warnings.append(
            Diagnostic(1, 1, f"{message}; static value retained", "warning")
        )

    resolved = resolve(service, snapshot)
    resolved_issues = validate(resolved, vocab)
    resolved_errors = [d for d in resolved_issues if d.severity == "error"]
    if resolved_errors:
        raise ParseFailed(resolved_errors)
    canonical = export_canonical_json(normalized(resolved, vocab))
    content_hash = hashlib.sha256(canonical).hexdigest()
    snapshot_json = {
        name: {"raw": fetched.raw, "fetched_at": fetched.fetched_at}
        for name, fetched in snapshot.items()
    }
    return EvaluationOutcome(
        resolved_json=canonical,
        content_hash=content_hash,
        fetch_snapshot=snapshot_json,
        warnings=tuple(warnings),
    )


class Evaluator:
    """Job queue with N workers and per-service serialization."""

    def __init__(self, store: Store, fetcher, workers: int = 2):
        self.store = store
        self.fetcher = fetcher
        self.workers = max(1, workers)
        self._jobs: dict[str, EvaluationJob] = {}
        self._pending: dict[str, deque[str]] = {}
        self._in_flight: set[str] = set()
        self._ready: queue.Queue[str | None] = queue.Queue()
        self._lock = threading.Lock()
        self._idle = threading.Condition(self._lock)
        self._threads: list[threading.Thread] = []
        self._stopped = False

    # -- lifecycle -------------------------------------------------------------

    def start(self):
        for index in range(self.workers):
            thread = threading.Thread(
                target=self._worker, name=f"evaluator-{index}", daemon=True
            )
            thread.start()
            self._threads.append(thread)

    def stop(self):
        with self._lock:
            self._stopped = True
        for _ in self._threads:
            self._ready.put(None)
        for thread in self._threads:
            thread.join(timeout=5)

    # -- submission --------------------------------------------------------------

    def submit(self, service_id: str, source: str) -> EvaluationJob:
        """Enqueue one evaluation; returns the pending job immediately."""
        with self._lock:
            if self._stopped:
                raise RuntimeError("evaluator is stopped; queue unavailable")
            job = EvaluationJob(
                job_id=uuid.uuid4().hex,
                service_id=service_id,
                source=source,
                submitted_at=datetime.now(timezone.utc).isoformat(),
            )
            self._jobs[job.job_id] = job
            bucket = self._pending.setdefault(service_id, deque())
            bucket.append(job.job_id)
            if service_id not in self._in_flight:
                self._in_flight.add(service_id)
                self._ready.put(service_id)
            return job

    def job(self, job_id: str) -> EvaluationJob | None:
        with self._lock:
            return self._jobs.get(job_id)

    def drain(self, timeout: float = 30.0) -> bool:
        """Block until all queued jobs finished (testing/shutdown aid)."""
        deadline = time.monotonic() + timeout
        with self._idle:
            while any(
                job.state in (PENDING, RUNNING) for job in self._jobs.values()
            ):
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._idle.wait(remaining)
            return True

    # -- workers -----------------------------------------------------------------

    def _worker(self):
        while True:
            service_id = self._ready.get()
            if service_id is None:
                return
            with self._lock:
                bucket = self._pending.get(service_id)
                job = self._jobs[bucket.popleft()] if bucket else None
            if job is not None:
                self._run_job(job)
            with self._idle:
                bucket = self._pending.get(service_id)
                if bucket:
                    self._ready.put(service_id)
                else:
                    self._in_flight.discard(service_id)
                self._idle.notify_all()

    def _run_job(self, job: EvaluationJob):
        job.transition(RUNNING)
        try:
            outcome = evaluate_source(
                job.source, lambda vid: self._vocab(vid), self.fetcher
            )
        except ParseFailed as failure:
            job.errors = list(failure.diagnostics)
            job.transition(FAILED)
            job.finished_at = datetime.now(timezone.utc).isoformat()
            return
        except Exception as unexpected:  # storage or programming error
            job.errors = [Diagnostic(1, 1, f"evaluation failed: {unexpected}")]
            job.transition(FAILED)
            job.finished_at = datetime.now(timezone.utc).isoformat()
            return
        job.warnings = list(outcome.warnings)
        record = self.store.persist_if_changed(
            job.service_id,
            job.source,
            outcome.resolved_json,
            outcome.content_hash,
            outcome.fetch_snapshot,
        )
        if record is None:
            job.unchanged = True
            latest = self.store.latest_version(job.service_id)
            job.result_version = latest
        else:
            job.result_version = record.version
        job.transition(SUCCEEDED)
        job.finished_at = datetime.now(timezone.utc).isoformat()

    def _vocab(self, vocabulary_id: str):
        entry = self.store.get_vocabulary(vocabulary_id)
        return entry[1] if entry else None


# ---------------------------------------------------------------------------
# Recurring evaluation
# ---------------------------------------------------------------------------

class SystemClock:
    def now(self) -> float:
        return time.monotonic()


# cadence: smallest fetch-rule interval, with +/-10% jitter per cycle
JITTER_FRACTION = 0.1


class Scheduler:
    """Plans recurring evaluations for services with fetch rules.

    ``tick()`` performs one scheduling pass; the background thread calls it
    periodically. Tests drive ``tick()`` directly with a fake clock. The
    plan is rebuilt from stored descriptions, so it survives restarts.
    """

    def __init__(self, store: Store, evaluator: Evaluator, clock=None, rng=None,
                 poll_interval_s: float = 1.0):
        self.store = store
        self.evaluator = evaluator
        self.clock = clock or SystemClock()
        self.rng = rng or random.Random()
        self.poll_interval_s = poll_interval_s
        self._planned: dict[str, tuple[int, int, float]] = {}
        # service_id -> (version, interval_s, next_due)
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self):
        self._thread = threading.Thread(
            target=self._loop, name="scheduler", daemon=True
        )
        self._thread.start()

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def _loop(self):
        while not self._stop.wait(self.poll_interval_s):
            try:
                self.tick()
            except Exception:
                # scheduling must never die; failures surface on jobs
                continue

    def _interval_of(self, service_id: str) -> int | None:
        record = self.store.latest(service_id)
        if record is None:
            return None
        try:
            service = parse_service(record.source)
        except ParseFailed:
            return None
        if not service.fetch_rules:
            return None
        return min(rule.interval_s for rule in service.fetch_rules)

    def _jittered(self, interval: int) -> float:
        spread = 2 * self.rng.random() - 1  # uniform in [-1, 1]
        return interval * (1 + JITTER_FRACTION * spread)

    def tick(self):
        """One pass: sync the plan with the store, submit due evaluations."""
        now = self.clock.now()
        live = set(self.store.list_services())
        for service_id in live:
            version = self.store.latest_version(service_id)
            if version is None:
                continue
            planned = self._planned.get(service_id)
            if planned is None:
                interval = self._interval_of(service_id)
                if interval is not None:
                    # first evaluation on the next tick (catch-up on restart)
                    self._planned[service_id] = (version, interval, now)
            elif planned[0] != version:
                # content changed: refresh the cadence, keep the due time
                interval = self._interval_of(service_id)
                if interval is None:
                    self._planned.pop(service_id, None)
                else:
                    self._planned[service_id] = (version, interval, planned[2])

        for service_id in list(self._planned):
            if service_id not in live:
                del self._planned[service_id]
                continue
            version, interval, due = self._planned[service_id]
            if now >= due:
                record = self.store.latest(service_id)
                if record is None:
                    del self._planned[service_id]
                    continue
                self.evaluator.submit(service_id, record.source)
                self._planned[service_id] = (
                    version,
                    interval,
                    now + self._jittered(interval),
                )
