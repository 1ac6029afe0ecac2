"""HTTP/JSON surface of the repository service.

Paths (all responses JSON, UTF-8; errors as ``{"error": str, "details": [...]}``):

    GET    /services
    GET    /services/{id}
    GET    /services/{id}/history
    GET    /services/{id}/versions/{n}
    PUT    /services/{id}
    DELETE /services/{id}
    GET    /jobs/{id}
    GET    /vocabularies/{id}
    PUT    /vocabularies/{id}
    GET    /facets
    POST   /match
    POST   /services/{id}/variants/{variant_id}/quote

Facet selections are query parameters ``filter=<property>:<value>``
(repeatable; disjunctive within one property, conjunctive across) plus an
optional ``vocabulary=<id>``. The API layer is stateless; all state lives
in the store and job queue.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from contextlib import asynccontextmanager

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from servoir.canonical import canonical_json_bytes, vocabulary_to_json
from servoir.errors import MixedCurrencyError, ParseFailed
from servoir.evaluator import Evaluator, Scheduler
from servoir.fetch import HttpFetcher
from servoir.matchmaker import RequestError
from servoir.parser import parse_vocabulary
from servoir.repository import FilterError, Repository
from servoir.store import StorageError, Store, UnknownServiceError, check_id

MAX_SOURCE_BYTES = 1024 * 1024


@dataclass
class ServerConfig:
    data_dir: Path
    allowlist: tuple[str, ...] = ()
    workers: int = 2
    cache_enabled: bool = True
    ui_dir: Path | None = None
    scheduler_enabled: bool = True


class ApiError(Exception):
    def __init__(self, status: int, message: str, details: list | None = None):
        self.status = status
        self.message = message
        self.details = details or []
        super().__init__(message)


def _error_response(status: int, message: str, details: list | None = None) -> Response:
    body = canonical_json_bytes({"error": message, "details": details or []})
    return Response(content=body, status_code=status, media_type="application/json")


def _json_response(payload, status: int = 200) -> Response:
    return Response(
        content=canonical_json_bytes(payload),
        status_code=status,
        media_type="application/json",
    )


def _bytes_response(body: bytes, status: int = 200) -> Response:
    return Response(content=body, status_code=status, media_type="application/json")


def parse_filters(raw: list[str]) -> dict[str, set[str]]:
    filters: dict[str, set[str]] = {}
    for item in raw:
        name, sep, value = item.partition(":")
        if not sep or not name or not value:
            raise ApiError(
                400, f"malformed filter {item!r} (expected property:value)"
            )
        filters.setdefault(name, set()).add(value)
    return filters


def create_app(config: ServerConfig, fetcher=None) -> FastAPI:
    store = Store(config.data_dir)
    fetcher = fetcher if fetcher is not None else HttpFetcher(config.allowlist)
    evaluator = Evaluator(store, fetcher, workers=config.workers)
    scheduler = Scheduler(store, evaluator)
    repository = Repository(store, cache_enabled=config.cache_enabled)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        evaluator.start()
        if config.scheduler_enabled:
            scheduler.start()
        yield
        if config.scheduler_enabled:
            scheduler.stop()
        evaluator.stop()

    app = FastAPI(
        title="servoir",
        docs_url=None,
        redoc_url=None,
        openapi_url=None,
        lifespan=lifespan,
    )
    app.state.store = store
    app.state.evaluator = evaluator
    app.state.scheduler = scheduler
    app.state.repository = repository

    # -- error mapping -------------------------------------------------------

    @app.exception_handler(ApiError)
    def _api_error(_req, exc: ApiError):
        return _error_response(exc.status, exc.message, exc.details)

    @app.exception_handler(RequestError)
    def _request_error(_req, exc: RequestError):
        return _error_response(400, "invalid request", exc.errors)

    @app.exception_handler(FilterError)
    def _filter_error(_req, exc: FilterError):
        return _error_response(400, str(exc))

    @app.exception_handler(UnknownServiceError)
    def _unknown(_req, exc: UnknownServiceError):
        return _error_response(404, f"not found: {exc.args[0]}")

    @app.exception_handler(StorageError)
    def _storage(_req, exc: StorageError):
        return _error_response(400, str(exc))

    @app.exception_handler(MixedCurrencyError)
    def _mixed(_req, exc: MixedCurrencyError):
        return _error_response(400, str(exc))

    @app.exception_handler(ParseFailed)
    def _parse_failed(_req, exc: ParseFailed):
        return _error_response(
            400, "parse failed", [d.to_json() for d in exc.diagnostics]
        )

    @app.exception_handler(RequestValidationError)
    def _request_validation(_req, exc: RequestValidationError):
        details = [
            {
                "loc": [str(part) for part in error.get("loc", [])],
                "message": str(error.get("msg", "invalid")),
            }
            for error in exc.errors()
        ]
        return _error_response(400, "invalid request", details)

    @app.exception_handler(StarletteHTTPException)
    def _http_error(_req, exc: StarletteHTTPException):
        return _error_response(exc.status_code, str(exc.detail))

    # -- services --------------------------------------------------------------

    @app.get("/services")
    def list_services(
        filter: list[str] = Query(default=[]),  # noqa: A002 - wire name
        vocabulary: str | None = None,
    ):
        filters = parse_filters(filter)
        key = "services?" + repr(sorted((k, sorted(v)) for k, v in filters.items())) + repr(vocabulary)
        body = repository.cached_response(
            key,
            lambda: canonical_json_bytes(
                repository.list_services(filters, vocabulary)
            ),
        )
        return _bytes_response(body)

    @app.get("/facets")
    def facets(
        filter: list[str] = Query(default=[]),  # noqa: A002 - wire name
        vocabulary: str | None = None,
    ):
        filters = parse_filters(filter)
        key = "facets?" + repr(sorted((k, sorted(v)) for k, v in filters.items())) + repr(vocabulary)
        body = repository.cached_response(
            key,
            lambda: canonical_json_bytes(
                repository.compute_facets(filters, vocabulary)
            ),
        )
        return _bytes_response(body)

    def _record_envelope(service_id: str, version: int) -> Response:
        record = store.get(service_id, version)
        payload = {
            "service_id": record.service_id,
            "version": record.version,
            "source": record.source,
            "resolved": json.loads(
                record.resolved_json.decode("utf-8"), parse_float=Decimal
            ),
            "content_hash": record.content_hash,
            "fetch_snapshot": record.fetch_snapshot,
            "created_at": record.created_at,
        }
        return _json_response(payload)

    @app.get("/services/{service_id}")
    def get_service(service_id: str):
        version = store.latest_version(service_id)
        if version is None or store.is_deleted(service_id):
            raise UnknownServiceError(service_id)
        return _record_envelope(service_id, version)

    @app.get("/services/{service_id}/history")
    def service_history(service_id: str):
        if not store.exists(service_id):
            raise UnknownServiceError(service_id)
        entries = []
        for version in store.versions(service_id):
            record = store.get(service_id, version)
            entries.append(
                {
                    "version": record.version,
                    "content_hash": record.content_hash,
                    "created_at": record.created_at,
                }
            )
        return _json_response(entries)

    @app.get("/services/{service_id}/versions/{version}")
    def service_version(service_id: str, version: int):
        if store.is_deleted(service_id):
            raise UnknownServiceError(service_id)
        return _record_envelope(service_id, version)

    @app.put("/services/{service_id}")
    async def put_service(service_id: str, request: Request):
        body = await request.body()
        if len(body) > MAX_SOURCE_BYTES:
            raise ApiError(413, f"payload exceeds {MAX_SOURCE_BYTES} bytes")
        try:
            source = body.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(400, "body must be UTF-8 text")
        check_id(service_id)
        job = evaluator.submit(service_id, source)
        return _json_response(job.to_json(), status=202)

    @app.delete("/services/{service_id}")
    def delete_service(service_id: str):
        store.delete(service_id)
        return _json_response({"deleted": service_id})

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = evaluator.job(job_id)
        if job is None:
            raise UnknownServiceError(f"job {job_id}")
        return _json_response(job.to_json())

    # -- vocabularies --------------------------------------------------------------

    @app.get("/vocabularies/{vocabulary_id}")
    def get_vocabulary(vocabulary_id: str):
        entry = store.get_vocabulary(vocabulary_id)
        if entry is None:
            raise UnknownServiceError(f"vocabulary {vocabulary_id}")
        source, vocab = entry
        return _json_response(
            {
                "id": vocabulary_id,
                "source": source,
                "definition": vocabulary_to_json(vocab),
            }
        )

    @app.put("/vocabularies/{vocabulary_id}")
    async def put_vocabulary(vocabulary_id: str, request: Request):
        body = await request.body()
        if len(body) > MAX_SOURCE_BYTES:
            raise ApiError(413, f"payload exceeds {MAX_SOURCE_BYTES} bytes")
        try:
            source = body.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(400, "body must be UTF-8 text")
        vocab = parse_vocabulary(source)
        if vocab.id != vocabulary_id:
            raise ApiError(
                400,
                f"vocabulary declares id {vocab.id!r}, path says {vocabulary_id!r}",
            )
        store.put_vocabulary(vocabulary_id, source, vocab)
        return _json_response({"id": vocabulary_id})

    # -- match and quote --------------------------------------------------------

    async def _json_body(request: Request):
        body = await request.body()
        try:
            return json.loads(body.decode("utf-8"), parse_float=Decimal)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ApiError(400, f"body must be JSON: {exc}")

    @app.post("/match")
    async def post_match(request: Request):
        payload = await _json_body(request)
        key = "match?" + repr(payload)
        body = repository.cached_response(
            key, lambda: repository.match_response(payload)
        )
        return _bytes_response(body)

    @app.post("/services/{service_id}/variants/{variant_id:path}/quote")
    async def post_quote(service_id: str, variant_id: str, request: Request):
        payload = await _json_body(request)
        return _bytes_response(
            repository.quote_response(service_id, variant_id, payload)
        )

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
