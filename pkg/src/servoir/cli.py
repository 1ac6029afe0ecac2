"""Command-line tool: validate, export, match, and serve.

Exit codes are stable: 0 success, 1 validation/match failure, 2 usage
error, 3 I/O error. stdout carries only payload bytes; all diagnostics go
to stderr.
"""

from __future__ import annotations

import json
import socket
import sys
from decimal import Decimal
from pathlib import Path

import click

from servoir.canonical import canonical_json_bytes, export_canonical_json
from servoir.cheatsheet import export_cheatsheet
from servoir.document import ServiceDescription
from servoir.errors import MixedCurrencyError, ParseFailed
from servoir.matchmaker import RequestError, match, request_from_json
from servoir.parser import parse_file
from servoir.validate import normalized, validate
from servoir.vocabulary import Vocabulary

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_IO)


def _parse_path(path: Path) -> list:
    """Parse one file, printing positioned diagnostics on failure."""
    source = _read_text(path)
    try:
        return parse_file(source)
    except ParseFailed as failure:
        for diagnostic in failure.diagnostics:
            click.echo(diagnostic.format(str(path)), err=True)
        sys.exit(EXIT_INVALID)


def _collect(paths: list[Path]) -> tuple[dict[str, Vocabulary], list[tuple[Path, ServiceDescription]]]:
    vocabularies: dict[str, Vocabulary] = {}
    services: list[tuple[Path, ServiceDescription]] = []
    parsed = [(path, _parse_path(path)) for path in paths]
    for path, items in parsed:
        for item in items:
            if isinstance(item, Vocabulary):
                vocabularies[item.id] = item
    for path, items in parsed:
        for item in items:
            if isinstance(item, ServiceDescription):
                services.append((path, item))
    return vocabularies, services


@click.group()
def main():
    """Author, inspect, and serve typed service descriptions."""


@main.command("validate")
@click.argument("paths", nargs=-1, required=True, type=click.Path(path_type=Path))
def cmd_validate(paths: tuple[Path, ...]):
    """Parse and type-check description files; exit 0 iff error-free."""
    vocabularies, services = _collect(list(paths))
    failed = False
    for path, service in services:
        vocab = vocabularies.get(service.vocabulary_id)
        if vocab is None:
            click.echo(
                f"{path}:1:1: error: unknown vocabulary "
                f"{service.vocabulary_id!r} (not declared in the given files)",
                err=True,
            )
            failed = True
            continue
        for diagnostic in validate(service, vocab):
            click.echo(diagnostic.format(str(path)), err=True)
            if diagnostic.severity == "error":
                failed = True
    if failed:
        sys.exit(EXIT_INVALID)
    click.echo(
        f"ok: {len(vocabularies)} vocabularies, {len(services)} services", err=True
    )


@main.command("export")
@click.argument("path", type=click.Path(path_type=Path))
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "cheatsheet"]),
    default="json",
    show_default=True,
)
@click.option(
    "--vocab",
    "vocab_path",
    type=click.Path(path_type=Path),
    default=None,
    help="File declaring the vocabulary, when not in PATH itself.",
)
def cmd_export(path: Path, fmt: str, vocab_path: Path | None):
    """Export canonical JSON of a service, or a vocabulary cheat sheet."""
    sources = [path] + ([vocab_path] if vocab_path else [])
    vocabularies, services = _collect(sources)

    if fmt == "cheatsheet":
        if len(vocabularies) != 1:
            click.echo(
                f"error: expected exactly one vocabulary, found {len(vocabularies)}",
                err=True,
            )
            sys.exit(EXIT_INVALID)
        (vocab,) = vocabularies.values()
        sys.stdout.write(export_cheatsheet(vocab))
        return

    if len(services) != 1:
        click.echo(
            f"error: expected exactly one service, found {len(services)}", err=True
        )
        sys.exit(EXIT_INVALID)
    (entry,) = services
    service_path, service = entry
    vocab = vocabularies.get(service.vocabulary_id)
    if vocab is None:
        click.echo(
            f"error: vocabulary {service.vocabulary_id!r} not found "
            "(declare it in PATH or pass --vocab)",
            err=True,
        )
        sys.exit(EXIT_INVALID)
    issues = validate(service, vocab)
    errors = [d for d in issues if d.severity == "error"]
    if errors:
        for diagnostic in errors:
            click.echo(diagnostic.format(str(service_path)), err=True)
        sys.exit(EXIT_INVALID)
    sys.stdout.buffer.write(export_canonical_json(normalized(service, vocab)))


@main.command("match")
@click.option(
    "--catalog",
    "catalog_dir",
    required=True,
    type=click.Path(path_type=Path),
    help="Directory of .sdl files (vocabularies and services).",
)
@click.option(
    "--request",
    "request_path",
    required=True,
    type=click.Path(path_type=Path),
    help="Match request JSON file.",
)
def cmd_match(catalog_dir: Path, request_path: Path):
    """Rank the catalog against a request; canonical JSON on stdout.

    Output is byte-identical to the repository's POST /match response for
    the same catalog and request.
    """
    if not catalog_dir.is_dir():
        click.echo(f"error: {catalog_dir} is not a directory", err=True)
        sys.exit(EXIT_IO)
    paths = sorted(catalog_dir.glob("*.sdl"))
    vocabularies, service_entries = _collect(paths)

    services = []
    for path, service in service_entries:
        vocab = vocabularies.get(service.vocabulary_id)
        if vocab is None:
            click.echo(
                f"{path}: error: unknown vocabulary {service.vocabulary_id!r}",
                err=True,
            )
            sys.exit(EXIT_INVALID)
        issues = [d for d in validate(service, vocab) if d.severity == "error"]
        if issues:
            for diagnostic in issues:
                click.echo(diagnostic.format(str(path)), err=True)
            sys.exit(EXIT_INVALID)
        services.append(normalized(service, vocab))

    raw = _read_text(request_path)
    try:
        request_obj = json.loads(raw, parse_float=Decimal)
        request = request_from_json(request_obj)
        result = match(services, vocabularies, request)
    except json.JSONDecodeError as exc:
        click.echo(f"error: request is not valid JSON: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except (RequestError, MixedCurrencyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    sys.stdout.buffer.write(canonical_json_bytes(result.to_json()))


@main.command("serve")
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    envvar="OSC_DATA_DIR",
    default=Path("data"),
    show_default=True,
    help="Persistent data directory (env: OSC_DATA_DIR).",
)
@click.option(
    "--allowlist",
    multiple=True,
    help="Hostname allowed for fetch rules (repeatable).",
)
@click.option("--workers", type=int, default=2, show_default=True)
@click.option("--cache/--no-cache", "cache_enabled", default=True, show_default=True)
@click.option(
    "--ui-dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Static UI bundle to serve under /ui.",
)
def cmd_serve(
    port: int,
    host: str,
    data_dir: Path,
    allowlist: tuple[str, ...],
    workers: int,
    cache_enabled: bool,
    ui_dir: Path | None,
):
    """Run the repository service until interrupted."""
    import uvicorn

    from servoir.api import ServerConfig, create_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"error: cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(EXIT_IO)
    finally:
        probe.close()

    try:
        data_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"error: cannot create data dir {data_dir}: {exc}", err=True)
        sys.exit(EXIT_IO)

    config = ServerConfig(
        data_dir=data_dir,
        allowlist=tuple(allowlist),
        workers=workers,
        cache_enabled=cache_enabled,
        ui_dir=ui_dir,
    )
    app = create_app(config)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit as exc:
        # uvicorn exits non-zero when it cannot start (bind races included)
        if exc.code:
            click.echo("error: server failed to start", err=True)
            sys.exit(EXIT_IO)
        raise


if __name__ == "__main__":
    main()
