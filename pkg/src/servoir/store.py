"""Versioned persistence: append-only JSON documents on disk.

Layout:

    <root>/services/<id>/v<N>.json    one immutable record per version
    <root>/services/<id>/source.sdl   latest submitted source (convenience)
    <root>/services/<id>/tombstone    present while the service is deleted
    <root>/vocabularies/<id>.sdl      latest vocabulary source

Records are written atomically (temp file + rename); version sequences are
gapless and strictly increasing per service. The in-memory index is rebuilt
from the directory tree on startup. Every write bumps a generation counter
used for cache invalidation.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from servoir.parser import parse_vocabulary
from servoir.vocabulary import Vocabulary

_VERSION_FILE_RE = re.compile(r"^v(\d+)\.json$")
_ID_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class StorageError(Exception):
    pass


class UnknownServiceError(KeyError):
    pass


@dataclass(frozen=True)
class ServiceRecord:
    """One immutable evaluated version of a service."""

    service_id: str
    version: int
    source: str
    resolved_json: bytes
    content_hash: str
    fetch_snapshot: dict
    created_at: str

    def to_json(self) -> dict:
        return {
            "service_id": self.service_id,
            "version": self.version,
            "source": self.source,
            "resolved_json": self.resolved_json.decode("utf-8"),
            "content_hash": self.content_hash,
            "fetch_snapshot": self.fetch_snapshot,
            "created_at": self.created_at,
        }

    @staticmethod
    def from_json(doc: dict) -> "ServiceRecord":
        return ServiceRecord(
            service_id=doc["service_id"],
            version=doc["version"],
            source=doc["source"],
            resolved_json=doc["resolved_json"].encode("utf-8"),
            content_hash=doc["content_hash"],
            fetch_snapshot=doc.get("fetch_snapshot", {}),
            created_at=doc["created_at"],
        )


def check_id(identifier: str):
    if not _ID_RE.match(identifier):
        raise StorageError(
            f"invalid id {identifier!r} (expected [a-z][a-z0-9_]*)"
        )


def _atomic_write(path: Path, data: bytes):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class Store:
    """Thread-safe versioned store for services and vocabularies."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.RLock()
        self._service_locks: dict[str, threading.Lock] = {}
        self._versions: dict[str, list[int]] = {}
        self._tombstoned: set[str] = set()
        self._record_cache: dict[tuple[str, int], ServiceRecord] = {}
        self._vocabularies: dict[str, tuple[str, Vocabulary]] = {}
        self.generation = 0
        (self.root / "services").mkdir(parents=True, exist_ok=True)
        (self.root / "vocabularies").mkdir(parents=True, exist_ok=True)
        self._load()

    # -- startup -------------------------------------------------------------

    def _load(self):
        services_dir = self.root / "services"
        for entry in sorted(services_dir.iterdir()):
            if not entry.is_dir():
                continue
            versions = []
            for name in os.listdir(entry):
                match = _VERSION_FILE_RE.match(name)
                if match:
                    versions.append(int(match.group(1)))
            if versions:
                self._versions[entry.name] = sorted(versions)
            if (entry / "tombstone").exists():
                self._tombstoned.add(entry.name)
        for path in sorted((self.root / "vocabularies").glob("*.sdl")):
            source = path.read_text(encoding="utf-8")
            self._vocabularies[path.stem] = (source, parse_vocabulary(source))

    # -- service locks ---------------------------------------------------------

    def _service_lock(self, service_id: str) -> threading.Lock:
        with self._lock:
            lock = self._service_locks.get(service_id)
            if lock is None:
                lock = threading.Lock()
                self._service_locks[service_id] = lock
            return lock

    def _bump(self):
        with self._lock:
            self.generation += 1

    # -- services --------------------------------------------------------------

    def list_services(self, include_deleted: bool = False) -> list[str]:
        with self._lock:
            ids = sorted(self._versions)
            if include_deleted:
                return ids
            return [sid for sid in ids if sid not in self._tombstoned]

    def versions(self, service_id: str) -> list[int]:
        with self._lock:
            return list(self._versions.get(service_id, []))

    def latest_version(self, service_id: str) -> int | None:
        with self._lock:
            versions = self._versions.get(service_id)
            return versions[-1] if versions else None

    def is_deleted(self, service_id: str) -> bool:
        with self._lock:
            return service_id in self._tombstoned

    def exists(self, service_id: str) -> bool:
        with self._lock:
            return (
                service_id in self._versions
                and service_id not in self._tombstoned
            )

    def get(self, service_id: str, version: int) -> ServiceRecord:
        with self._lock:
            if version not in self._versions.get(service_id, []):
                raise UnknownServiceError(f"{service_id} v{version}")
            cached = self._record_cache.get((service_id, version))
            if cached is not None:
                return cached
        path = self.root / "services" / service_id / f"v{version}.json"
        record = ServiceRecord.from_json(json.loads(path.read_text(encoding="utf-8")))
        with self._lock:
            self._record_cache[(service_id, version)] = record
        return record

    def latest(self, service_id: str) -> ServiceRecord | None:
        version = self.latest_version(service_id)
        if version is None:
            return None
        return self.get(service_id, version)

    def persist_if_changed(
        self,
        service_id: str,
        source: str,
        resolved_json: bytes,
        content_hash: str,
        fetch_snapshot: dict,
    ) -> ServiceRecord | None:
        """Append version n+1 when the content hash changed; else no write.

        A successful write revives a tombstoned service.
        """
        check_id(service_id)
        with self._service_lock(service_id):
            latest = self.latest(service_id)
            service_dir = self.root / "services" / service_id
            service_dir.mkdir(parents=True, exist_ok=True)
            _atomic_write(service_dir / "source.sdl", source.encode("utf-8"))
            if latest is not None and latest.content_hash == content_hash:
                self._bump()  # source.sdl may have changed
                return None
            record = ServiceRecord(
                service_id=service_id,
                version=(latest.version if latest else 0) + 1,
                source=source,
                resolved_json=resolved_json,
                content_hash=content_hash,
                fetch_snapshot=fetch_snapshot,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            payload = json.dumps(record.to_json(), ensure_ascii=False, indent=2)
            _atomic_write(
                service_dir / f"v{record.version}.json", payload.encode("utf-8")
            )
            with self._lock:
                self._versions.setdefault(service_id, []).append(record.version)
                self._record_cache[(service_id, record.version)] = record
                self._tombstoned.discard(service_id)
            tombstone = service_dir / "tombstone"
            if tombstone.exists():
                tombstone.unlink()
            self._bump()
            return record

    def delete(self, service_id: str):
        """Soft delete: history is kept, the service leaves all listings."""
        with self._service_lock(service_id):
            with self._lock:
                if service_id not in self._versions or service_id in self._tombstoned:
                    raise UnknownServiceError(service_id)
            marker = self.root / "services" / service_id / "tombstone"
            marker.write_bytes(b"")
            with self._lock:
                self._tombstoned.add(service_id)
            self._bump()

    def restore(self, service_id: str):
        """Admin operation: undo a soft delete."""
        with self._service_lock(service_id):
            with self._lock:
                if service_id not in self._tombstoned:
                    raise UnknownServiceError(service_id)
            marker = self.root / "services" / service_id / "tombstone"
            if marker.exists():
                marker.unlink()
            with self._lock:
                self._tombstoned.discard(service_id)
            self._bump()

    # -- vocabularies ------------------------------------------------------------

    def put_vocabulary(self, vocabulary_id: str, source: str, vocab: Vocabulary):
        check_id(vocabulary_id)
        path = self.root / "vocabularies" / f"{vocabulary_id}.sdl"
        _atomic_write(path, source.encode("utf-8"))
        with self._lock:
            self._vocabularies[vocabulary_id] = (source, vocab)
        self._bump()

    def get_vocabulary(self, vocabulary_id: str) -> tuple[str, Vocabulary] | None:
        with self._lock:
            return self._vocabularies.get(vocabulary_id)

    def vocabularies(self) -> dict[str, Vocabulary]:
        with self._lock:
            return {vid: vocab for vid, (_, vocab) in self._vocabularies.items()}
