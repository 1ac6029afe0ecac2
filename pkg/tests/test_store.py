from __future__ import annotations

import hashlib
import threading

import pytest

from servoir.parser import parse_vocabulary
from servoir.store import Store, StorageError, UnknownServiceError


def record_for(store: Store, sid: str, payload: bytes, source: str = "src"):
    digest = hashlib.sha256(payload).hexdigest()
    return store.persist_if_changed(sid, source, payload, digest, {})


def test_first_write_is_version_one(tmp_path):
    store = Store(tmp_path)
    record = record_for(store, "svc", b'{"a":1}')
    assert record is not None and record.version == 1
    assert store.versions("svc") == [1]


def test_same_hash_writes_nothing(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b'{"a":1}')
    assert record_for(store, "svc", b'{"a":1}') is None
    assert store.versions("svc") == [1]


def test_changed_hash_appends_gapless_versions(tmp_path):
    store = Store(tmp_path)
    for index in range(1, 6):
        record_for(store, "svc", b"%d" % index)
    assert store.versions("svc") == [1, 2, 3, 4, 5]


def test_records_are_immutable_across_reopen(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b'{"v":1}')
    record_for(store, "svc", b'{"v":2}')
    original = store.get("svc", 1).resolved_json

    reopened = Store(tmp_path)
    assert reopened.versions("svc") == [1, 2]
    assert reopened.get("svc", 1).resolved_json == original
    assert reopened.latest("svc").resolved_json == b'{"v":2}'


def test_unknown_version_raises(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b"1")
    with pytest.raises(UnknownServiceError):
        store.get("svc", 9)
    with pytest.raises(UnknownServiceError):
        store.get("ghost", 1)


def test_tombstone_cycle(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b"1")
    store.delete("svc")
    assert store.list_services() == []
    assert store.list_services(include_deleted=True) == ["svc"]
    assert store.is_deleted("svc")
    with pytest.raises(UnknownServiceError):
        store.delete("svc")

    # tombstone survives restart
    reopened = Store(tmp_path)
    assert reopened.is_deleted("svc")
    reopened.restore("svc")
    assert reopened.list_services() == ["svc"]
    # history was kept
    assert reopened.versions("svc") == [1]


def test_new_version_revives_tombstoned_service(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b"1")
    store.delete("svc")
    record = record_for(store, "svc", b"2")
    assert record.version == 2
    assert not store.is_deleted("svc")


def test_delete_unknown_service(tmp_path):
    store = Store(tmp_path)
    with pytest.raises(UnknownServiceError):
        store.delete("ghost")


def test_invalid_id_rejected(tmp_path):
    store = Store(tmp_path)
    with pytest.raises(StorageError):
        record_for(store, "Bad/Id", b"1")


def test_generation_bumps_on_every_write(tmp_path):
    store = Store(tmp_path)
    g0 = store.generation
    record_for(store, "svc", b"1")
    g1 = store.generation
    assert g1 > g0
    store.delete("svc")
    assert store.generation > g1


def test_no_partial_files_visible(tmp_path):
    store = Store(tmp_path)
    record_for(store, "svc", b"1")
    leftovers = list(tmp_path.rglob("*.tmp"))
    assert leftovers == []


def test_vocabulary_round_trip(tmp_path):
    store = Store(tmp_path)
    source = 'vocabulary v { property p : string { doc "d" } }'
    store.put_vocabulary("v", source, parse_vocabulary(source))
    reopened = Store(tmp_path)
    stored_source, vocab = reopened.get_vocabulary("v")
    assert stored_source == source
    assert vocab.properties[0].name == "p"
    assert reopened.vocabularies().keys() == {"v"}


def test_concurrent_appends_keep_sequence_gapless(tmp_path):
    store = Store(tmp_path)
    worker_count = 8

    def writer(index: int):
        record_for(store, "svc", b"payload-%d" % index)

    threads = [
        threading.Thread(target=writer, args=(i,)) for i in range(worker_count)
    ]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    versions = store.versions("svc")
    assert versions == list(range(1, len(versions) + 1))
    assert len(versions) >= 1
