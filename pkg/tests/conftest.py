from __future__ import annotations

import json
from decimal import Decimal
from pathlib import Path

import pytest

from servoir.parser import parse_file
from servoir.validate import normalized

FIXTURES = Path(__file__).parent / "fixtures"
CATALOG_DIR = FIXTURES / "catalog"


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_catalog():
    """(vocabularies by id, normalized services by id) from the fixture corpus."""
    vocabularies = {}
    services = {}
    for path in sorted(CATALOG_DIR.glob("*.sdl")):
        for item in parse_file(path.read_text(encoding="utf-8")):
            if hasattr(item, "feature_sets"):
                vocabularies[item.id] = item
            else:
                services[item.id] = item
    services = {
        sid: normalized(svc, vocabularies[svc.vocabulary_id])
        for sid, svc in services.items()
    }
    return vocabularies, services


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def vocab(catalog):
    return catalog[0]["cloud_storage"]


@pytest.fixture(scope="session")
def services(catalog):
    return catalog[1]


@pytest.fixture(scope="session")
def match_request_obj():
    return json.loads(read_fixture("request.json"), parse_float=Decimal)
