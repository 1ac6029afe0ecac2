#!/usr/bin/env python3
"""Regenerate frozen golden files under tests/fixtures/golden/.

The match golden is the canonical response for the fixture request over the
fixture catalog (its ranking is asserted against a hand-computed oracle in
tests/test_api.py before being trusted here). The canonical-export golden
freezes the byte-exact JSON of the boxcloud fixture.

Run from the repository root:  python3 scripts/gen_goldens.py
"""

from __future__ import annotations

import json
import sys
from decimal import Decimal
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from servoir.canonical import canonical_json_bytes, export_canonical_json
from servoir.matchmaker import match, request_from_json

from conftest import load_catalog  # noqa: E402


def main():
    golden_dir = ROOT / "tests" / "fixtures" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)

    vocabularies, services = load_catalog()

    request_obj = json.loads(
        (ROOT / "tests" / "fixtures" / "request.json").read_text(encoding="utf-8"),
        parse_float=Decimal,
    )
    result = match(
        list(services.values()), vocabularies, request_from_json(request_obj)
    )
    (golden_dir / "match_response.json").write_bytes(
        canonical_json_bytes(result.to_json())
    )

    (golden_dir / "boxcloud.canonical.json").write_bytes(
        export_canonical_json(services["boxcloud"])
    )
    print(f"wrote goldens to {golden_dir}")


if __name__ == "__main__":
    main()
