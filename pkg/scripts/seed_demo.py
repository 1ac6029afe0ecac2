#!/usr/bin/env python3
"""Seed a data directory with the demo catalog and print how to serve it.

    python3 scripts/seed_demo.py [--data-dir data]

Evaluates the cloud-storage vocabulary and the three demo services into the
versioned store, then prints ready-to-run commands for the API server and a
few example requests.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

from servoir.evaluator import Evaluator
from servoir.parser import parse_file
from servoir.store import Store
from servoir.vocabulary import Vocabulary

CATALOG = ROOT / "tests" / "fixtures" / "catalog"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", type=Path, default=Path("data"))
    args = parser.parse_args()

    store = Store(args.data_dir)
    evaluator = Evaluator(store, fetcher=lambda url: b"", workers=2)
    evaluator.start()
    jobs = []
    try:
        parsed = []
        for path in sorted(CATALOG.glob("*.sdl")):
            source = path.read_text(encoding="utf-8")
            for item in parse_file(source):
                parsed.append((source, item))
        for source, item in parsed:
            if isinstance(item, Vocabulary):
                store.put_vocabulary(item.id, source, item)
                print(f"vocabulary {item.id}: stored")
        for source, item in parsed:
            if not isinstance(item, Vocabulary):
                jobs.append(evaluator.submit(item.id, source))
        evaluator.drain()
    finally:
        evaluator.stop()

    failed = False
    for job in jobs:
        if job.state != "succeeded":
            failed = True
            print(f"service {job.service_id}: FAILED")
            for diagnostic in job.errors:
                print(f"  {diagnostic.format()}")
        else:
            print(f"service {job.service_id}: version {job.result_version}")
    if failed:
        return 1

    print()
    print("Serve it:")
    print(f"  servoir serve --data-dir {args.data_dir} --port 8400")
    print()
    print("Try it:")
    print("  curl localhost:8400/services")
    print("  curl 'localhost:8400/services?filter=company_jurisdiction:de'")
    print("  curl localhost:8400/facets")
    print(
        "  curl -X POST localhost:8400/match -d @tests/fixtures/request.json"
    )
    print(
        "  curl -X POST localhost:8400/services/boxcloud/variants/free/de/quote"
        " -d '{\"horizon_months\":1,\"metrics\":{\"extra_storage\":150}}'"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
