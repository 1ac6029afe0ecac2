"""Servoir: a self-hostable catalog of typed cloud service descriptions.

The package is organized around a small textual description language:

- :mod:`servoir.parser` / :mod:`servoir.printer` — lex, parse, and format
  vocabularies and service descriptions.
- :mod:`servoir.validate` — type-check descriptions against a vocabulary.
- :mod:`servoir.canonical` — deterministic canonical JSON export.
- :mod:`servoir.pricing` — price components and usage-based quotes.
- :mod:`servoir.variants` — expansion of dimensions into concrete variants.
- :mod:`servoir.matchmaker` — hard/soft constraint filtering and ranking.
- :mod:`servoir.evaluator` — async evaluation jobs, declarative fetchers,
  change-detected versioning.
- :mod:`servoir.store` / :mod:`servoir.repository` / :mod:`servoir.api` —
  versioned persistence, faceted search, and the HTTP/JSON surface.
"""

__version__ = "0.1.0"
