from __future__ import annotations

import re

from servoir.cheatsheet import export_cheatsheet
from servoir.parser import parse_vocabulary


def sections(markdown: str) -> list[str]:
    return re.findall(r"^## `(\w+)`$", markdown, flags=re.MULTILINE)


def test_one_section_per_property_in_order():
    vocab = parse_vocabulary(
        "vocabulary v {"
        ' property zeta : string { doc "z doc" }'
        ' property alpha : integer { doc "a doc" }'
        " }"
    )
    markdown = export_cheatsheet(vocab)
    assert sections(markdown) == ["zeta", "alpha"]
    assert "z doc" in markdown and "a doc" in markdown


def test_enum_members_listed():
    vocab = parse_vocabulary(
        'vocabulary v { property plan : enum(free, paid, team) { doc "d" } }'
    )
    markdown = export_cheatsheet(vocab)
    for member in ("free", "paid", "team"):
        assert f"`{member}`" in markdown


def test_no_feature_sets_section_when_none_declared():
    vocab = parse_vocabulary('vocabulary v { property p : string { doc "d" } }')
    assert "Feature Sets" not in export_cheatsheet(vocab)


def test_feature_sets_section_when_declared():
    vocab = parse_vocabulary(
        "vocabulary v {"
        " features fs { sync share }"
        ' property p : features(fs) { doc "d" }'
        " }"
    )
    markdown = export_cheatsheet(vocab)
    assert "## Feature Sets" in markdown
    assert "`sync`" in markdown


def test_relevance_and_importance_shown(vocab):
    markdown = export_cheatsheet(vocab)
    assert "Why it matters:" in markdown
    assert "**Importance:** 1 of 1..5 (indispensable)" in markdown
