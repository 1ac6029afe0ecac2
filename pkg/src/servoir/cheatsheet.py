"""Markdown cheat sheet: a human-readable overview of a vocabulary."""

from __future__ import annotations

from servoir.vocabulary import IMPORTANCE_RANGE, Vocabulary

_IMPORTANCE_LABELS = {
    1: "indispensable",
    2: "very important",
    3: "important",
    4: "less important",
    5: "irrelevant",
}


def export_cheatsheet(vocab: Vocabulary) -> str:
    """One section per property (declaration order): name, type, docs,
    relevance, importance. Feature sets listed at the end when present."""
    lines = [f"# Vocabulary `{vocab.id}`", ""]
    for prop in vocab.properties:
        lines.append(f"## `{prop.name}`")
        lines.append("")
        lines.append(f"- **Type:** `{prop.type}`")
        label = _IMPORTANCE_LABELS.get(prop.importance, "")
        low, high = IMPORTANCE_RANGE
        lines.append(
            f"- **Importance:** {prop.importance} of {low}..{high}"
            + (f" ({label})" if label else "")
        )
        if prop.type.kind == "enum":
            lines.append(f"- **Members:** {', '.join(f'`{m}`' for m in prop.type.members)}")
        if prop.type.kind == "features":
            lines.append(f"- **Feature set:** `{prop.type.feature_set}`")
        lines.append("")
        lines.append(prop.doc)
        if prop.relevance:
            lines.append("")
            lines.append(f"*Why it matters:* {prop.relevance}")
        lines.append("")
    if vocab.feature_sets:
        lines.append("## Feature Sets")
        lines.append("")
        for name, members in vocab.feature_sets.items():
            lines.append(f"- `{name}`: {', '.join(f'`{m}`' for m in members)}")
        lines.append("")
    return "\n".join(lines)
