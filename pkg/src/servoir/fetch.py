"""Declarative fetch rules for dynamic property values.

A fetch rule pulls one property value from an external URL on a schedule:
one HTTP GET per rule, an extractor (RFC 6901 JSON pointer, a regex with
exactly one capture group, or a CSS selector whose text content is taken),
and a target property type to parse the raw value as.

Fetching is guarded: requests only go to allowlisted hosts, with a timeout
and a response size cap. There is no arbitrary code execution.
"""

from __future__ import annotations

import json
import re
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from html.parser import HTMLParser

from servoir.values import Money, Quantity, Value, is_currency, is_unit
from servoir.vocabulary import PropertyType

EXTRACTOR_KINDS = ("json_pointer", "regex", "css")

MIN_INTERVAL_S = 60

DEFAULT_TIMEOUT_S = 10.0
DEFAULT_MAX_BYTES = 1024 * 1024


class FetchError(Exception):
    """A single fetch rule failed; other rules are unaffected."""


class AllowlistError(FetchError):
    """The rule's host is not allowlisted; no request was sent."""


@dataclass(frozen=True)
class FetchRule:
    target_property: str
    url: str
    extractor: str
    expr: str
    parse_as: PropertyType
    interval_s: int
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)

    def __post_init__(self):
        if self.extractor not in EXTRACTOR_KINDS:
            raise ValueError(f"unknown extractor {self.extractor!r}")
        if not re.match(r"^https?://", self.url):
            raise ValueError("fetch URLs must be absolute http(s) URLs")
        if self.interval_s < MIN_INTERVAL_S:
            raise ValueError(f"fetch interval must be >= {MIN_INTERVAL_S} s")
        if self.extractor == "regex":
            pattern = re.compile(self.expr)
            if pattern.groups != 1:
                raise ValueError("fetch regex must have exactly one capture group")


@dataclass(frozen=True)
class FetchedValue:
    raw: str
    value: Value
    fetched_at: str  # ISO-8601 UTC


class HttpFetcher:
    """Fetch capability with allowlist, timeout, and size cap.

    The allowlist holds hostnames; a rule host matches an entry exactly or
    as a subdomain of it. The check runs before any request is sent.
    """

    def __init__(
        self,
        allowlist: list[str] | tuple[str, ...] = (),
        timeout_s: float = DEFAULT_TIMEOUT_S,
        max_bytes: int = DEFAULT_MAX_BYTES,
    ):
        self.allowlist = tuple(h.lower() for h in allowlist)
        self.timeout_s = timeout_s
        self.max_bytes = max_bytes

    def _host_allowed(self, host: str) -> bool:
        host = host.lower()
        return any(
            host == entry or host.endswith("." + entry) for entry in self.allowlist
        )

    def __call__(self, url: str) -> bytes:
        host = urllib.parse.urlsplit(url).hostname or ""
        if not self._host_allowed(host):
            raise AllowlistError(f"host {host!r} is not allowlisted")
        try:
            with urllib.request.urlopen(url, timeout=self.timeout_s) as response:
                body = response.read(self.max_bytes + 1)
        except (urllib.error.URLError, OSError) as exc:
            raise FetchError(f"request failed: {exc}") from exc
        if len(body) > self.max_bytes:
            raise FetchError(f"response exceeds {self.max_bytes} bytes")
        return body


# ---------------------------------------------------------------------------
# Extractors
# ---------------------------------------------------------------------------

def resolve_json_pointer(document, pointer: str):
    """RFC 6901 evaluation; raises FetchError when the path does not resolve."""
    if pointer == "":
        return document
    if not pointer.startswith("/"):
        raise FetchError(f"invalid JSON pointer {pointer!r}")
    node = document
    for token in pointer.split("/")[1:]:
        token = token.replace("~1", "/").replace("~0", "~")
        if isinstance(node, dict):
            if token not in node:
                raise FetchError(f"JSON pointer member {token!r} not found")
            node = node[token]
        elif isinstance(node, list):
            try:
                index = int(token)
            except ValueError:
                raise FetchError(f"JSON pointer index {token!r} is not a number")
            if not 0 <= index < len(node):
                raise FetchError(f"JSON pointer index {index} out of range")
            node = node[index]
        else:
            raise FetchError(f"JSON pointer descends into a scalar at {token!r}")
    return node


class _HtmlNode:
    __slots__ = ("tag", "attrs", "children", "parent", "text_parts")

    def __init__(self, tag: str, attrs: dict, parent):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_HtmlNode] = []
        self.parent = parent
        self.text_parts: list[str] = []

    def text(self) -> str:
        parts = list(self.text_parts)
        for child in self.children:
            parts.append(child.text())
        return "".join(parts)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


_VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _HtmlNode("#document", {}, None)
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = _HtmlNode(tag, dict(attrs), self.stack[-1])
        self.stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        node = _HtmlNode(tag, dict(attrs), self.stack[-1])
        self.stack[-1].children.append(node)

    def handle_endtag(self, tag):
        for index in range(len(self.stack) - 1, 0, -1):
            if self.stack[index].tag == tag:
                del self.stack[index:]
                break

    def handle_data(self, data):
        self.stack[-1].text_parts.append(data)


_SIMPLE_RE = re.compile(
    r"(?P<tag>[a-zA-Z][a-zA-Z0-9-]*|\*)?"
    r"(?P<rest>(?:[#.][\w-]+|\[[\w-]+(?:=\"[^\"]*\"|='[^']*'|=[^\]]*)?\])*)"
)
_PART_RE = re.compile(r"[#.][\w-]+|\[[\w-]+(?:=\"[^\"]*\"|='[^']*'|=[^\]]*)?\]")


def _parse_compound(selector: str):
    match = _SIMPLE_RE.fullmatch(selector)
    if not match or (not match.group("tag") and not match.group("rest")):
        raise FetchError(f"unsupported CSS selector part {selector!r}")
    tag = match.group("tag")
    conditions = []
    for part in _PART_RE.findall(match.group("rest") or ""):
        if part.startswith("#"):
            conditions.append(("id", part[1:]))
        elif part.startswith("."):
            conditions.append(("class", part[1:]))
        else:
            inner = part[1:-1]
            if "=" in inner:
                name, _, value = inner.partition("=")
                conditions.append(("attr", (name, value.strip("\"'"))))
            else:
                conditions.append(("attr", (inner, None)))
    return tag, conditions


def _matches_compound(node: _HtmlNode, compound) -> bool:
    tag, conditions = compound
    if tag and tag != "*" and node.tag != tag.lower():
        return False
    for kind, arg in conditions:
        if kind == "id":
            if node.attrs.get("id") != arg:
                return False
        elif kind == "class":
            if arg not in (node.attrs.get("class") or "").split():
                return False
        else:
            name, value = arg
            if name not in node.attrs:
                return False
            if value is not None and node.attrs.get(name) != value:
                return False
    return True


def select_css(html: str, selector: str) -> str:
    """Text content of the first node matching a simple CSS selector.

    Supported: tag names, ``#id``, ``.class``, ``[attr]``/``[attr=value]``,
    combined compounds, descendant (space) and child (``>``) combinators.
    """
    tokens = [t for t in re.split(r"(\s*>\s*|\s+)", selector.strip()) if t.strip() or ">" in t]
    parts = []  # (combinator to the left, compound)
    combinator = " "
    for token in tokens:
        if ">" in token and not token.strip(" >"):
            combinator = ">"
            continue
        if not token.strip():
            combinator = " "
            continue
        parts.append((combinator, _parse_compound(token.strip())))
        combinator = " "
    if not parts:
        raise FetchError("empty CSS selector")

    builder = _TreeBuilder()
    builder.feed(html)

    def matches_at(node: _HtmlNode, index: int) -> bool:
        _, compound = parts[index]
        if not _matches_compound(node, compound):
            return False
        if index == 0:
            return True
        combinator = parts[index][0]
        ancestor = node.parent
        if combinator == ">":
            return ancestor is not None and matches_at(ancestor, index - 1)
        while ancestor is not None and ancestor.tag != "#document":
            if matches_at(ancestor, index - 1):
                return True
            ancestor = ancestor.parent
        return False

    for node in builder.root.walk():
        if node.tag == "#document":
            continue
        if matches_at(node, len(parts) - 1):
            return node.text().strip()
    raise FetchError(f"no element matches CSS selector {selector!r}")


def extract(rule: FetchRule, body: bytes):
    """Apply the rule's extractor to a response body; returns the raw value."""
    text = body.decode("utf-8", errors="replace")
    if rule.extractor == "json_pointer":
        try:
            document = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise FetchError(f"response is not JSON: {exc}") from exc
        return resolve_json_pointer(document, rule.expr)
    if rule.extractor == "regex":
        match = re.search(rule.expr, text)
        if match is None:
            raise FetchError(f"no match for regex {rule.expr!r}")
        return match.group(1)
    return select_css(text, rule.expr)


# ---------------------------------------------------------------------------
# Raw-value parsing per declared property type
# ---------------------------------------------------------------------------

def parse_raw_value(raw, ptype: PropertyType) -> Value:
    """Coerce an extracted raw value into a typed value, or raise FetchError."""
    kind = ptype.kind
    try:
        if kind in ("string", "text", "url"):
            return raw if isinstance(raw, str) else json.dumps(raw)
        if kind == "boolean":
            if isinstance(raw, bool):
                return raw
            lowered = str(raw).strip().lower()
            if lowered in ("true", "yes", "1"):
                return True
            if lowered in ("false", "no", "0"):
                return False
            raise FetchError(f"cannot parse {raw!r} as boolean")
        if kind == "integer":
            if isinstance(raw, bool):
                raise FetchError("boolean is not an integer")
            if isinstance(raw, int):
                return raw
            return int(str(raw).strip())
        if kind == "decimal":
            if isinstance(raw, bool):
                raise FetchError("boolean is not a decimal")
            if isinstance(raw, (int, Decimal)):
                return Decimal(raw)
            return Decimal(str(raw).strip())
        if kind == "money":
            return _parse_money(raw)
        if kind == "quantity":
            return _parse_quantity(raw, ptype.unit or "GB")
        if kind == "enum":
            member = str(raw).strip()
            if member not in ptype.members:
                raise FetchError(f"{member!r} is not a member of {ptype}")
            return member
        if kind == "features":
            if isinstance(raw, list):
                return frozenset(str(item) for item in raw)
            return frozenset(part for part in re.split(r"[,\s]+", str(raw)) if part)
    except (ValueError, InvalidOperation) as exc:
        raise FetchError(f"cannot parse {raw!r} as {ptype}: {exc}") from exc
    raise FetchError(f"unsupported fetch target type {ptype}")


def _parse_money(raw) -> Money:
    if isinstance(raw, dict) and "amount" in raw and "currency" in raw:
        return Money(Decimal(str(raw["amount"])), str(raw["currency"]))
    parts = str(raw).strip().split()
    if len(parts) == 2 and is_currency(parts[1]):
        return Money(Decimal(parts[0]), parts[1])
    raise FetchError(f"cannot parse {raw!r} as money (expected '<amount> <CUR>')")


def _parse_quantity(raw, default_unit: str) -> Quantity:
    if isinstance(raw, dict) and "magnitude" in raw and "unit" in raw:
        return Quantity(Decimal(str(raw["magnitude"])), str(raw["unit"]))
    if isinstance(raw, (int, Decimal)) and not isinstance(raw, bool):
        return Quantity(Decimal(raw), default_unit)
    parts = str(raw).strip().split()
    if len(parts) == 1:
        return Quantity(Decimal(parts[0]), default_unit)
    if len(parts) == 2 and is_unit(parts[1]):
        return Quantity(Decimal(parts[0]), parts[1])
    raise FetchError(f"cannot parse {raw!r} as quantity")


def _raw_repr(raw) -> str:
    if isinstance(raw, str):
        return raw
    return json.dumps(raw, default=str)


def run_fetchers(
    rules: tuple[FetchRule, ...] | list[FetchRule],
    fetcher,
    now=None,
) -> tuple[dict[str, FetchedValue], list[str]]:
    """Run every rule once; one GET per rule.

    Returns (snapshot keyed by target property, per-rule error messages).
    A failing rule contributes an error and leaves other rules unaffected.
    """
    snapshot: dict[str, FetchedValue] = {}
    errors: list[str] = []
    for rule in rules:
        try:
            body = fetcher(rule.url)
            raw = extract(rule, body)
            value = parse_raw_value(raw, rule.parse_as)
        except FetchError as exc:
            errors.append(f"fetch {rule.target_property} from {rule.url}: {exc}")
            continue
        fetched_at = (now() if now else datetime.now(timezone.utc)).isoformat()
        snapshot[rule.target_property] = FetchedValue(
            raw=_raw_repr(raw), value=value, fetched_at=fetched_at
        )
    return snapshot, errors
