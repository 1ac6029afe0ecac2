"""Recursive-descent parser for vocabularies and service descriptions.

Grammar (authoritative):

    file        := (vocabulary | service)*
    vocabulary  := "vocabulary" ident "{" (featureset | propdecl)* "}"
    featureset  := "features" ident "{" ident+ "}"
    propdecl    := "property" ident ":" type "{" meta* "}"
    type        := "string"|"text"|"boolean"|"integer"|"decimal"|"money"|"url"
                 | "quantity" "<" unit ">" | "enum" "(" ident ("," ident)* ")"
                 | "features" "(" ident ")"
    meta        := "doc" string | "relevance" string | "importance" int
    service     := "service" ident "uses" ident "{" stmt* "}"
    stmt        := set | dimension | exclude | price | fetch
    set         := "set" ident value
    dimension   := "dimension" ident "{" option+ "}"
    option      := "option" ident "{" (set | price)* "}"
    exclude     := "exclude" "{" (ident "=" ident)+ "}"
    value       := string | int | decimal | bool | url | money | quantity
                 | ident | "[" ident ("," ident)* "]"
    money       := decimal ident          # e.g. 9.99 EUR
    quantity    := decimal unit           # e.g. 5 GB
    price       := "price" "fixed" money "per" period
                 | "price" "one_time" money
                 | "price" "per_unit" ident money "per" period
                   ["included" decimal]
                   ["tiers" ("graduated"|"volume") "{" ("upto" (decimal|"inf") money)+ "}"]
    period      := "hour" | "month" | "year"
    fetch       := "fetch" ident "from" string
                   "extract" ("json_pointer"|"regex"|"css") string
                   "as" type "every" int ("s"|"m"|"h")

Identifiers are ``[a-z][a-z0-9_]*``. Statement-level syntax errors recover
to the next statement so several diagnostics can be reported per run.
"""

from __future__ import annotations

import re
from decimal import Decimal

from servoir.document import (
    Dimension,
    Exclusion,
    OptionDef,
    ServiceDescription,
)
from servoir.errors import Diagnostic, ParseFailed
from servoir.fetch import EXTRACTOR_KINDS, FetchRule
from servoir.lexer import Token, TokenKind, tokenize
from servoir.pricing import PERIODS, TIER_MODES, Money, PriceComponent, TierSchedule
from servoir.values import Quantity, Value, is_currency, is_unit
from servoir.vocabulary import (
    IMPORTANCE_RANGE,
    SCALAR_KINDS,
    PropertyDef,
    PropertyType,
    Vocabulary,
)

_IDENT_RE = re.compile(r"^[a-z][a-z0-9_]*$")

_STMT_KEYWORDS = frozenset({"set", "dimension", "exclude", "price", "fetch", "option"})
_TOP_KEYWORDS = frozenset({"vocabulary", "service"})

_INTERVAL_FACTORS = {"s": 1, "m": 60, "h": 3600}


class _Abort(Exception):
    """Internal: statement-level syntax error; recovery resumes parsing."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(diagnostic.message)


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ------------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token:
        index = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[index]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != TokenKind.EOF:
            self.pos += 1
        return token

    def _error(self, token: Token, message: str) -> _Abort:
        return _Abort(Diagnostic(token.line, token.column, message))

    def _report(self, token: Token, message: str, severity: str = "error"):
        self.diagnostics.append(
            Diagnostic(token.line, token.column, message, severity)
        )

    def _expect_word(self, word: str) -> Token:
        token = self._peek()
        if token.kind != TokenKind.WORD or token.value != word:
            raise self._error(token, f"expected '{word}', got {token.describe()}")
        return self._advance()

    def _expect_ident(self, what: str = "identifier") -> Token:
        token = self._peek()
        if token.kind != TokenKind.WORD:
            raise self._error(token, f"expected {what}, got {token.describe()}")
        if not _IDENT_RE.match(token.value):
            raise self._error(
                token,
                f"invalid {what} {token.value!r} (expected [a-z][a-z0-9_]*)",
            )
        return self._advance()

    def _expect_punct(self, ch: str) -> Token:
        token = self._peek()
        if token.kind != TokenKind.PUNCT or token.value != ch:
            raise self._error(token, f"expected '{ch}', got {token.describe()}")
        return self._advance()

    def _expect_string(self, what: str) -> Token:
        token = self._peek()
        if token.kind != TokenKind.STRING:
            raise self._error(token, f"expected {what} string, got {token.describe()}")
        return self._advance()

    def _expect_number(self, what: str = "number") -> Token:
        token = self._peek()
        if token.kind != TokenKind.NUMBER:
            raise self._error(token, f"expected {what}, got {token.describe()}")
        return self._advance()

    def _at_punct(self, ch: str) -> bool:
        token = self._peek()
        return token.kind == TokenKind.PUNCT and token.value == ch

    def _at_word(self, *words: str) -> bool:
        token = self._peek()
        return token.kind == TokenKind.WORD and token.value in words

    def _sync(self, keywords: frozenset):
        """Skip tokens until a statement keyword or '}' at the current depth."""
        depth = 0
        while True:
            token = self._peek()
            if token.kind == TokenKind.EOF:
                return
            if token.kind == TokenKind.PUNCT and token.value == "{":
                depth += 1
            elif token.kind == TokenKind.PUNCT and token.value == "}":
                if depth == 0:
                    return
                depth -= 1
            elif depth == 0 and token.kind == TokenKind.WORD and token.value in keywords:
                return
            self._advance()

    # -- entry points --------------------------------------------------------

    def parse_file(self) -> list:
        items = []
        seen_ids: set[tuple[type, str]] = set()
        while self._peek().kind != TokenKind.EOF:
            token = self._peek()
            before = self.pos
            try:
                if self._at_word("vocabulary"):
                    item = self._parse_vocabulary()
                elif self._at_word("service"):
                    item = self._parse_service()
                else:
                    raise self._error(
                        token,
                        f"expected 'vocabulary' or 'service', got {token.describe()}",
                    )
            except _Abort as abort:
                self.diagnostics.append(abort.diagnostic)
                if self.pos == before:
                    self._advance()
                self._sync(_TOP_KEYWORDS)
                continue
            if (type(item), item.id) in seen_ids:
                self._report(token, f"duplicate document id {item.id!r}")
            seen_ids.add((type(item), item.id))
            items.append(item)
        return items

    # -- vocabulary ----------------------------------------------------------

    def _parse_vocabulary(self) -> Vocabulary:
        self._expect_word("vocabulary")
        name = self._expect_ident("vocabulary name")
        self._expect_punct("{")

        properties: list[PropertyDef] = []
        feature_sets: dict[str, tuple[str, ...]] = {}
        while not self._at_punct("}"):
            token = self._peek()
            before = self.pos
            try:
                if self._at_word("features"):
                    self._parse_featureset(feature_sets)
                elif self._at_word("property"):
                    self._parse_propdecl(properties)
                else:
                    raise self._error(
                        token,
                        f"expected 'property' or 'features', got {token.describe()}",
                    )
            except _Abort as abort:
                self.diagnostics.append(abort.diagnostic)
                if self.pos == before:
                    self._advance()
                self._sync(frozenset({"property", "features"}))
                if self._peek().kind == TokenKind.EOF:
                    break
        if self._at_punct("}"):
            self._advance()
        else:
            raise self._error(self._peek(), "expected '}' to close vocabulary")

        # features(S) may reference a set declared later in the body
        for prop in properties:
            if prop.type.kind == "features" and prop.type.feature_set not in feature_sets:
                self._report(
                    Token(TokenKind.WORD, "", prop.pos[0], prop.pos[1]),
                    f"property {prop.name!r} references unknown feature set "
                    f"{prop.type.feature_set!r}",
                )
        return Vocabulary(
            id=name.value, properties=tuple(properties), feature_sets=feature_sets
        )

    def _parse_featureset(self, feature_sets: dict):
        self._expect_word("features")
        name = self._expect_ident("feature set name")
        self._expect_punct("{")
        members: list[str] = []
        while not self._at_punct("}"):
            member = self._expect_ident("feature identifier")
            if member.value in members:
                self._report(
                    member,
                    f"duplicate feature {member.value!r} in set {name.value!r}",
                )
            else:
                members.append(member.value)
        self._expect_punct("}")
        if not members:
            self._report(name, f"feature set {name.value!r} declares no features")
        if name.value in feature_sets:
            self._report(name, f"duplicate feature set {name.value!r}")
        feature_sets[name.value] = tuple(members)

    def _parse_propdecl(self, properties: list[PropertyDef]):
        self._expect_word("property")
        name = self._expect_ident("property name")
        self._expect_punct(":")
        ptype = self._parse_type()
        self._expect_punct("{")
        doc = ""
        relevance = ""
        importance = 3
        while not self._at_punct("}"):
            token = self._peek()
            if self._at_word("doc"):
                self._advance()
                doc = self._expect_string("doc").value
            elif self._at_word("relevance"):
                self._advance()
                relevance = self._expect_string("relevance").value
            elif self._at_word("importance"):
                self._advance()
                number = self._expect_number("importance rating")
                if "." in number.value:
                    self._report(number, "importance must be an integer")
                else:
                    importance = int(number.value)
                    low, high = IMPORTANCE_RANGE
                    if not low <= importance <= high:
                        self._report(number, f"importance must be {low}..{high}")
                        importance = min(max(importance, low), high)
            else:
                raise self._error(
                    token,
                    "expected 'doc', 'relevance', or 'importance', got "
                    + token.describe(),
                )
        self._expect_punct("}")
        if not doc:
            self._report(name, f"property {name.value!r} has no doc text")
        if any(existing.name == name.value for existing in properties):
            self._report(name, f"duplicate property {name.value!r}")
            return
        properties.append(
            PropertyDef(
                name=name.value,
                type=ptype,
                doc=doc,
                relevance=relevance,
                importance=importance,
                pos=(name.line, name.column),
            )
        )

    def _parse_type(self) -> PropertyType:
        token = self._peek()
        if token.kind != TokenKind.WORD:
            raise self._error(token, f"expected a type, got {token.describe()}")
        if token.value in SCALAR_KINDS:
            self._advance()
            return PropertyType(kind=token.value)
        if token.value == "quantity":
            self._advance()
            self._expect_punct("<")
            unit = self._peek()
            if unit.kind != TokenKind.WORD or not is_unit(unit.value):
                raise self._error(
                    unit, f"unknown unit {unit.value!r}" if unit.kind == TokenKind.WORD
                    else f"expected a unit, got {unit.describe()}"
                )
            self._advance()
            self._expect_punct(">")
            return PropertyType(kind="quantity", unit=unit.value)
        if token.value == "enum":
            self._advance()
            self._expect_punct("(")
            members = [self._expect_ident("enum member").value]
            while self._at_punct(","):
                self._advance()
                member = self._expect_ident("enum member")
                if member.value in members:
                    self._report(member, f"duplicate enum member {member.value!r}")
                else:
                    members.append(member.value)
            self._expect_punct(")")
            return PropertyType(kind="enum", members=tuple(members))
        if token.value == "features":
            self._advance()
            self._expect_punct("(")
            set_name = self._expect_ident("feature set name")
            self._expect_punct(")")
            return PropertyType(kind="features", feature_set=set_name.value)
        raise self._error(token, f"unknown type {token.value!r}")

    # -- service -------------------------------------------------------------

    def _parse_service(self) -> ServiceDescription:
        self._expect_word("service")
        name = self._expect_ident("service name")
        self._expect_word("uses")
        vocab = self._expect_ident("vocabulary name")
        self._expect_punct("{")

        base: dict[str, Value] = {}
        positions: dict[str, tuple[int, int]] = {}
        dimensions: list[Dimension] = []
        exclusions: list[Exclusion] = []
        prices: list[PriceComponent] = []
        fetches: list[FetchRule] = []

        while not self._at_punct("}"):
            token = self._peek()
            before = self.pos
            try:
                if self._at_word("set"):
                    self._parse_set(base, positions, "service body")
                elif self._at_word("dimension"):
                    self._parse_dimension(dimensions)
                elif self._at_word("exclude"):
                    self._parse_exclude(exclusions)
                elif self._at_word("price"):
                    component = self._parse_price()
                    if component is not None:
                        prices.append(component)
                elif self._at_word("fetch"):
                    rule = self._parse_fetch(fetches)
                    if rule is not None:
                        fetches.append(rule)
                else:
                    raise self._error(
                        token,
                        "expected 'set', 'dimension', 'exclude', 'price', or "
                        f"'fetch', got {token.describe()}",
                    )
            except _Abort as abort:
                self.diagnostics.append(abort.diagnostic)
                if self.pos == before:
                    self._advance()
                self._sync(_STMT_KEYWORDS)
                if self._peek().kind == TokenKind.EOF:
                    break
        if self._at_punct("}"):
            self._advance()
        else:
            raise self._error(self._peek(), "expected '}' to close service")

        return ServiceDescription(
            id=name.value,
            vocabulary_id=vocab.value,
            base_properties=base,
            dimensions=tuple(dimensions),
            exclusions=tuple(exclusions),
            price_components=tuple(prices),
            fetch_rules=tuple(fetches),
            positions=positions,
        )

    def _parse_set(self, target: dict, positions: dict, scope: str):
        self._expect_word("set")
        prop = self._expect_ident("property name")
        value = self._parse_value()
        if prop.value in target:
            self._report(
                prop, f"duplicate assignment of {prop.value!r} in {scope}"
            )
            return
        target[prop.value] = value
        positions[prop.value] = (prop.line, prop.column)

    def _parse_value(self) -> Value:
        token = self._peek()
        if token.kind == TokenKind.STRING:
            self._advance()
            return token.value
        if token.kind == TokenKind.URL:
            self._advance()
            return token.value
        if token.kind == TokenKind.NUMBER:
            self._advance()
            return self._number_value(token)
        if token.kind == TokenKind.PUNCT and token.value == "[":
            self._advance()
            features: list[str] = []
            member = self._expect_ident("feature identifier")
            features.append(member.value)
            while self._at_punct(","):
                self._advance()
                member = self._expect_ident("feature identifier")
                if member.value in features:
                    self._report(
                        member,
                        f"duplicate feature {member.value!r} in list",
                        severity="warning",
                    )
                features.append(member.value)
            self._expect_punct("]")
            return frozenset(features)
        if token.kind == TokenKind.WORD:
            if token.value in ("true", "false"):
                self._advance()
                return token.value == "true"
            ident = self._expect_ident("value")
            return ident.value
        raise self._error(token, f"expected a value, got {token.describe()}")

    def _number_value(self, number: Token) -> Value:
        """A bare number, or a money/quantity literal if a unit follows."""
        follower = self._peek()
        if follower.kind == TokenKind.WORD:
            word = follower.value
            if is_unit(word):
                self._advance()
                return Quantity(Decimal(number.value), word)
            if is_currency(word):
                self._advance()
                try:
                    return Money(Decimal(number.value), word)
                except ValueError as exc:
                    raise self._error(number, str(exc))
            if word not in _STMT_KEYWORDS:
                raise self._error(follower, f"unknown unit or currency {word!r}")
        if "." in number.value:
            return Decimal(number.value)
        return int(number.value)

    def _parse_dimension(self, dimensions: list[Dimension]):
        self._expect_word("dimension")
        name = self._expect_ident("dimension name")
        if any(dim.name == name.value for dim in dimensions):
            self._report(name, f"duplicate dimension {name.value!r}")
        self._expect_punct("{")
        options: list[OptionDef] = []
        while not self._at_punct("}"):
            self._parse_option(options, name.value)
        self._expect_punct("}")
        if not options:
            self._report(name, f"dimension {name.value!r} declares no options")
        if not any(dim.name == name.value for dim in dimensions):
            dimensions.append(
                Dimension(
                    name=name.value,
                    options=tuple(options),
                    pos=(name.line, name.column),
                )
            )

    def _parse_option(self, options: list[OptionDef], dimension_name: str):
        self._expect_word("option")
        option_id = self._expect_ident("option id")
        self._expect_punct("{")
        overrides: dict[str, Value] = {}
        positions: dict[str, tuple[int, int]] = {}
        prices: list[PriceComponent] = []
        while not self._at_punct("}"):
            token = self._peek()
            if self._at_word("set"):
                self._parse_set(overrides, positions, f"option {option_id.value!r}")
            elif self._at_word("price"):
                component = self._parse_price()
                if component is not None:
                    prices.append(component)
            else:
                raise self._error(
                    token,
                    f"expected 'set' or 'price' in option, got {token.describe()}",
                )
        self._expect_punct("}")
        if any(existing.id == option_id.value for existing in options):
            self._report(
                option_id,
                f"duplicate option {option_id.value!r} in dimension "
                f"{dimension_name!r}",
            )
            return
        options.append(
            OptionDef(
                id=option_id.value,
                overrides=overrides,
                prices=tuple(prices),
                positions=positions,
            )
        )

    def _parse_exclude(self, exclusions: list[Exclusion]):
        at = self._expect_word("exclude")
        self._expect_punct("{")
        bindings: list[tuple[str, str]] = []
        while not self._at_punct("}"):
            dim = self._expect_ident("dimension name")
            self._expect_punct("=")
            option = self._expect_ident("option id")
            if any(existing == dim.value for existing, _ in bindings):
                self._report(
                    dim, f"dimension {dim.value!r} bound twice in one exclusion"
                )
            bindings.append((dim.value, option.value))
        self._expect_punct("}")
        if not bindings:
            self._report(at, "exclusion binds no dimensions")
            return
        exclusions.append(
            Exclusion(bindings=tuple(bindings), pos=(at.line, at.column))
        )

    # -- price ---------------------------------------------------------------

    def _parse_money(self) -> Money:
        number = self._expect_number("amount")
        currency = self._peek()
        if currency.kind != TokenKind.WORD or not is_currency(currency.value):
            raise self._error(
                currency,
                f"expected a currency code (e.g. EUR), got {currency.describe()}",
            )
        self._advance()
        try:
            return Money(Decimal(number.value), currency.value)
        except ValueError as exc:
            raise self._error(number, str(exc))

    def _parse_period(self) -> str:
        token = self._peek()
        if token.kind != TokenKind.WORD or token.value not in PERIODS:
            raise self._error(
                token, f"expected 'hour', 'month', or 'year', got {token.describe()}"
            )
        self._advance()
        return token.value

    def _parse_price(self) -> PriceComponent | None:
        at = self._expect_word("price")
        kind = self._peek()
        if self._at_word("fixed"):
            self._advance()
            amount = self._parse_money()
            self._expect_word("per")
            period = self._parse_period()
            return PriceComponent(
                kind="fixed", amount=amount, period=period, pos=(at.line, at.column)
            )
        if self._at_word("one_time"):
            self._advance()
            amount = self._parse_money()
            return PriceComponent(
                kind="one_time", amount=amount, pos=(at.line, at.column)
            )
        if self._at_word("per_unit"):
            self._advance()
            metric = self._expect_ident("metric name")
            unit_price = self._parse_money()
            self._expect_word("per")
            period = self._parse_period()
            included = Decimal(0)
            if self._at_word("included"):
                self._advance()
                included = Decimal(self._expect_number("included quantity").value)
            tiers = None
            if self._at_word("tiers"):
                tiers = self._parse_tiers(unit_price)
            try:
                return PriceComponent(
                    kind="per_unit",
                    amount=unit_price,
                    period=period,
                    metric=metric.value,
                    included=included,
                    tiers=tiers,
                    pos=(at.line, at.column),
                )
            except ValueError as exc:
                self._report(at, str(exc))
                return None
        raise self._error(
            kind,
            f"expected 'fixed', 'one_time', or 'per_unit', got {kind.describe()}",
        )

    def _parse_tiers(self, unit_price: Money) -> TierSchedule | None:
        at = self._expect_word("tiers")
        mode = self._peek()
        if mode.kind != TokenKind.WORD or mode.value not in TIER_MODES:
            raise self._error(
                mode, f"expected 'graduated' or 'volume', got {mode.describe()}"
            )
        self._advance()
        self._expect_punct("{")
        bands: list[tuple[Decimal | None, Money]] = []
        while not self._at_punct("}"):
            self._expect_word("upto")
            bound_token = self._peek()
            if self._at_word("inf"):
                self._advance()
                bound = None
            else:
                bound = Decimal(self._expect_number("tier bound").value)
            price = self._parse_money()
            bands.append((bound, price))
            if price.currency != unit_price.currency:
                self._report(bound_token, "tier band currency differs from unit price")
        self._expect_punct("}")
        try:
            return TierSchedule(mode=mode.value, bands=tuple(bands))
        except ValueError as exc:
            self._report(at, str(exc))
            return None

    # -- fetch ---------------------------------------------------------------

    def _parse_fetch(self, existing: list[FetchRule]) -> FetchRule | None:
        at = self._expect_word("fetch")
        target = self._expect_ident("target property")
        self._expect_word("from")
        url = self._expect_string("URL")
        self._expect_word("extract")
        extractor = self._peek()
        if extractor.kind != TokenKind.WORD or extractor.value not in EXTRACTOR_KINDS:
            raise self._error(
                extractor,
                "expected 'json_pointer', 'regex', or 'css', got "
                + extractor.describe(),
            )
        self._advance()
        expr = self._expect_string("extractor expression")
        self._expect_word("as")
        parse_as = self._parse_type()
        self._expect_word("every")
        interval = self._expect_number("interval")
        if "." in interval.value:
            raise self._error(interval, "fetch interval must be an integer")
        unit = self._peek()
        if unit.kind != TokenKind.WORD or unit.value not in _INTERVAL_FACTORS:
            raise self._error(
                unit, f"expected 's', 'm', or 'h', got {unit.describe()}"
            )
        self._advance()
        interval_s = int(interval.value) * _INTERVAL_FACTORS[unit.value]
        if any(rule.target_property == target.value for rule in existing):
            self._report(target, f"duplicate fetch rule for {target.value!r}")
            return None
        try:
            return FetchRule(
                target_property=target.value,
                url=url.value,
                extractor=extractor.value,
                expr=expr.value,
                parse_as=parse_as,
                interval_s=interval_s,
                pos=(at.line, at.column),
            )
        except (ValueError, re.error) as exc:
            self._report(at, str(exc))
            return None


def _finish(parser: Parser, result):
    errors = [d for d in parser.diagnostics if d.severity == "error"]
    if errors:
        raise ParseFailed(errors)
    return result


def parse_file(source: str) -> list:
    """Parse a file of vocabularies and services, in order."""
    parser = Parser(source)
    return _finish(parser, parser.parse_file())


def parse_vocabulary(source: str) -> Vocabulary:
    """Parse a source containing exactly one vocabulary."""
    parser = Parser(source)
    try:
        vocabulary = parser._parse_vocabulary()
    except _Abort as abort:
        parser.diagnostics.append(abort.diagnostic)
        raise ParseFailed([d for d in parser.diagnostics if d.severity == "error"])
    if parser._peek().kind != TokenKind.EOF:
        token = parser._peek()
        parser._report(token, f"unexpected {token.describe()} after vocabulary")
    return _finish(parser, vocabulary)


def parse_service(source: str) -> ServiceDescription:
    """Parse a source containing exactly one service description."""
    parser = Parser(source)
    try:
        service = parser._parse_service()
    except _Abort as abort:
        parser.diagnostics.append(abort.diagnostic)
        raise ParseFailed([d for d in parser.diagnostics if d.severity == "error"])
    if parser._peek().kind != TokenKind.EOF:
        token = parser._peek()
        parser._report(token, f"unexpected {token.describe()} after service")
    return _finish(parser, service)
