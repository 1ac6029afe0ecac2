"""Tokenizer for the description language.

Comments run from ``#`` to end of line. String literals are double-quoted
with ``\\"`` and ``\\\\`` escapes. Bare URLs (``http://`` / ``https://``)
lex as single tokens up to the next whitespace.
"""

from __future__ import annotations

from dataclasses import dataclass

from servoir.errors import Diagnostic, ParseFailed


class TokenKind:
    WORD = "word"
    NUMBER = "number"
    STRING = "string"
    URL = "url"
    PUNCT = "punct"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == TokenKind.EOF:
            return "end of input"
        return repr(self.value)


_PUNCT = "{}()<>[],:="


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def fail(message: str, at_line: int, at_col: int):
        raise ParseFailed([Diagnostic(at_line, at_col, message)])

    while i < n:
        ch = source[i]

        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue

        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while i < n and source[i] != '"':
                if source[i] == "\n":
                    fail("unterminated string literal", start_line, start_col)
                if source[i] == "\\":
                    if i + 1 >= n or source[i + 1] not in ('"', "\\"):
                        fail("invalid escape (only \\\" and \\\\ allowed)", line, col)
                    buf.append(source[i + 1])
                    i += 2
                    col += 2
                    continue
                buf.append(source[i])
                i += 1
                col += 1
            if i >= n:
                fail("unterminated string literal", start_line, start_col)
            i += 1
            col += 1
            tokens.append(Token(TokenKind.STRING, "".join(buf), start_line, start_col))
            continue

        if source.startswith("http://", i) or source.startswith("https://", i):
            start_col = col
            start = i
            while i < n and not source[i].isspace():
                i += 1
                col += 1
            tokens.append(Token(TokenKind.URL, source[start:i], line, start_col))
            continue

        if ch in _PUNCT:
            tokens.append(Token(TokenKind.PUNCT, ch, line, col))
            i += 1
            col += 1
            continue

        if ch.isdigit():
            start_col = col
            start = i
            while i < n and source[i].isdigit():
                i += 1
                col += 1
            if i + 1 < n and source[i] == "." and source[i + 1].isdigit():
                i += 1
                col += 1
                while i < n and source[i].isdigit():
                    i += 1
                    col += 1
            tokens.append(Token(TokenKind.NUMBER, source[start:i], line, start_col))
            continue

        if ch.isalpha() or ch == "_":
            start_col = col
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token(TokenKind.WORD, source[start:i], line, start_col))
            continue

        fail(f"unexpected character {ch!r}", line, col)

    tokens.append(Token(TokenKind.EOF, "", line, col))
    return tokens
