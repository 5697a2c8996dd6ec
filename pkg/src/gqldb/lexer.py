"""Tokenizer for the GQL dialect.

Tokens keep their source span (``start``/``end`` byte offsets) so that the
original text can be reconstructed exactly; ``text`` is the processed value
(quotes stripped, doubled-quote escapes resolved).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = {
    "create", "schema", "graph", "type", "any", "node", "edge", "directed",
    "connecting", "use", "insert", "match", "return", "set", "remove",
    "delete", "detach", "begin", "commit", "rollback", "true", "false", "null",
}

# Longest first for maximal munch.
PUNCT_MULTI = ("]->", "<-[", "-[", "]-", "=>", "->", "<-")
PUNCT_SINGLE = set("(){}[],;:&|=./@<>-!*?")


@dataclass
class Token:
    kind: str  # identifier | quoted-identifier | string-literal | integer
    #            | float | boolean | punctuation | keyword
    text: str
    line: int
    column: int
    start: int
    end: int

    def lower(self) -> str:
        return self.text.lower()


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - line_start + 1
        start = i
        if _is_ident_start(ch):
            i += 1
            while i < n and _is_ident_part(text[i]):
                i += 1
            word = text[start:i]
            low = word.lower()
            if low in ("true", "false"):
                kind = "boolean"
            elif low in KEYWORDS:
                kind = "keyword"
            else:
                kind = "identifier"
            tokens.append(Token(kind, word, line, col, start, i))
            continue
        if ch.isdigit():
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            kind = "integer"
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                kind = "float"
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    kind = "float"
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            tokens.append(Token(kind, text[start:i], line, col, start, i))
            continue
        if ch == "'":
            value, i = _scan_quoted(text, i, "'", line, col, "string literal")
            tokens.append(Token("string-literal", value, line, col, start, i))
            continue
        if ch == '"':
            value, i = _scan_quoted(text, i, '"', line, col, "quoted identifier")
            tokens.append(Token("quoted-identifier", value, line, col, start, i))
            continue
        matched = False
        for punct in PUNCT_MULTI:
            if text.startswith(punct, i):
                i += len(punct)
                tokens.append(Token("punctuation", punct, line, col, start, i))
                matched = True
                break
        if matched:
            continue
        if ch in PUNCT_SINGLE:
            i += 1
            tokens.append(Token("punctuation", ch, line, col, start, i))
            continue
        raise LexError(line, col, f"illegal character {ch!r}")
    return tokens


def _scan_quoted(text: str, i: int, quote: str, line: int, col: int,
                 what: str) -> tuple[str, int]:
    """Scan a quoted region starting at the opening quote; doubled quotes
    escape themselves.  Returns (processed text, index past closing quote)."""
    n = len(text)
    i += 1
    parts: list[str] = []
    while i < n:
        ch = text[i]
        if ch == "\n":
            break
        if ch == quote:
            if i + 1 < n and text[i + 1] == quote:
                parts.append(quote)
                i += 2
                continue
            return "".join(parts), i + 1
        parts.append(ch)
        i += 1
    raise LexError(line, col, f"unterminated {what}")
