"""Boolean query language: terms, phrases, field filters, date ranges.

Grammar::

    query := or
    or    := and ("OR" and)*
    and   := unit ("AND" unit | "NOT" unit)*
    unit  := TERM | PHRASE | FIELD ":" (TERM | range) | "(" query ")"
    range := "[" DATE "TO" DATE "]"

``AND``/``OR``/``NOT``/``TO`` are recognized in uppercase only; anything
else is a term. NOT can only appear inside an AND chain, which rules out
full-corpus complement scans by construction. Term and phrase words are
lowercased to match the normalized token layer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .textproc import tokenize


class QueryParseError(ValueError):
    """Raised on malformed query strings; ``pos`` is the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Term:
    term: str


@dataclass(frozen=True)
class Phrase:
    terms: tuple[str, ...]


@dataclass(frozen=True)
class FieldEq:
    field: str
    value: str


@dataclass(frozen=True)
class DateRange:
    field: str
    lo: str
    hi: str


@dataclass(frozen=True)
class And:
    required: tuple["Node", ...]
    excluded: tuple["Node", ...] = ()


@dataclass(frozen=True)
class Or:
    options: tuple["Node", ...]


Node = Union[Term, Phrase, FieldEq, DateRange, And, Or]

_KEYWORDS = ("AND", "OR", "NOT", "TO")
_SPECIAL = set('():"[]')
_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class _Tok:
    kind: str  # WORD, PHRASE, or one of ( ) [ ] : AND OR NOT TO
    text: str
    pos: int


def _lex(query: str) -> list[_Tok]:
    tokens = []
    i, n = 0, len(query)
    while i < n:
        ch = query[i]
        if ch.isspace():
            i += 1
        elif ch in "()[]:":
            tokens.append(_Tok(ch, ch, i))
            i += 1
        elif ch == '"':
            j = query.find('"', i + 1)
            if j < 0:
                raise QueryParseError("unterminated phrase", i)
            tokens.append(_Tok("PHRASE", query[i + 1:j], i))
            i = j + 1
        else:
            j = i
            while j < n and not query[j].isspace() and query[j] not in _SPECIAL:
                j += 1
            word = query[i:j]
            kind = word if word in _KEYWORDS else "WORD"
            tokens.append(_Tok(kind, word, i))
            i = j
    return tokens


class _Parser:
    def __init__(self, query: str):
        self.query = query
        self.tokens = _lex(query)
        self.i = 0

    def _peek(self) -> _Tok | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self) -> _Tok:
        tok = self._peek()
        if tok is None:
            raise QueryParseError("unexpected end of query", len(self.query))
        self.i += 1
        return tok

    def _expect(self, kind: str) -> _Tok:
        tok = self._next()
        if tok.kind != kind:
            raise QueryParseError(f"expected {kind!r}, got {tok.text!r}", tok.pos)
        return tok

    def parse(self) -> Node:
        node = self._or()
        tok = self._peek()
        if tok is not None:
            raise QueryParseError(
                f"unexpected {tok.text!r} (operators must be uppercase "
                "AND/OR/NOT)", tok.pos)
        return node

    def _or(self) -> Node:
        options = [self._and()]
        while (tok := self._peek()) is not None and tok.kind == "OR":
            self._next()
            options.append(self._and())
        return options[0] if len(options) == 1 else Or(tuple(options))

    def _and(self) -> Node:
        required = [self._unit()]
        excluded: list[Node] = []
        while (tok := self._peek()) is not None and tok.kind in ("AND", "NOT"):
            op = self._next()
            unit = self._unit()
            (required if op.kind == "AND" else excluded).append(unit)
        if len(required) == 1 and not excluded:
            return required[0]
        return And(tuple(required), tuple(excluded))

    def _unit(self) -> Node:
        tok = self._next()
        if tok.kind == "(":
            node = self._or()
            self._expect(")")
            return node
        if tok.kind == "PHRASE":
            terms = tuple(t.form for t in tokenize(tok.text) if not t.punct)
            if not terms:
                raise QueryParseError("empty phrase", tok.pos)
            return Phrase(terms)
        if tok.kind == "WORD":
            nxt = self._peek()
            if nxt is not None and nxt.kind == ":":
                self._next()
                return self._field(tok.text)
            return Term(tok.text.lower())
        raise QueryParseError(f"unexpected {tok.text!r}", tok.pos)

    def _field(self, name: str) -> Node:
        tok = self._next()
        if tok.kind == "[":
            lo = self._date()
            self._expect("TO")
            hi = self._date()
            self._expect("]")
            return DateRange(name, lo, hi)
        if tok.kind in ("WORD", "PHRASE"):
            return FieldEq(name, tok.text)
        raise QueryParseError(
            f"expected value or range after {name!r}:", tok.pos)

    def _date(self) -> str:
        tok = self._expect("WORD")
        if not _DATE_RE.match(tok.text):
            raise QueryParseError(
                f"expected date YYYY-MM-DD, got {tok.text!r}", tok.pos)
        return tok.text


def parse_query(query: str) -> Node:
    """Parse a query string into its AST; raises QueryParseError."""
    parser = _Parser(query)
    if not parser.tokens:
        raise QueryParseError("empty query", 0)
    return parser.parse()


def render_query(node: Node) -> str:
    """Render an AST back to the query language (inverse of parse_query)."""
    if isinstance(node, Term):
        return node.term
    if isinstance(node, Phrase):
        return '"' + " ".join(node.terms) + '"'
    if isinstance(node, FieldEq):
        return f"{node.field}:{node.value}"
    if isinstance(node, DateRange):
        return f"{node.field}:[{node.lo} TO {node.hi}]"
    if isinstance(node, And):
        parts = [_render_child(c) for c in node.required]
        out = " AND ".join(parts)
        for c in node.excluded:
            out += " NOT " + _render_child(c)
        return out
    if isinstance(node, Or):
        return " OR ".join(_render_child(c) for c in node.options)
    raise TypeError(f"not a query node: {node!r}")


def _render_child(node: Node) -> str:
    if isinstance(node, (And, Or)):
        return "(" + render_query(node) + ")"
    return render_query(node)


def query_terms(node: Node) -> list[str]:
    """All positive text terms of a query (term leaves and phrase members),
    in depth-first order. Excluded (NOT) branches do not contribute."""
    out: list[str] = []

    def walk(n: Node) -> None:
        if isinstance(n, Term):
            out.append(n.term)
        elif isinstance(n, Phrase):
            out.extend(n.terms)
        elif isinstance(n, And):
            for c in n.required:
                walk(c)
        elif isinstance(n, Or):
            for c in n.options:
                walk(c)

    walk(node)
    return out
