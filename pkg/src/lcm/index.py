"""Inverted index with positional postings and metadata indexes.

The index covers the normalized token layer (punctuation tokens are not
indexed; positions count word tokens only, so phrases match across
intervening punctuation) plus every metadata field. It is immutable once
built -- rebuilding writes a fresh shard and replaces the persisted file
atomically -- which makes unrestricted parallel reads safe.

Ranking is BM25 (k1=1.2, b=0.75, non-negative Lucene idf); the boolean
skeleton of a query determines the hit set exactly, BM25 only orders it.
Ties are broken by ascending document id.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import query as q
from .store import CorpusStore, TOKEN_LAYER

BM25_K1 = 1.2
BM25_B = 0.75


class IndexError_(Exception):
    """Index build or query evaluation failure."""


@dataclass
class SearchResult:
    doc_ids: list[str]
    scores: list[float]
    total: int


class IndexShard:
    """Positional postings plus metadata value indexes over one doc set."""

    def __init__(self, postings: dict[str, dict[str, list[int]]],
                 meta: dict[str, dict[str, set[str]]],
                 doc_len: dict[str, int]):
        self.postings = postings
        self.meta = meta
        self.doc_len = doc_len
        self.doc_count = len(doc_len)
        n = max(self.doc_count, 1)
        self.avg_len = sum(doc_len.values()) / n

    # ------------------------------------------------------------------
    # evaluation

    def all_docs(self) -> set[str]:
        return set(self.doc_len)

    def hit_set(self, node: q.Node) -> set[str]:
        """Exact boolean evaluation of a query AST."""
        if isinstance(node, q.Term):
            return set(self.postings.get(node.term, ()))
        if isinstance(node, q.Phrase):
            return self._phrase_hits(node.terms)
        if isinstance(node, q.FieldEq):
            values = self._field(node.field)
            return set(values.get(node.value, ()))
        if isinstance(node, q.DateRange):
            values = self._field(node.field)
            hits: set[str] = set()
            for value, ids in values.items():
                if node.lo <= value <= node.hi:
                    hits |= ids
            return hits
        if isinstance(node, q.And):
            sets = [self.hit_set(c) for c in node.required]
            hits = set.intersection(*sets)
            for c in node.excluded:
                hits -= self.hit_set(c)
            return hits
        if isinstance(node, q.Or):
            hits = set()
            for c in node.options:
                hits |= self.hit_set(c)
            return hits
        raise TypeError(f"not a query node: {node!r}")

    def _field(self, field: str) -> dict[str, set[str]]:
        if field not in self.meta:
            raise IndexError_(f"unknown field {field!r}")
        return self.meta[field]

    def _phrase_hits(self, terms: tuple[str, ...]) -> set[str]:
        candidates: Optional[set[str]] = None
        for term in terms:
            docs = set(self.postings.get(term, ()))
            candidates = docs if candidates is None else candidates & docs
            if not candidates:
                return set()
        assert candidates is not None
        hits = set()
        for doc_id in candidates:
            starts = set(self.postings[terms[0]][doc_id])
            for offset, term in enumerate(terms[1:], start=1):
                positions = self.postings[term][doc_id]
                starts &= {p - offset for p in positions}
                if not starts:
                    break
            if starts:
                hits.add(doc_id)
        return hits

    # ------------------------------------------------------------------
    # ranking

    def _bm25(self, term: str, doc_id: str) -> float:
        postings = self.postings.get(term)
        if not postings or doc_id not in postings:
            return 0.0
        tf = len(postings[doc_id])
        df = len(postings)
        idf = math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))
        norm = BM25_K1 * (1.0 - BM25_B + BM25_B * self.doc_len[doc_id] /
                          max(self.avg_len, 1e-12))
        return idf * tf * (BM25_K1 + 1.0) / (tf + norm)

    def search(self, query: str | q.Node, limit: int = 10,
               offset: int = 0) -> SearchResult:
        """Ranked search: BM25 over the boolean hit set.

        Every term leaf and phrase member of the query contributes its
        BM25 score; field filters contribute 0. Tie-break is ascending
        doc id.
        """
        node = q.parse_query(query) if isinstance(query, str) else query
        hits = self.hit_set(node)
        terms = sorted(set(q.query_terms(node)))
        scored = sorted(
            ((doc_id, sum(self._bm25(t, doc_id) for t in terms))
             for doc_id in hits),
            key=lambda pair: (-pair[1], pair[0]))
        page = scored[offset:offset + limit] if limit is not None else scored[offset:]
        return SearchResult(doc_ids=[d for d, _ in page],
                            scores=[s for _, s in page],
                            total=len(hits))

    def facet_counts(self, query: str | q.Node, field: str) -> dict[str, int]:
        """Value -> hit count over the query's hit set for one field.

        List-valued fields (tags) count a document once per value it
        carries; scalar fields partition the hit set.
        """
        node = q.parse_query(query) if isinstance(query, str) else query
        hits = self.hit_set(node)
        values = self._field(field)
        counts = {}
        for value, ids in values.items():
            n = len(ids & hits)
            if n:
                counts[value] = n
        return counts

    # ------------------------------------------------------------------
    # persistence

    def save(self, path: str | Path) -> None:
        """Persist as JSON, atomically replacing any prior shard."""
        payload = {
            "format": "lcm-index",
            "version": 1,
            "postings": self.postings,
            "meta": {f: {v: sorted(ids) for v, ids in values.items()}
                     for f, values in self.meta.items()},
            "doc_len": self.doc_len,
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "IndexShard":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != "lcm-index":
            raise IndexError_(f"not an index file: {path}")
        return cls(
            postings=payload["postings"],
            meta={f: {v: set(ids) for v, ids in values.items()}
                  for f, values in payload["meta"].items()},
            doc_len=payload["doc_len"],
        )


def _meta_values(value) -> list[str]:
    if isinstance(value, dt.date):
        return [value.isoformat()]
    if isinstance(value, list):
        return [str(v) for v in value]
    return [str(value)]


def build_index(store: CorpusStore,
                collection: Optional[str] = None) -> IndexShard:
    """Build an IndexShard over a collection (or the whole corpus).

    Every document must carry a token layer; untokenized documents are
    reported by id.
    """
    doc_ids = sorted(store.resolve(collection))  # postings sorted by doc id
    untokenized = []
    postings: dict[str, dict[str, list[int]]] = {}
    meta: dict[str, dict[str, set[str]]] = {}
    doc_len: dict[str, int] = {}
    for doc_id in doc_ids:
        doc = store.get_document(doc_id)
        if not doc.has_layer(TOKEN_LAYER):
            untokenized.append(doc_id)
            continue
        position = 0
        for tok in doc.layer(TOKEN_LAYER):
            if tok.attrs.get("punct"):
                continue
            form = tok.attrs["form"]
            postings.setdefault(form, {}).setdefault(doc_id, []).append(position)
            position += 1
        doc_len[doc_id] = position
        for field, value in doc.metadata.items():
            values = meta.setdefault(field, {})  # field known even if empty
            for v in _meta_values(value):
                values.setdefault(v, set()).add(doc_id)
    if untokenized:
        raise IndexError_(
            "documents not tokenized: " + ", ".join(sorted(untokenized)))
    return IndexShard(postings=postings, meta=meta, doc_len=doc_len)
