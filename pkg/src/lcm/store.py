"""Document store with immutable text, typed metadata, and stand-off annotations.

Documents live in a single SQLite file (WAL mode, safe to share across
threads and processes). The source text of a document is never modified
after ingestion; all derived information -- sentence spans, token spans,
classification label spans -- is attached as stand-off annotations that
address the text by ``[begin, end)`` offsets in unicode scalar values.
Annotation layers are stored schema-free inside a JSON column, so new
layers can be added without any migration.

Named sub-collections (ordered sets of document ids) are the unit every
analysis operates on.
"""

from __future__ import annotations

import datetime as dt
import json
import sqlite3
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional

SENTENCE_LAYER = "sentence"
TOKEN_LAYER = "token"
LABEL_LAYER = "label-span"
LAYERS = (SENTENCE_LAYER, TOKEN_LAYER, LABEL_LAYER)

#: Layers whose spans may not overlap each other.
_NON_OVERLAP_LAYERS = (SENTENCE_LAYER, TOKEN_LAYER)


class StoreError(Exception):
    """Base class for corpus store failures."""


class NotFoundError(StoreError):
    """A document, collection, or annotation id did not resolve."""


class IngestError(StoreError):
    """A source file could not be ingested.

    ``line`` carries the 1-based line number of the offending record when
    the failure is local to one record.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AnnotationError(StoreError):
    """An annotation violates offset bounds or a layer invariant."""


class CollectionError(StoreError):
    """A sub-collection operation failed (name collision, unknown id)."""


@dataclass(frozen=True)
class Annotation:
    """A stand-off annotation addressing ``text[begin:end)``.

    ``attrs`` carries layer-specific payload: the normalized surface form
    and punctuation flag for tokens, the category id / origin / span id
    for label spans.
    """

    layer: str
    begin: int
    end: int
    attrs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"layer": self.layer, "begin": self.begin, "end": self.end,
                "attrs": self.attrs}

    @classmethod
    def from_json(cls, obj: dict) -> "Annotation":
        return cls(layer=obj["layer"], begin=obj["begin"], end=obj["end"],
                   attrs=obj.get("attrs", {}))


@dataclass
class Document:
    """An immutable source text plus metadata and stand-off annotations.

    ``metadata`` maps field names to values typed as string, ``datetime.date``
    (the ``date`` field), or list of strings (the ``tags`` field). ``layers``
    records which annotation layers have been populated, so an empty token
    layer is distinguishable from a document that was never segmented.
    """

    id: str
    text: str
    metadata: dict
    annotations: list[Annotation] = field(default_factory=list)
    layers: set[str] = field(default_factory=set)

    def layer(self, name: str) -> list[Annotation]:
        """Annotations of one layer, in stored (sorted) order."""
        return [a for a in self.annotations if a.layer == name]

    def has_layer(self, name: str) -> bool:
        return name in self.layers

    @property
    def date(self) -> dt.date:
        return self.metadata["date"]


@dataclass
class SubCollection:
    """A named, ordered set of document ids.

    ``provenance`` is a free-text description of how the set was produced
    (a query string, a job id, or "manual").
    """

    name: str
    doc_ids: list[str]
    provenance: str = "manual"

    def __len__(self) -> int:
        return len(self.doc_ids)


def parse_date(value: Any) -> dt.date:
    """Parse an ISO-8601 date, truncating sub-day precision to the day.

    Raises ValueError if the value is not a parseable date.
    """
    if isinstance(value, dt.date) and not isinstance(value, dt.datetime):
        return value
    if isinstance(value, dt.datetime):
        return value.date()
    if not isinstance(value, str):
        raise ValueError(f"not a date: {value!r}")
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        pass
    return dt.datetime.fromisoformat(value).date()


def _metadata_from_record(record: dict) -> dict:
    """Build the typed metadata map for one ingest record.

    Known keys: ``date`` (required, ISO-8601), ``source`` (defaults to ""),
    ``title`` (optional string), ``tags`` (optional list of strings).
    Unknown keys are preserved as string metadata.
    """
    meta: dict = {}
    meta["date"] = parse_date(record["date"])
    meta["source"] = str(record.get("source", ""))
    if "title" in record:
        meta["title"] = str(record["title"])
    if "tags" in record:
        tags = record["tags"]
        if not isinstance(tags, list):
            raise ValueError("tags must be a list of strings")
        meta["tags"] = [str(t) for t in tags]
    for key, value in record.items():
        if key in ("id", "text", "date", "source", "title", "tags"):
            continue
        meta[key] = value if isinstance(value, str) else json.dumps(value)
    return meta


def _metadata_to_json(meta: dict) -> dict:
    out = dict(meta)
    out["date"] = meta["date"].isoformat()
    return out


def _metadata_from_json(obj: dict) -> dict:
    meta = dict(obj)
    meta["date"] = dt.date.fromisoformat(obj["date"])
    return meta


def _stage_record(record) -> tuple[str, str, dict]:
    """Validate one ingest record; returns (id, text, metadata)."""
    if not isinstance(record, dict):
        raise ValueError("record is not an object")
    for key in ("id", "text", "date"):
        if key not in record:
            raise ValueError(f"record missing {key!r}")
    doc_id = record["id"]
    if not isinstance(doc_id, str) or not doc_id:
        raise ValueError("id must be a non-empty string")
    if not isinstance(record["text"], str):
        raise ValueError("text must be a string")
    return doc_id, record["text"], _metadata_from_record(record)


def _check_annotations(text: str, annotations: list[Annotation]) -> None:
    """Validate offset bounds and the per-layer invariants.

    Sentence and token spans must be non-empty, in-bounds, and
    non-overlapping within their layer; every token must lie within
    exactly one sentence span.
    """
    n = len(text)
    by_layer: dict[str, list[Annotation]] = {}
    for a in annotations:
        if a.layer not in LAYERS:
            raise AnnotationError(f"unknown annotation layer {a.layer!r}")
        if not (0 <= a.begin < a.end <= n):
            raise AnnotationError(
                f"annotation [{a.begin}, {a.end}) out of bounds for "
                f"text of length {n}")
        by_layer.setdefault(a.layer, []).append(a)

    for layer in _NON_OVERLAP_LAYERS:
        spans = sorted(by_layer.get(layer, []), key=lambda a: (a.begin, a.end))
        for prev, cur in zip(spans, spans[1:]):
            if cur.begin < prev.end:
                raise AnnotationError(
                    f"overlapping {layer} spans [{prev.begin}, {prev.end}) "
                    f"and [{cur.begin}, {cur.end})")

    sentences = sorted(by_layer.get(SENTENCE_LAYER, []), key=lambda a: a.begin)
    for tok in by_layer.get(TOKEN_LAYER, []):
        if not any(s.begin <= tok.begin and tok.end <= s.end for s in sentences):
            raise AnnotationError(
                f"token [{tok.begin}, {tok.end}) lies outside every "
                f"sentence span")


def _sort_annotations(annotations: list[Annotation]) -> list[Annotation]:
    order = {layer: i for i, layer in enumerate(LAYERS)}
    return sorted(annotations, key=lambda a: (order[a.layer], a.begin, a.end))


class CorpusStore:
    """SQLite-backed document and sub-collection store.

    The handle is safe to share across threads: all access is serialized
    through one internal lock, which in particular serializes writes to a
    single document. ``path`` may be ``":memory:"`` for tests.
    """

    def __init__(self, path: str | Path):
        self._path = str(path)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA busy_timeout=10000")
            self._conn.execute("""
                CREATE TABLE IF NOT EXISTS documents (
                    id TEXT PRIMARY KEY,
                    text TEXT NOT NULL,
                    metadata TEXT NOT NULL,
                    annotations TEXT NOT NULL
                )
            """)
            self._conn.execute("""
                CREATE TABLE IF NOT EXISTS collections (
                    name TEXT PRIMARY KEY,
                    doc_ids TEXT NOT NULL,
                    provenance TEXT NOT NULL
                )
            """)
            self._conn.commit()

    # ------------------------------------------------------------------
    # lifecycle

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def __enter__(self) -> "CorpusStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # ------------------------------------------------------------------
    # ingestion

    def ingest(self, path: str | Path, format: str = "jsonl") -> int:
        """Ingest a JSONL file (one document object per line).

        Each record must carry ``id``, ``text`` and ``date``. Re-ingesting
        an existing id with identical text is a no-op; with different text
        it is an error. The whole file is staged and committed atomically:
        on any error nothing is stored.

        Returns the number of records in the file.
        """
        if format != "jsonl":
            raise IngestError(f"unsupported ingest format {format!r}")
        path = Path(path)
        if not path.exists():
            raise IngestError(f"no such file: {path}")

        staged: dict[str, tuple[str, dict]] = {}
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"invalid JSON ({exc.msg})", lineno)
                try:
                    doc_id, text, meta = _stage_record(record)
                except ValueError as exc:
                    raise IngestError(str(exc), lineno)
                if doc_id in staged:
                    raise IngestError(f"duplicate id {doc_id!r} in file", lineno)
                staged[doc_id] = (text, meta)
        self._commit_staged(staged)
        return len(staged)

    def add_documents(self, records: list[dict]) -> int:
        """Store document records directly (same schema as JSONL lines)."""
        staged: dict[str, tuple[str, dict]] = {}
        for i, record in enumerate(records):
            try:
                doc_id, text, meta = _stage_record(record)
            except ValueError as exc:
                raise IngestError(f"record {i}: {exc}")
            if doc_id in staged:
                raise IngestError(f"record {i}: duplicate id {doc_id!r}")
            staged[doc_id] = (text, meta)
        self._commit_staged(staged)
        return len(staged)

    def _commit_staged(self, staged: dict) -> None:
        with self._lock:
            if staged:
                cur = self._conn.execute(
                    "SELECT id, text FROM documents WHERE id IN (%s)"
                    % ",".join("?" * len(staged)), list(staged))
                existing = {row["id"]: row["text"] for row in cur}
            else:
                existing = {}
            for doc_id, (text, _) in staged.items():
                if doc_id in existing and existing[doc_id] != text:
                    raise IngestError(
                        f"document {doc_id!r} already stored with different text")
            for doc_id, (text, meta) in staged.items():
                if doc_id in existing:
                    continue  # idempotent re-ingest
                self._conn.execute(
                    "INSERT INTO documents (id, text, metadata, annotations) "
                    "VALUES (?, ?, ?, ?)",
                    (doc_id, text, json.dumps(_metadata_to_json(meta)),
                     json.dumps({"layers": [], "spans": []})))
            self._conn.commit()

    # ------------------------------------------------------------------
    # documents

    def get_document(self, doc_id: str) -> Document:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM documents WHERE id = ?", (doc_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"no such document: {doc_id!r}")
        ann = json.loads(row["annotations"])
        return Document(
            id=row["id"],
            text=row["text"],
            metadata=_metadata_from_json(json.loads(row["metadata"])),
            annotations=[Annotation.from_json(a) for a in ann["spans"]],
            layers=set(ann["layers"]),
        )

    def has_document(self, doc_id: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT 1 FROM documents WHERE id = ?", (doc_id,)).fetchone()
        return row is not None

    def document_ids(self) -> list[str]:
        with self._lock:
            cur = self._conn.execute("SELECT id FROM documents ORDER BY id")
            return [row["id"] for row in cur]

    def document_count(self) -> int:
        with self._lock:
            return self._conn.execute(
                "SELECT COUNT(*) FROM documents").fetchone()[0]

    def iter_documents(self, doc_ids: Optional[list[str]] = None) -> Iterator[Document]:
        for doc_id in (doc_ids if doc_ids is not None else self.document_ids()):
            yield self.get_document(doc_id)

    # ------------------------------------------------------------------
    # annotations

    def add_annotations(self, doc_id: str, annotations: list[Annotation]) -> int:
        """Append annotations atomically; text is left untouched.

        All offsets are validated against the document text and the layer
        invariants must hold for the merged annotation set. Returns the
        document's total annotation count after the append.
        """
        with self._lock:
            doc = self.get_document(doc_id)
            merged = doc.annotations + list(annotations)
            _check_annotations(doc.text, merged)
            layers = doc.layers | {a.layer for a in annotations}
            self._write_annotations(doc_id, layers, merged)
            return len(merged)

    def set_layers(self, doc_id: str, layers: dict[str, list[Annotation]]) -> None:
        """Replace whole annotation layers atomically.

        Used by segmentation so that re-running it replaces rather than
        duplicates the sentence/token layers. Annotations passed in must
        already carry the layer they are filed under.
        """
        for layer, anns in layers.items():
            if layer not in LAYERS:
                raise AnnotationError(f"unknown annotation layer {layer!r}")
            for a in anns:
                if a.layer != layer:
                    raise AnnotationError(
                        f"annotation layer {a.layer!r} filed under {layer!r}")
        with self._lock:
            doc = self.get_document(doc_id)
            kept = [a for a in doc.annotations if a.layer not in layers]
            merged = kept + [a for anns in layers.values() for a in anns]
            _check_annotations(doc.text, merged)
            self._write_annotations(doc_id, doc.layers | set(layers), merged)

    def delete_label_span(self, doc_id: str, span_id: str) -> None:
        """Delete one label-span annotation by its span id.

        Deletion is exposed only for the label-span layer (the annotation
        UI removes labels); sentence/token layers are replaced wholesale
        by re-segmentation instead.
        """
        with self._lock:
            doc = self.get_document(doc_id)
            kept = [a for a in doc.annotations
                    if not (a.layer == LABEL_LAYER
                            and a.attrs.get("span_id") == span_id)]
            if len(kept) == len(doc.annotations):
                raise NotFoundError(
                    f"no label span {span_id!r} on document {doc_id!r}")
            self._write_annotations(doc_id, doc.layers, kept)

    def _write_annotations(self, doc_id: str, layers: set[str],
                           annotations: list[Annotation]) -> None:
        payload = {"layers": sorted(layers),
                   "spans": [a.to_json() for a in _sort_annotations(annotations)]}
        self._conn.execute(
            "UPDATE documents SET annotations = ? WHERE id = ?",
            (json.dumps(payload), doc_id))
        self._conn.commit()

    # ------------------------------------------------------------------
    # sub-collections

    def create_subcollection(self, name: str, doc_ids: list[str],
                             provenance: str = "manual",
                             replace: bool = False) -> SubCollection:
        """Persist a named sub-collection.

        Order is preserved; duplicate ids are removed keeping the first
        occurrence. Every id must resolve to a stored document. A name
        collision is an error unless ``replace`` is set.
        """
        seen: dict[str, None] = {}
        for doc_id in doc_ids:
            if doc_id not in seen:
                seen[doc_id] = None
        unique = list(seen)
        with self._lock:
            for doc_id in unique:
                if not self.has_document(doc_id):
                    raise CollectionError(f"unknown document id {doc_id!r}")
            row = self._conn.execute(
                "SELECT 1 FROM collections WHERE name = ?", (name,)).fetchone()
            if row is not None and not replace:
                raise CollectionError(f"collection {name!r} already exists")
            self._conn.execute(
                "INSERT OR REPLACE INTO collections (name, doc_ids, provenance) "
                "VALUES (?, ?, ?)",
                (name, json.dumps(unique), provenance))
            self._conn.commit()
        return SubCollection(name=name, doc_ids=unique, provenance=provenance)

    def get_subcollection(self, name: str) -> SubCollection:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM collections WHERE name = ?", (name,)).fetchone()
        if row is None:
            raise NotFoundError(f"no such collection: {name!r}")
        return SubCollection(name=row["name"],
                             doc_ids=json.loads(row["doc_ids"]),
                             provenance=row["provenance"])

    def list_subcollections(self) -> list[SubCollection]:
        with self._lock:
            cur = self._conn.execute("SELECT * FROM collections ORDER BY name")
            return [SubCollection(name=row["name"],
                                  doc_ids=json.loads(row["doc_ids"]),
                                  provenance=row["provenance"])
                    for row in cur]

    def delete_subcollection(self, name: str) -> None:
        with self._lock:
            cur = self._conn.execute(
                "DELETE FROM collections WHERE name = ?", (name,))
            self._conn.commit()
        if cur.rowcount == 0:
            raise NotFoundError(f"no such collection: {name!r}")

    def resolve(self, collection: Optional[str]) -> list[str]:
        """Document ids of a named collection, or all ids when None."""
        if collection is None:
            return self.document_ids()
        return self.get_subcollection(collection).doc_ids
