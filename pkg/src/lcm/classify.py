"""Manual annotation store, Naive Bayes training, and the review loop.

Labeled spans are sentence-aligned stand-off annotations on the
label-span layer; overlapping spans with different categories are
allowed (multi-label). Spans rejected during review are recorded with
origin "machine-rejected" and never enter training data.

Training builds a multinomial Naive Bayes model with Laplace add-1
smoothing, optionally interpolated with a fitted topic model
("semantic" smoothing):

    p(w|c) = (1 - lam) * p_laplace(w|c) + lam * sum_k phi_k(w) * psi_c(k)

where psi_c(k) is the mean topic mixture of the class-c training spans
and phi is renormalized over the classifier's feature vocabulary so the
class-conditional models still sum to 1.

The review queue ranks sentence-window units by certainty (the maximum
posterior); most-certain order supports verification of confident
labels, least-certain order supports uncertainty sampling.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from .store import (Annotation, CorpusStore, Document, LABEL_LAYER,
                    NotFoundError, SENTENCE_LAYER)
from .textproc import tokenize

ORIGIN_MANUAL = "manual"
ORIGIN_ACCEPTED = "machine-accepted"
ORIGIN_REJECTED = "machine-rejected"
ORIGINS = (ORIGIN_MANUAL, ORIGIN_ACCEPTED, ORIGIN_REJECTED)

DEFAULT_UNIT_SIZE = 3
DEFAULT_SEMANTIC_LAMBDA = 0.4


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


# ----------------------------------------------------------------------
# category system

@dataclass
class Category:
    id: str
    label: str
    parent: Optional[str] = None


class CategoryTree:
    """A hierarchical category system (forest; root-less nodes allowed)."""

    def __init__(self):
        self._nodes: dict[str, Category] = {}
        self._counter = 0

    def add(self, label: str, parent: Optional[str] = None,
            id: Optional[str] = None) -> Category:
        if parent is not None and parent not in self._nodes:
            raise NotFoundError(f"unknown parent category {parent!r}")
        if id is None:
            self._counter += 1
            while f"c{self._counter}" in self._nodes:
                self._counter += 1
            id = f"c{self._counter}"
        elif id in self._nodes:
            raise ValueError(f"category id {id!r} already exists")
        node = Category(id=id, label=label, parent=parent)
        self._nodes[id] = node
        return node

    def rename(self, id: str, label: str) -> Category:
        node = self.get(id)
        node.label = label
        return node

    def delete(self, id: str, in_use: Callable[[str], bool]) -> None:
        """Remove a leaf category; refused when spans reference it."""
        node = self.get(id)
        if any(c.parent == id for c in self._nodes.values()):
            raise ValueError(f"category {id!r} has children")
        if in_use(id):
            raise ValueError(f"category {id!r} has labeled spans")
        del self._nodes[node.id]

    def get(self, id: str) -> Category:
        if id not in self._nodes:
            raise NotFoundError(f"unknown category {id!r}")
        return self._nodes[id]

    def __contains__(self, id: str) -> bool:
        return id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def nodes(self) -> list[Category]:
        return sorted(self._nodes.values(), key=lambda c: c.id)

    # ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"categories": [{"id": c.id, "label": c.label,
                                "parent": c.parent} for c in self.nodes()]}

    @classmethod
    def from_json(cls, obj: dict) -> "CategoryTree":
        tree = cls()
        nodes = obj.get("categories", [])
        ids = {n["id"] for n in nodes}
        for n in nodes:
            if n.get("parent") is not None and n["parent"] not in ids:
                raise ValueError(f"unknown parent {n['parent']!r}")
        for n in nodes:
            tree._nodes[n["id"]] = Category(id=n["id"], label=n["label"],
                                            parent=n.get("parent"))
        return tree

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "CategoryTree":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# ----------------------------------------------------------------------
# labeled spans

@dataclass
class LabeledSpan:
    span_id: str
    doc_id: str
    first_sentence: int
    last_sentence: int
    begin: int
    end: int
    category: str
    origin: str
    timestamp: str


class SpanStore:
    """Sentence-aligned label spans, stored on the label-span layer."""

    def __init__(self, store: CorpusStore):
        self._store = store

    def annotate(self, doc_id: str, first_sentence: int, last_sentence: int,
                 category: str, tree: CategoryTree,
                 origin: str = ORIGIN_MANUAL) -> LabeledSpan:
        """Label a sentence range of one document.

        The range is inclusive on both ends and must address existing
        sentences; the span's character offsets snap to whole sentences.
        """
        if category not in tree:
            raise NotFoundError(f"unknown category {category!r}")
        if origin not in ORIGINS:
            raise ValueError(f"unknown origin {origin!r}")
        doc = self._store.get_document(doc_id)
        sentences = doc.layer(SENTENCE_LAYER)
        if not (0 <= first_sentence <= last_sentence < len(sentences)):
            raise ValueError(
                f"sentence range [{first_sentence}, {last_sentence}] invalid "
                f"for document with {len(sentences)} sentences")
        span = LabeledSpan(
            span_id=uuid.uuid4().hex[:12],
            doc_id=doc_id,
            first_sentence=first_sentence,
            last_sentence=last_sentence,
            begin=sentences[first_sentence].begin,
            end=sentences[last_sentence].end,
            category=category,
            origin=origin,
            timestamp=_now(),
        )
        self._store.add_annotations(doc_id, [Annotation(
            LABEL_LAYER, span.begin, span.end, attrs={
                "span_id": span.span_id,
                "first_sentence": span.first_sentence,
                "last_sentence": span.last_sentence,
                "category": span.category,
                "origin": span.origin,
                "timestamp": span.timestamp,
            })])
        return span

    def delete(self, doc_id: str, span_id: str) -> None:
        self._store.delete_label_span(doc_id, span_id)

    def spans(self, doc_ids: Optional[list[str]] = None) -> list[LabeledSpan]:
        out = []
        for doc in self._store.iter_documents(doc_ids):
            for a in doc.layer(LABEL_LAYER):
                out.append(LabeledSpan(
                    span_id=a.attrs["span_id"],
                    doc_id=doc.id,
                    first_sentence=a.attrs["first_sentence"],
                    last_sentence=a.attrs["last_sentence"],
                    begin=a.begin,
                    end=a.end,
                    category=a.attrs["category"],
                    origin=a.attrs["origin"],
                    timestamp=a.attrs["timestamp"],
                ))
        return out

    def training_spans(self, doc_ids: Optional[list[str]] = None
                       ) -> list[LabeledSpan]:
        """Spans usable as training examples (rejected spans excluded)."""
        return [s for s in self.spans(doc_ids) if s.origin != ORIGIN_REJECTED]

    def span_text(self, span: LabeledSpan) -> str:
        return self._store.get_document(span.doc_id).text[span.begin:span.end]

    def category_in_use(self, category: str) -> bool:
        return any(s.category == category for s in self.spans())

    # ------------------------------------------------------------------
    # JSON export/import

    def export_json(self, doc_ids: Optional[list[str]] = None) -> dict:
        return {"spans": [vars(s) for s in self.spans(doc_ids)]}

    def import_json(self, payload: dict, tree: CategoryTree) -> int:
        """Re-create exported label spans (offsets re-derived from the
        current sentence layer; categories must exist). Returns the count
        imported; spans whose span_id is already present are skipped."""
        existing = {s.span_id for s in self.spans()}
        count = 0
        for record in payload.get("spans", []):
            if record["span_id"] in existing:
                continue
            span = self.annotate(record["doc_id"], record["first_sentence"],
                                 record["last_sentence"], record["category"],
                                 tree, origin=record.get("origin", ORIGIN_MANUAL))
            # keep the original identity and timestamp on the stored copy
            self._store.delete_label_span(span.doc_id, span.span_id)
            self._store.add_annotations(span.doc_id, [Annotation(
                LABEL_LAYER, span.begin, span.end, attrs={
                    "span_id": record["span_id"],
                    "first_sentence": span.first_sentence,
                    "last_sentence": span.last_sentence,
                    "category": span.category,
                    "origin": record.get("origin", ORIGIN_MANUAL),
                    "timestamp": record.get("timestamp", span.timestamp),
                })])
            count += 1
        return count


# ----------------------------------------------------------------------
# Naive Bayes

@dataclass
class NBModel:
    """Multinomial NB: class priors and class-conditional term models."""

    categories: list[str]
    terms: list[str]
    priors: np.ndarray  # C
    cond: np.ndarray  # C x V, rows sum to 1
    smoothing: str  # "laplace" | "semantic"
    smoothing_lambda: float
    stopwords: list[str]
    min_tf: int
    topic_model_ref: Optional[str] = None

    def term_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def save(self, path: str | Path) -> None:
        payload = {
            "format": "lcm-nb-model",
            "version": 1,
            "categories": self.categories,
            "terms": self.terms,
            "priors": self.priors.tolist(),
            "cond": self.cond.tolist(),
            "smoothing": self.smoothing,
            "smoothing_lambda": self.smoothing_lambda,
            "stopwords": self.stopwords,
            "min_tf": self.min_tf,
            "topic_model_ref": self.topic_model_ref,
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "NBModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != "lcm-nb-model":
            raise ValueError(f"not a classifier file: {path}")
        return cls(
            categories=payload["categories"],
            terms=payload["terms"],
            priors=np.array(payload["priors"]),
            cond=np.array(payload["cond"]),
            smoothing=payload["smoothing"],
            smoothing_lambda=payload["smoothing_lambda"],
            stopwords=payload["stopwords"],
            min_tf=payload["min_tf"],
            topic_model_ref=payload.get("topic_model_ref"),
        )


def unit_tokens(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    """Feature tokens of one analysis unit: lowercased word tokens minus
    stopwords."""
    stopset = set(stopwords)
    return [t.form for t in tokenize(text)
            if not t.punct and t.form not in stopset]


def train(examples: list[tuple[str, str]], smoothing: str = "laplace",
          smoothing_lambda: float = DEFAULT_SEMANTIC_LAMBDA,
          topic_state=None, topic_model_ref: Optional[str] = None,
          stopwords: Iterable[str] = (), min_tf: int = 1) -> NBModel:
    """Train a Naive Bayes model from (unit text, category) examples.

    At least two categories, each with at least one example. Semantic
    smoothing requires a fitted topic model state.
    """
    if smoothing not in ("laplace", "semantic"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if smoothing == "semantic" and topic_state is None:
        raise ValueError("semantic smoothing requires a topic model reference")
    stopword_list = sorted(set(stopwords))

    by_cat: dict[str, list[list[str]]] = {}
    for text, category in examples:
        by_cat.setdefault(category, []).append(unit_tokens(text, stopword_list))
    categories = sorted(by_cat)
    if len(categories) < 2:
        raise ValueError("need at least 2 categories with training examples")
    for c in categories:
        if not any(by_cat[c]):
            raise ValueError(f"category {c!r} has no feature tokens")

    tf_total: dict[str, int] = {}
    for tokens_list in by_cat.values():
        for tokens in tokens_list:
            for t in tokens:
                tf_total[t] = tf_total.get(t, 0) + 1
    terms = sorted(t for t, n in tf_total.items() if n >= min_tf)
    if not terms:
        raise ValueError("empty feature vocabulary after filtering")
    term_idx = {t: i for i, t in enumerate(terms)}

    n_cat, n_terms = len(categories), len(terms)
    tf = np.zeros((n_cat, n_terms))
    n_examples = np.zeros(n_cat)
    for ci, c in enumerate(categories):
        n_examples[ci] = len(by_cat[c])
        for tokens in by_cat[c]:
            for t in tokens:
                if t in term_idx:
                    tf[ci, term_idx[t]] += 1

    priors = n_examples / n_examples.sum()
    laplace = (tf + 1.0) / (tf.sum(axis=1, keepdims=True) + n_terms)

    if smoothing == "laplace" or smoothing_lambda == 0.0:
        cond = laplace
        if smoothing == "laplace":
            smoothing_lambda = 0.0
    else:
        cond = _semantic_smooth(laplace, by_cat, categories, terms,
                                topic_state, smoothing_lambda)

    return NBModel(categories=categories, terms=terms, priors=priors,
                   cond=cond, smoothing=smoothing,
                   smoothing_lambda=smoothing_lambda,
                   stopwords=stopword_list, min_tf=min_tf,
                   topic_model_ref=topic_model_ref)


def _semantic_smooth(laplace: np.ndarray, by_cat: dict[str, list[list[str]]],
                     categories: list[str], terms: list[str],
                     topic_state, lam: float) -> np.ndarray:
    from .topics import infer_theta

    n_topics = topic_state.n_topics
    # phi restricted to the feature vocabulary, renormalized per topic; a
    # topic with no mass on the features falls back to uniform.
    topic_idx = {t: i for i, t in enumerate(topic_state.terms)}
    phi_full = topic_state.phi()
    phi_feat = np.zeros((n_topics, len(terms)))
    for j, term in enumerate(terms):
        if term in topic_idx:
            phi_feat[:, j] = phi_full[:, topic_idx[term]]
    row_sums = phi_feat.sum(axis=1, keepdims=True)
    uniform = np.full_like(phi_feat, 1.0 / len(terms))
    phi_feat = np.where(row_sums > 0, phi_feat / np.where(row_sums == 0, 1, row_sums),
                        uniform)

    psi_ck = np.zeros((len(categories), n_topics))
    for ci, c in enumerate(categories):
        thetas = [infer_theta(topic_state, tokens) for tokens in by_cat[c]]
        psi_ck[ci] = np.mean(thetas, axis=0)

    topic_term = psi_ck @ phi_feat  # C x V
    return (1.0 - lam) * laplace + lam * topic_term


@dataclass
class Prediction:
    posteriors: dict[str, float]
    label: str
    certainty: float


def predict(model: NBModel, unit: str | list[str]) -> Prediction:
    """Posterior per category for one analysis unit, computed in log space.

    Terms outside the model vocabulary are skipped; a unit with no known
    terms falls back to the class priors. A unit that is empty after
    feature filtering is an error.
    """
    tokens = unit_tokens(unit, model.stopwords) if isinstance(unit, str) else [
        t for t in unit if t not in set(model.stopwords)]
    if not tokens:
        raise ValueError("empty unit after feature filtering")
    term_idx = model.term_index()
    known = [term_idx[t] for t in tokens if t in term_idx]
    log_post = np.log(model.priors)
    for j in known:
        log_post = log_post + np.log(model.cond[:, j])
    log_post -= log_post.max()
    post = np.exp(log_post)
    post /= post.sum()
    posteriors = {c: float(post[i]) for i, c in enumerate(model.categories)}
    # deterministic argmax: highest posterior, ties by category id
    best = sorted(model.categories, key=lambda c: (-posteriors[c], c))[0]
    return Prediction(posteriors=posteriors, label=best,
                      certainty=posteriors[best])


# ----------------------------------------------------------------------
# review queue

@dataclass
class QueueItem:
    item_id: str
    doc_id: str
    first_sentence: int
    last_sentence: int
    text: str
    predicted: str
    certainty: float
    posteriors: dict[str, float]
    status: str = "pending"  # pending | accept | reject
    verdict_time: Optional[str] = None


@dataclass
class ReviewQueue:
    queue_id: str
    order: str  # most-certain | least-certain
    items: list[QueueItem]
    model_ref: Optional[str] = None
    created_at: str = field(default_factory=_now)

    def item(self, item_id: str) -> QueueItem:
        for it in self.items:
            if it.item_id == item_id:
                return it
        raise NotFoundError(f"no queue item {item_id!r}")

    def pending(self) -> list[QueueItem]:
        return [it for it in self.items if it.status == "pending"]

    def to_json(self) -> dict:
        return {
            "format": "lcm-review-queue",
            "version": 1,
            "queue_id": self.queue_id,
            "order": self.order,
            "model_ref": self.model_ref,
            "created_at": self.created_at,
            "items": [vars(it) for it in self.items],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ReviewQueue":
        return cls(queue_id=obj["queue_id"], order=obj["order"],
                   model_ref=obj.get("model_ref"),
                   created_at=obj.get("created_at", ""),
                   items=[QueueItem(**it) for it in obj["items"]])

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "ReviewQueue":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def sentence_windows(doc: Document, size: int = DEFAULT_UNIT_SIZE
                     ) -> list[tuple[int, int, str]]:
    """Non-overlapping sentence windows ``(first, last, text)`` of a doc."""
    sentences = doc.layer(SENTENCE_LAYER)
    windows = []
    for start in range(0, len(sentences), size):
        stop = min(start + size - 1, len(sentences) - 1)
        text = doc.text[sentences[start].begin:sentences[stop].end]
        windows.append((start, stop, text))
    return windows


def build_queue(store: CorpusStore, model: NBModel,
                collection: Optional[str] = None,
                unit_size: int = DEFAULT_UNIT_SIZE,
                order: str = "most-certain",
                limit: Optional[int] = None,
                queue_id: Optional[str] = None,
                model_ref: Optional[str] = None) -> ReviewQueue:
    """Score sentence-window units of a collection into a review queue.

    Units are ranked by certainty (max posterior): most-certain first for
    label verification, least-certain first for uncertainty sampling.
    Units with no feature tokens are skipped.
    """
    if order not in ("most-certain", "least-certain"):
        raise ValueError(f"unknown order {order!r}")
    doc_ids = store.resolve(collection)
    if not doc_ids:
        raise ValueError("empty collection")
    items = []
    for doc in store.iter_documents(doc_ids):
        for first, last, text in sentence_windows(doc, unit_size):
            try:
                pred = predict(model, text)
            except ValueError:
                continue
            items.append(QueueItem(
                item_id=f"{doc.id}:{first}-{last}",
                doc_id=doc.id, first_sentence=first, last_sentence=last,
                text=text, predicted=pred.label, certainty=pred.certainty,
                posteriors=pred.posteriors))
    sign = -1.0 if order == "most-certain" else 1.0
    items.sort(key=lambda it: (sign * it.certainty, it.item_id))
    if limit is not None:
        items = items[:limit]
    return ReviewQueue(queue_id=queue_id or uuid.uuid4().hex[:12],
                       order=order, items=items, model_ref=model_ref)


@dataclass
class PrecisionReport:
    accepted: int
    rejected: int
    per_category: dict[str, tuple[int, int]]  # category -> (accepted, rejected)

    @property
    def overall(self) -> Optional[float]:
        total = self.accepted + self.rejected
        return self.accepted / total if total else None

    def category_precision(self, category: str) -> Optional[float]:
        acc, rej = self.per_category.get(category, (0, 0))
        return acc / (acc + rej) if acc + rej else None

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "overall": self.overall,
            "per_category": {
                c: {"accepted": a, "rejected": r,
                    "precision": self.category_precision(c)}
                for c, (a, r) in sorted(self.per_category.items())},
        }


def running_precision(queue: ReviewQueue) -> PrecisionReport:
    per_cat: dict[str, tuple[int, int]] = {}
    accepted = rejected = 0
    for it in queue.items:
        if it.status == "accept":
            accepted += 1
            a, r = per_cat.get(it.predicted, (0, 0))
            per_cat[it.predicted] = (a + 1, r)
        elif it.status == "reject":
            rejected += 1
            a, r = per_cat.get(it.predicted, (0, 0))
            per_cat[it.predicted] = (a, r + 1)
    return PrecisionReport(accepted=accepted, rejected=rejected,
                           per_category=per_cat)


def record_verdict(queue: ReviewQueue, item_id: str, verdict: str,
                   spans: SpanStore, tree: CategoryTree) -> PrecisionReport:
    """Apply an analyst verdict to one pending queue item.

    Accepting stores a machine-accepted label span (it becomes training
    data on the next retrain); rejecting records a machine-rejected span
    that is permanently excluded from training. A second verdict on the
    same item is an error.
    """
    if verdict not in ("accept", "reject"):
        raise ValueError(f"unknown verdict {verdict!r}")
    item = queue.item(item_id)
    if item.status != "pending":
        raise ValueError(f"item {item_id!r} already has verdict {item.status!r}")
    origin = ORIGIN_ACCEPTED if verdict == "accept" else ORIGIN_REJECTED
    spans.annotate(item.doc_id, item.first_sentence, item.last_sentence,
                   item.predicted, tree, origin=origin)
    item.status = verdict
    item.verdict_time = _now()
    return running_precision(queue)


# ----------------------------------------------------------------------
# evaluation

@dataclass
class CategoryMetrics:
    category: str
    precision: float
    recall: float
    f1: float
    undefined_precision: bool = False


@dataclass
class EvalReport:
    rows: list[CategoryMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_csv(self) -> str:
        lines = ["category,precision,recall,f1"]
        for r in self.rows:
            lines.append(f"{r.category},{r.precision:.6f},{r.recall:.6f},"
                         f"{r.f1:.6f}")
        lines.append(f"macro,{self.macro_precision:.6f},"
                     f"{self.macro_recall:.6f},{self.macro_f1:.6f}")
        return "\n".join(lines) + "\n"


def evaluate(model: NBModel, examples: list[tuple[str, str]]) -> EvalReport:
    """Precision/recall/F1 per category over held-out (text, category)
    examples, plus the macro average.

    A category never predicted gets precision 0 (flagged) and recall 0.
    Units that cannot be classified (empty after filtering) count as
    missed for their true category.
    """
    if not examples:
        raise ValueError("empty held-out set")
    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    fn: dict[str, int] = {}
    categories = set()
    for text, true_cat in examples:
        categories.add(true_cat)
        try:
            label = predict(model, text).label
        except ValueError:
            fn[true_cat] = fn.get(true_cat, 0) + 1
            continue
        categories.add(label)
        if label == true_cat:
            tp[true_cat] = tp.get(true_cat, 0) + 1
        else:
            fp[label] = fp.get(label, 0) + 1
            fn[true_cat] = fn.get(true_cat, 0) + 1

    rows = []
    for c in sorted(categories):
        t, p, n = tp.get(c, 0), fp.get(c, 0), fn.get(c, 0)
        predicted = t + p
        precision = t / predicted if predicted else 0.0
        actual = t + n
        recall = t / actual if actual else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        rows.append(CategoryMetrics(
            category=c, precision=precision, recall=recall, f1=f1,
            undefined_precision=predicted == 0))
    return EvalReport(
        rows=rows,
        macro_precision=sum(r.precision for r in rows) / len(rows),
        macro_recall=sum(r.recall for r in rows) / len(rows),
        macro_f1=sum(r.f1 for r in rows) / len(rows),
    )


def spans_to_examples(store: CorpusStore, spans: list[LabeledSpan]
                      ) -> list[tuple[str, str]]:
    """Materialize (unit text, category) pairs for a span list."""
    texts: dict[str, str] = {}
    out = []
    for s in spans:
        if s.doc_id not in texts:
            texts[s.doc_id] = store.get_document(s.doc_id).text
        out.append((texts[s.doc_id][s.begin:s.end], s.category))
    return out
