"""Contextualized-dictionary retrieval.

A dictionary is built from a reference collection of paradigmatic
documents: its entries are the top key terms (keyness against a contrast
collection, weights normalized to sum 1), and each term carries a context
profile -- the sentence-level dice scores of its strongest co-occurrence
partners in the reference collection, truncated to the top 50.

A document is scored by how far dictionary terms occur in their expected
contexts: for each dictionary term present, the cosine similarity between
the term's profile and the binary bag of terms co-occurring with it in
the document's sentences, mixed with a presence floor:

    score = sum_t w_t * (PRESENCE_WEIGHT + (1 - PRESENCE_WEIGHT) * match_t)

Absent terms contribute 0, so scores stay in [0, 1].
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .lexicometrics import ContingencyCounts, extract_keyterms, significance
from .store import CorpusStore, SubCollection
from .textproc import SentenceCorpus

#: Mixing weight of mere term presence against context match.
PRESENCE_WEIGHT = 0.3

#: Context profiles keep at most this many partner terms.
PROFILE_SIZE = 50

DEFAULT_DICTIONARY_SIZE = 500
DEFAULT_RETRIEVE_LIMIT = 10000


@dataclass
class DictEntry:
    term: str
    weight: float
    keyness: float = 0.0


@dataclass
class Dictionary:
    """Ranked key terms with weights and per-term co-occurrence profiles."""

    entries: list[DictEntry]
    profiles: dict[str, dict[str, float]]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.entries)

    def terms(self) -> list[str]:
        return [e.term for e in self.entries]

    # ------------------------------------------------------------------
    # serialization (JSON import/export)

    def to_json(self) -> dict:
        return {
            "entries": [{"term": e.term, "weight": e.weight,
                         "keyness": e.keyness} for e in self.entries],
            "profiles": self.profiles,
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Dictionary":
        entries = [DictEntry(term=e["term"], weight=e["weight"],
                             keyness=e.get("keyness", 0.0))
                   for e in obj["entries"]]
        return cls(entries=entries, profiles=obj["profiles"],
                   truncated=obj.get("truncated", False))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "Dictionary":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _context_profile(term: str, n_sentences: int,
                     occurs: dict[str, set[int]]) -> dict[str, float]:
    """Top co-occurrence partners of ``term`` by sentence-level dice."""
    s_term = occurs[term]
    scored = []
    for partner, s_partner in occurs.items():
        if partner == term:
            continue
        n_ab = len(s_term & s_partner)
        if n_ab == 0:
            continue
        counts = ContingencyCounts(N=n_sentences, n_a=len(s_term),
                                   n_b=len(s_partner), n_ab=n_ab)
        scored.append((partner, significance(counts, "dice")))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return {partner: score for partner, score in scored[:PROFILE_SIZE]}


def build_dictionary(reference: SentenceCorpus, contrast: SentenceCorpus,
                     size: int = DEFAULT_DICTIONARY_SIZE) -> Dictionary:
    """Extract a contextualized dictionary from a reference collection.

    Entries are the top ``size`` key terms of the reference against the
    contrast collection, keeping only positive keyness; when fewer
    qualify the dictionary is truncated and flagged, not an error.
    Profiles are measured on the reference collection.
    """
    if size < 1:
        raise ValueError("dictionary size must be >= 1")
    keyterms = [kt for kt in extract_keyterms(reference, contrast, size)
                if kt.keyness > 0]
    if not keyterms:
        raise ValueError("no positive-keyness terms in reference collection")
    truncated = len(keyterms) < size

    total = sum(kt.keyness for kt in keyterms)
    n_sentences = 0
    occurs: dict[str, set[int]] = {}
    for sent in reference.all_sentences():
        for form in set(sent):
            occurs.setdefault(form, set()).add(n_sentences)
        n_sentences += 1

    entries = [DictEntry(term=kt.term, weight=kt.keyness / total,
                         keyness=kt.keyness) for kt in keyterms]
    profiles = {kt.term: _context_profile(kt.term, n_sentences, occurs)
                for kt in keyterms}
    return Dictionary(entries=entries, profiles=profiles, truncated=truncated)


def context_match(profile: dict[str, float], bag: set[str]) -> float:
    """Cosine similarity between a dice-score profile and a binary bag."""
    if not profile or not bag:
        return 0.0
    dot = sum(score for term, score in profile.items() if term in bag)
    if dot == 0.0:
        return 0.0
    norm_p = math.sqrt(sum(s * s for s in profile.values()))
    return dot / (norm_p * math.sqrt(len(bag)))


def score_document(sentences: list[list[str]], dictionary: Dictionary) -> float:
    """Relevancy of one tokenized document under a dictionary, in [0, 1]."""
    present_terms = set()
    for sent in sentences:
        present_terms.update(sent)
    score = 0.0
    for entry in dictionary.entries:
        if entry.term not in present_terms:
            continue
        bag: set[str] = set()
        for sent in sentences:
            if entry.term in sent:
                bag.update(sent)
        bag.discard(entry.term)
        match = context_match(dictionary.profiles.get(entry.term, {}), bag)
        score += entry.weight * (PRESENCE_WEIGHT + (1.0 - PRESENCE_WEIGHT) * match)
    return score


def retrieve(corpus: SentenceCorpus, dictionary: Dictionary,
             top_m: int = DEFAULT_RETRIEVE_LIMIT) -> list[tuple[str, float]]:
    """Rank documents by dictionary relevancy, descending.

    Documents scoring 0 (no dictionary term present) are not retrieved.
    Ties break by ascending doc id; at most ``top_m`` results.
    """
    if not dictionary.entries:
        raise ValueError("empty dictionary")
    scored = []
    for i, doc_id in enumerate(corpus.doc_ids):
        s = score_document(corpus.sentences[i], dictionary)
        if s > 0.0:
            scored.append((doc_id, s))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:top_m]


@dataclass
class RetrievalResult:
    collection: SubCollection
    scores: list[tuple[str, float]]
    empty: bool = False


def retrieve_to_collection(store: CorpusStore, corpus: SentenceCorpus,
                           dictionary: Dictionary, name: str,
                           top_m: int = DEFAULT_RETRIEVE_LIMIT,
                           provenance: Optional[str] = None,
                           replace: bool = False) -> RetrievalResult:
    """Materialize the top-m retrieved documents as a named SubCollection.

    An all-zero scoring yields an empty collection flagged on the result.
    """
    ranked = retrieve(corpus, dictionary, top_m)
    collection = store.create_subcollection(
        name, [doc_id for doc_id, _ in ranked],
        provenance or f"dictionary retrieval (top {top_m})",
        replace=replace)
    return RetrievalResult(collection=collection, scores=ranked,
                           empty=not ranked)
