"""Deterministic sentence splitting, tokenization, and vocabulary construction.

Segmentation is rule-based: a sentence ends at terminal punctuation
(``.``, ``!``, ``?``) followed by whitespace and an uppercase letter or
digit, unless the word before the period is a known abbreviation. A small
built-in German+English abbreviation list ships with the module and can
be overridden from a file (UTF-8, one entry per line, ``#`` comments).

Tokens split on whitespace and punctuation boundaries; the only
normalization is lowercasing. Punctuation tokens are kept (flagged) so
that the token layer covers every non-whitespace character, which makes
the original sentence reconstructable from spans.
"""

from __future__ import annotations

import datetime as dt
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .store import (Annotation, CorpusStore, SENTENCE_LAYER, TOKEN_LAYER)

_TERMINALS = ".!?"

#: Abbreviations that never terminate a sentence (lowercased, trailing dot).
DEFAULT_ABBREVIATIONS = frozenset({
    # German
    "abs.", "bes.", "bspw.", "bzgl.", "bzw.", "ca.", "d.h.", "dr.", "evtl.",
    "fr.", "geb.", "gem.", "ggf.", "hr.", "inkl.", "insb.", "jh.", "jhd.",
    "mio.", "mrd.", "nr.", "o.ä.", "prof.", "s.o.", "s.u.", "sog.", "str.",
    "u.a.", "usw.", "u.u.", "v.a.", "vgl.", "z.b.", "z.t.", "zzgl.",
    # English
    "al.", "apr.", "aug.", "av.", "dec.", "dept.", "e.g.", "etc.", "feb.",
    "fig.", "gen.", "gov.", "i.e.", "jan.", "jr.", "jul.", "jun.", "mar.",
    "mr.", "mrs.", "ms.", "mt.", "no.", "nov.", "oct.", "rep.", "rev.",
    "sen.", "sep.", "sept.", "sr.", "st.", "vol.", "vs.",
})


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Load a one-entry-per-line UTF-8 word list; ``#`` starts a comment."""
    entries = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            entries.add(entry.lower())
    return frozenset(entries)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def split_sentences(text: str,
                    abbreviations: Optional[frozenset[str]] = None
                    ) -> list[tuple[int, int]]:
    """Split text into sentence spans ``(begin, end)``.

    Spans are ordered, non-overlapping, trimmed of surrounding whitespace,
    and together cover every non-whitespace character. Empty or
    whitespace-only text yields no spans.
    """
    if abbreviations is None:
        abbreviations = DEFAULT_ABBREVIATIONS
    boundaries = [0]
    n = len(text)
    i = 0
    while i < n:
        if text[i] in _TERMINALS:
            run_start = i
            while i < n and text[i] in _TERMINALS:
                i += 1
            # require whitespace, then an uppercase letter or digit
            j = i
            while j < n and text[j].isspace():
                j += 1
            if j == i or j == n or not (text[j].isupper() or text[j].isdigit()):
                continue
            if text[run_start:i] == "." and _ends_with_abbreviation(
                    text, run_start, abbreviations):
                continue
            boundaries.append(i)
        else:
            i += 1
    boundaries.append(n)

    spans = []
    for begin, end in zip(boundaries, boundaries[1:]):
        while begin < end and text[begin].isspace():
            begin += 1
        while end > begin and text[end - 1].isspace():
            end -= 1
        if begin < end:
            spans.append((begin, end))
    return spans


def _ends_with_abbreviation(text: str, dot: int,
                            abbreviations: frozenset[str]) -> bool:
    """Whether the word ending at the period at ``dot`` is an abbreviation."""
    start = dot
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:dot + 1].lower()
    return word in abbreviations


@dataclass(frozen=True)
class Token:
    """A token span with its lowercased surface form."""

    begin: int
    end: int
    form: str
    punct: bool = False


def tokenize(text: str, span: Optional[tuple[int, int]] = None) -> list[Token]:
    """Tokenize ``text`` (or one sentence span of it).

    Maximal runs of non-space, non-punctuation characters become word
    tokens; maximal runs of punctuation become punctuation tokens. Forms
    are lowercased. Every non-whitespace character belongs to exactly one
    token, so concatenating surfaces and separators reconstructs the input.
    """
    begin, end = span if span is not None else (0, len(text))
    tokens = []
    i = begin
    while i < end:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        punct = _is_punct(ch)
        j = i + 1
        while j < end and not text[j].isspace() and _is_punct(text[j]) == punct:
            j += 1
        tokens.append(Token(begin=i, end=j, form=text[i:j].lower(), punct=punct))
        i = j
    return tokens


def segment_document(store: CorpusStore, doc_id: str,
                     abbreviations: Optional[frozenset[str]] = None) -> int:
    """Compute and store sentence/token layers for one document.

    Re-running replaces the two layers instead of duplicating them.
    Returns the token count.
    """
    doc = store.get_document(doc_id)
    sentence_spans = split_sentences(doc.text, abbreviations)
    sentences = [Annotation(SENTENCE_LAYER, b, e) for b, e in sentence_spans]
    tokens = []
    for b, e in sentence_spans:
        for tok in tokenize(doc.text, (b, e)):
            tokens.append(Annotation(TOKEN_LAYER, tok.begin, tok.end,
                                     {"form": tok.form, "punct": tok.punct}))
    store.set_layers(doc_id, {SENTENCE_LAYER: sentences, TOKEN_LAYER: tokens})
    return len(tokens)


def segment_collection(store: CorpusStore, collection: Optional[str] = None,
                       abbreviations: Optional[frozenset[str]] = None,
                       progress=None) -> int:
    """Segment every document of a collection (or the whole corpus).

    ``progress`` is an optional callable ``(done, total)`` invoked after
    each document. Returns the number of documents processed.
    """
    doc_ids = store.resolve(collection)
    for i, doc_id in enumerate(doc_ids):
        segment_document(store, doc_id, abbreviations)
        if progress is not None:
            progress(i + 1, len(doc_ids))
    return len(doc_ids)


class SentenceCorpus:
    """Tokenized view of a sub-collection: per-document sentences of forms.

    This is the input representation of all lexicometric and model
    operations; it can be built from the store (requires segmentation) or
    constructed directly from lists in tests.
    """

    def __init__(self, doc_ids: list[str],
                 sentences: list[list[list[str]]],
                 dates: Optional[list[dt.date]] = None):
        if len(doc_ids) != len(sentences):
            raise ValueError("doc_ids and sentences length mismatch")
        if dates is not None and len(dates) != len(doc_ids):
            raise ValueError("doc_ids and dates length mismatch")
        self.doc_ids = doc_ids
        self.sentences = sentences
        self.dates = dates
        self._index = {doc_id: i for i, doc_id in enumerate(doc_ids)}

    @classmethod
    def from_store(cls, store: CorpusStore, collection: Optional[str] = None,
                   drop_punctuation: bool = True) -> "SentenceCorpus":
        """Load the tokenized view of a collection.

        Raises ValueError naming every document that has not been
        segmented yet.
        """
        doc_ids = store.resolve(collection)
        missing = []
        sentences: list[list[list[str]]] = []
        dates: list[dt.date] = []
        for doc_id in doc_ids:
            doc = store.get_document(doc_id)
            if not (doc.has_layer(SENTENCE_LAYER) and doc.has_layer(TOKEN_LAYER)):
                missing.append(doc_id)
                continue
            doc_sents: list[list[str]] = []
            tokens = doc.layer(TOKEN_LAYER)
            for sent in doc.layer(SENTENCE_LAYER):
                forms = [t.attrs["form"] for t in tokens
                         if sent.begin <= t.begin and t.end <= sent.end
                         and not (drop_punctuation and t.attrs.get("punct"))]
                doc_sents.append(forms)
            sentences.append(doc_sents)
            dates.append(doc.date)
        if missing:
            raise ValueError(
                "documents not segmented: " + ", ".join(sorted(missing)))
        return cls(doc_ids, sentences, dates)

    def __len__(self) -> int:
        return len(self.doc_ids)

    def doc_sentences(self, doc_id: str) -> list[list[str]]:
        return self.sentences[self._index[doc_id]]

    def all_sentences(self) -> Iterable[list[str]]:
        for doc_sents in self.sentences:
            yield from doc_sents

    def doc_tokens(self, doc_id: str) -> list[str]:
        return [form for sent in self.doc_sentences(doc_id) for form in sent]

    def total_tokens(self) -> int:
        return sum(len(s) for s in self.all_sentences())

    def term_frequencies(self) -> dict[str, int]:
        freq: dict[str, int] = {}
        for sent in self.all_sentences():
            for form in sent:
                freq[form] = freq.get(form, 0) + 1
        return freq

    def contains_term(self, term: str) -> bool:
        return any(term in sent for sent in self.all_sentences())


@dataclass
class Vocabulary:
    """Dense 0-based term ids plus corpus/document frequencies.

    Ids are assigned in lexicographic term order, so identical input and
    options always produce the identical vocabulary. ``total_tokens``
    counts every token scanned during the build, including tokens of
    terms that were later excluded.
    """

    term_ids: dict[str, int]
    corpus_freq: dict[str, int]
    doc_freq: dict[str, int]
    total_tokens: int
    terms: list[str] = field(init=False)

    def __post_init__(self):
        self.terms = sorted(self.term_ids, key=self.term_ids.get)

    def __len__(self) -> int:
        return len(self.term_ids)

    def __contains__(self, term: str) -> bool:
        return term in self.term_ids

    def id(self, term: str) -> int:
        return self.term_ids[term]


def build_vocabulary(corpus: SentenceCorpus, min_df: int = 1,
                     stopwords: Iterable[str] = ()) -> Vocabulary:
    """Build a Vocabulary over a tokenized corpus.

    Terms on the stopword list or with document frequency below
    ``min_df`` are excluded. Raises ValueError if nothing survives.
    """
    stopset = set(stopwords)
    corpus_freq: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    total = 0
    for doc_sents in corpus.sentences:
        seen = set()
        for sent in doc_sents:
            for form in sent:
                total += 1
                corpus_freq[form] = corpus_freq.get(form, 0) + 1
                seen.add(form)
        for form in seen:
            doc_freq[form] = doc_freq.get(form, 0) + 1

    kept = sorted(t for t, df in doc_freq.items()
                  if df >= min_df and t not in stopset)
    if not kept:
        raise ValueError("empty vocabulary after filtering")
    return Vocabulary(
        term_ids={t: i for i, t in enumerate(kept)},
        corpus_freq={t: corpus_freq[t] for t in kept},
        doc_freq={t: doc_freq[t] for t in kept},
        total_tokens=total,
    )
