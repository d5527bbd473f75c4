"""Synthetic corpus generators for demos and verification harnesses.

Everything here is seeded and deterministic: topic-recovery corpora with
disjoint per-topic vocabularies, planted dictionary-retrieval corpora
(reference-derived documents hidden among shuffled-vocabulary
distractors), and a small two-register workflow corpus.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class SyntheticTopicCorpus:
    """Documents drawn from K disjoint-vocabulary topics."""

    docs: list[list[str]]  # token sequences
    topic_vocab: list[list[str]]  # per-topic word lists
    doc_topic: list[np.ndarray]  # generator mixtures


def topic_corpus(n_topics: int = 3, words_per_topic: int = 30,
                 n_docs: int = 150, doc_len: int = 50,
                 alpha: float = 0.1, seed: int = 0) -> SyntheticTopicCorpus:
    """Generate an LDA corpus whose topics use disjoint vocabularies."""
    rng = np.random.default_rng(seed)
    topic_vocab = [[f"t{k}w{j:02d}" for j in range(words_per_topic)]
                   for k in range(n_topics)]
    docs = []
    mixtures = []
    for _ in range(n_docs):
        theta = rng.dirichlet([alpha] * n_topics)
        mixtures.append(theta)
        tokens = []
        for _ in range(doc_len):
            k = rng.choice(n_topics, p=theta)
            tokens.append(topic_vocab[k][rng.integers(0, words_per_topic)])
        docs.append(tokens)
    return SyntheticTopicCorpus(docs=docs, topic_vocab=topic_vocab,
                                doc_topic=mixtures)


def _sentences_of(tokens: list[str], sentence_len: int = 10) -> list[list[str]]:
    return [tokens[i:i + sentence_len]
            for i in range(0, len(tokens), sentence_len)]


def topic_corpus_sentences(corpus: SyntheticTopicCorpus,
                           sentence_len: int = 10):
    """SentenceCorpus view of a synthetic topic corpus."""
    from .textproc import SentenceCorpus
    return SentenceCorpus(
        doc_ids=[f"doc{i:03d}" for i in range(len(corpus.docs))],
        sentences=[_sentences_of(tokens, sentence_len)
                   for tokens in corpus.docs],
        dates=[dt.date(2000, 1, 1) + dt.timedelta(days=i)
               for i in range(len(corpus.docs))])


# ----------------------------------------------------------------------
# planted retrieval corpus

@dataclass
class PlantedCorpus:
    """Reference docs, planted relevant docs, and distractors."""

    reference: list[list[list[str]]]  # per doc: sentences of forms
    target: list[list[list[str]]]
    target_ids: list[str]
    planted_ids: list[str]


def planted_corpus(n_planted: int = 5, n_distractors: int = 45,
                   seed: int = 0) -> PlantedCorpus:
    """Build a retrieval test bed with an unambiguous relevant set.

    Reference documents use a dedicated vocabulary with stable
    co-occurrence pairs; planted target documents are sampled from the
    reference sentences, while distractors draw on a disjoint vocabulary
    so they contain no dictionary term at all.
    """
    rng = np.random.default_rng(seed)
    ref_vocab = [f"ref{j:02d}" for j in range(20)]
    noise_vocab = [f"noise{j:02d}" for j in range(40)]

    # reference: sentences pairing consecutive vocabulary words, so the
    # dictionary terms have sharp context profiles
    reference = []
    for d in range(6):
        sents = []
        for s in range(8):
            base = (2 * (d + s)) % len(ref_vocab)
            sents.append([ref_vocab[base], ref_vocab[(base + 1) % len(ref_vocab)],
                          ref_vocab[(base + 2) % len(ref_vocab)]])
        reference.append(sents)

    ref_sentences = [s for doc in reference for s in doc]
    target = []
    target_ids = []
    planted_ids = []
    for i in range(n_planted):
        picks = rng.choice(len(ref_sentences), size=6, replace=False)
        doc_id = f"planted{i:02d}"
        target.append([list(ref_sentences[p]) for p in picks])
        target_ids.append(doc_id)
        planted_ids.append(doc_id)
    for i in range(n_distractors):
        sents = []
        for _ in range(6):
            sents.append([noise_vocab[rng.integers(0, len(noise_vocab))]
                          for _ in range(5)])
        target.append(sents)
        target_ids.append(f"distractor{i:02d}")
    return PlantedCorpus(reference=reference, target=target,
                         target_ids=target_ids, planted_ids=planted_ids)


# ----------------------------------------------------------------------
# workflow corpus: two modes of speech over a shared filler vocabulary

_REGISTER_A = ["market", "growth", "deregulation", "efficiency", "investment",
               "competition", "privatization", "productivity", "capital",
               "incentive"]
_REGISTER_B = ["welfare", "solidarity", "participation", "community",
               "equality", "rights", "redistribution", "protection",
               "inclusion", "dialogue"]
_FILLER = ["policy", "debate", "reform", "government", "public", "report",
           "question", "measure", "council", "parliament", "minister",
           "decision", "year", "country", "people", "plan"]


def _sentence(rng, register: list[str], register_share: float) -> str:
    words = []
    for _ in range(rng.integers(6, 11)):
        if rng.random() < register_share:
            words.append(register[rng.integers(0, len(register))])
        else:
            words.append(_FILLER[rng.integers(0, len(_FILLER))])
    return " ".join(words).capitalize() + "."


def workflow_corpus(out_dir: str | Path, n_reference: int = 10,
                    n_target: int = 200, seed: int = 7
                    ) -> tuple[Path, Path]:
    """Write reference.jsonl and target.jsonl for the end-to-end workflow.

    The reference corpus speaks register A intensely; half of the target
    documents lean register A (the retrievable half), the rest register
    B. Target dates spread over 2000-2009 so time aggregation has
    something to show.
    """
    rng = np.random.default_rng(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ref_path = out_dir / "reference.jsonl"
    with ref_path.open("w", encoding="utf-8") as fh:
        for i in range(n_reference):
            text = " ".join(_sentence(rng, _REGISTER_A, 0.6)
                            for _ in range(8))
            fh.write(json.dumps({
                "id": f"ref{i:03d}",
                "text": text,
                "date": f"19{90 + i % 10}-01-15",
                "source": "reference",
                "title": f"Reference work {i}",
            }) + "\n")

    target_path = out_dir / "target.jsonl"
    with target_path.open("w", encoding="utf-8") as fh:
        for i in range(n_target):
            lean_a = i % 2 == 0
            register = _REGISTER_A if lean_a else _REGISTER_B
            share = 0.45 if lean_a else 0.4
            text = " ".join(_sentence(rng, register, share)
                            for _ in range(6))
            year = 2000 + (i % 10)
            month = 1 + (i % 12)
            fh.write(json.dumps({
                "id": f"art{i:04d}",
                "text": text,
                "date": f"{year}-{month:02d}-10",
                "source": "ZEIT" if i % 3 else "TAZ",
                "title": f"Article {i}",
                "tags": ["economy" if lean_a else "society"],
            }) + "\n")

    return ref_path, target_path
