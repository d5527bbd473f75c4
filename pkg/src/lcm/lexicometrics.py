"""Corpus-linguistic statistics: frequency series, co-occurrence, key terms.

The context unit for co-occurrence is the sentence, and occurrence is
boolean per sentence (multiplicity ignored). Five significance measures
score a 2x2 contingency table of sentence counts:

    count    = n_ab
    dice     = 2*n_ab / (n_a + n_b)
    tanimoto = n_ab / (n_a + n_b - n_ab)           (Jaccard form)
    mi       = log2(n_ab * N / (n_a * n_b))        (pointwise MI)
    loglik   = Dunning's G2 over the 2x2 table

Key-term extraction compares term frequencies between a target and a
reference collection with the same G2 statistic (keyness), signed
negative when the term is relatively rarer in the target.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .textproc import SentenceCorpus

MEASURES = ("count", "tanimoto", "dice", "mi", "loglik")

BUCKETINGS = ("day", "week", "month", "year")


@dataclass(frozen=True)
class ContingencyCounts:
    """Sentence-level contingency counts for a term pair.

    N sentences total; n_a / n_b contain term a / b; n_ab contain both.
    """

    N: int
    n_a: int
    n_b: int
    n_ab: int

    def __post_init__(self):
        if min(self.N, self.n_a, self.n_b, self.n_ab) < 0:
            raise ValueError("negative contingency count")
        if self.n_ab > min(self.n_a, self.n_b) or max(self.n_a, self.n_b) > self.N:
            raise ValueError(f"inconsistent contingency counts: {self}")


def _xlogx(o: float, e: float) -> float:
    # 0*ln(0) == 0 by convention
    return 0.0 if o == 0 else o * math.log(o / e)


def log_likelihood(table: tuple[tuple[float, float], tuple[float, float]]) -> float:
    """Dunning's G2 for a 2x2 observed table, E_ij = row_i*col_j/N."""
    (o11, o12), (o21, o22) = table
    n = o11 + o12 + o21 + o22
    if n == 0:
        raise ValueError("empty contingency table")
    r1, r2 = o11 + o12, o21 + o22
    c1, c2 = o11 + o21, o12 + o22
    g = 0.0
    for o, r, c in ((o11, r1, c1), (o12, r1, c2), (o21, r2, c1), (o22, r2, c2)):
        e = r * c / n
        g += _xlogx(o, e)
    return 2.0 * g


def significance(counts: ContingencyCounts, measure: str) -> float:
    """Score a contingency table with one of the five measures.

    dice/tanimoto/mi are undefined when either marginal is zero; loglik
    requires N > 0. mi is -inf when the pair never co-occurs.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r} (one of {MEASURES})")
    N, n_a, n_b, n_ab = counts.N, counts.n_a, counts.n_b, counts.n_ab
    if measure == "count":
        return float(n_ab)
    if measure == "loglik":
        return log_likelihood(((n_ab, n_a - n_ab),
                               (n_b - n_ab, N - n_a - n_b + n_ab)))
    if n_a == 0 or n_b == 0:
        raise ValueError(f"{measure} undefined for zero marginal counts")
    if measure == "dice":
        return 2.0 * n_ab / (n_a + n_b)
    if measure == "tanimoto":
        return n_ab / (n_a + n_b - n_ab)
    # mi
    if n_ab == 0:
        return float("-inf")
    return math.log2(n_ab * N / (n_a * n_b))


def _sentence_sets(corpus: SentenceCorpus) -> tuple[int, dict[str, set[int]]]:
    """Total sentence count and term -> set of global sentence indexes."""
    occurs: dict[str, set[int]] = {}
    idx = 0
    for sent in corpus.all_sentences():
        for form in set(sent):
            occurs.setdefault(form, set()).add(idx)
        idx += 1
    return idx, occurs


def cooccurrence_counts(corpus: SentenceCorpus, a: str, b: str) -> ContingencyCounts:
    """Sentence-level contingency counts for the pair (a, b).

    A term occurs in a sentence if at least one token matches; a == b
    yields n_ab == n_a. Unknown terms are an error.
    """
    n, occurs = _sentence_sets(corpus)
    for term in (a, b):
        if term not in occurs:
            raise ValueError(f"unknown term {term!r}")
    sa, sb = occurs[a], occurs[b]
    return ContingencyCounts(N=n, n_a=len(sa), n_b=len(sb), n_ab=len(sa & sb))


# ----------------------------------------------------------------------
# frequency time series

@dataclass(frozen=True)
class FrequencyPoint:
    bucket: dt.date
    absolute: int
    relative: float


@dataclass
class FrequencySeries:
    term: str
    bucketing: str
    mode: str
    points: list[FrequencyPoint]

    def values(self) -> list[float]:
        if self.mode == "relative":
            return [p.relative for p in self.points]
        return [float(p.absolute) for p in self.points]


def bucket_start(date: dt.date, bucketing: str) -> dt.date:
    if bucketing == "day":
        return date
    if bucketing == "week":
        return date - dt.timedelta(days=date.weekday())
    if bucketing == "month":
        return date.replace(day=1)
    if bucketing == "year":
        return date.replace(month=1, day=1)
    raise ValueError(f"unknown bucketing {bucketing!r} (one of {BUCKETINGS})")


def next_bucket(start: dt.date, bucketing: str) -> dt.date:
    if bucketing == "day":
        return start + dt.timedelta(days=1)
    if bucketing == "week":
        return start + dt.timedelta(days=7)
    if bucketing == "month":
        return (start.replace(day=28) + dt.timedelta(days=4)).replace(day=1)
    return start.replace(year=start.year + 1)


def frequency_series(corpus: SentenceCorpus, term: str, bucketing: str = "year",
                     mode: str = "absolute") -> FrequencySeries:
    """Per-bucket absolute counts and relative frequencies of one term.

    Buckets with zero occurrences between the first and last occurrence
    are included. relative = count / total tokens in the bucket.
    """
    if mode not in ("absolute", "relative"):
        raise ValueError(f"unknown mode {mode!r}")
    if bucketing not in BUCKETINGS:
        raise ValueError(f"unknown bucketing {bucketing!r} (one of {BUCKETINGS})")
    if corpus.dates is None:
        raise ValueError("corpus carries no dates")

    counts: dict[dt.date, int] = {}
    totals: dict[dt.date, int] = {}
    found = False
    for i, doc_sents in enumerate(corpus.sentences):
        bucket = bucket_start(corpus.dates[i], bucketing)
        for sent in doc_sents:
            totals[bucket] = totals.get(bucket, 0) + len(sent)
            for form in sent:
                if form == term:
                    counts[bucket] = counts.get(bucket, 0) + 1
                    found = True
    if not found:
        raise ValueError(f"unknown term {term!r}")

    first, last = min(counts), max(counts)
    points = []
    bucket = first
    while bucket <= last:
        absolute = counts.get(bucket, 0)
        total = totals.get(bucket, 0)
        points.append(FrequencyPoint(
            bucket=bucket, absolute=absolute,
            relative=absolute / total if total else 0.0))
        bucket = next_bucket(bucket, bucketing)
    return FrequencySeries(term=term, bucketing=bucketing, mode=mode, points=points)


def series_to_csv(series: FrequencySeries) -> str:
    lines = ["bucket,absolute,relative"]
    for p in series.points:
        lines.append(f"{p.bucket.isoformat()},{p.absolute},{p.relative:.10g}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# co-occurrence graphs

@dataclass
class CoocEdge:
    source: str
    target: str
    score: float
    n_ab: int


@dataclass
class CoocGraph:
    measure: str
    nodes: list[str]
    edges: list[CoocEdge]

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "nodes": [{"id": n} for n in self.nodes],
            "edges": [{"source": e.source, "target": e.target,
                       "score": e.score, "count": e.n_ab}
                      for e in self.edges],
        }

    def to_dot(self) -> str:
        lines = ["graph cooccurrence {"]
        for n in self.nodes:
            lines.append(f'  "{n}";')
        for e in self.edges:
            lines.append(f'  "{e.source}" -- "{e.target}" '
                         f'[weight={e.score:.4f}, label="{e.score:.3f}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def cooccurrence_graph(corpus: SentenceCorpus, seeds: Iterable[str],
                       measure: str = "loglik", top_k: int = 10,
                       min_count: int = 1) -> CoocGraph:
    """Top-k co-occurrence partners per seed term, scored by ``measure``.

    Only partners actually sharing at least max(1, min_count) sentences
    with the seed are candidates. Ties are broken by term order (which
    equals vocabulary-id order).
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r} (one of {MEASURES})")
    n, occurs = _sentence_sets(corpus)
    min_count = max(1, min_count)
    nodes: dict[str, None] = {}
    edges: list[CoocEdge] = []
    for seed in seeds:
        if seed not in occurs:
            raise ValueError(f"unknown seed term {seed!r}")
        nodes.setdefault(seed)
        scored = []
        s_seed = occurs[seed]
        for partner, s_partner in occurs.items():
            if partner == seed:
                continue
            n_ab = len(s_seed & s_partner)
            if n_ab < min_count:
                continue
            counts = ContingencyCounts(N=n, n_a=len(s_seed),
                                       n_b=len(s_partner), n_ab=n_ab)
            scored.append((partner, significance(counts, measure), n_ab))
        scored.sort(key=lambda item: (-item[1], item[0]))
        for partner, score, n_ab in scored[:top_k]:
            nodes.setdefault(partner)
            edges.append(CoocEdge(source=seed, target=partner,
                                  score=score, n_ab=n_ab))
    return CoocGraph(measure=measure, nodes=list(nodes), edges=edges)


# ----------------------------------------------------------------------
# key terms

@dataclass
class KeyTerm:
    term: str
    keyness: float
    target_freq: int
    reference_freq: int


def extract_keyterms(target: SentenceCorpus, reference: SentenceCorpus,
                     top_k: int = 500,
                     stopwords: Iterable[str] = ()) -> list[KeyTerm]:
    """Rank terms of the target collection by keyness against a reference.

    Keyness is G2 over the table [term freq in target, term freq in
    reference; other-token totals], signed negative when the term's
    relative frequency in the target is below the reference. Only terms
    occurring in the target are ranked; the top_k highest are returned
    (the full ranking if top_k exceeds it).
    """
    stopset = set(stopwords)
    tf_target = target.term_frequencies()
    tf_reference = reference.term_frequencies()
    total_t = sum(tf_target.values())
    total_r = sum(tf_reference.values())
    if total_t == 0:
        raise ValueError("empty target collection")
    if total_r == 0:
        raise ValueError("empty reference collection")

    ranked = []
    for term, f_t in tf_target.items():
        if term in stopset:
            continue
        f_r = tf_reference.get(term, 0)
        g = log_likelihood(((f_t, f_r), (total_t - f_t, total_r - f_r)))
        if f_t / total_t < f_r / total_r:
            g = -g
        ranked.append(KeyTerm(term=term, keyness=g,
                              target_freq=f_t, reference_freq=f_r))
    ranked.sort(key=lambda kt: (-kt.keyness, kt.term))
    return ranked[:top_k]


def keyterms_to_json(terms: list[KeyTerm]) -> str:
    return json.dumps([{"term": t.term, "keyness": t.keyness,
                        "target_freq": t.target_freq,
                        "reference_freq": t.reference_freq}
                       for t in terms], indent=2)
