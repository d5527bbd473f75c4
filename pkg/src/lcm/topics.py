"""LDA topic modeling with two inference backends.

``fit_gibbs`` runs a collapsed Gibbs sampler with the full conditional

    p(z_i = k) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)

(all counts excluding token i) and reads point estimates from the final
sweep's counts: theta_dk = (n_dk + alpha) / (len_d + K*alpha) and
phi_kw = (n_kw + beta) / (n_k + V*beta). No separate burn-in is
discarded.

``fit_online`` runs online variational Bayes: per minibatch, the E-step
iterates gamma updates to convergence (mean |delta gamma| < 1e-3), and
the M-step blends the topic-word parameters

    lambda <- (1 - rho_t) * lambda + rho_t * lambda_hat,
    rho_t = (tau0 + t) ** (-kappa).

Both backends are deterministic for a fixed seed. Per-document mixtures
for unseen documents come from a fold-in inference with the topic-word
side frozen.

Time aggregation reports the arithmetic mean theta per date bucket (an
alternative would be the document share of the dominant topic; not
implemented).
"""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.special import psi

from .lexicometrics import bucket_start
from .textproc import SentenceCorpus, Vocabulary, build_vocabulary

GAMMA_CONVERGENCE = 1e-3
MAX_ESTEP_ITER = 100

DEFAULT_KAPPA = 0.7
DEFAULT_TAU0 = 1024
DEFAULT_BATCH_SIZE = 64


def default_alpha(n_topics: int) -> float:
    """Gibbs default document-topic prior (50/K)."""
    return 50.0 / n_topics


def default_online_alpha(n_topics: int) -> float:
    """Online-VB default document-topic prior (1/K); the heavy Gibbs
    default would swamp the variational fold-in on small corpora."""
    return 1.0 / n_topics


DEFAULT_BETA = 0.01


@dataclass
class GibbsCounts:
    """Snapshot of the sampler's count matrices after one sweep."""

    doc_topic: np.ndarray  # D x K
    topic_word: np.ndarray  # K x V
    topic_totals: np.ndarray  # K
    doc_lengths: np.ndarray  # D


@dataclass
class TopicModelState:
    """A fitted topic model: point estimates plus enough to re-derive them."""

    kind: str  # "gibbs" | "online"
    n_topics: int
    alpha: float
    beta: float
    terms: list[str]
    topic_word: np.ndarray  # K x V counts (gibbs) or lambda (online)
    doc_topic: np.ndarray  # D x K theta
    doc_ids: list[str]
    seed: int
    iterations: int
    doc_dates: Optional[list[dt.date]] = None
    assignments: Optional[list[list[int]]] = None  # gibbs only

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def phi(self) -> np.ndarray:
        """Topic-word distributions, rows summing to 1."""
        if self.kind == "gibbs":
            smoothed = self.topic_word + self.beta
        else:
            smoothed = self.topic_word
        return smoothed / smoothed.sum(axis=1, keepdims=True)

    def theta(self) -> np.ndarray:
        return self.doc_topic

    # ------------------------------------------------------------------
    # serialization

    def save(self, path: str | Path) -> None:
        payload = {
            "format": "lcm-topic-model",
            "version": 1,
            "kind": self.kind,
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "iterations": self.iterations,
            "terms": self.terms,
            "topic_word": self.topic_word.tolist(),
            "doc_topic": self.doc_topic.tolist(),
            "doc_ids": self.doc_ids,
            "doc_dates": ([d.isoformat() for d in self.doc_dates]
                          if self.doc_dates is not None else None),
            "assignments": self.assignments,
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "TopicModelState":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != "lcm-topic-model":
            raise ValueError(f"not a topic model file: {path}")
        return cls(
            kind=payload["kind"],
            n_topics=payload["n_topics"],
            alpha=payload["alpha"],
            beta=payload["beta"],
            terms=payload["terms"],
            topic_word=np.array(payload["topic_word"], dtype=np.float64),
            doc_topic=np.array(payload["doc_topic"], dtype=np.float64),
            doc_ids=payload["doc_ids"],
            seed=payload["seed"],
            iterations=payload["iterations"],
            doc_dates=([dt.date.fromisoformat(d) for d in payload["doc_dates"]]
                       if payload["doc_dates"] is not None else None),
            assignments=payload["assignments"],
        )


def docs_to_ids(corpus: SentenceCorpus, vocab: Vocabulary) -> list[list[int]]:
    """Per-document term-id sequences; tokens outside the vocabulary are
    skipped."""
    ids = vocab.term_ids
    return [[ids[form] for sents in doc for form in sents if form in ids]
            for doc in corpus.sentences]


def topic_conditional(doc_counts, word_counts, topic_totals,
                      alpha: float, beta: float, n_terms: int) -> list[float]:
    """Normalized collapsed-Gibbs conditional for one token.

    ``doc_counts[k]``, ``word_counts[k]`` and ``topic_totals[k]`` must
    already exclude the token being sampled.
    """
    weights = [(doc_counts[k] + alpha) * (word_counts[k] + beta)
               / (topic_totals[k] + n_terms * beta)
               for k in range(len(topic_totals))]
    total = sum(weights)
    return [w / total for w in weights]


def _validate_fit_args(corpus: SentenceCorpus, n_topics: int) -> None:
    if n_topics < 1:
        raise ValueError("topic count must be >= 1")
    if len(corpus) == 0:
        raise ValueError("empty collection")


def fit_gibbs(corpus: SentenceCorpus, n_topics: int,
              vocab: Optional[Vocabulary] = None,
              alpha: Optional[float] = None, beta: float = DEFAULT_BETA,
              iterations: int = 500, seed: int = 0,
              on_sweep: Optional[Callable[[int, GibbsCounts], None]] = None
              ) -> TopicModelState:
    """Fit LDA by collapsed Gibbs sampling.

    Identical corpus, options and seed produce a bitwise-identical state.
    ``on_sweep(sweep, counts)`` is invoked after every sweep with a
    snapshot of the count matrices; it doubles as the progress and
    cancellation checkpoint (raise to abort).
    """
    _validate_fit_args(corpus, n_topics)
    if vocab is None:
        vocab = build_vocabulary(corpus)
    if alpha is None:
        alpha = default_alpha(n_topics)
    if alpha <= 0 or beta <= 0:
        raise ValueError("priors must be positive")

    docs = docs_to_ids(corpus, vocab)
    n_terms = len(vocab)
    rng = np.random.default_rng(seed)

    doc_of: list[int] = []
    word_of: list[int] = []
    for d, tokens in enumerate(docs):
        doc_of.extend([d] * len(tokens))
        word_of.extend(tokens)
    n_tokens = len(doc_of)
    z = list(rng.integers(0, n_topics, n_tokens)) if n_tokens else []

    n_docs = len(docs)
    ndk = [[0] * n_topics for _ in range(n_docs)]
    nwk = [[0] * n_topics for _ in range(n_terms)]  # V x K for row locality
    nk = [0] * n_topics
    for i in range(n_tokens):
        k = z[i]
        ndk[doc_of[i]][k] += 1
        nwk[word_of[i]][k] += 1
        nk[k] += 1

    vbeta = n_terms * beta
    doc_lengths = np.array([len(t) for t in docs], dtype=np.int64)
    cum = [0.0] * n_topics
    topics = range(n_topics)
    for sweep in range(1, iterations + 1):
        u = rng.random(n_tokens)
        for i in range(n_tokens):
            d = doc_of[i]
            w = word_of[i]
            k = z[i]
            row_d = ndk[d]
            col_w = nwk[w]
            row_d[k] -= 1
            col_w[k] -= 1
            nk[k] -= 1
            total = 0.0
            for j in topics:
                total += ((row_d[j] + alpha) * (col_w[j] + beta)
                          / (nk[j] + vbeta))
                cum[j] = total
            x = u[i] * total
            new_k = 0
            while cum[new_k] < x:
                new_k += 1
            z[i] = new_k
            row_d[new_k] += 1
            col_w[new_k] += 1
            nk[new_k] += 1
        if on_sweep is not None:
            on_sweep(sweep, GibbsCounts(
                doc_topic=np.array(ndk, dtype=np.int64),
                topic_word=np.array(nwk, dtype=np.int64).T.copy(),
                topic_totals=np.array(nk, dtype=np.int64),
                doc_lengths=doc_lengths))

    ndk_arr = np.array(ndk, dtype=np.float64) if n_docs else np.zeros((0, n_topics))
    theta = (ndk_arr + alpha) / (doc_lengths[:, None] + n_topics * alpha)
    topic_word = (np.array(nwk, dtype=np.float64).T.copy()
                  if n_terms else np.zeros((n_topics, 0)))

    assignments: list[list[int]] = [[] for _ in range(n_docs)]
    for i in range(n_tokens):
        assignments[doc_of[i]].append(int(z[i]))

    return TopicModelState(
        kind="gibbs", n_topics=n_topics, alpha=alpha, beta=beta,
        terms=list(vocab.terms), topic_word=topic_word, doc_topic=theta,
        doc_ids=list(corpus.doc_ids), seed=seed, iterations=iterations,
        doc_dates=list(corpus.dates) if corpus.dates is not None else None,
        assignments=assignments)


# ----------------------------------------------------------------------
# online variational Bayes

def learning_rate(t: int, kappa: float = DEFAULT_KAPPA,
                  tau0: float = DEFAULT_TAU0) -> float:
    """Step size rho_t = (tau0 + t) ** (-kappa) of the t-th update."""
    return (tau0 + t) ** (-kappa)


def _dirichlet_expectation(x: np.ndarray) -> np.ndarray:
    if x.ndim == 1:
        return psi(x) - psi(x.sum())
    return psi(x) - psi(x.sum(axis=1))[:, None]


def _doc_counts(tokens: list[int]) -> tuple[np.ndarray, np.ndarray]:
    ids, counts = np.unique(np.array(tokens, dtype=np.int64), return_counts=True)
    return ids, counts.astype(np.float64)


def e_step(lam: np.ndarray, docs: list[list[int]], alpha: float
           ) -> tuple[np.ndarray, np.ndarray]:
    """Variational E-step over a document batch with fixed lambda.

    Returns (gamma, sstats): the converged per-document variational
    Dirichlet parameters, and the unscaled sufficient statistics
    sum_d n_dw * phi_dwk (lambda_hat = eta + (D/|batch|) * sstats).
    """
    n_topics, n_terms = lam.shape
    exp_elog_beta = np.exp(_dirichlet_expectation(lam))
    gamma = np.zeros((len(docs), n_topics))
    sstats = np.zeros_like(lam)
    for d, tokens in enumerate(docs):
        if not tokens:
            gamma[d] = alpha
            continue
        ids, counts = _doc_counts(tokens)
        gammad = np.full(n_topics, alpha + len(tokens) / n_topics)
        exp_elog_theta = np.exp(_dirichlet_expectation(gammad))
        exp_elog_beta_d = exp_elog_beta[:, ids]
        phinorm = exp_elog_theta @ exp_elog_beta_d + 1e-100
        for _ in range(MAX_ESTEP_ITER):
            last = gammad
            gammad = alpha + exp_elog_theta * (
                (counts / phinorm) @ exp_elog_beta_d.T)
            exp_elog_theta = np.exp(_dirichlet_expectation(gammad))
            phinorm = exp_elog_theta @ exp_elog_beta_d + 1e-100
            if np.mean(np.abs(gammad - last)) < GAMMA_CONVERGENCE:
                break
        gamma[d] = gammad
        sstats[:, ids] += np.outer(exp_elog_theta, counts / phinorm)
    sstats *= exp_elog_beta
    return gamma, sstats


def fit_online(corpus: SentenceCorpus, n_topics: int,
               vocab: Optional[Vocabulary] = None,
               alpha: Optional[float] = None, beta: float = DEFAULT_BETA,
               batch_size: int = DEFAULT_BATCH_SIZE,
               kappa: float = DEFAULT_KAPPA, tau0: float = DEFAULT_TAU0,
               passes: int = 1, seed: int = 0,
               on_batch: Optional[Callable[[int, int], None]] = None
               ) -> TopicModelState:
    """Fit LDA by online variational Bayes (minibatch stochastic updates).

    ``on_batch(done, total)`` is the progress/cancellation checkpoint,
    called after each minibatch update.
    """
    _validate_fit_args(corpus, n_topics)
    if not 0.5 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0.5, 1]")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    if vocab is None:
        vocab = build_vocabulary(corpus)
    if alpha is None:
        alpha = default_online_alpha(n_topics)
    if alpha <= 0 or beta <= 0:
        raise ValueError("priors must be positive")

    docs = docs_to_ids(corpus, vocab)
    n_docs = len(docs)
    n_terms = len(vocab)
    rng = np.random.default_rng(seed)
    lam = rng.gamma(100.0, 1.0 / 100.0, (n_topics, n_terms))

    batches = [docs[i:i + batch_size] for i in range(0, n_docs, batch_size)]
    total_updates = len(batches) * passes
    t = 0
    for _ in range(passes):
        for batch in batches:
            _, sstats = e_step(lam, batch, alpha)
            lam_hat = beta + (n_docs / len(batch)) * sstats
            rho = learning_rate(t, kappa, tau0)
            lam = (1.0 - rho) * lam + rho * lam_hat
            t += 1
            if on_batch is not None:
                on_batch(t, total_updates)

    gamma, _ = e_step(lam, docs, alpha)
    theta = gamma / gamma.sum(axis=1, keepdims=True)

    return TopicModelState(
        kind="online", n_topics=n_topics, alpha=alpha, beta=beta,
        terms=list(vocab.terms), topic_word=lam, doc_topic=theta,
        doc_ids=list(corpus.doc_ids), seed=seed, iterations=passes,
        doc_dates=list(corpus.dates) if corpus.dates is not None else None)


def infer_theta(state: TopicModelState, tokens: list[str | int]) -> np.ndarray:
    """Fold in one unseen document: its topic mixture under a frozen model.

    Accepts surface forms or term ids; unknown forms are skipped. The
    gibbs backend uses a deterministic fixed-point EM on phi; the online
    backend runs the variational E-step with frozen lambda.
    """
    term_ids = {t: i for i, t in enumerate(state.terms)}
    ids: list[int] = []
    for tok in tokens:
        if isinstance(tok, str):
            if tok in term_ids:
                ids.append(term_ids[tok])
        elif 0 <= int(tok) < state.n_terms:
            ids.append(int(tok))

    if state.kind == "online":
        gamma, _ = e_step(state.topic_word, [ids], state.alpha)
        return (gamma[0] / gamma[0].sum()).astype(np.float64)

    phi = state.phi()
    if not ids:
        return np.full(state.n_topics, 1.0 / state.n_topics)
    uniq, counts = _doc_counts(ids)
    theta = np.full(state.n_topics, 1.0 / state.n_topics)
    for _ in range(MAX_ESTEP_ITER):
        resp = phi[:, uniq] * theta[:, None]  # K x unique
        resp /= resp.sum(axis=0, keepdims=True)
        new = state.alpha + resp @ counts
        new /= new.sum()
        if np.abs(new - theta).mean() < GAMMA_CONVERGENCE * 1e-2:
            theta = new
            break
        theta = new
    return theta


def heldout_log_likelihood(state: TopicModelState,
                           docs: list[list[str | int]]) -> float:
    """Per-word log-likelihood of held-out documents under the model.

    Each document's mixture is folded in with the topic-word side frozen;
    the score is sum log p(w | theta_hat, phi) / total tokens.
    """
    phi = state.phi()
    term_ids = {t: i for i, t in enumerate(state.terms)}
    total_ll = 0.0
    total_tokens = 0
    for tokens in docs:
        ids = [term_ids[t] if isinstance(t, str) else int(t)
               for t in tokens
               if (t in term_ids if isinstance(t, str) else 0 <= int(t) < state.n_terms)]
        if not ids:
            continue
        theta = infer_theta(state, ids)
        word_probs = theta @ phi[:, ids]
        total_ll += float(np.log(word_probs).sum())
        total_tokens += len(ids)
    if total_tokens == 0:
        raise ValueError("no scoreable tokens in held-out documents")
    return total_ll / total_tokens


# ----------------------------------------------------------------------
# summaries and filtering

def top_words(state: TopicModelState, k: int, n: int = 10) -> list[tuple[str, float]]:
    """The n highest-probability terms of topic k, ties broken by term id."""
    if not 0 <= k < state.n_topics:
        raise ValueError(f"topic {k} out of range [0, {state.n_topics})")
    phi_k = state.phi()[k]
    order = np.lexsort((np.arange(len(phi_k)), -phi_k))
    return [(state.terms[i], float(phi_k[i])) for i in order[:n]]


def topics_over_time(state: TopicModelState, bucketing: str = "year"
                     ) -> list[tuple[dt.date, np.ndarray]]:
    """Mean topic mixture per date bucket, for buckets containing docs."""
    if state.doc_dates is None:
        raise ValueError(
            "undated documents: " + ", ".join(state.doc_ids[:10]))
    buckets: dict[dt.date, list[int]] = {}
    for i, date in enumerate(state.doc_dates):
        buckets.setdefault(bucket_start(date, bucketing), []).append(i)
    out = []
    for bucket in sorted(buckets):
        rows = state.doc_topic[buckets[bucket]]
        out.append((bucket, rows.mean(axis=0)))
    return out


def filter_by_topic(state: TopicModelState, k: int,
                    threshold: Optional[float] = None,
                    top_r: Optional[int] = None,
                    complement: bool = False) -> list[str]:
    """Document ids whose mixture weight on topic k passes the selector.

    Exactly one of ``threshold`` (theta_dk >= threshold) or ``top_r``
    (the r highest theta_dk) must be given; ``complement`` inverts the
    selection for exclusion filtering.
    """
    if not 0 <= k < state.n_topics:
        raise ValueError(f"topic {k} out of range [0, {state.n_topics})")
    if (threshold is None) == (top_r is None):
        raise ValueError("exactly one of threshold or top_r must be given")
    weights = state.doc_topic[:, k]
    if threshold is not None:
        chosen = {i for i in range(len(weights)) if weights[i] >= threshold}
    else:
        order = sorted(range(len(weights)), key=lambda i: (-weights[i], state.doc_ids[i]))
        chosen = set(order[:top_r])
    if complement:
        chosen = set(range(len(weights))) - chosen
    return [doc_id for i, doc_id in enumerate(state.doc_ids) if i in chosen]
