"""Fit LDA with both inference backends on a synthetic corpus.

The corpus is drawn from three topics with disjoint vocabularies, so a
good fit should reassemble them. Shows collapsed Gibbs sampling, online
variational Bayes (with its decaying step size), top-word summaries,
topic shares over time, and topic-based document filtering.
"""

import numpy as np

from lcm.datagen import topic_corpus, topic_corpus_sentences
from lcm.topics import (filter_by_topic, fit_gibbs, fit_online,
                        heldout_log_likelihood, learning_rate, top_words,
                        topics_over_time)

synthetic = topic_corpus(n_topics=3, words_per_topic=30, n_docs=150,
                         doc_len=50, seed=0)
corpus = topic_corpus_sentences(synthetic)
print(f"synthetic corpus: {len(corpus)} docs, "
      f"{corpus.total_tokens()} tokens, 3 planted topics\n")

print("collapsed Gibbs (K=3, 300 sweeps, seed 42):")
gibbs = fit_gibbs(corpus, n_topics=3, iterations=300, seed=42)
for k in range(3):
    words = ", ".join(t for t, _ in top_words(gibbs, k, 8))
    print(f"  topic {k}: {words}")

print("\nonline variational Bayes (K=3, 5 passes, batch 64):")
print("  step sizes rho_t:",
      ", ".join(f"{learning_rate(t):.5f}" for t in range(5)))
online = fit_online(corpus, n_topics=3, passes=5, seed=42)
for k in range(3):
    words = ", ".join(t for t, _ in top_words(online, k, 8))
    print(f"  topic {k}: {words}")

held_out = topic_corpus(n_topics=3, words_per_topic=30, n_docs=20,
                        doc_len=50, seed=999).docs
for passes in (1, 5):
    state = fit_online(corpus, n_topics=3, passes=passes, seed=42)
    ll = heldout_log_likelihood(state, held_out)
    print(f"  held-out per-word log-likelihood after pass {passes}: {ll:.4f}")

print("\nmean topic shares per month (first 4 buckets):")
for bucket, shares in topics_over_time(gibbs, "month")[:4]:
    rendered = "  ".join(f"{s:.2f}" for s in shares)
    print(f"  {bucket.isoformat()}  [{rendered}]")

strong = filter_by_topic(gibbs, 0, threshold=0.5)
rest = filter_by_topic(gibbs, 0, threshold=0.5, complement=True)
print(f"\ndocuments with topic-0 share >= 0.5: {len(strong)}"
      f" (complement: {len(rest)})")
assert len(strong) + len(rest) == len(corpus)

theta = gibbs.theta()
print(f"theta row sums: max deviation from 1 is "
      f"{np.abs(theta.sum(axis=1) - 1).max():.2e}")
