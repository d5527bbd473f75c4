"""Shared verification harnesses: independent oracles used by module and
acceptance tests. Nothing here imports the implementation's internals."""

from collections import Counter

import numpy as np
from scipy.special import logsumexp, psi


def greedy_topic_alignment(fitted_top_words, generator_vocabs):
    """Greedily match fitted topics to generator topics by top-word overlap.

    fitted_top_words: list over topics of term lists (top n each).
    generator_vocabs: list over topics of full vocab sets.
    Returns the mean overlap fraction over matched pairs.
    """
    n = len(fitted_top_words)
    remaining_fit = set(range(n))
    remaining_gen = set(range(len(generator_vocabs)))
    overlaps = []
    while remaining_fit and remaining_gen:
        best = None
        for k in remaining_fit:
            words = set(fitted_top_words[k])
            for g in remaining_gen:
                frac = len(words & set(generator_vocabs[g])) / max(len(words), 1)
                if best is None or frac > best[0]:
                    best = (frac, k, g)
        frac, k, g = best
        overlaps.append(frac)
        remaining_fit.discard(k)
        remaining_gen.discard(g)
    return float(np.mean(overlaps))


def oracle_batch_e_step(lam, docs, alpha, max_iter=100, tol=1e-3):
    """Plain batch variational E-step, written from the update equations.

    Returns (gamma, sstats) where sstats_kw = sum_d n_dw * phi_dwk with
    phi from each document's converged gamma.
    """
    n_topics, n_terms = lam.shape
    elog_beta = psi(lam) - psi(lam.sum(axis=1))[:, None]
    gamma_out = np.zeros((len(docs), n_topics))
    sstats = np.zeros((n_topics, n_terms))
    for d, tokens in enumerate(docs):
        if not tokens:
            gamma_out[d] = alpha
            continue
        counts = Counter(tokens)
        gamma = np.full(n_topics, alpha + len(tokens) / n_topics)
        for _ in range(max_iter):
            elog_theta = psi(gamma) - psi(gamma.sum())
            new_gamma = np.full(n_topics, float(alpha))
            for w, c in counts.items():
                log_phi = elog_theta + elog_beta[:, w]
                phi = np.exp(log_phi - logsumexp(log_phi))
                new_gamma += c * phi
            done = np.abs(new_gamma - gamma).mean() < tol
            gamma = new_gamma
            if done:
                break
        gamma_out[d] = gamma
        elog_theta = psi(gamma) - psi(gamma.sum())
        for w, c in counts.items():
            log_phi = elog_theta + elog_beta[:, w]
            phi = np.exp(log_phi - logsumexp(log_phi))
            sstats[:, w] += c * phi
    return gamma_out, sstats
