"""Corpus-linguistic statistics on a collection.

Walks through term frequency time series (absolute and relative),
sentence co-occurrence with the five significance measures, the
co-occurrence graph export, and key-term extraction between a target
and a reference collection.
"""

import tempfile
from pathlib import Path

from lcm.datagen import workflow_corpus
from lcm.lexicometrics import (cooccurrence_counts, cooccurrence_graph,
                               extract_keyterms, frequency_series,
                               series_to_csv, significance)
from lcm.store import CorpusStore
from lcm.textproc import SentenceCorpus, segment_collection

with tempfile.TemporaryDirectory() as tmp:
    ref_path, target_path = workflow_corpus(tmp, n_reference=8, n_target=120)
    store = CorpusStore(Path(tmp) / "corpus.db")
    store.ingest(ref_path)
    store.ingest(target_path)
    segment_collection(store)

    corpus = SentenceCorpus.from_store(store)

    print("frequency of 'market' per year:")
    series = frequency_series(corpus, "market", bucketing="year")
    for point in series.points:
        bar = "#" * point.absolute
        print(f"  {point.bucket.year}  {point.absolute:3d} "
              f"({point.relative:.4f})  {bar}")
    print("\nCSV head:")
    print("\n".join(series_to_csv(series).splitlines()[:4]))

    print("\nsentence co-occurrence of (market, growth):")
    counts = cooccurrence_counts(corpus, "market", "growth")
    print(f"  N={counts.N} n_a={counts.n_a} n_b={counts.n_b} "
          f"n_ab={counts.n_ab}")
    for measure in ("count", "dice", "tanimoto", "mi", "loglik"):
        print(f"  {measure:10s} {significance(counts, measure):9.4f}")

    print("\nco-occurrence graph around two seeds (log-likelihood):")
    graph = cooccurrence_graph(corpus, ["market", "welfare"],
                               measure="loglik", top_k=4, min_count=2)
    for edge in graph.edges:
        print(f"  {edge.source:10s} -- {edge.target:15s} "
              f"{edge.score:8.2f}  (shared sentences: {edge.n_ab})")
    print("\nDOT export head:")
    print("\n".join(graph.to_dot().splitlines()[:4]))

    # keyness: what characterizes the reference register against the
    # general target corpus?
    reference = SentenceCorpus.from_store(
        store, store.create_subcollection(
            "refs", [d for d in store.document_ids()
                     if d.startswith("ref")], "manual").name)
    target = SentenceCorpus.from_store(
        store, store.create_subcollection(
            "arts", [d for d in store.document_ids()
                     if d.startswith("art")], "manual").name)
    print("\ntop key terms of the reference register:")
    for kt in extract_keyterms(reference, target, top_k=8):
        print(f"  {kt.keyness:8.2f}  {kt.term:15s} "
              f"({kt.target_freq} vs {kt.reference_freq})")
    store.close()
