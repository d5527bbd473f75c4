"""The annotate-train-review loop at library level.

An analyst defines a two-category system, labels a few sentence ranges,
trains a Naive Bayes model (once plain, once semantically smoothed with
a topic model), reviews a certainty-ranked queue, and watches running
precision; finally the model is evaluated against held-out labels.
"""

import tempfile
from pathlib import Path

from lcm.classify import (CategoryTree, SpanStore, build_queue, evaluate,
                          predict, record_verdict, spans_to_examples, train)
from lcm.datagen import workflow_corpus
from lcm.store import CorpusStore
from lcm.textproc import SentenceCorpus, segment_collection
from lcm.topics import fit_gibbs

with tempfile.TemporaryDirectory() as tmp:
    _, target_path = workflow_corpus(tmp, n_reference=2, n_target=80)
    store = CorpusStore(Path(tmp) / "corpus.db")
    store.ingest(target_path)
    segment_collection(store)

    tree = CategoryTree()
    econ = tree.add("economic framing").id
    soc = tree.add("social framing").id
    print(f"categories: {[(c.id, c.label) for c in tree.nodes()]}")

    # even-numbered generated articles lean the economic register
    spans = SpanStore(store)
    for i in range(0, 12, 2):
        spans.annotate(f"art{i:04d}", 0, 2, econ, tree)
    for i in range(1, 12, 2):
        spans.annotate(f"art{i:04d}", 0, 2, soc, tree)
    training = spans.training_spans()
    print(f"{len(training)} manual spans labeled")

    examples = spans_to_examples(store, training)
    model = train(examples)
    sample = predict(model, "the market needs growth and efficiency")
    print(f"\nplain NB prediction for a market-ish unit: "
          f"{sample.label} (certainty {sample.certainty:.3f})")

    # semantic smoothing interpolates the word models with a topic model
    corpus = SentenceCorpus.from_store(store)
    topics = fit_gibbs(corpus, n_topics=4, iterations=100, seed=0)
    smoothed = train(examples, smoothing="semantic", smoothing_lambda=0.4,
                     topic_state=topics)
    sample2 = predict(smoothed, "the market needs growth and efficiency")
    print(f"semantically smoothed:                   "
          f"{sample2.label} (certainty {sample2.certainty:.3f})")

    queue = build_queue(store, model, unit_size=3, order="most-certain",
                        limit=12)
    print(f"\nreview queue: {len(queue.items)} most-certain units")
    for item in queue.items[:8]:
        truth_econ = int(item.doc_id.removeprefix("art")) % 2 == 0
        verdict = "accept" if (item.predicted == econ) == truth_econ \
            else "reject"
        report = record_verdict(queue, item.item_id, verdict, spans, tree)
    print(f"running precision after 8 verdicts: {report.overall:.3f}")
    print(f"per category: {report.to_json()['per_category']}")

    retrained = train(spans_to_examples(store, spans.training_spans()))
    print(f"\nretrained on {len(spans.training_spans())} spans "
          f"({len(spans.spans()) - len(spans.training_spans())} rejected "
          f"spans stay excluded)")

    held_out = [(f"art{i:04d}", econ if i % 2 == 0 else soc)
                for i in range(60, 70)]
    examples = [(store.get_document(d).text, c) for d, c in held_out]
    print("\nheld-out evaluation:")
    print(evaluate(retrained, examples).to_csv())
    store.close()
