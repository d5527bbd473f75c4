"""Command-line interface mirroring the HTTP API.

Commands operate directly on the data directory (shared safely with a
running server via SQLite WAL), so batch steps of a workflow can run
headless while the UI points at the same workspace.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import classify, dictionary, lexicometrics, topics
from .lexicometrics import BUCKETINGS, MEASURES
from .store import StoreError
from .textproc import load_wordlist, segment_document
from .workspace import Config, Workspace


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data-dir", help="workspace data directory "
                        "(env LCM_DATA_DIR, config file, or ./lcm-data)")
    parser.add_argument("--config", help="JSON config file "
                        "{data_dir, port, workers}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcm", description="corpus mining toolkit")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest JSONL document files")
    p.add_argument("files", nargs="+")
    p.add_argument("--no-segment", action="store_true",
                   help="skip sentence/token segmentation")

    p = sub.add_parser("index", help="build the inverted index")
    p.add_argument("--collection")
    p.add_argument("--name", default="main")

    p = sub.add_parser("search", help="ranked full-text search")
    p.add_argument("query")
    p.add_argument("--index", default="main")
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--facet", action="append", default=[])
    p.add_argument("--save", help="store the full hit set as a collection")

    p = sub.add_parser("keyterms", help="keyness ranking target vs reference")
    p.add_argument("--target", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--top", type=int, default=500)
    p.add_argument("--out", help="write JSON to file instead of stdout")

    p = sub.add_parser("cooc", help="co-occurrence graphs and measures")
    p.add_argument("seeds", nargs="*")
    p.add_argument("--collection")
    p.add_argument("--pair", nargs=2, metavar=("A", "B"),
                   help="print all five measures for one term pair")
    p.add_argument("--measure", default="loglik", choices=MEASURES)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--json", dest="json_out", help="write graph JSON to file")
    p.add_argument("--dot", dest="dot_out", help="write GraphViz DOT to file")

    p = sub.add_parser("series", help="term frequency time series")
    p.add_argument("term")
    p.add_argument("--collection")
    p.add_argument("--bucket", default="year", choices=BUCKETINGS)
    p.add_argument("--mode", default="absolute",
                   choices=("absolute", "relative"))
    p.add_argument("--out", help="write CSV to file instead of stdout")

    p = sub.add_parser("dict", help="contextualized dictionaries")
    dict_sub = p.add_subparsers(dest="dict_command", required=True)
    d = dict_sub.add_parser("build")
    d.add_argument("name")
    d.add_argument("--reference", required=True)
    d.add_argument("--contrast", help="defaults to the whole corpus")
    d.add_argument("--size", type=int,
                   default=dictionary.DEFAULT_DICTIONARY_SIZE)
    d = dict_sub.add_parser("retrieve")
    d.add_argument("name")
    d.add_argument("--target", help="defaults to the whole corpus")
    d.add_argument("--top-m", type=int,
                   default=dictionary.DEFAULT_RETRIEVE_LIMIT)
    d.add_argument("--save", required=True, help="result collection name")
    d.add_argument("--replace", action="store_true")
    d = dict_sub.add_parser("export")
    d.add_argument("name")
    d.add_argument("file")
    d = dict_sub.add_parser("import")
    d.add_argument("name")
    d.add_argument("file")

    p = sub.add_parser("topics", help="topic models")
    top_sub = p.add_subparsers(dest="topics_command", required=True)
    t = top_sub.add_parser("fit")
    t.add_argument("name")
    t.add_argument("--collection")
    t.add_argument("--k", type=int, required=True)
    t.add_argument("--method", default="gibbs", choices=("gibbs", "online"))
    t.add_argument("--alpha", type=float)
    t.add_argument("--beta", type=float, default=topics.DEFAULT_BETA)
    t.add_argument("--iterations", type=int, default=500)
    t.add_argument("--batch-size", type=int, default=topics.DEFAULT_BATCH_SIZE)
    t.add_argument("--kappa", type=float, default=topics.DEFAULT_KAPPA)
    t.add_argument("--tau0", type=float, default=float(topics.DEFAULT_TAU0))
    t.add_argument("--passes", type=int, default=1)
    t.add_argument("--seed", type=int, default=0)
    t = top_sub.add_parser("show")
    t.add_argument("name")
    t.add_argument("--top", type=int, default=10)
    t = top_sub.add_parser("timeseries")
    t.add_argument("name")
    t.add_argument("--bucket", default="year", choices=BUCKETINGS)
    t.add_argument("--out", help="write CSV to file instead of stdout")
    t = top_sub.add_parser("filter")
    t.add_argument("name")
    t.add_argument("--topic", type=int, required=True)
    t.add_argument("--threshold", type=float)
    t.add_argument("--top-r", type=int)
    t.add_argument("--complement", action="store_true")
    t.add_argument("--save", required=True, help="result collection name")
    t.add_argument("--from-collection",
                   help="restrict to a collection (defaults to fit set)")

    p = sub.add_parser("train", help="Naive Bayes classifiers")
    train_sub = p.add_subparsers(dest="train_command", required=True)
    t = train_sub.add_parser("fit")
    t.add_argument("name")
    t.add_argument("--collection", help="restrict training spans")
    t.add_argument("--smoothing", default="laplace",
                   choices=("laplace", "semantic"))
    t.add_argument("--lambda", dest="lambda_", type=float,
                   default=classify.DEFAULT_SEMANTIC_LAMBDA)
    t.add_argument("--topic-model")
    t.add_argument("--stopwords", help="stopword list file")
    t.add_argument("--min-tf", type=int, default=1)
    t = train_sub.add_parser("apply")
    t.add_argument("name")
    t.add_argument("--collection")
    t.add_argument("--unit-size", type=int, default=classify.DEFAULT_UNIT_SIZE)
    t.add_argument("--bucket", default="year", choices=BUCKETINGS)
    t.add_argument("--timeline", help="write category-proportion-over-time "
                   "CSV to this file")
    t = train_sub.add_parser("evaluate")
    t.add_argument("name")
    t.add_argument("--collection", help="labeled spans to evaluate against")
    t.add_argument("--out", help="write CSV to file instead of stdout")

    p = sub.add_parser("queue", help="active-learning review queues")
    q_sub = p.add_subparsers(dest="queue_command", required=True)
    qp = q_sub.add_parser("build")
    qp.add_argument("classifier")
    qp.add_argument("--collection")
    qp.add_argument("--order", default="most-certain",
                    choices=("most-certain", "least-certain"))
    qp.add_argument("--unit-size", type=int,
                    default=classify.DEFAULT_UNIT_SIZE)
    qp.add_argument("--limit", type=int)
    qp.add_argument("--name")
    qp = q_sub.add_parser("show")
    qp.add_argument("queue_id")
    qp.add_argument("--pending", action="store_true")
    qp = q_sub.add_parser("verdict")
    qp.add_argument("queue_id")
    qp.add_argument("item_id")
    qp.add_argument("verdict", choices=("accept", "reject"))

    p = sub.add_parser("collections", help="named sub-collections")
    c_sub = p.add_subparsers(dest="collections_command", required=True)
    cp = c_sub.add_parser("list")
    cp = c_sub.add_parser("show")
    cp.add_argument("name")
    cp = c_sub.add_parser("create")
    cp.add_argument("name")
    cp.add_argument("--ids", help="comma-separated document ids")
    cp.add_argument("--from-query", help="materialize a search result")
    cp.add_argument("--index", default="main")
    cp.add_argument("--provenance", default="manual")

    p = sub.add_parser("serve", help="run the HTTP API and job server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--static", help="directory of web UI files to serve")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = Config.load(args.config, data_dir=args.data_dir,
                             port=getattr(args, "port", None),
                             workers=getattr(args, "workers", None))
        ws = Workspace(config.data_dir)
        try:
            return _dispatch(args, ws, config)
        finally:
            ws.close()
    except (StoreError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args, ws: Workspace, config: Config) -> int:
    return {
        "ingest": _cmd_ingest,
        "index": _cmd_index,
        "search": _cmd_search,
        "keyterms": _cmd_keyterms,
        "cooc": _cmd_cooc,
        "series": _cmd_series,
        "dict": _cmd_dict,
        "topics": _cmd_topics,
        "train": _cmd_train,
        "queue": _cmd_queue,
        "collections": _cmd_collections,
        "serve": _cmd_serve,
    }[args.command](args, ws, config)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_ingest(args, ws: Workspace, config: Config) -> int:
    total = 0
    for path in args.files:
        count = ws.store.ingest(path)
        total += count
        print(f"{path}: {count} documents")
    if not args.no_segment:
        for doc_id in ws.store.document_ids():
            if not ws.store.get_document(doc_id).has_layer("token"):
                segment_document(ws.store, doc_id)
    print(f"corpus size: {ws.store.document_count()}")
    return 0


def _cmd_index(args, ws: Workspace, config: Config) -> int:
    segment_needed = [d for d in ws.store.resolve(args.collection)
                      if not ws.store.get_document(d).has_layer("token")]
    for doc_id in segment_needed:
        segment_document(ws.store, doc_id)
    shard = ws.build_and_save_index(args.collection, args.name)
    print(f"index {args.name!r}: {shard.doc_count} documents, "
          f"{len(shard.postings)} terms")
    return 0


def _cmd_search(args, ws: Workspace, config: Config) -> int:
    shard = ws.load_index(args.index)
    result = shard.search(args.query, limit=args.limit, offset=args.offset)
    print(f"total hits: {result.total}")
    for doc_id, score in zip(result.doc_ids, result.scores):
        doc = ws.store.get_document(doc_id)
        title = doc.metadata.get("title", "") or doc.text[:60].replace("\n", " ")
        print(f"  {score:8.3f}  {doc_id}  [{doc.date.isoformat()}] {title}")
    for field in args.facet:
        counts = shard.facet_counts(args.query, field)
        print(f"facet {field}: " + ", ".join(
            f"{v}={n}" for v, n in sorted(counts.items(),
                                          key=lambda kv: (-kv[1], kv[0]))))
    if args.save:
        full = shard.search(args.query, limit=result.total)
        c = ws.store.create_subcollection(args.save, full.doc_ids,
                                          f"query: {args.query}")
        print(f"saved collection {c.name!r} ({len(c)} documents)")
    return 0


def _cmd_keyterms(args, ws: Workspace, config: Config) -> int:
    target = ws.corpus(args.target)
    reference = ws.corpus(args.reference)
    terms = lexicometrics.extract_keyterms(target, reference, args.top)
    if args.out:
        _emit(lexicometrics.keyterms_to_json(terms), args.out)
    else:
        for kt in terms:
            print(f"{kt.keyness:10.3f}  {kt.term}  "
                  f"({kt.target_freq} vs {kt.reference_freq})")
    return 0


def _cmd_cooc(args, ws: Workspace, config: Config) -> int:
    corpus = ws.corpus(args.collection)
    if args.pair:
        a, b = args.pair
        counts = lexicometrics.cooccurrence_counts(corpus, a, b)
        print(f"N={counts.N} n_a={counts.n_a} n_b={counts.n_b} "
              f"n_ab={counts.n_ab}")
        for measure in MEASURES:
            try:
                print(f"  {measure:10s} "
                      f"{lexicometrics.significance(counts, measure):.6f}")
            except ValueError as exc:
                print(f"  {measure:10s} undefined ({exc})")
        return 0
    if not args.seeds:
        print("error: seed terms (or --pair) required", file=sys.stderr)
        return 1
    graph = lexicometrics.cooccurrence_graph(
        corpus, args.seeds, args.measure, args.top_k, args.min_count)
    if args.json_out:
        _emit(json.dumps(graph.to_json(), indent=2), args.json_out)
    if args.dot_out:
        _emit(graph.to_dot(), args.dot_out)
    if not args.json_out and not args.dot_out:
        for e in graph.edges:
            print(f"{e.source} -- {e.target}  {e.score:.4f} (n_ab={e.n_ab})")
    return 0


def _cmd_series(args, ws: Workspace, config: Config) -> int:
    corpus = ws.corpus(args.collection)
    series = lexicometrics.frequency_series(corpus, args.term,
                                            args.bucket, args.mode)
    _emit(lexicometrics.series_to_csv(series), args.out)
    return 0


def _cmd_dict(args, ws: Workspace, config: Config) -> int:
    if args.dict_command == "build":
        reference = ws.corpus(args.reference)
        contrast = ws.corpus(args.contrast)
        built = dictionary.build_dictionary(reference, contrast, args.size)
        ws.save_dictionary(built, args.name)
        note = " (truncated)" if built.truncated else ""
        print(f"dictionary {args.name!r}: {len(built)} terms{note}")
        return 0
    if args.dict_command == "retrieve":
        dct = ws.load_dictionary(args.name)
        corpus = ws.corpus(args.target)
        result = dictionary.retrieve_to_collection(
            ws.store, corpus, dct, args.save, args.top_m,
            replace=args.replace)
        if result.empty:
            print("warning: every document scored zero; collection is empty",
                  file=sys.stderr)
        print(f"retrieved {len(result.collection)} documents "
              f"into {args.save!r}")
        return 0
    if args.dict_command == "export":
        ws.load_dictionary(args.name).save(args.file)
        print(f"exported {args.name!r} to {args.file}")
        return 0
    # import
    ws.save_dictionary(dictionary.Dictionary.load(args.file), args.name)
    print(f"imported {args.file} as {args.name!r}")
    return 0


def _cmd_topics(args, ws: Workspace, config: Config) -> int:
    if args.topics_command == "fit":
        corpus = ws.corpus(args.collection)
        if args.method == "gibbs":
            state = topics.fit_gibbs(
                corpus, args.k, alpha=args.alpha, beta=args.beta,
                iterations=args.iterations, seed=args.seed)
        else:
            state = topics.fit_online(
                corpus, args.k, alpha=args.alpha, beta=args.beta,
                batch_size=args.batch_size, kappa=args.kappa,
                tau0=args.tau0, passes=args.passes, seed=args.seed)
        ws.save_topic_model(state, args.name)
        print(f"model {args.name!r}: K={state.n_topics}, "
              f"V={state.n_terms}, {len(state.doc_ids)} documents")
        return 0
    state = ws.load_topic_model(args.name)
    if args.topics_command == "show":
        for k in range(state.n_topics):
            words = ", ".join(t for t, _ in topics.top_words(state, k, args.top))
            print(f"topic {k}: {words}")
        return 0
    if args.topics_command == "timeseries":
        rows = ["bucket," + ",".join(f"topic{k}" for k in range(state.n_topics))]
        for bucket, shares in topics.topics_over_time(state, args.bucket):
            rows.append(bucket.isoformat() + "," +
                        ",".join(f"{s:.6f}" for s in shares))
        _emit("\n".join(rows) + "\n", args.out)
        return 0
    # filter
    doc_ids = topics.filter_by_topic(state, args.topic,
                                     threshold=args.threshold,
                                     top_r=args.top_r,
                                     complement=args.complement)
    if args.from_collection:
        allowed = set(ws.store.resolve(args.from_collection))
        doc_ids = [d for d in doc_ids if d in allowed]
    c = ws.store.create_subcollection(
        args.save, doc_ids,
        f"topic filter: model={args.name} topic={args.topic} "
        f"complement={args.complement}")
    print(f"collection {c.name!r}: {len(c)} documents")
    return 0


def _cmd_train(args, ws: Workspace, config: Config) -> int:
    if args.train_command == "fit":
        doc_ids = ws.store.resolve(args.collection) if args.collection else None
        spans = ws.spans.training_spans(doc_ids)
        examples = classify.spans_to_examples(ws.store, spans)
        stopwords = load_wordlist(args.stopwords) if args.stopwords else ()
        topic_state = (ws.load_topic_model(args.topic_model)
                       if args.topic_model else None)
        model = classify.train(
            examples, smoothing=args.smoothing,
            smoothing_lambda=args.lambda_, topic_state=topic_state,
            topic_model_ref=args.topic_model, stopwords=stopwords,
            min_tf=args.min_tf)
        ws.save_classifier(model, args.name)
        print(f"classifier {args.name!r}: {len(model.categories)} categories, "
              f"{len(model.terms)} terms, {len(examples)} examples")
        return 0
    model = ws.load_classifier(args.name)
    if args.train_command == "apply":
        return _apply_classifier(args, ws, model)
    # evaluate
    doc_ids = ws.store.resolve(args.collection) if args.collection else None
    spans = ws.spans.training_spans(doc_ids)
    if not spans:
        print("error: no labeled spans to evaluate against", file=sys.stderr)
        return 1
    report = classify.evaluate(model,
                               classify.spans_to_examples(ws.store, spans))
    _emit(report.to_csv(), args.out)
    return 0


def _apply_classifier(args, ws: Workspace, model) -> int:
    """Classify every unit of a collection; emit category proportions per
    time bucket."""
    doc_ids = ws.store.resolve(args.collection)
    bucket_counts: dict = {}
    total_units = 0
    for doc in ws.store.iter_documents(doc_ids):
        bucket = lexicometrics.bucket_start(doc.date, args.bucket)
        counts = bucket_counts.setdefault(bucket, {})
        for _first, _last, text in classify.sentence_windows(
                doc, args.unit_size):
            try:
                label = classify.predict(model, text).label
            except ValueError:
                continue
            counts[label] = counts.get(label, 0) + 1
            total_units += 1
    lines = ["bucket,category,count,proportion"]
    for bucket in sorted(bucket_counts):
        counts = bucket_counts[bucket]
        bucket_total = sum(counts.values())
        for category in sorted(counts):
            lines.append(f"{bucket.isoformat()},{category},{counts[category]},"
                         f"{counts[category] / bucket_total:.6f}")
    _emit("\n".join(lines) + "\n", args.timeline)
    print(f"classified {total_units} units across {len(bucket_counts)} buckets",
          file=sys.stderr)
    return 0


def _cmd_queue(args, ws: Workspace, config: Config) -> int:
    if args.queue_command == "build":
        model = ws.load_classifier(args.classifier)
        queue = classify.build_queue(
            ws.store, model, args.collection, args.unit_size, args.order,
            args.limit, queue_id=args.name, model_ref=args.classifier)
        ws.save_queue(queue)
        print(f"queue {queue.queue_id!r}: {len(queue.items)} items "
              f"({args.order})")
        return 0
    queue = ws.load_queue(args.queue_id)
    if args.queue_command == "show":
        items = queue.pending() if args.pending else queue.items
        for it in items:
            print(f"{it.item_id}  {it.predicted}  certainty={it.certainty:.3f}"
                  f"  [{it.status}]")
        precision = classify.running_precision(queue)
        if precision.overall is not None:
            print(f"running precision: {precision.overall:.3f} "
                  f"({precision.accepted} accepted, {precision.rejected} rejected)")
        return 0
    # verdict
    precision = classify.record_verdict(queue, args.item_id, args.verdict,
                                        ws.spans, ws.categories())
    ws.save_queue(queue)
    print(f"running precision: {precision.overall:.3f}")
    return 0


def _cmd_collections(args, ws: Workspace, config: Config) -> int:
    if args.collections_command == "list":
        for c in ws.store.list_subcollections():
            print(f"{c.name}  {len(c)} documents  ({c.provenance})")
        return 0
    if args.collections_command == "show":
        c = ws.store.get_subcollection(args.name)
        print(f"{c.name} ({c.provenance})")
        for doc_id in c.doc_ids:
            print(f"  {doc_id}")
        return 0
    # create
    if args.from_query:
        shard = ws.load_index(args.index)
        result = shard.search(args.from_query, limit=shard.doc_count)
        doc_ids = result.doc_ids
        provenance = f"query: {args.from_query}"
    elif args.ids:
        doc_ids = [d.strip() for d in args.ids.split(",") if d.strip()]
        provenance = args.provenance
    else:
        print("error: --ids or --from-query required", file=sys.stderr)
        return 1
    c = ws.store.create_subcollection(args.name, doc_ids, provenance)
    print(f"collection {c.name!r}: {len(c)} documents")
    return 0


def _cmd_serve(args, ws: Workspace, config: Config) -> int:
    from .server import serve_forever
    serve_forever(ws, args.host, config.port, workers=config.workers,
                  static_dir=args.static)
    return 0


if __name__ == "__main__":
    sys.exit(main())
