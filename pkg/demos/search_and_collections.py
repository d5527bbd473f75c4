"""Ingest a small corpus, build the index, and explore it with queries.

Shows the query language (terms, phrases, AND/OR/NOT, field filters,
date ranges), BM25 ranking, facet counts, and materializing a hit set as
a named sub-collection.
"""

import tempfile
from pathlib import Path

from lcm.datagen import workflow_corpus
from lcm.index import build_index
from lcm.store import CorpusStore
from lcm.textproc import segment_collection

with tempfile.TemporaryDirectory() as tmp:
    ref_path, target_path = workflow_corpus(tmp, n_reference=5, n_target=60)

    store = CorpusStore(Path(tmp) / "corpus.db")
    print(f"ingested {store.ingest(ref_path)} reference documents")
    print(f"ingested {store.ingest(target_path)} target documents")

    # segmentation writes stand-off sentence/token layers; the source
    # text never changes
    segment_collection(store)
    doc = store.get_document("art0000")
    print(f"\nart0000 has {len(doc.layer('sentence'))} sentences and "
          f"{len(doc.layer('token'))} tokens")

    shard = build_index(store)
    print(f"index: {shard.doc_count} documents, "
          f"{len(shard.postings)} distinct terms\n")

    for query in [
        "market",
        '"market growth"',
        "market AND growth NOT welfare",
        "market OR solidarity",
        "source:TAZ AND market",
        "date:[2004-01-01 TO 2006-12-31] AND reform",
    ]:
        result = shard.search(query, limit=3)
        heads = ", ".join(result.doc_ids) or "-"
        print(f"{query!r}: {result.total} hits; top: {heads}")

    print("\nfacets over 'market':")
    for field in ("source", "tags"):
        print(f"  {field}: {shard.facet_counts('market', field)}")

    # any hit set can be frozen as a named collection for later analyses
    hits = shard.search("market", limit=shard.doc_count)
    collection = store.create_subcollection("market-talk", hits.doc_ids,
                                            provenance="query: market")
    print(f"\nsaved collection {collection.name!r} "
          f"({len(collection)} documents)")
    store.close()
