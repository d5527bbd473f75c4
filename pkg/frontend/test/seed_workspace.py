"""Seed a workspace for the front-end end-to-end test.

Creates a small two-register corpus, the index, a two-category tree,
training spans, a classifier, and a most-certain review queue named
"review1". Usage: python3 seed_workspace.py DATA_DIR
"""

import sys

from lcm.classify import build_queue, spans_to_examples, train
from lcm.textproc import segment_collection
from lcm.workspace import Workspace


def main(data_dir: str) -> None:
    ws = Workspace(data_dir)
    records = []
    econ = ["markt wachstum", "effizienz kapital", "wettbewerb rendite"]
    soc = ["teilhabe rechte", "solidarität gemeinwohl", "inklusion dialog"]
    for i in range(10):
        phrases = econ if i % 2 == 0 else soc
        text = " ".join(
            f"{phrases[j % 3].capitalize()} prägt debatte {i}."
            for j in range(3))
        records.append({
            "id": f"d{i:02d}",
            "text": text,
            "date": f"200{i % 4}-0{1 + i % 9}-15",
            "source": "ZEIT" if i % 3 else "TAZ",
            "title": f"Artikel {i}",
            "tags": ["econ" if i % 2 == 0 else "soc"],
        })
    ws.store.add_documents(records)
    segment_collection(ws.store)
    ws.build_and_save_index()

    tree = ws.categories()
    c1 = tree.add("economic framing", id="c1").id
    c2 = tree.add("social framing", id="c2").id
    ws.save_categories(tree)

    for i in (0, 2, 4):
        ws.spans.annotate(f"d{i:02d}", 0, 1, c1, tree)
    for i in (1, 3, 5):
        ws.spans.annotate(f"d{i:02d}", 0, 1, c2, tree)

    model = train(spans_to_examples(ws.store, ws.spans.training_spans()))
    ws.save_classifier(model, "nb")
    queue = build_queue(ws.store, model, unit_size=1, order="most-certain",
                        limit=12, queue_id="review1", model_ref="nb")
    ws.save_queue(queue)
    ws.close()
    print("seeded")


if __name__ == "__main__":
    main(sys.argv[1])
