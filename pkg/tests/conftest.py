import json

import pytest

from lcm.store import CorpusStore
from lcm.textproc import segment_collection


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            label = nodeid.split("::", 1)[-1].replace("::", ".")
            lines.append((label, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, verdict in sorted(lines):
            terminalreporter.write_line(f"[{verdict}] {label}")


@pytest.fixture
def store():
    with CorpusStore(":memory:") as s:
        yield s


def make_docs(store, texts, dates=None, **meta_common):
    """Store documents d1..dn with given texts; returns their ids."""
    records = []
    for i, text in enumerate(texts):
        record = {
            "id": f"d{i + 1}",
            "text": text,
            "date": dates[i] if dates else "2001-05-03",
            "source": "TEST",
        }
        record.update(meta_common)
        records.append(record)
    store.add_documents(records)
    return [r["id"] for r in records]


def make_segmented(store, texts, dates=None, **meta):
    ids = make_docs(store, texts, dates, **meta)
    segment_collection(store)
    return ids


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
    return path
