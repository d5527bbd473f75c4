import datetime as dt

import pytest
from hypothesis import given, settings, strategies as st

from lcm import query as q
from lcm.index import IndexError_, IndexShard, build_index
from lcm.store import CorpusStore

from conftest import make_docs, make_segmented


# ----------------------------------------------------------------------
# naive per-document evaluator: the independent oracle for hit sets

def naive_hits(docs, node):
    """docs: list of (doc_id, forms list, metadata values dict)."""
    return {doc_id for doc_id, forms, meta in docs
            if _matches(forms, meta, node)}


def _matches(forms, meta, node):
    if isinstance(node, q.Term):
        return node.term in forms
    if isinstance(node, q.Phrase):
        k = len(node.terms)
        return any(tuple(forms[i:i + k]) == node.terms
                   for i in range(len(forms) - k + 1))
    if isinstance(node, q.FieldEq):
        return node.value in meta.get(node.field, [])
    if isinstance(node, q.DateRange):
        return any(node.lo <= v <= node.hi
                   for v in meta.get(node.field, []))
    if isinstance(node, q.And):
        return (all(_matches(forms, meta, c) for c in node.required)
                and not any(_matches(forms, meta, c) for c in node.excluded))
    if isinstance(node, q.Or):
        return any(_matches(forms, meta, c) for c in node.options)
    raise TypeError(node)


def corpus_view(store):
    """Extract (id, forms, metadata-values) triples for the oracle."""
    out = []
    for doc in store.iter_documents():
        forms = [a.attrs["form"] for a in doc.layer("token")
                 if not a.attrs.get("punct")]
        meta = {}
        for field, value in doc.metadata.items():
            if isinstance(value, dt.date):
                meta[field] = [value.isoformat()]
            elif isinstance(value, list):
                meta[field] = [str(v) for v in value]
            else:
                meta[field] = [str(value)]
        out.append((doc.id, forms, meta))
    return out


class TestBuildIndex:
    def test_doc_count(self, store):
        make_segmented(store, ["a b", "b c", "c d"])
        shard = build_index(store)
        assert shard.doc_count == 3

    def test_untokenized_named(self, store):
        make_docs(store, ["a b", "c d"])
        from lcm.textproc import segment_document
        segment_document(store, "d1")
        with pytest.raises(IndexError_, match="d2"):
            build_index(store)

    def test_rebuild_after_adding_doc(self, store):
        make_segmented(store, ["a b"])
        assert build_index(store).doc_count == 1
        store.add_documents([{"id": "x", "text": "c d",
                              "date": "2001-01-01"}])
        from lcm.textproc import segment_document
        segment_document(store, "x")
        assert build_index(store).doc_count == 2

    def test_persist_atomic_replace(self, store, tmp_path):
        make_segmented(store, ["a b"])
        path = tmp_path / "main.json"
        build_index(store).save(path)
        loaded = IndexShard.load(path)
        assert loaded.doc_count == 1
        assert loaded.search("a").doc_ids == ["d1"]


class TestSearch:
    def test_single_hit(self, store):
        make_segmented(store, ["a b", "b c"])
        shard = build_index(store)
        result = shard.search("a")
        assert result.doc_ids == ["d1"]
        assert result.total == 1

    def test_shared_term_hits_both(self, store):
        make_segmented(store, ["a b", "b c"])
        result = build_index(store).search("b")
        assert set(result.doc_ids) == {"d1", "d2"}
        assert result.total == 2

    def test_phrase_requires_adjacency(self, store):
        make_segmented(store, ["a b", "b a"])
        result = build_index(store).search('"a b"')
        assert result.doc_ids == ["d1"]

    def test_phrase_across_punctuation(self, store):
        # positions count word tokens only
        make_segmented(store, ["a, b"])
        assert build_index(store).search('"a b"').doc_ids == ["d1"]

    def test_tie_break_ascending_id(self, store):
        make_segmented(store, ["same text", "same text", "same text"])
        result = build_index(store).search("same")
        assert result.doc_ids == ["d1", "d2", "d3"]

    def test_limit_offset(self, store):
        make_segmented(store, ["x", "x", "x", "x"])
        shard = build_index(store)
        page = shard.search("x", limit=2, offset=1)
        assert len(page.doc_ids) == 2
        assert page.total == 4

    def test_unknown_field(self, store):
        make_segmented(store, ["a"])
        with pytest.raises(IndexError_, match="unknown field"):
            build_index(store).search("nosuchfield:x")

    def test_date_range(self, store):
        make_segmented(store, ["a", "a", "a"],
                       dates=["2000-01-01", "2001-06-15", "2003-01-01"])
        result = build_index(store).search("date:[2001-01-01 TO 2002-01-01]")
        assert result.doc_ids == ["d2"]

    def test_not_subtracts(self, store):
        make_segmented(store, ["a b", "a c"])
        assert build_index(store).search("a NOT c").doc_ids == ["d1"]


class TestFacets:
    def test_counts_partition_scalar_field(self, store):
        store.add_documents([
            {"id": "z1", "text": "wort", "date": "2001-01-01", "source": "ZEIT"},
            {"id": "z2", "text": "wort", "date": "2001-01-01", "source": "ZEIT"},
            {"id": "t1", "text": "wort", "date": "2001-01-01", "source": "TAZ"},
        ])
        from lcm.textproc import segment_collection
        segment_collection(store)
        shard = build_index(store)
        counts = shard.facet_counts("wort", "source")
        assert counts == {"ZEIT": 2, "TAZ": 1}
        assert sum(counts.values()) == shard.search("wort").total

    def test_empty_hit_set(self, store):
        make_segmented(store, ["a"])
        assert build_index(store).facet_counts("zzz", "source") == {}

    def test_list_field_counts_per_value(self, store):
        store.add_documents([
            {"id": "x", "text": "wort", "date": "2001-01-01",
             "tags": ["a", "b"]},
        ])
        from lcm.textproc import segment_collection
        segment_collection(store)
        counts = build_index(store).facet_counts("wort", "tags")
        assert counts == {"a": 1, "b": 1}  # sums can exceed hit count


# ----------------------------------------------------------------------
# randomized oracle equivalence

_VOCAB = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
_SOURCES = ["ZEIT", "TAZ"]
_DATES = ["2000-03-01", "2001-07-15", "2002-11-30"]


def _doc_st():
    return st.fixed_dictionaries({
        "forms": st.lists(st.sampled_from(_VOCAB), min_size=0, max_size=12),
        "source": st.sampled_from(_SOURCES),
        "date": st.sampled_from(_DATES),
        "tags": st.lists(st.sampled_from(["x", "y"]), max_size=2,
                         unique=True),
    })


def _leaf_st():
    return st.one_of(
        st.sampled_from(_VOCAB + ["missingterm"]).map(q.Term),
        st.lists(st.sampled_from(_VOCAB), min_size=1, max_size=3)
        .map(lambda ts: q.Phrase(tuple(ts))),
        st.sampled_from(_SOURCES).map(lambda v: q.FieldEq("source", v)),
        st.sampled_from(["x", "y"]).map(lambda v: q.FieldEq("tags", v)),
        st.tuples(st.sampled_from(_DATES), st.sampled_from(_DATES)).map(
            lambda pair: q.DateRange("date", min(pair), max(pair))),
    )


def _query_st(depth=2):
    if depth == 0:
        return _leaf_st()
    child = _query_st(depth - 1)
    return st.one_of(
        _leaf_st(),
        st.tuples(st.lists(child, min_size=1, max_size=3),
                  st.lists(child, max_size=2)).map(
            lambda rx: q.And(tuple(rx[0]), tuple(rx[1]))),
        st.lists(child, min_size=1, max_size=3).map(
            lambda cs: q.Or(tuple(cs))),
    )


class TestOracleEquivalence:
    @settings(max_examples=120, deadline=None)
    @given(docs=st.lists(_doc_st(), min_size=1, max_size=15),
           node=_query_st())
    def test_hit_sets_match_naive_scan(self, docs, node):
        with CorpusStore(":memory:") as store:
            store.add_documents([
                {"id": f"d{i:03d}", "text": " ".join(d["forms"]),
                 "date": d["date"], "source": d["source"], "tags": d["tags"]}
                for i, d in enumerate(docs)])
            from lcm.textproc import segment_collection
            segment_collection(store)
            shard = build_index(store)
            view = corpus_view(store)

            # parser round trip feeds the engine; oracle uses the AST
            rendered = q.render_query(node)
            assert shard.hit_set(q.parse_query(rendered)) == naive_hits(view, node)

    @settings(max_examples=60, deadline=None)
    @given(docs=st.lists(_doc_st(), min_size=1, max_size=10),
           terms=st.lists(st.sampled_from(_VOCAB), min_size=1, max_size=3))
    def test_phrase_subset_of_and(self, docs, terms):
        with CorpusStore(":memory:") as store:
            store.add_documents([
                {"id": f"d{i:03d}", "text": " ".join(d["forms"]),
                 "date": d["date"], "source": d["source"]}
                for i, d in enumerate(docs)])
            from lcm.textproc import segment_collection
            segment_collection(store)
            shard = build_index(store)
            phrase_hits = shard.hit_set(q.Phrase(tuple(terms)))
            and_hits = shard.hit_set(q.And(tuple(q.Term(t) for t in terms)))
            assert phrase_hits <= and_hits

    @settings(max_examples=60, deadline=None)
    @given(docs=st.lists(_doc_st(), min_size=1, max_size=10),
           node=_query_st(1),
           extra=_leaf_st())
    def test_and_monotonicity(self, docs, node, extra):
        with CorpusStore(":memory:") as store:
            store.add_documents([
                {"id": f"d{i:03d}", "text": " ".join(d["forms"]),
                 "date": d["date"], "source": d["source"], "tags": d["tags"]}
                for i, d in enumerate(docs)])
            from lcm.textproc import segment_collection
            segment_collection(store)
            shard = build_index(store)
            narrowed = q.And((node, extra))
            assert shard.hit_set(narrowed) <= shard.hit_set(node)
