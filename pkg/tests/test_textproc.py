import pytest
from hypothesis import given, settings, strategies as st

from lcm.store import SENTENCE_LAYER, TOKEN_LAYER
from lcm.textproc import (SentenceCorpus, Vocabulary, build_vocabulary,
                          load_wordlist, segment_document, split_sentences,
                          tokenize)

from conftest import make_docs


class TestSplitSentences:
    def test_empty(self):
        assert split_sentences("") == []
        assert split_sentences("   \n ") == []

    def test_two_terminated_sentences(self):
        spans = split_sentences("A b. C d.")
        assert len(spans) == 2
        assert [("A b. C d."[b:e]) for b, e in spans] == ["A b.", "C d."]

    def test_abbreviation_stoplist(self):
        text = "Dr. Meier kam. Er ging."
        spans = split_sentences(text)
        assert [text[b:e] for b, e in spans] == ["Dr. Meier kam.", "Er ging."]

    def test_multi_dot_abbreviation(self):
        text = "Das gilt z.B. Morgen auch."
        spans = split_sentences(text)
        assert [text[b:e] for b, e in spans] == ["Das gilt z.B. Morgen auch."]

    def test_no_boundary_before_lowercase(self):
        text = "approx. values are fine. Truly."
        spans = split_sentences(text)
        assert [text[b:e] for b, e in spans] == ["approx. values are fine.",
                                                 "Truly."]

    def test_digit_starts_sentence(self):
        text = "Es war vorbei. 1989 fiel die Mauer."
        assert len(split_sentences(text)) == 2

    def test_unterminated_tail_included(self):
        text = "One. two tail without period"
        spans = split_sentences(text)
        joined = "".join(text[b:e] for b, e in spans)
        assert "tail" in joined

    def test_custom_abbreviations_from_file(self, tmp_path):
        path = tmp_path / "abbr.txt"
        path.write_text("# comment\nxyz.\n", encoding="utf-8")
        abbr = load_wordlist(path)
        text = "Der xyz. Wert steigt."
        assert len(split_sentences(text, abbr)) == 1
        assert len(split_sentences(text)) == 2

    def test_covers_all_non_whitespace(self):
        text = "  Erst eins. Dann zwei!  Drei?  "
        spans = split_sentences(text)
        covered = set()
        for b, e in spans:
            covered.update(range(b, e))
        for i, ch in enumerate(text):
            if not ch.isspace():
                assert i in covered


class TestTokenize:
    def test_word_and_punctuation(self):
        forms = [t.form for t in tokenize("Hello, world")]
        assert forms == ["hello", ",", "world"]
        flags = [t.punct for t in tokenize("Hello, world")]
        assert flags == [False, True, False]

    def test_apostrophe_splits(self):
        assert [t.form for t in tokenize("don't")] == ["don", "'", "t"]

    def test_whitespace_only(self):
        assert tokenize("  ") == []

    def test_lowercasing_umlauts(self):
        assert [t.form for t in tokenize("Käse HÄLT")] == ["käse", "hält"]

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet=st.characters(codec="utf-8",
                                          exclude_characters="\x00"),
                   max_size=60))
    def test_coverage_reconstructs_text(self, text):
        tokens = tokenize(text)
        # spans are ordered, non-overlapping, and cover every
        # non-whitespace character
        pos = 0
        for t in tokens:
            assert t.begin >= pos
            assert text[t.begin:t.end].lower() == t.form
            for i in range(pos, t.begin):
                assert text[i].isspace()
            pos = t.end
        for i in range(pos, len(text)):
            assert text[i].isspace()


class TestSegmentDocument:
    def test_layers_written(self, store):
        make_docs(store, ["Erster Satz. Zweiter Satz."])
        n = segment_document(store, "d1")
        doc = store.get_document("d1")
        assert len(doc.layer(SENTENCE_LAYER)) == 2
        assert len(doc.layer(TOKEN_LAYER)) == n == 6

    def test_rerun_replaces_not_duplicates(self, store):
        make_docs(store, ["Eins. Zwei."])
        segment_document(store, "d1")
        first = store.get_document("d1").annotations
        segment_document(store, "d1")
        assert store.get_document("d1").annotations == first

    def test_empty_text_gets_empty_layers(self, store):
        make_docs(store, [""])
        segment_document(store, "d1")
        doc = store.get_document("d1")
        assert doc.has_layer(SENTENCE_LAYER) and doc.has_layer(TOKEN_LAYER)
        assert doc.annotations == []


class TestSentenceCorpus:
    def test_from_store(self, store):
        make_docs(store, ["Alpha beta. Gamma!", "Delta."])
        for d in ("d1", "d2"):
            segment_document(store, d)
        corpus = SentenceCorpus.from_store(store)
        assert corpus.doc_sentences("d1") == [["alpha", "beta"], ["gamma"]]
        assert corpus.doc_sentences("d2") == [["delta"]]
        assert corpus.total_tokens() == 4

    def test_keeps_punctuation_on_request(self, store):
        make_docs(store, ["Alpha, beta."])
        segment_document(store, "d1")
        corpus = SentenceCorpus.from_store(store, drop_punctuation=False)
        assert corpus.doc_sentences("d1") == [["alpha", ",", "beta", "."]]

    def test_unsegmented_documents_listed(self, store):
        make_docs(store, ["Eins.", "Zwei."])
        segment_document(store, "d1")
        with pytest.raises(ValueError, match="d2"):
            SentenceCorpus.from_store(store)


class TestVocabulary:
    def _corpus(self, *docs):
        return SentenceCorpus(
            doc_ids=[f"d{i}" for i in range(len(docs))],
            sentences=[[sent.split() for sent in doc] for doc in docs])

    def test_min_df_counts_documents(self):
        vocab = build_vocabulary(self._corpus(["a b"], ["a c"]), min_df=2)
        assert set(vocab.term_ids) == {"a"}
        assert vocab.corpus_freq["a"] == 2
        assert vocab.doc_freq["a"] == 2

    def test_stopwords_excluded(self):
        vocab = build_vocabulary(self._corpus(["a b"], ["a c"]),
                                 min_df=1, stopwords={"a"})
        assert vocab.term_ids == {"b": 0, "c": 1}

    def test_empty_vocabulary_is_error(self):
        with pytest.raises(ValueError, match="empty vocabulary"):
            build_vocabulary(self._corpus(["a b"], ["a c"]), min_df=3)

    def test_ids_lexicographic_and_deterministic(self):
        corpus = self._corpus(["zeta alpha"], ["mid zeta"])
        v1 = build_vocabulary(corpus)
        v2 = build_vocabulary(corpus)
        assert v1.term_ids == v2.term_ids == {"alpha": 0, "mid": 1, "zeta": 2}
        assert v1.terms == ["alpha", "mid", "zeta"]

    def test_total_tokens_counts_everything_scanned(self):
        vocab = build_vocabulary(self._corpus(["a b b"], ["c"]),
                                 stopwords={"c"})
        assert vocab.total_tokens == 4
