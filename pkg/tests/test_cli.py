import json

import pytest

from lcm.cli import main
from lcm.datagen import workflow_corpus

from conftest import write_jsonl


@pytest.fixture
def data_dir(tmp_path):
    return tmp_path / "data"


def run(data_dir, *args):
    return main(["--data-dir", str(data_dir), *args])


@pytest.fixture
def seeded(data_dir, tmp_path):
    records = [
        {"id": "d1", "text": "Markt und Wachstum. Effizienz siegt. Immer.",
         "date": "2001-03-01", "source": "ZEIT"},
        {"id": "d2", "text": "Solidarität und Teilhabe. Rechte gelten. Oft.",
         "date": "2002-04-01", "source": "TAZ"},
        {"id": "d3", "text": "Markt trifft Solidarität. Debatte beginnt. Nun.",
         "date": "2002-06-01", "source": "ZEIT"},
    ]
    path = write_jsonl(tmp_path / "docs.jsonl", records)
    assert run(data_dir, "ingest", str(path)) == 0
    assert run(data_dir, "index") == 0
    return data_dir


class TestIngestIndexSearch:
    def test_ingest_reports_count(self, data_dir, tmp_path, capsys):
        path = write_jsonl(tmp_path / "two.jsonl", [
            {"id": "a", "text": "Eins hier.", "date": "2001-01-01"},
            {"id": "b", "text": "Zwei dort.", "date": "2001-01-02"},
        ])
        assert run(data_dir, "ingest", str(path)) == 0
        out = capsys.readouterr().out
        assert "2 documents" in out

    def test_ingest_error_exit_code(self, data_dir, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a"}\n')
        assert run(data_dir, "ingest", str(path)) == 1
        assert "line 1" in capsys.readouterr().err

    def test_search_and_save(self, seeded, capsys):
        assert run(seeded, "search", "markt", "--facet", "source",
                   "--save", "maerkte") == 0
        out = capsys.readouterr().out
        assert "total hits: 2" in out
        assert "ZEIT=2" in out
        assert run(seeded, "collections", "show", "maerkte") == 0
        assert "d1" in capsys.readouterr().out

    def test_search_parse_error(self, seeded, capsys):
        assert run(seeded, "search", "a AND") == 1
        assert "position" in capsys.readouterr().err


class TestAnalysisCommands:
    def test_keyterms(self, seeded, tmp_path, capsys):
        run(seeded, "collections", "create", "m", "--ids", "d1,d3")
        run(seeded, "collections", "create", "s", "--ids", "d2")
        out_file = tmp_path / "kt.json"
        assert run(seeded, "keyterms", "--target", "m", "--reference", "s",
                   "--top", "5", "--out", str(out_file)) == 0
        ranked = json.loads(out_file.read_text())
        assert ranked[0]["keyness"] >= ranked[-1]["keyness"]

    def test_cooc_pair_and_graph(self, seeded, tmp_path, capsys):
        assert run(seeded, "cooc", "--pair", "markt", "wachstum") == 0
        out = capsys.readouterr().out
        assert "n_ab=1" in out
        dot = tmp_path / "g.dot"
        assert run(seeded, "cooc", "markt", "--measure", "dice",
                   "--dot", str(dot)) == 0
        assert dot.read_text().startswith("graph")

    def test_series_csv(self, seeded, capsys):
        assert run(seeded, "series", "markt", "--bucket", "year") == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "bucket,absolute,relative"
        assert "2001-01-01,1," in out

    def test_dict_build_retrieve_export_import(self, seeded, tmp_path, capsys):
        run(seeded, "collections", "create", "m", "--ids", "d1")
        assert run(seeded, "dict", "build", "lex", "--reference", "m",
                   "--size", "5") == 0
        assert run(seeded, "dict", "retrieve", "lex", "--save", "hits",
                   "--top-m", "2") == 0
        out = capsys.readouterr().out
        assert "retrieved" in out
        exported = tmp_path / "lex.json"
        assert run(seeded, "dict", "export", "lex", str(exported)) == 0
        assert run(seeded, "dict", "import", "lex2", str(exported)) == 0

    def test_topics_fit_show_filter(self, seeded, capsys):
        assert run(seeded, "topics", "fit", "tm", "--k", "2",
                   "--iterations", "30") == 0
        assert run(seeded, "topics", "show", "tm", "--top", "3") == 0
        assert "topic 0:" in capsys.readouterr().out
        assert run(seeded, "topics", "timeseries", "tm") == 0
        assert run(seeded, "topics", "filter", "tm", "--topic", "0",
                   "--threshold", "0.0", "--save", "all-docs") == 0
        assert run(seeded, "collections", "show", "all-docs") == 0


class TestTrainQueueFlow:
    def test_full_loop(self, seeded, tmp_path, capsys):
        # categories + spans via workspace (the UI normally does this)
        from lcm.workspace import Workspace
        ws = Workspace(seeded)
        tree = ws.categories()
        tree.add("economic", id="c1")
        tree.add("social", id="c2")
        ws.save_categories(tree)
        ws.spans.annotate("d1", 0, 1, "c1", tree)
        ws.spans.annotate("d2", 0, 1, "c2", tree)
        ws.close()

        assert run(seeded, "train", "fit", "nb") == 0
        assert run(seeded, "queue", "build", "nb", "--unit-size", "1",
                   "--name", "q1") == 0
        out = capsys.readouterr().out
        assert "q1" in out
        assert run(seeded, "queue", "show", "q1") == 0
        first_line = capsys.readouterr().out.splitlines()[0]
        item_id = first_line.split()[0]
        assert run(seeded, "queue", "verdict", "q1", item_id, "accept") == 0
        assert "running precision: 1.000" in capsys.readouterr().out

        assert run(seeded, "train", "evaluate", "nb") == 0
        out = capsys.readouterr().out
        assert out.startswith("category,precision,recall,f1")

        timeline = tmp_path / "timeline.csv"
        assert run(seeded, "train", "apply", "nb", "--timeline",
                   str(timeline)) == 0
        lines = timeline.read_text().splitlines()
        assert lines[0] == "bucket,category,count,proportion"
        assert len(lines) > 1


class TestConfigPrecedence:
    def test_env_overrides_config_file(self, tmp_path, monkeypatch, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"data_dir": str(tmp_path / "from-file")}))
        env_dir = tmp_path / "from-env"
        monkeypatch.setenv("LCM_DATA_DIR", str(env_dir))
        records = [{"id": "a", "text": "Wort.", "date": "2001-01-01"}]
        path = write_jsonl(tmp_path / "one.jsonl", records)
        assert main(["--config", str(cfg), "ingest", str(path)]) == 0
        assert (env_dir / "corpus.db").exists()
        assert not (tmp_path / "from-file").exists()

    def test_explicit_flag_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LCM_DATA_DIR", str(tmp_path / "ignored"))
        target = tmp_path / "explicit"
        records = [{"id": "a", "text": "Wort.", "date": "2001-01-01"}]
        path = write_jsonl(tmp_path / "one.jsonl", records)
        assert main(["--data-dir", str(target), "ingest", str(path)]) == 0
        assert (target / "corpus.db").exists()
