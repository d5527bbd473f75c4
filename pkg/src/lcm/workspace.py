"""Data-directory layout, configuration, and artifact registry.

A workspace owns one data directory::

    corpus.db          documents, annotations, sub-collections
    jobs.db            job queue state
    categories.json    the category tree
    indexes/           persisted index shards
    dictionaries/      contextualized dictionaries
    models/            topic model states
    classifiers/       Naive Bayes models
    queues/            review queues
    reports/           job reports (JSON/CSV)

Configuration comes from an optional JSON file ``{"data_dir": ...,
"port": ..., "workers": ...}``; the environment variables LCM_DATA_DIR
and LCM_PORT override it.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .classify import CategoryTree, NBModel, ReviewQueue, SpanStore
from .dictionary import Dictionary
from .index import IndexShard, build_index
from .store import CorpusStore
from .textproc import SentenceCorpus
from .topics import TopicModelState

DEFAULT_PORT = 8750

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def check_name(name: str) -> str:
    """Validate an artifact name (no path separators, no hidden files)."""
    if not _NAME_RE.match(name):
        raise ValueError(f"invalid resource name {name!r}")
    return name


@dataclass
class Config:
    data_dir: Path
    port: int = DEFAULT_PORT
    workers: Optional[int] = None

    @classmethod
    def load(cls, config_path: Optional[str | Path] = None,
             data_dir: Optional[str | Path] = None,
             port: Optional[int] = None,
             workers: Optional[int] = None) -> "Config":
        """Resolve configuration: explicit args > env vars > config file >
        defaults."""
        file_cfg: dict = {}
        if config_path is not None:
            file_cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
        resolved_dir = (data_dir or os.environ.get("LCM_DATA_DIR")
                        or file_cfg.get("data_dir") or "lcm-data")
        resolved_port = (port if port is not None
                         else int(os.environ.get("LCM_PORT",
                                                 file_cfg.get("port", DEFAULT_PORT))))
        resolved_workers = (workers if workers is not None
                            else file_cfg.get("workers"))
        return cls(data_dir=Path(resolved_dir), port=resolved_port,
                   workers=resolved_workers)


class Workspace:
    """Handles to the store and every named artifact of one data dir."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        for sub in ("indexes", "dictionaries", "models", "classifiers",
                    "queues", "reports"):
            (self.data_dir / sub).mkdir(exist_ok=True)
        self._store: Optional[CorpusStore] = None

    # ------------------------------------------------------------------
    # core handles

    @property
    def store(self) -> CorpusStore:
        if self._store is None:
            self._store = CorpusStore(self.data_dir / "corpus.db")
        return self._store

    @property
    def spans(self) -> SpanStore:
        return SpanStore(self.store)

    def close(self) -> None:
        if self._store is not None:
            self._store.close()
            self._store = None

    def corpus(self, collection: Optional[str] = None,
               drop_punctuation: bool = True) -> SentenceCorpus:
        return SentenceCorpus.from_store(self.store, collection,
                                         drop_punctuation=drop_punctuation)

    # ------------------------------------------------------------------
    # category tree (re-read per access: the CLI and server may share a
    # data dir across processes)

    @property
    def categories_path(self) -> Path:
        return self.data_dir / "categories.json"

    def categories(self) -> CategoryTree:
        if self.categories_path.exists():
            return CategoryTree.load(self.categories_path)
        return CategoryTree()

    def save_categories(self, tree: CategoryTree) -> None:
        tree.save(self.categories_path)

    # ------------------------------------------------------------------
    # named artifacts

    def _path(self, kind: str, name: str, ext: str = ".json") -> Path:
        return self.data_dir / kind / (check_name(name) + ext)

    def save_index(self, shard: IndexShard, name: str = "main") -> None:
        shard.save(self._path("indexes", name))

    def load_index(self, name: str = "main") -> IndexShard:
        path = self._path("indexes", name)
        if not path.exists():
            raise FileNotFoundError(f"no index {name!r} (build one first)")
        return IndexShard.load(path)

    def build_and_save_index(self, collection: Optional[str] = None,
                             name: str = "main") -> IndexShard:
        shard = build_index(self.store, collection)
        self.save_index(shard, name)
        return shard

    def save_dictionary(self, dictionary: Dictionary, name: str) -> None:
        dictionary.save(self._path("dictionaries", name))

    def load_dictionary(self, name: str) -> Dictionary:
        path = self._path("dictionaries", name)
        if not path.exists():
            raise FileNotFoundError(f"no dictionary {name!r}")
        return Dictionary.load(path)

    def save_topic_model(self, state: TopicModelState, name: str) -> None:
        state.save(self._path("models", name))

    def load_topic_model(self, name: str) -> TopicModelState:
        path = self._path("models", name)
        if not path.exists():
            raise FileNotFoundError(f"no topic model {name!r}")
        return TopicModelState.load(path)

    def save_classifier(self, model: NBModel, name: str) -> None:
        model.save(self._path("classifiers", name))

    def load_classifier(self, name: str) -> NBModel:
        path = self._path("classifiers", name)
        if not path.exists():
            raise FileNotFoundError(f"no classifier {name!r}")
        return NBModel.load(path)

    def save_queue(self, queue: ReviewQueue) -> None:
        queue.save(self._path("queues", queue.queue_id))

    def load_queue(self, queue_id: str) -> ReviewQueue:
        path = self._path("queues", queue_id)
        if not path.exists():
            raise FileNotFoundError(f"no review queue {queue_id!r}")
        return ReviewQueue.load(path)

    def write_report(self, name: str, content: str, ext: str = ".json") -> str:
        path = self._path("reports", name, ext)
        path.write_text(content, encoding="utf-8")
        return name

    def read_report(self, name: str) -> str:
        for ext in (".json", ".csv"):
            path = self._path("reports", name, ext)
            if path.exists():
                return path.read_text(encoding="utf-8")
        raise FileNotFoundError(f"no report {name!r}")

    def list_artifacts(self, kind: str) -> list[str]:
        return sorted(p.stem for p in (self.data_dir / kind).iterdir()
                      if p.is_file() and not p.name.endswith(".tmp"))
