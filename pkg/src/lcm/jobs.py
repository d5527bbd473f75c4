"""Background job queue: submit, monitor, cancel long-running analyses.

Jobs are persisted in SQLite, so queued and terminal jobs survive a
restart; jobs that were running when the process died are marked failed
on the next start. A fixed pool of worker threads (default: CPU count)
executes jobs; cancellation is cooperative and takes effect at the next
checkpoint (per Gibbs sweep, per minibatch, per document scan step).

Results are always named resources -- sub-collections, models,
dictionaries, queues, or report files -- referenced as
``"<type>:<name>"``, never inline payloads.
"""

from __future__ import annotations

import json
import os
import queue as queue_mod
import sqlite3
import threading
import time
import uuid
from dataclasses import dataclass
from typing import Any, Callable, Optional

from . import classify, dictionary, lexicometrics, topics
from .lexicometrics import MEASURES
from .workspace import Workspace, check_name

STATUSES = ("queued", "running", "done", "failed", "cancelled")
TERMINAL = ("done", "failed", "cancelled")


class JobError(Exception):
    """Submission-time validation failure."""


class JobCancelled(Exception):
    """Raised inside a runner when its job has been cancelled."""


@dataclass
class Job:
    id: str
    kind: str
    params: dict
    status: str
    progress: float
    stage: str
    result_ref: Optional[str]
    error: Optional[str]
    created_at: float
    started_at: Optional[float]
    finished_at: Optional[float]

    def to_json(self) -> dict:
        return {
            "id": self.id, "kind": self.kind, "params": self.params,
            "status": self.status, "progress": self.progress,
            "stage": self.stage, "result_ref": self.result_ref,
            "error": self.error, "created_at": self.created_at,
            "started_at": self.started_at, "finished_at": self.finished_at,
        }


class JobContext:
    """Progress reporting and cancellation checkpoint for one running job."""

    def __init__(self, server: "JobServer", job_id: str,
                 cancel_event: threading.Event):
        self._server = server
        self._job_id = job_id
        self._cancel = cancel_event
        self._progress = 0.0

    def checkpoint(self) -> None:
        if self._cancel.is_set():
            raise JobCancelled()

    def progress(self, fraction: float, stage: Optional[str] = None) -> None:
        """Report progress (clamped non-decreasing) and honor cancellation."""
        self.checkpoint()
        self._progress = max(self._progress, min(1.0, fraction))
        self._server._update(self._job_id, progress=self._progress,
                             **({"stage": stage} if stage is not None else {}))


# ----------------------------------------------------------------------
# kind registry: parameter schemas and runners

@dataclass
class _Field:
    type: type
    required: bool = True
    default: Any = None
    choices: Optional[tuple] = None


def _validate_params(kind: str, schema: dict[str, _Field], params: dict) -> dict:
    if not isinstance(params, dict):
        raise JobError("params must be an object")
    unknown = set(params) - set(schema)
    if unknown:
        raise JobError(f"unknown params for {kind}: {sorted(unknown)}")
    out = {}
    for name, spec in schema.items():
        if name not in params or params[name] is None:
            if spec.required:
                raise JobError(f"{kind}: missing required param {name!r}")
            out[name] = spec.default
            continue
        value = params[name]
        if spec.type is float and isinstance(value, int):
            value = float(value)
        if not isinstance(value, spec.type):
            raise JobError(f"{kind}: param {name!r} must be "
                           f"{spec.type.__name__}, got {type(value).__name__}")
        if spec.choices is not None and value not in spec.choices:
            raise JobError(f"{kind}: param {name!r} must be one of "
                           f"{spec.choices}")
        out[name] = value
    return out


def _require_collection(ws: Workspace, name: Optional[str]) -> None:
    if name is not None:
        ws.store.get_subcollection(name)  # raises NotFoundError


def _default_name(params: dict, job_id: str) -> str:
    return check_name(params.get("name") or job_id)


def _run_ingest(ws: Workspace, params: dict, ctx: JobContext, job_id: str) -> str:
    from .textproc import segment_document
    count = ws.store.ingest(params["path"])
    ctx.progress(0.3, "stored")
    if params["segment"]:
        doc_ids = ws.store.document_ids()
        for i, doc_id in enumerate(doc_ids):
            doc = ws.store.get_document(doc_id)
            if not doc.has_layer("token"):
                segment_document(ws.store, doc_id)
            if (i + 1) % 100 == 0 or i + 1 == len(doc_ids):
                ctx.progress(0.3 + 0.7 * (i + 1) / len(doc_ids), "segmenting")
    name = _default_name(params, job_id)
    ws.write_report(name, json.dumps({"ingested": count}))
    return f"report:{name}"


def _run_index(ws: Workspace, params: dict, ctx: JobContext, job_id: str) -> str:
    from .textproc import segment_document
    doc_ids = ws.store.resolve(params["collection"])
    for i, doc_id in enumerate(doc_ids):
        doc = ws.store.get_document(doc_id)
        if not doc.has_layer("token"):
            segment_document(ws.store, doc_id)
        if (i + 1) % 100 == 0 or i + 1 == len(doc_ids):
            ctx.progress(0.5 * (i + 1) / max(len(doc_ids), 1), "segmenting")
    ctx.progress(0.5, "building index")
    ws.build_and_save_index(params["collection"], params["name"])
    ctx.progress(1.0, "done")
    return f"index:{params['name']}"


def _run_keyterms(ws: Workspace, params: dict, ctx: JobContext, job_id: str) -> str:
    target = ws.corpus(params["target"])
    ctx.progress(0.3, "loading")
    reference = ws.corpus(params["reference"])
    terms = lexicometrics.extract_keyterms(target, reference, params["top_k"])
    ctx.progress(0.9, "ranking")
    name = _default_name(params, job_id)
    ws.write_report(name, lexicometrics.keyterms_to_json(terms))
    return f"report:{name}"


def _run_cooccurrence(ws: Workspace, params: dict, ctx: JobContext,
                      job_id: str) -> str:
    corpus = ws.corpus(params["collection"])
    ctx.progress(0.3, "loading")
    graph = lexicometrics.cooccurrence_graph(
        corpus, params["seeds"], params["measure"],
        params["top_k"], params["min_count"])
    name = _default_name(params, job_id)
    ws.write_report(name, json.dumps(graph.to_json(), indent=2))
    return f"report:{name}"


def _run_dict_build(ws: Workspace, params: dict, ctx: JobContext,
                    job_id: str) -> str:
    reference = ws.corpus(params["reference"])
    ctx.progress(0.2, "loading")
    contrast = ws.corpus(params["contrast"])  # may be None -> whole corpus
    built = dictionary.build_dictionary(reference, contrast, params["size"])
    ws.save_dictionary(built, params["name"])
    return f"dictionary:{params['name']}"


def _run_dict_retrieve(ws: Workspace, params: dict, ctx: JobContext,
                       job_id: str) -> str:
    dct = ws.load_dictionary(params["dictionary"])
    corpus = ws.corpus(params["target"])
    ctx.progress(0.2, "scoring")
    result = dictionary.retrieve_to_collection(
        ws.store, corpus, dct, params["name"], params["top_m"],
        provenance=f"dict-retrieve job {job_id}", replace=params["replace"])
    if result.empty:
        ctx.progress(1.0, "warning: all documents scored zero")
    return f"collection:{params['name']}"


def _run_topic_fit(ws: Workspace, params: dict, ctx: JobContext,
                   job_id: str) -> str:
    corpus = ws.corpus(params["collection"])
    ctx.progress(0.02, "loading")
    common = dict(n_topics=params["k"], alpha=params["alpha"],
                  beta=params["beta"], seed=params["seed"])
    if params["method"] == "gibbs":
        iters = params["iterations"]
        state = topics.fit_gibbs(
            corpus, iterations=iters, **common,
            on_sweep=lambda sweep, _c: ctx.progress(
                0.02 + 0.95 * sweep / iters, f"sweep {sweep}/{iters}"))
    else:
        state = topics.fit_online(
            corpus, batch_size=params["batch_size"], kappa=params["kappa"],
            tau0=params["tau0"], passes=params["passes"], **common,
            on_batch=lambda done, total: ctx.progress(
                0.02 + 0.95 * done / total, f"batch {done}/{total}"))
    ws.save_topic_model(state, params["name"])
    return f"model:{params['name']}"


def _run_classify_train(ws: Workspace, params: dict, ctx: JobContext,
                        job_id: str) -> str:
    doc_ids = (ws.store.resolve(params["collection"])
               if params["collection"] else None)
    spans = ws.spans.training_spans(doc_ids)
    ctx.progress(0.2, f"{len(spans)} training spans")
    examples = classify.spans_to_examples(ws.store, spans)
    topic_state = (ws.load_topic_model(params["topic_model"])
                   if params["topic_model"] else None)
    model = classify.train(
        examples, smoothing=params["smoothing"],
        smoothing_lambda=params["lambda"], topic_state=topic_state,
        topic_model_ref=params["topic_model"],
        stopwords=params["stopwords"], min_tf=params["min_tf"])
    ws.save_classifier(model, params["name"])
    return f"classifier:{params['name']}"


def _run_classify_queue(ws: Workspace, params: dict, ctx: JobContext,
                        job_id: str) -> str:
    model = ws.load_classifier(params["classifier"])
    ctx.progress(0.1, "scoring units")
    built = classify.build_queue(
        ws.store, model, params["collection"], params["unit_size"],
        params["order"], params["limit"],
        queue_id=params["name"], model_ref=params["classifier"])
    ws.save_queue(built)
    return f"queue:{built.queue_id}"


def _run_evaluate(ws: Workspace, params: dict, ctx: JobContext,
                  job_id: str) -> str:
    model = ws.load_classifier(params["classifier"])
    doc_ids = (ws.store.resolve(params["collection"])
               if params["collection"] else None)
    spans = ws.spans.training_spans(doc_ids)
    if not spans:
        raise JobError("no labeled spans to evaluate against")
    examples = classify.spans_to_examples(ws.store, spans)
    ctx.progress(0.5, f"evaluating {len(examples)} spans")
    report = classify.evaluate(model, examples)
    name = _default_name(params, job_id)
    ws.write_report(name, report.to_csv(), ext=".csv")
    return f"report:{name}"


_OPT_NAME = _Field(str, required=False)

KINDS: dict[str, tuple[dict[str, _Field], Callable]] = {
    "ingest": ({
        "path": _Field(str),
        "segment": _Field(bool, required=False, default=True),
        "name": _OPT_NAME,
    }, _run_ingest),
    "index": ({
        "collection": _Field(str, required=False),
        "name": _Field(str, required=False, default="main"),
    }, _run_index),
    "keyterms": ({
        "target": _Field(str),
        "reference": _Field(str),
        "top_k": _Field(int, required=False, default=500),
        "name": _OPT_NAME,
    }, _run_keyterms),
    "cooccurrence": ({
        "collection": _Field(str, required=False),
        "seeds": _Field(list),
        "measure": _Field(str, required=False, default="loglik",
                          choices=MEASURES),
        "top_k": _Field(int, required=False, default=10),
        "min_count": _Field(int, required=False, default=1),
        "name": _OPT_NAME,
    }, _run_cooccurrence),
    "dict-build": ({
        "reference": _Field(str),
        "contrast": _Field(str, required=False),
        "size": _Field(int, required=False,
                       default=dictionary.DEFAULT_DICTIONARY_SIZE),
        "name": _Field(str),
    }, _run_dict_build),
    "dict-retrieve": ({
        "dictionary": _Field(str),
        "target": _Field(str, required=False),
        "top_m": _Field(int, required=False,
                        default=dictionary.DEFAULT_RETRIEVE_LIMIT),
        "name": _Field(str),
        "replace": _Field(bool, required=False, default=False),
    }, _run_dict_retrieve),
    "topic-fit": ({
        "collection": _Field(str, required=False),
        "method": _Field(str, required=False, default="gibbs",
                         choices=("gibbs", "online")),
        "k": _Field(int),
        "alpha": _Field(float, required=False),
        "beta": _Field(float, required=False, default=topics.DEFAULT_BETA),
        "iterations": _Field(int, required=False, default=500),
        "batch_size": _Field(int, required=False,
                             default=topics.DEFAULT_BATCH_SIZE),
        "kappa": _Field(float, required=False, default=topics.DEFAULT_KAPPA),
        "tau0": _Field(float, required=False,
                       default=float(topics.DEFAULT_TAU0)),
        "passes": _Field(int, required=False, default=1),
        "seed": _Field(int, required=False, default=0),
        "name": _Field(str),
    }, _run_topic_fit),
    "classify-train": ({
        "collection": _Field(str, required=False),
        "smoothing": _Field(str, required=False, default="laplace",
                            choices=("laplace", "semantic")),
        "lambda": _Field(float, required=False,
                         default=classify.DEFAULT_SEMANTIC_LAMBDA),
        "topic_model": _Field(str, required=False),
        "stopwords": _Field(list, required=False, default=[]),
        "min_tf": _Field(int, required=False, default=1),
        "name": _Field(str),
    }, _run_classify_train),
    "classify-queue": ({
        "classifier": _Field(str),
        "collection": _Field(str, required=False),
        "unit_size": _Field(int, required=False,
                            default=classify.DEFAULT_UNIT_SIZE),
        "order": _Field(str, required=False, default="most-certain",
                        choices=("most-certain", "least-certain")),
        "limit": _Field(int, required=False),
        "name": _OPT_NAME,
    }, _run_classify_queue),
    "evaluate": ({
        "classifier": _Field(str),
        "collection": _Field(str, required=False),
        "name": _OPT_NAME,
    }, _run_evaluate),
}


def validate_submission(ws: Workspace, kind: str, params: dict) -> dict:
    """Field-level validation plus referenced-resource existence checks."""
    if kind not in KINDS:
        raise JobError(f"unknown job kind {kind!r} (one of {sorted(KINDS)})")
    schema, _ = KINDS[kind]
    clean = _validate_params(kind, schema, params)

    try:
        if kind == "ingest" and not os.path.exists(clean["path"]):
            raise JobError(f"no such file: {clean['path']}")
        for field in ("collection", "target", "reference", "contrast"):
            if field in clean:
                _require_collection(ws, clean[field])
        if kind == "dict-retrieve":
            ws.load_dictionary(clean["dictionary"])
        if kind in ("classify-queue", "evaluate"):
            ws.load_classifier(clean["classifier"])
        if kind == "classify-train" and clean["topic_model"]:
            ws.load_topic_model(clean["topic_model"])
        if kind == "classify-train" and clean["smoothing"] == "semantic" \
                and not clean["topic_model"]:
            raise JobError("semantic smoothing requires topic_model")
    except FileNotFoundError as exc:
        raise JobError(str(exc))
    except JobError:
        raise
    except Exception as exc:
        raise JobError(str(exc))

    if "name" in clean and clean["name"]:
        check_name(clean["name"])
    if "seeds" in clean and not all(isinstance(s, str) for s in clean["seeds"]):
        raise JobError("seeds must be strings")
    return clean


# ----------------------------------------------------------------------
# the server

class JobServer:
    """One queue, W workers, SQLite-persisted job records."""

    def __init__(self, workspace: Workspace, workers: Optional[int] = None):
        self.workspace = workspace
        self.workers = workers or os.cpu_count() or 2
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(
            workspace.data_dir / "jobs.db", check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._queue: queue_mod.Queue = queue_mod.Queue()
        self._cancel_events: dict[str, threading.Event] = {}
        self._threads: list[threading.Thread] = []
        self._shutdown = False
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA busy_timeout=10000")
            self._conn.execute("""
                CREATE TABLE IF NOT EXISTS jobs (
                    id TEXT PRIMARY KEY,
                    kind TEXT NOT NULL,
                    params TEXT NOT NULL,
                    status TEXT NOT NULL,
                    progress REAL NOT NULL DEFAULT 0,
                    stage TEXT NOT NULL DEFAULT '',
                    result_ref TEXT,
                    error TEXT,
                    created_at REAL NOT NULL,
                    started_at REAL,
                    finished_at REAL
                )
            """)
            self._conn.commit()
        self._recover()
        for i in range(self.workers):
            t = threading.Thread(target=self._worker, name=f"lcm-worker-{i}",
                                 daemon=True)
            t.start()
            self._threads.append(t)

    def _recover(self) -> None:
        """Mark jobs running at crash time failed; re-enqueue queued ones."""
        with self._lock:
            self._conn.execute(
                "UPDATE jobs SET status='failed', "
                "error='interrupted by server restart', finished_at=? "
                "WHERE status='running'", (time.time(),))
            self._conn.commit()
            rows = self._conn.execute(
                "SELECT id FROM jobs WHERE status='queued' "
                "ORDER BY created_at").fetchall()
        for row in rows:
            with self._lock:
                self._cancel_events[row["id"]] = threading.Event()
            self._queue.put(row["id"])

    # ------------------------------------------------------------------
    # API

    def submit(self, kind: str, params: dict) -> str:
        """Validate and queue a job; returns its id."""
        clean = validate_submission(self.workspace, kind, params)
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._conn.execute(
                "INSERT INTO jobs (id, kind, params, status, created_at) "
                "VALUES (?, ?, ?, 'queued', ?)",
                (job_id, kind, json.dumps(clean), time.time()))
            self._conn.commit()
            self._cancel_events[job_id] = threading.Event()
        self._queue.put(job_id)
        return job_id

    def poll(self, job_id: str) -> Job:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM jobs WHERE id = ?", (job_id,)).fetchone()
        if row is None:
            raise JobError(f"unknown job id {job_id!r}")
        return self._to_job(row)

    def cancel(self, job_id: str) -> Job:
        """Request cancellation; queued jobs cancel immediately, running
        jobs at their next checkpoint."""
        with self._lock:
            job = self.poll(job_id)
            if job.status in TERMINAL:
                raise JobError(f"job {job_id} already {job.status}")
            event = self._cancel_events.get(job_id)
            if event is not None:
                event.set()
            if job.status == "queued":
                self._update(job_id, status="cancelled",
                             finished_at=time.time())
        return self.poll(job_id)

    def list_jobs(self, status: Optional[str] = None,
                  kind: Optional[str] = None) -> list[Job]:
        sql = "SELECT * FROM jobs"
        clauses, args = [], []
        if status is not None:
            clauses.append("status = ?")
            args.append(status)
        if kind is not None:
            clauses.append("kind = ?")
            args.append(kind)
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)
        sql += " ORDER BY created_at DESC, id"
        with self._lock:
            rows = self._conn.execute(sql, args).fetchall()
        return [self._to_job(r) for r in rows]

    def wait(self, job_id: str, timeout: float = 300.0,
             poll_interval: float = 0.05) -> Job:
        """Block until a job reaches a terminal status."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            job = self.poll(job_id)
            if job.status in TERMINAL:
                return job
            time.sleep(poll_interval)
        raise TimeoutError(f"job {job_id} still {self.poll(job_id).status} "
                           f"after {timeout}s")

    def shutdown(self) -> None:
        self._shutdown = True
        for _ in self._threads:
            self._queue.put(None)
        for t in self._threads:
            t.join(timeout=10)
        with self._lock:
            self._conn.close()

    # ------------------------------------------------------------------
    # internals

    def _to_job(self, row: sqlite3.Row) -> Job:
        return Job(id=row["id"], kind=row["kind"],
                   params=json.loads(row["params"]), status=row["status"],
                   progress=row["progress"], stage=row["stage"],
                   result_ref=row["result_ref"], error=row["error"],
                   created_at=row["created_at"], started_at=row["started_at"],
                   finished_at=row["finished_at"])

    def _update(self, job_id: str, **fields) -> None:
        keys = ", ".join(f"{k} = ?" for k in fields)
        with self._lock:
            self._conn.execute(
                f"UPDATE jobs SET {keys} WHERE id = ?",
                (*fields.values(), job_id))
            self._conn.commit()

    def _worker(self) -> None:
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            try:
                self._run_one(job_id)
            except Exception:
                # a failing runner marks its own job; never kill the worker
                pass

    def _run_one(self, job_id: str) -> None:
        with self._lock:
            job = self.poll(job_id)
            if job.status != "queued":
                return  # cancelled while waiting
            event = self._cancel_events.setdefault(job_id, threading.Event())
            self._update(job_id, status="running", started_at=time.time())
        ctx = JobContext(self, job_id, event)
        _, runner = KINDS[job.kind]
        try:
            result_ref = runner(self.workspace, job.params, ctx, job_id)
            ctx.checkpoint()  # a cancel racing the finish still wins
            self._update(job_id, status="done", progress=1.0,
                         result_ref=result_ref, finished_at=time.time())
        except JobCancelled:
            self._update(job_id, status="cancelled", finished_at=time.time())
        except Exception as exc:
            self._update(job_id, status="failed", error=str(exc),
                         finished_at=time.time())
        finally:
            with self._lock:
                self._cancel_events.pop(job_id, None)
