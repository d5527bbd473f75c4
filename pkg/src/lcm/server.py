"""HTTP/JSON API over the workspace and job server.

Implemented on the stdlib ThreadingHTTPServer: the API surface is small
and fixed, and an in-process server keeps end-to-end tests hermetic.
Every analysis mutation (annotations, verdicts, jobs, collections) is a
single HTTP call; results of long-running work are named resources
fetched through their own endpoints.
"""

from __future__ import annotations

import json
import mimetypes
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Optional
from urllib.parse import parse_qs, urlparse

from . import classify, lexicometrics
from .jobs import JobError, JobServer
from .query import QueryParseError
from .store import NotFoundError, StoreError
from .workspace import Workspace


class ApiError(Exception):
    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.payload = {"error": message, **extra}


def _bad_request(message: str, **extra) -> ApiError:
    return ApiError(400, message, **extra)


class App:
    """Routes API calls onto the workspace and job server."""

    def __init__(self, workspace: Workspace, jobs: JobServer,
                 static_dir: Optional[Path] = None):
        self.ws = workspace
        self.jobs = jobs
        self.static_dir = static_dir
        self._mutex = threading.RLock()  # serializes verdicts and tree edits

    # ------------------------------------------------------------------
    # dispatch

    def handle(self, method: str, path: str, params: dict,
               body: Optional[dict]) -> tuple[int, Any]:
        try:
            return self._route(method, path, params, body or {})
        except ApiError as exc:
            return exc.status, exc.payload
        except QueryParseError as exc:
            return 400, {"error": str(exc), "position": exc.pos}
        except (NotFoundError, FileNotFoundError) as exc:
            return 404, {"error": str(exc)}
        except (JobError, StoreError, ValueError, KeyError, TypeError) as exc:
            return 400, {"error": str(exc)}

    def _route(self, method: str, path: str, params: dict,
               body: dict) -> tuple[int, Any]:
        parts = [p for p in path.split("/") if p]
        if not parts or parts[0] != "api":
            raise ApiError(404, f"unknown path {path!r}")
        parts = parts[1:]
        key = (method, parts[0] if parts else "")

        if key == ("POST", "jobs") and len(parts) == 1:
            job_id = self.jobs.submit(body.get("kind", ""),
                                      body.get("params", {}))
            return 201, self.jobs.poll(job_id).to_json()
        if key == ("GET", "jobs") and len(parts) == 1:
            jobs = self.jobs.list_jobs(status=_first(params, "status"),
                                       kind=_first(params, "kind"))
            return 200, {"jobs": [j.to_json() for j in jobs]}
        if key == ("GET", "jobs") and len(parts) == 2:
            return 200, self.jobs.poll(parts[1]).to_json()
        if key == ("DELETE", "jobs") and len(parts) == 2:
            return 200, self.jobs.cancel(parts[1]).to_json()

        if key == ("GET", "collections") and len(parts) == 1:
            return 200, {"collections": [
                {"name": c.name, "size": len(c), "provenance": c.provenance}
                for c in self.ws.store.list_subcollections()]}
        if key == ("POST", "collections") and len(parts) == 1:
            return 201, self._create_collection(body)
        if key == ("GET", "collections") and len(parts) == 2:
            c = self.ws.store.get_subcollection(parts[1])
            return 200, {"name": c.name, "doc_ids": c.doc_ids,
                         "provenance": c.provenance}

        if key == ("GET", "documents") and len(parts) == 2:
            return 200, self._document(parts[1])

        if key == ("GET", "search"):
            return 200, self._search(params)

        if key == ("GET", "series"):
            return 200, self._series(params)

        if key == ("GET", "cooc-graph"):
            return 200, self._cooc_graph(params)

        if key == ("GET", "topics") and len(parts) == 2:
            return 200, self._topics(parts[1], params)

        if key == ("GET", "annotations"):
            doc_id = _require(params, "doc")
            spans = self.ws.spans.spans([doc_id])
            return 200, {"spans": [vars(s) for s in spans]}
        if key == ("POST", "annotations") and len(parts) == 1:
            return 201, self._annotate(body)
        if key == ("DELETE", "annotations") and len(parts) == 2:
            doc_id = _require(params, "doc")
            with self._mutex:
                self.ws.spans.delete(doc_id, parts[1])
            return 200, {"deleted": parts[1]}

        if key == ("GET", "categories") and len(parts) == 1:
            return 200, self.ws.categories().to_json()
        if key == ("POST", "categories"):
            return 201, self._edit_categories(parts[1:], body)
        if key == ("DELETE", "categories") and len(parts) == 2:
            with self._mutex:
                tree = self.ws.categories()
                tree.delete(parts[1], self.ws.spans.category_in_use)
                self.ws.save_categories(tree)
            return 200, {"deleted": parts[1]}

        if key == ("GET", "queues") and len(parts) == 1:
            return 200, {"queues": self.ws.list_artifacts("queues")}
        if key == ("GET", "queue") and len(parts) == 2:
            queue = self.ws.load_queue(parts[1])
            return 200, self._queue_json(queue)
        if key == ("POST", "queue") and len(parts) == 3 and parts[2] == "verdict":
            return 200, self._verdict(parts[1], body)

        if key == ("GET", "resources") and len(parts) == 1:
            return 200, {kind: self.ws.list_artifacts(kind)
                         for kind in ("indexes", "dictionaries", "models",
                                      "classifiers", "queues", "reports")}
        if key == ("GET", "reports") and len(parts) == 2:
            return 200, {"name": parts[1], "content": self.ws.read_report(parts[1])}

        raise ApiError(404, f"unknown endpoint {method} {path}")

    # ------------------------------------------------------------------
    # handlers

    def _create_collection(self, body: dict) -> dict:
        name = body.get("name")
        if not name:
            raise _bad_request("collection name required")
        provenance = body.get("provenance", "manual")
        if "query" in body:
            shard = self.ws.load_index(body.get("index", "main"))
            result = shard.search(body["query"], limit=shard.doc_count)
            doc_ids = result.doc_ids
            provenance = body.get("provenance", f"query: {body['query']}")
        else:
            doc_ids = body.get("doc_ids")
            if not isinstance(doc_ids, list):
                raise _bad_request("doc_ids list or query required")
        c = self.ws.store.create_subcollection(name, doc_ids, provenance)
        return {"name": c.name, "size": len(c), "provenance": c.provenance}

    def _document(self, doc_id: str) -> dict:
        doc = self.ws.store.get_document(doc_id)
        meta = dict(doc.metadata)
        meta["date"] = doc.date.isoformat()
        return {
            "id": doc.id,
            "text": doc.text,
            "metadata": meta,
            "sentences": [{"begin": a.begin, "end": a.end}
                          for a in doc.layer("sentence")],
            "label_spans": [dict(a.attrs, begin=a.begin, end=a.end)
                            for a in doc.layer("label-span")],
        }

    def _search(self, params: dict) -> dict:
        query = _require(params, "q")
        shard = self.ws.load_index(_first(params, "index") or "main")
        limit = int(_first(params, "limit") or 10)
        offset = int(_first(params, "offset") or 0)
        result = shard.search(query, limit=limit, offset=offset)
        hits = []
        for doc_id, score in zip(result.doc_ids, result.scores):
            doc = self.ws.store.get_document(doc_id)
            hits.append({
                "id": doc_id,
                "score": score,
                "title": doc.metadata.get("title", ""),
                "date": doc.date.isoformat(),
                "source": doc.metadata.get("source", ""),
                "snippet": doc.text[:240],
            })
        facets = {}
        for field in params.get("facet", []):
            facets[field] = shard.facet_counts(query, field)
        return {"hits": hits, "total": result.total, "facets": facets}

    def _series(self, params: dict) -> dict:
        corpus = self.ws.corpus(_first(params, "collection"))
        series = lexicometrics.frequency_series(
            corpus, _require(params, "term"),
            bucketing=_first(params, "bucket") or "year",
            mode=_first(params, "mode") or "absolute")
        return {
            "term": series.term,
            "bucketing": series.bucketing,
            "mode": series.mode,
            "points": [{"bucket": p.bucket.isoformat(),
                        "absolute": p.absolute, "relative": p.relative}
                       for p in series.points],
        }

    def _cooc_graph(self, params: dict) -> dict:
        corpus = self.ws.corpus(_first(params, "collection"))
        seeds = params.get("seed", [])
        if not seeds:
            raise _bad_request("at least one seed term required")
        graph = lexicometrics.cooccurrence_graph(
            corpus, seeds,
            measure=_first(params, "measure") or "loglik",
            top_k=int(_first(params, "top_k") or 10),
            min_count=int(_first(params, "min_count") or 1))
        return graph.to_json()

    def _topics(self, name: str, params: dict) -> dict:
        from .topics import top_words, topics_over_time
        state = self.ws.load_topic_model(name)
        n = int(_first(params, "top") or 10)
        payload: dict = {
            "name": name,
            "kind": state.kind,
            "k": state.n_topics,
            "topics": [{"topic": k, "top_words": top_words(state, k, n)}
                       for k in range(state.n_topics)],
        }
        bucket = _first(params, "bucket")
        if bucket:
            payload["timeline"] = [
                {"bucket": b.isoformat(), "shares": list(map(float, row))}
                for b, row in topics_over_time(state, bucket)]
        return payload

    def _annotate(self, body: dict) -> dict:
        for field in ("doc", "first_sentence", "last_sentence", "category"):
            if field not in body:
                raise _bad_request(f"missing field {field!r}")
        with self._mutex:
            span = self.ws.spans.annotate(
                body["doc"], int(body["first_sentence"]),
                int(body["last_sentence"]), body["category"],
                self.ws.categories())
        return vars(span)

    def _edit_categories(self, rest: list[str], body: dict) -> dict:
        with self._mutex:
            tree = self.ws.categories()
            if rest:  # rename
                node = tree.rename(rest[0], body.get("label", ""))
            else:
                if not body.get("label"):
                    raise _bad_request("category label required")
                node = tree.add(body["label"], body.get("parent"))
            self.ws.save_categories(tree)
        return vars(node)

    def _queue_json(self, queue: classify.ReviewQueue) -> dict:
        precision = classify.running_precision(queue)
        return {
            "queue_id": queue.queue_id,
            "order": queue.order,
            "model_ref": queue.model_ref,
            "items": [vars(it) for it in queue.items],
            "pending": len(queue.pending()),
            "precision": precision.to_json(),
        }

    def _verdict(self, queue_id: str, body: dict) -> dict:
        item_id = body.get("item")
        verdict = body.get("verdict")
        if not item_id or verdict not in ("accept", "reject"):
            raise _bad_request("fields 'item' and 'verdict' "
                               "(accept|reject) required")
        with self._mutex:
            queue = self.ws.load_queue(queue_id)
            precision = classify.record_verdict(
                queue, item_id, verdict, self.ws.spans, self.ws.categories())
            self.ws.save_queue(queue)
        return {"item": vars(queue.item(item_id)),
                "precision": precision.to_json()}

    # ------------------------------------------------------------------
    # static files (the web UI build, when present)

    def static_file(self, path: str) -> Optional[tuple[bytes, str]]:
        if self.static_dir is None:
            return None
        rel = path.lstrip("/") or "index.html"
        if not re.match(r"^[A-Za-z0-9._/-]+$", rel) or ".." in rel:
            return None
        target = (self.static_dir / rel)
        if not target.is_file():
            return None
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        return target.read_bytes(), ctype


def _first(params: dict, key: str) -> Optional[str]:
    values = params.get(key)
    return values[0] if values else None


def _require(params: dict, key: str) -> str:
    value = _first(params, key)
    if value is None:
        raise _bad_request(f"missing query parameter {key!r}")
    return value


class _Handler(BaseHTTPRequestHandler):
    app: App = None  # set by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # silence request logging
        pass

    def _respond(self, status: int, payload: Any) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods",
                         "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _body(self) -> Optional[dict]:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return None
        raw = self.rfile.read(length)
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            return {"__invalid__": True}

    def _dispatch(self, method: str) -> None:
        url = urlparse(self.path)
        if method == "GET" and not url.path.startswith("/api"):
            served = self.app.static_file(url.path)
            if served is not None:
                data, ctype = served
                self.send_response(200)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(data)))
                self._cors()
                self.end_headers()
                self.wfile.write(data)
                return
        body = self._body() if method in ("POST", "DELETE") else None
        if body is not None and body.get("__invalid__"):
            self._respond(400, {"error": "request body is not valid JSON"})
            return
        try:
            status, payload = self.app.handle(method, url.path,
                                              parse_qs(url.query), body)
        except Exception as exc:  # defense in depth: never kill the server
            status, payload = 500, {"error": f"internal error: {exc}"}
        self._respond(status, payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(workspace: Workspace, jobs: JobServer, host: str = "127.0.0.1",
                port: int = 0, static_dir: Optional[str | Path] = None
                ) -> ThreadingHTTPServer:
    """Create (but do not start) the HTTP server; port 0 picks a free port."""
    handler = type("BoundHandler", (_Handler,), {
        "app": App(workspace, jobs,
                   Path(static_dir) if static_dir else None)})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(workspace: Workspace, host: str, port: int,
                  workers: Optional[int] = None,
                  static_dir: Optional[str | Path] = None) -> None:
    """Run the job server and HTTP API until interrupted."""
    jobs = JobServer(workspace, workers=workers)
    httpd = make_server(workspace, jobs, host, port, static_dir)
    print(f"serving on http://{host}:{httpd.server_address[1]} "
          f"(data dir: {workspace.data_dir}, workers: {jobs.workers})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
        jobs.shutdown()
