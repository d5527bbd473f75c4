"""End-to-end analysis workflow, driven headless through the CLI and HTTP API.

Steps:
  1. ingest a 10-doc reference set and a 200-doc target corpus, build a
     20-term contextualized dictionary from the reference, retrieve the
     top 30 target documents
  2. fit a 5-topic model over the retrieved set and filter one topic out
  3. annotate 10 snippets via the HTTP API under a 2-category system
  4. train a Naive Bayes classifier
  5. build a most-certain review queue, record 10 verdicts, retrain
  6. classify the full target collection and emit a
     category-proportion-over-time CSV

Run: python demos/run_workflow.py [--workdir DIR] [--keep]
Exits 0 on success.
"""

import argparse
import json
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request
from pathlib import Path

from lcm.datagen import workflow_corpus


def cli(data_dir, *args):
    cmd = [sys.executable, "-m", "lcm.cli", "--data-dir", str(data_dir),
           *map(str, args)]
    print(f"  $ lcm {' '.join(map(str, args))}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        print(proc.stdout)
        print(proc.stderr, file=sys.stderr)
        raise SystemExit(f"CLI step failed: {args[0]}")
    return proc.stdout


def http(port, method, path, body=None):
    url = f"http://127.0.0.1:{port}{path}"
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=30) as resp:
        return json.loads(resp.read())


def wait_for_job(port, job_id, timeout=240):
    deadline = time.time() + timeout
    while time.time() < deadline:
        job = http(port, "GET", f"/api/jobs/{job_id}")
        if job["status"] in ("done", "failed", "cancelled"):
            if job["status"] != "done":
                raise SystemExit(f"job {job_id} {job['status']}: "
                                 f"{job.get('error')}")
            return job
        time.sleep(0.1)
    raise SystemExit(f"job {job_id} timed out")


def free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", help="working directory (default: temp)")
    parser.add_argument("--keep", action="store_true",
                        help="keep the working directory")
    args = parser.parse_args()

    started = time.time()
    tmp = None
    if args.workdir:
        workdir = Path(args.workdir)
        workdir.mkdir(parents=True, exist_ok=True)
    else:
        tmp = tempfile.TemporaryDirectory(prefix="lcm-workflow-")
        workdir = Path(tmp.name)
    data_dir = workdir / "data"

    print("== step 0: generate toy corpora")
    ref_path, target_path = workflow_corpus(workdir, n_reference=10,
                                            n_target=200)

    print("== step 1: ingest, index, build dictionary, retrieve")
    cli(data_dir, "ingest", ref_path, target_path)
    cli(data_dir, "index")
    cli(data_dir, "collections", "create", "reference",
        "--from-query", "source:reference")
    cli(data_dir, "collections", "create", "target",
        "--from-query", "source:ZEIT OR source:TAZ")
    cli(data_dir, "dict", "build", "lexicon", "--reference", "reference",
        "--contrast", "target", "--size", "20")
    cli(data_dir, "dict", "retrieve", "lexicon", "--target", "target",
        "--top-m", "30", "--save", "retrieved")

    print("== step 2: topic model over the retrieved set, filter one topic")
    cli(data_dir, "topics", "fit", "themes", "--collection", "retrieved",
        "--k", "5", "--iterations", "200", "--seed", "1")
    print(cli(data_dir, "topics", "show", "themes", "--top", "5"))
    cli(data_dir, "topics", "filter", "themes", "--topic", "0",
        "--top-r", "6", "--complement", "--save", "analysis")

    print("== step 3: start the server, annotate snippets via the API")
    port = free_port()
    server = subprocess.Popen(
        [sys.executable, "-m", "lcm.cli", "--data-dir", str(data_dir),
         "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        for _ in range(100):
            try:
                http(port, "GET", "/api/jobs")
                break
            except (urllib.error.URLError, ConnectionError):
                time.sleep(0.1)
        else:
            raise SystemExit("server did not come up")

        econ = http(port, "POST", "/api/categories",
                    {"label": "economic framing"})["id"]
        soc = http(port, "POST", "/api/categories",
                   {"label": "social framing"})["id"]

        analysis_ids = http(port, "GET",
                            "/api/collections/analysis")["doc_ids"]
        econ_docs = [d for d in analysis_ids
                     if int(d.removeprefix("art")) % 2 == 0][:5]
        target_ids = http(port, "GET", "/api/collections/target")["doc_ids"]
        soc_docs = [d for d in target_ids
                    if int(d.removeprefix("art")) % 2 == 1][:5]
        for doc_id in econ_docs:
            http(port, "POST", "/api/annotations",
                 {"doc": doc_id, "first_sentence": 0, "last_sentence": 2,
                  "category": econ})
        for doc_id in soc_docs:
            http(port, "POST", "/api/annotations",
                 {"doc": doc_id, "first_sentence": 0, "last_sentence": 2,
                  "category": soc})
        print(f"  annotated {len(econ_docs) + len(soc_docs)} snippets")

        print("== step 4: train the classifier (job)")
        job = http(port, "POST", "/api/jobs", {
            "kind": "classify-train", "params": {"name": "nb1"}})
        wait_for_job(port, job["id"])

        print("== step 5: review queue, verdicts, retrain")
        job = http(port, "POST", "/api/jobs", {
            "kind": "classify-queue",
            "params": {"classifier": "nb1", "collection": "target",
                       "order": "most-certain", "limit": 20,
                       "name": "review1"}})
        wait_for_job(port, job["id"])
        queue = http(port, "GET", "/api/queue/review1")
        verdicts = 0
        for item in queue["items"][:10]:
            doc_register_a = int(item["doc_id"].removeprefix("art")) % 2 == 0
            predicted_econ = item["predicted"] == econ
            verdict = ("accept" if predicted_econ == doc_register_a
                       else "reject")
            result = http(port, "POST", "/api/queue/review1/verdict",
                          {"item": item["item_id"], "verdict": verdict})
            verdicts += 1
        print(f"  {verdicts} verdicts recorded, running precision "
              f"{result['precision']['overall']:.3f}")

        job = http(port, "POST", "/api/jobs", {
            "kind": "classify-train", "params": {"name": "nb2"}})
        wait_for_job(port, job["id"])
    finally:
        server.terminate()
        server.wait(timeout=10)

    print("== step 6: classify the full collection, emit timeline CSV")
    timeline = workdir / "category-proportions.csv"
    cli(data_dir, "train", "apply", "nb2", "--collection", "target",
        "--bucket", "year", "--timeline", timeline)
    rows = timeline.read_text().strip().splitlines()
    if rows[0] != "bucket,category,count,proportion" or len(rows) < 2:
        raise SystemExit("timeline CSV malformed")
    print(f"  {len(rows) - 1} timeline rows -> {timeline}")

    print(f"workflow complete in {time.time() - started:.1f}s")
    if tmp is not None and not args.keep:
        tmp.cleanup()
    return 0


if __name__ == "__main__":
    sys.exit(main())
