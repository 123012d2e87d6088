"""Walkthrough: the full workflow over HTTP, the way the web UI drives it.

Boots the REST service with uvicorn, a stub inference endpoint, and the
in-tree mock image-search provider, then replays an analyst session:
ingest -> wait for the layout -> explore concepts -> build a hypothesis ->
validate with searched images -> export a bundle.
"""

import json
import tempfile
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import httpx
import uvicorn

from blindspot.fixtures import eyeglass_blobs, eyeglass_config, eyeglass_records, eyeglass_vector_file
from blindspot.service import EngineConfig, MockSearchProvider, SearchResult, TriageEngine, create_app


class StubModel(BaseHTTPRequestHandler):
    """Pretends to be the deployed eyeglass classifier."""

    def do_POST(self):
        self.rfile.read(int(self.headers.get("content-length", 0)))
        body = json.dumps({"label": "no_glasses", "confidence": 0.58}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


stub = ThreadingHTTPServer(("127.0.0.1", 0), StubModel)
threading.Thread(target=stub.serve_forever, daemon=True).start()

provider = MockSearchProvider(
    results=[SearchResult(f"m{i}", f"https://img.example/{i}.png", f"author {i}", "CC-BY") for i in range(6)],
    payloads={f"https://img.example/{i}.png": (f"found image {i}".encode(), "image/png") for i in range(6)},
)

engine = TriageEngine(
    EngineConfig(
        corpus_dir=Path(tempfile.mkdtemp(prefix="triage-demo-")) / "corpus",
        vector_file=eyeglass_vector_file(),
        model_endpoint=f"http://127.0.0.1:{stub.server_address[1]}",
        search_provider=provider,
        domain=eyeglass_config(),
        layout_seed=42,
    )
)
server = uvicorn.Server(uvicorn.Config(create_app(engine), host="127.0.0.1", port=0, log_level="error"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.02)
base = f"http://127.0.0.1:{server.servers[0].sockets[0].getsockname()[1]}"
print(f"service at {base}\n")
api = httpx.Client(base_url=base, timeout=30)

# Stage 1: collection. Blobs first (content-addressed), then the reports.
for data in eyeglass_blobs():
    api.post("/api/instances", content=data, headers={"Content-Type": "image/png"})
ingest = api.post("/api/reports/ingest", content=eyeglass_records().encode()).json()
print(f"ingested {ingest['accepted']} reports at corpus version {ingest['version']}")

# Stage 2: analysis. The layout builds in the background; the UI polls.
while True:
    layout = api.get("/api/layout").json()
    if layout["status"] == "available" and layout["version"] == ingest["version"]:
        break
    time.sleep(0.1)
print(f"layout ready: {len(layout['points'])} placed concepts")

concepts = api.get("/api/concepts", params={"query": "rims"}).json()["concepts"]
print("concepts matching 'rims':", [c["phrase"] for c in concepts][:5])

hyp = api.post("/api/hypotheses", json={"name": "thin, clear, or no rims"}).json()
reports = api.get("/api/reports", params={"query": "rims", "page_size": 3}).json()["items"]
for report in reports:
    api.post(f"/api/hypotheses/{hyp['id']}/reports", json={"report_id": report["id"]})
print(f"hypothesis {hyp['name']!r} with {len(reports)} attached reports")

# Stage 3: validation. Search, fetch, predict, judge.
found = api.get("/api/search/images", params={"q": "person with clear glasses", "limit": 4}).json()["results"]
item_ids = []
for result in found[:3]:
    instance = api.post("/api/search/images/fetch", json=result).json()
    item = api.post(
        f"/api/hypotheses/{hyp['id']}/evidence/additional",
        json={"instance_id": instance["id"], "origin": "image_search"},
    ).json()
    item_ids.append(item["id"])
    print(f"  model on {result['remote_url']}: {item['model_output']['label_or_caption']}")
for item_id, verdict in zip(item_ids, ("correct", "correct", "incorrect")):
    api.patch(f"/api/hypotheses/{hyp['id']}/evidence/additional/{item_id}/verdict", json={"verdict": verdict})

summary = api.get(f"/api/hypotheses/{hyp['id']}/summary").json()
print(f"accuracy bar: {summary['additional_accuracy']:.0%} ({summary['additional_counts']})")

# Export the whole workspace for a colleague.
bundle = api.get("/api/export", params={"blobs": True}).content
print(f"\nexported workspace bundle: {len(bundle)} bytes")

server.should_exit = True
stub.shutdown()
engine.close()
print("done")
