"""Record API responses from a live engine into JSON fixtures for the
frontend component tests. Deterministic: fixture corpus, pinned seed, stub
model, mock search provider.

Usage: python tools/record_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from fastapi.testclient import TestClient  # noqa: E402

from blindspot.fixtures import eyeglass_blobs, eyeglass_config, eyeglass_records, eyeglass_vector_file  # noqa: E402
from blindspot.service import create_app  # noqa: E402
from conftest import StubModelServer, make_engine, make_mock_provider  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    print(f"wrote {name}")


def main() -> None:
    stub = StubModelServer(payload={"label": "no_glasses", "confidence": 0.62})
    tmp = Path(tempfile.mkdtemp())
    engine = make_engine(
        tmp / "corpus",
        domain=eyeglass_config(),
        vector_file=eyeglass_vector_file(),
        model_endpoint=stub.endpoint,
        provider=make_mock_provider(7),
        seed=42,
    )
    try:
        for data in eyeglass_blobs():
            engine.store.store_instance(data, "image/png")
        engine.store.ingest_reports(eyeglass_records())
        engine.rebuild_now()
        with TestClient(create_app(engine)) as client:
            layout = client.get("/api/layout").json()
            dump("layout.json", layout)

            concepts = client.get("/api/concepts").json()
            dump("concepts.json", concepts)

            # A busy concept (many reports) for the hover-preview cap test.
            busy = max(concepts["concepts"], key=lambda c: len(c["report_ids"]))
            busy_reports = client.get(
                "/api/reports", params={"concept": busy["id"], "page_size": 100}
            ).json()
            dump("busy_concept.json", {"concept": busy, "reports": busy_reports})

            # A single-report concept for the small-preview test.
            single = next(c for c in concepts["concepts"] if len(c["report_ids"]) == 1)
            single_reports = client.get(
                "/api/reports", params={"concept": single["id"], "page_size": 100}
            ).json()
            dump("single_concept.json", {"concept": single, "reports": single_reports})

            # A zero-match custom keyword for the empty-preview state.
            custom = client.post("/api/concepts/custom", json={"phrase": "holographic visor"}).json()
            dump("custom_concept.json", custom)

            # Hypothesis with evidence: 3 correct, 1 incorrect -> 75% bar.
            hyp = client.post("/api/hypotheses", json={"name": "thin, clear, or no rims"}).json()
            thin_reports = client.get("/api/reports", params={"query": "thin", "page_size": 2}).json()["items"]
            for report in thin_reports:
                client.post(f"/api/hypotheses/{hyp['id']}/reports", json={"report_id": report["id"]})
            item_ids = []
            for i in range(4):
                inst = client.post(
                    "/api/instances",
                    content=f"recorded evidence image {i}".encode(),
                    headers={"Content-Type": "image/png"},
                ).json()
                item = client.post(
                    f"/api/hypotheses/{hyp['id']}/evidence/additional",
                    json={"instance_id": inst["id"], "origin": "image_search"},
                ).json()
                item_ids.append(item["id"])
            for item_id, verdict in zip(item_ids, ("correct", "correct", "correct", "incorrect")):
                client.patch(
                    f"/api/hypotheses/{hyp['id']}/evidence/additional/{item_id}/verdict",
                    json={"verdict": verdict},
                )
            summary = client.get(f"/api/hypotheses/{hyp['id']}/summary").json()
            dump("summary.json", summary)

            hypotheses = client.get("/api/hypotheses").json()
            dump("hypotheses.json", hypotheses)

            related = client.get(
                f"/api/hypotheses/{hyp['id']}/reports/{thin_reports[0]['id']}/concepts"
            ).json()
            dump(
                "related_concepts.json",
                {"hypothesis_id": hyp["id"], "report_id": thin_reports[0]["id"], **related},
            )

            attached = client.get("/api/reports", params={"query": "thin", "page_size": 2}).json()
            dump("attached_reports.json", attached)

            search = client.get("/api/search/images", params={"q": "clear glasses", "limit": 5}).json()
            dump("search_results.json", search)

            # Trio proximity sanity for the embedding test.
            by_phrase = {c["phrase"]: c["id"] for c in concepts["concepts"]}
            points = {p["concept_id"]: (p["x"], p["y"]) for p in layout["points"]}
            import itertools
            import math

            trio = [by_phrase[p] for p in ("glasses", "frames", "lenses")]
            trio_d = [
                math.dist(points[a], points[b]) for a, b in itertools.combinations(trio, 2)
            ]
            all_d = [
                math.dist(p, q) for p, q in itertools.combinations(points.values(), 2)
            ]
            mean_d = sum(all_d) / len(all_d)
            print(f"trio distances: {[f'{d:.2f}' for d in trio_d]}, layout mean pairwise: {mean_d:.2f}")
    finally:
        engine.close()
        stub.close()


if __name__ == "__main__":
    main()
