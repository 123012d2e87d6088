"""Shared fixtures: corpus factories, the bundled eyeglass corpus, a stub
inference server, and an engine/client factory wired to it."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from blindspot.corpus import CorpusStore, DomainConfig
from blindspot.fixtures import eyeglass_vector_file, load_eyeglass_corpus
from blindspot.layout import LayoutParams
from blindspot.service import EngineConfig, MockSearchProvider, SearchResult, TriageEngine, create_app


@pytest.fixture
def classification_config() -> DomainConfig:
    return DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses"))


@pytest.fixture
def store(tmp_path, classification_config) -> CorpusStore:
    return CorpusStore(tmp_path / "corpus", classification_config)


@pytest.fixture
def stored_instance(store):
    return store.store_instance(b"example headshot bytes", "image/png")


@pytest.fixture(scope="session")
def fixture_corpus_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("eyeglass") / "corpus"
    load_eyeglass_corpus(root)
    return root


class _StubModelHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        server = self.server
        length = int(self.headers.get("content-length", 0))
        self.rfile.read(length)
        server.hits += 1  # type: ignore[attr-defined]
        if server.delay:  # type: ignore[attr-defined]
            time.sleep(server.delay)  # type: ignore[attr-defined]
        if server.status != 200:  # type: ignore[attr-defined]
            self.send_response(server.status)  # type: ignore[attr-defined]
            self.end_headers()
            return
        payload = json.dumps(server.payload).encode()  # type: ignore[attr-defined]
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


class StubModelServer:
    """Tiny HTTP stub implementing the inference contract."""

    def __init__(self, payload=None, status=200, delay=0.0):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _StubModelHandler)
        self.server.hits = 0
        self.server.payload = payload or {"label": "glasses", "confidence": 0.9}
        self.server.status = status
        self.server.delay = delay
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    @property
    def hits(self) -> int:
        return self.server.hits

    def set_response(self, payload=None, status=200, delay=0.0):
        if payload is not None:
            self.server.payload = payload
        self.server.status = status
        self.server.delay = delay

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_model():
    server = StubModelServer()
    yield server
    server.close()


def make_mock_provider(n_results: int = 7) -> MockSearchProvider:
    results = []
    payloads = {}
    for i in range(n_results):
        url = f"https://images.example/photos/{i}.png"
        results.append(
            SearchResult(
                provider_id=f"mock-{i}",
                remote_url=url,
                attribution=f"photographer {i}",
                license="CC-BY",
            )
        )
        payloads[url] = (f"mock image payload {i}".encode(), "image/png")
    return MockSearchProvider(results=results, payloads=payloads)


@pytest.fixture
def mock_provider() -> MockSearchProvider:
    return make_mock_provider()


def make_engine(
    corpus_dir: Path,
    *,
    domain: DomainConfig | None = None,
    model_endpoint: str | None = None,
    provider: MockSearchProvider | None = None,
    vector_file: Path | None = None,
    auto_rebuild: bool = False,
    seed: int = 42,
    model_timeout: float = 30.0,
) -> TriageEngine:
    return TriageEngine(
        EngineConfig(
            corpus_dir=corpus_dir,
            vector_file=vector_file,
            model_endpoint=model_endpoint,
            model_timeout=model_timeout,
            layout_seed=seed,
            layout_params=LayoutParams(),
            search_provider=provider,
            domain=domain,
            auto_rebuild=auto_rebuild,
        )
    )


@pytest.fixture
def fixture_engine(fixture_corpus_dir, tmp_path, stub_model, mock_provider):
    """Engine over a private copy of the eyeglass fixture, wired to the stub
    model and the mock search provider."""
    corpus_dir = tmp_path / "corpus"
    load_eyeglass_corpus(corpus_dir)
    engine = make_engine(
        corpus_dir,
        model_endpoint=stub_model.endpoint,
        provider=mock_provider,
        vector_file=eyeglass_vector_file(),
    )
    yield engine
    engine.close()


@pytest.fixture
def client(fixture_engine):
    from fastapi.testclient import TestClient

    with TestClient(create_app(fixture_engine)) as test_client:
        yield test_client
