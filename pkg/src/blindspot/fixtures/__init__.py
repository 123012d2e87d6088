"""Bundled fixture corpora for tests and demos."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Iterator

from ..corpus import CorpusStore, DomainConfig

__all__ = [
    "eyeglass_dir",
    "eyeglass_config",
    "eyeglass_records",
    "eyeglass_blobs",
    "eyeglass_vector_file",
    "load_eyeglass_corpus",
]


def eyeglass_dir() -> Path:
    return Path(str(resources.files("blindspot").joinpath("fixtures/eyeglass")))


def eyeglass_config() -> DomainConfig:
    manifest = json.loads((eyeglass_dir() / "manifest.json").read_text("utf-8"))
    return DomainConfig.from_dict(manifest["config"])


def eyeglass_records() -> str:
    """The fixture's report stream in the line-delimited corpus format."""
    return (eyeglass_dir() / "reports.ndjson").read_text("utf-8")


def eyeglass_blobs() -> Iterator[bytes]:
    for path in sorted((eyeglass_dir() / "blobs").iterdir()):
        yield path.read_bytes()


def eyeglass_vector_file() -> Path:
    return eyeglass_dir() / "vectors.txt"


def load_eyeglass_corpus(root: Path | str) -> CorpusStore:
    """Materialize the fixture into a fresh corpus directory: store every
    blob, then bulk-ingest the 163 report records."""
    store = CorpusStore(root, eyeglass_config())
    for data in eyeglass_blobs():
        store.store_instance(data, "image/png")
    result = store.ingest_reports(eyeglass_records())
    if result.rejected:
        raise RuntimeError(f"fixture ingest rejected records: {result.rejected[:3]}")
    return store
