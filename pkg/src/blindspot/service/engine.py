"""Engine tying the pipeline together: corpus, concept index, layout, and
hypothesis workspace, published as consistent per-version views.

Rebuilds (extract concepts, embed phrases, fit the layout) run on a single
background worker; newer corpus versions supersede queued ones and the last
published view keeps being served until its replacement is ready. All views
are immutable, so request handlers can read them without locks.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..concepts import (
    Concept,
    ConceptIndex,
    DuplicateConceptError,
    add_custom_keyword,
    score_corpus,
    search_concepts,
)
from ..corpus import CorpusSnapshot, CorpusStore, DomainConfig, Instance, ModelOutput
from ..embedding import OutOfVocabularyError, VectorStore, load_vectors, phrase_vector
from ..hypotheses import ImportReport, Workspace
from ..layout import (
    Encoding,
    Layout,
    LayoutError,
    LayoutParams,
    fit_layout,
    knn_graph,
    place_new_point,
    visual_encoding,
)
from .adapters import ModelClient, SearchProvider, SearchResult, SearchError

logger = logging.getLogger(__name__)

__all__ = ["EngineConfig", "PublishedView", "TriageEngine"]

LAYOUT_AVAILABLE = "available"
LAYOUT_UNAVAILABLE = "unavailable"
LAYOUT_BUILDING = "building"


@dataclass
class EngineConfig:
    corpus_dir: Path
    vector_file: Optional[Path] = None
    model_endpoint: Optional[str] = None
    model_timeout: float = 30.0
    layout_seed: int = 42
    layout_params: LayoutParams = field(default_factory=LayoutParams)
    search_provider: Optional[SearchProvider] = None
    domain: Optional[DomainConfig] = None
    auto_rebuild: bool = True

    @classmethod
    def from_env(cls, environ: Optional[dict] = None) -> "EngineConfig":
        env = os.environ if environ is None else environ
        corpus_dir = env.get("BLINDSPOT_CORPUS_DIR")
        if not corpus_dir:
            raise ValueError("BLINDSPOT_CORPUS_DIR is not set")
        domain = None
        if env.get("BLINDSPOT_TASK_KIND"):
            domain = DomainConfig(
                task_kind=env["BLINDSPOT_TASK_KIND"],
                prompt_kind=env.get("BLINDSPOT_PROMPT_KIND", "why"),
                label_set=tuple(filter(None, env.get("BLINDSPOT_LABELS", "").split(","))),
            )
        provider = None
        if env.get("BLINDSPOT_SEARCH_URL"):
            from .adapters import HttpSearchProvider

            provider = HttpSearchProvider(env["BLINDSPOT_SEARCH_URL"], env.get("BLINDSPOT_SEARCH_KEY", ""))
        return cls(
            corpus_dir=Path(corpus_dir),
            vector_file=Path(env["BLINDSPOT_VECTOR_FILE"]) if env.get("BLINDSPOT_VECTOR_FILE") else None,
            model_endpoint=env.get("BLINDSPOT_MODEL_ENDPOINT"),
            model_timeout=float(env.get("BLINDSPOT_MODEL_TIMEOUT", "30")),
            layout_seed=int(env.get("BLINDSPOT_LAYOUT_SEED", "42")),
            search_provider=provider,
            domain=domain,
        )


@dataclass(frozen=True)
class PublishedView:
    """One corpus version's derived state, swapped in atomically."""

    corpus_version: int
    index: Optional[ConceptIndex]
    points: dict[str, tuple[float, float]]
    encodings: dict[str, Encoding]
    vectors: dict[str, np.ndarray]
    status: str

    def layout_entries(self) -> list[dict]:
        entries = []
        for cid, (x, y) in self.points.items():
            enc = self.encodings.get(cid)
            entries.append(
                {
                    "concept_id": cid,
                    "x": x,
                    "y": y,
                    "font_scale": enc.font_scale if enc else None,
                    "opacity": enc.opacity if enc else None,
                }
            )
        return entries


_EMPTY_VIEW = PublishedView(
    corpus_version=-1, index=None, points={}, encodings={}, vectors={}, status=LAYOUT_BUILDING
)


class TriageEngine:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = CorpusStore(config.corpus_dir, config.domain)
        self.workspace = Workspace(self.store)
        self.vector_store: Optional[VectorStore] = (
            load_vectors(config.vector_file) if config.vector_file else None
        )
        self.model: Optional[ModelClient] = (
            ModelClient(config.model_endpoint, timeout=config.model_timeout)
            if config.model_endpoint
            else None
        )
        self.search_provider = config.search_provider
        self._custom_phrases: list[str] = []
        self._predict_cache: dict[tuple[str, str], ModelOutput] = {}
        self._view: PublishedView = _EMPTY_VIEW
        self._view_lock = threading.Lock()
        self._cond = threading.Condition()
        self._dirty = True
        self._stop = False
        self._worker: Optional[threading.Thread] = None
        if config.auto_rebuild:
            self._worker = threading.Thread(target=self._rebuild_loop, name="blindspot-rebuild", daemon=True)
            self._worker.start()
            self.notify_mutation()
        else:
            self.rebuild_now()

    # -- lifecycle ----------------------------------------------------------

    def close(self) -> None:
        with self._cond:
            self._stop = True
            self._cond.notify_all()
        if self._worker is not None:
            self._worker.join(timeout=5)
        if self.model is not None:
            self.model.close()

    # -- view management ----------------------------------------------------

    @property
    def view(self) -> PublishedView:
        with self._view_lock:
            return self._view

    def _publish(self, view: PublishedView) -> None:
        with self._view_lock:
            self._view = view

    def notify_mutation(self) -> None:
        """Mark derived state stale; the worker rebuilds at its own pace."""
        with self._cond:
            self._dirty = True
            self._cond.notify_all()
        if self._worker is None:
            self.rebuild_now()

    def _rebuild_loop(self) -> None:
        while True:
            with self._cond:
                while not self._dirty and not self._stop:
                    self._cond.wait()
                if self._stop:
                    return
                self._dirty = False
            try:
                self.rebuild_now()
            except Exception:
                logger.exception("rebuild failed")

    def rebuild_now(self) -> PublishedView:
        """Run the full pipeline for the current corpus version and publish
        the result. Serves stale state until the swap."""
        snapshot = self.store.snapshot()
        view = self._build_view(snapshot)
        self._publish(view)
        return view

    def _build_view(self, snapshot: CorpusSnapshot) -> PublishedView:
        index = score_corpus(snapshot)
        reports = list(snapshot.reports)
        for phrase in self._custom_phrases:
            try:
                add_custom_keyword(index, reports, phrase)
            except DuplicateConceptError:
                pass  # extraction caught up with the analyst's keyword

        vectors: dict[str, np.ndarray] = {}
        if self.vector_store is not None:
            for concept in index:
                try:
                    pv = phrase_vector(self.vector_store, concept.phrase, concept.id)
                except OutOfVocabularyError:
                    continue
                if float(np.linalg.norm(pv.vector)) == 0.0:
                    continue
                vectors[concept.id] = pv.vector

        counts = {c.id: c.mention_count for c in index}
        encodings = visual_encoding(counts)

        points: dict[str, tuple[float, float]] = {}
        status = LAYOUT_UNAVAILABLE
        if len(vectors) >= 2:
            graph = knn_graph(vectors, self.config.layout_params.k)
            layout = fit_layout(
                graph,
                params=self.config.layout_params,
                seed=self.config.layout_seed,
                corpus_version=snapshot.version,
            )
            points = layout.points
            status = LAYOUT_AVAILABLE
        return PublishedView(
            corpus_version=snapshot.version,
            index=index,
            points=points,
            encodings=encodings,
            vectors=vectors,
            status=status,
        )

    # -- concepts -----------------------------------------------------------

    def search_concepts(self, query: str) -> tuple[int, list[Concept]]:
        view = self.view
        if view.index is None:
            return (view.corpus_version, [])
        return (view.corpus_version, search_concepts(view.index, query))

    def concept_by_id(self, concept_id: str) -> Optional[Concept]:
        view = self.view
        return view.index.by_id(concept_id) if view.index is not None else None

    def add_custom_keyword(self, phrase: str) -> tuple[Concept, Optional[tuple[float, float]]]:
        """Register an analyst keyword: it joins the index immediately and,
        when embeddable, is placed into the current layout without refitting."""
        view = self.view
        if view.index is None:
            raise LayoutError("index not built yet")
        index = ConceptIndex(
            corpus_version=view.index.corpus_version,
            concepts=dict(view.index.concepts),
            word_stats=view.index.word_stats,
        )
        concept = add_custom_keyword(index, list(self.store.snapshot().reports), phrase)
        self._custom_phrases.append(concept.phrase)

        point: Optional[tuple[float, float]] = None
        vectors = dict(view.vectors)
        if self.vector_store is not None and view.points:
            try:
                pv = phrase_vector(self.vector_store, concept.phrase, concept.id)
            except OutOfVocabularyError:
                pv = None
            if pv is not None and float(np.linalg.norm(pv.vector)) > 0.0:
                layout = Layout(
                    corpus_version=view.corpus_version,
                    seed=self.config.layout_seed,
                    params=self.config.layout_params,
                    points=view.points,
                )
                point = place_new_point(layout, view.vectors, pv.vector)
                vectors[concept.id] = pv.vector

        points = dict(view.points)
        if point is not None:
            points[concept.id] = point
        counts = {c.id: c.mention_count for c in index}
        self._publish(
            PublishedView(
                corpus_version=view.corpus_version,
                index=index,
                points=points,
                encodings=visual_encoding(counts),
                vectors=vectors,
                status=view.status,
            )
        )
        return concept, point

    # -- layout -------------------------------------------------------------

    def layout_response(self) -> dict:
        view = self.view
        return {
            "version": view.corpus_version if view.corpus_version >= 0 else None,
            "status": view.status,
            "points": view.layout_entries() if view.status == LAYOUT_AVAILABLE else [],
        }

    # -- model inference ----------------------------------------------------

    def predict(self, instance_id: str) -> ModelOutput:
        """Model output for a stored instance, cached by content hash so a
        modified instance (new bytes, new id) always re-runs the model."""
        if self.model is None:
            raise SearchError("model endpoint not configured")
        key = (instance_id, self.model.endpoint)
        cached = self._predict_cache.get(key)
        if cached is not None:
            return cached
        instance = self.store.get_instance(instance_id)
        output = self.model.predict(instance.data, instance.media_type)
        self._predict_cache[key] = output
        return output

    # -- image search ---------------------------------------------------------

    def image_search(self, query: str, limit: int = 20) -> list[SearchResult]:
        if self.search_provider is None:
            raise SearchError("no search provider configured")
        if not query.strip():
            raise SearchError("empty query")
        if not (1 <= limit <= 50):
            raise SearchError("limit must be in [1, 50]")
        return self.search_provider.search(query, limit)

    def fetch_result(self, remote_url: str) -> Instance:
        if self.search_provider is None:
            raise SearchError("no search provider configured")
        data, media_type = self.search_provider.fetch(remote_url)
        return self.store.store_instance(data, media_type)

    # -- bundles --------------------------------------------------------------

    def export_bundle(self, hypothesis_ids=None, include_blobs: bool = False) -> bytes:
        view = self.view
        return self.workspace.export_bundle(
            hypothesis_ids=hypothesis_ids,
            layout_entries=view.layout_entries(),
            layout_seed=self.config.layout_seed,
            include_blobs=include_blobs,
        )

    def import_bundle(self, data: bytes) -> ImportReport:
        """Merge a bundle, then publish its layout snapshot verbatim so the
        restored view matches what was exported. The index is rebuilt from
        the merged corpus; the next corpus mutation triggers a normal refit."""
        report = self.workspace.import_bundle(data)
        snapshot = self.store.snapshot()
        rebuilt = self._build_view(snapshot)
        if report.layout_entries:
            points: dict[str, tuple[float, float]] = {}
            encodings = dict(rebuilt.encodings)
            for entry in report.layout_entries:
                cid = entry["concept_id"]
                points[cid] = (entry["x"], entry["y"])
                if entry.get("font_scale") is not None:
                    encodings[cid] = Encoding(font_scale=entry["font_scale"], opacity=entry["opacity"])
            rebuilt = replace(rebuilt, points=points, encodings=encodings, status=LAYOUT_AVAILABLE)
        self._publish(rebuilt)
        with self._cond:
            if self.store.version == snapshot.version:
                self._dirty = False
        return report
