"""REST surface of the triage engine.

All payloads are JSON except instance bodies (raw bytes with their media
type header), the ingest stream (line-delimited records), and bundle
archives. Handlers read one published view per request, so every response
reflects exactly one corpus version.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Query, Request, Response
from pydantic import BaseModel

from ..concepts import ConceptError, DuplicateConceptError
from ..corpus import (
    CorpusError,
    UnknownInstanceError,
    UnknownReportError,
)
from ..hypotheses import (
    BundleConflictError,
    BundleError,
    BundleVersionError,
    HypothesisError,
    UnknownHypothesisError,
)
from ..layout import LayoutError
from .adapters import (
    BadModelResponseError,
    ModelError,
    ModelTimeoutError,
    SearchError,
    SearchUnavailableError,
)
from .engine import EngineConfig, TriageEngine

__all__ = ["create_app", "create_app_from_env"]


class ReportDraft(BaseModel):
    instance_ref: str
    model_output: str
    text: str
    source: str = "deployed"
    ground_truth: Optional[str] = None


class PhraseBody(BaseModel):
    phrase: str


class NameBody(BaseModel):
    name: str


class ReportRef(BaseModel):
    report_id: str


class AdditionalBody(BaseModel):
    instance_id: str
    origin: str = "upload"


class ModifiedBody(BaseModel):
    original_id: str
    modified_id: str


class VerdictBody(BaseModel):
    verdict: str


class FetchBody(BaseModel):
    provider_id: str = ""
    remote_url: str


def _as_http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, (UnknownInstanceError, UnknownReportError, UnknownHypothesisError)):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, BundleConflictError):
        return HTTPException(status_code=409, detail={"message": str(exc), "conflicts": list(exc.conflicts)})
    if isinstance(exc, (BundleVersionError, BundleError)):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, DuplicateConceptError):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, ModelTimeoutError):
        return HTTPException(status_code=504, detail=str(exc))
    if isinstance(exc, (ModelError, BadModelResponseError)):
        return HTTPException(status_code=502, detail=str(exc))
    if isinstance(exc, SearchUnavailableError):
        return HTTPException(status_code=503, detail=str(exc))
    if isinstance(exc, (CorpusError, HypothesisError, ConceptError, LayoutError, SearchError)):
        return HTTPException(status_code=400, detail=str(exc))
    raise exc


def _report_dict(report) -> dict:
    return report.to_record()


def create_app(engine: TriageEngine) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        engine.close()

    app = FastAPI(title="blindspot", lifespan=lifespan)
    app.state.engine = engine

    # -- reports ----------------------------------------------------------

    @app.post("/api/reports", status_code=201)
    def add_report(draft: ReportDraft):
        try:
            report = engine.store.add_report(
                instance_ref=draft.instance_ref,
                model_output=draft.model_output,
                text=draft.text,
                source=draft.source,
                ground_truth=draft.ground_truth,
            )
        except ValueError as exc:
            raise _as_http_error(exc)
        engine.notify_mutation()
        return _report_dict(report)

    @app.post("/api/reports/ingest")
    async def ingest_reports(request: Request):
        body = await request.body()
        try:
            result = engine.store.ingest_reports(body)
        except ValueError as exc:
            raise _as_http_error(exc)
        if result.accepted:
            engine.notify_mutation()
        return {
            "accepted": result.accepted,
            "rejected": [{"line": line, "reason": reason} for line, reason in result.rejected],
            "version": result.version,
        }

    @app.get("/api/reports")
    def list_reports(
        query: Optional[str] = None,
        concept: Optional[str] = None,
        page: int = 0,
        page_size: int = Query(default=50, ge=1, le=500),
    ):
        within_ids = None
        if concept is not None:
            found = engine.concept_by_id(concept)
            if found is None:
                raise HTTPException(status_code=404, detail="unknown concept")
            within_ids = set(found.report_ids)
        try:
            result = engine.store.list_reports(
                text_query=query, within_ids=within_ids, page=page, page_size=page_size
            )
        except ValueError as exc:
            raise _as_http_error(exc)
        return {
            "items": [_report_dict(r) for r in result.items],
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
        }

    # -- instances ----------------------------------------------------------

    @app.post("/api/instances", status_code=201)
    async def store_instance(request: Request):
        media_type = request.headers.get("content-type", "application/octet-stream").split(";")[0].strip()
        data = await request.body()
        try:
            instance = engine.store.store_instance(data, media_type)
        except ValueError as exc:
            raise _as_http_error(exc)
        return {"id": instance.id, "media_type": instance.media_type, "byte_len": instance.byte_len}

    @app.get("/api/instances/{instance_id}")
    def get_instance(instance_id: str):
        try:
            instance = engine.store.get_instance(instance_id)
        except ValueError as exc:
            raise _as_http_error(exc)
        return Response(content=instance.data, media_type=instance.media_type)

    # -- concepts -------------------------------------------------------------

    @app.get("/api/concepts")
    def concepts(query: str = ""):
        version, found = engine.search_concepts(query)
        return {"version": version, "concepts": [c.to_dict() for c in found]}

    @app.post("/api/concepts/custom", status_code=201)
    def custom_concept(body: PhraseBody):
        try:
            concept, point = engine.add_custom_keyword(body.phrase)
        except ValueError as exc:
            raise _as_http_error(exc)
        return {"concept": concept.to_dict(), "point": list(point) if point else None}

    # -- layout ---------------------------------------------------------------

    @app.get("/api/layout")
    def layout():
        return engine.layout_response()

    # -- hypotheses -------------------------------------------------------------

    @app.post("/api/hypotheses", status_code=201)
    def create_hypothesis(body: NameBody):
        try:
            hypothesis = engine.workspace.create_hypothesis(body.name)
        except ValueError as exc:
            raise _as_http_error(exc)
        payload = hypothesis.summary_dict()
        payload["duplicate_name"] = engine.workspace.name_is_duplicate(hypothesis.name)
        return payload

    @app.patch("/api/hypotheses/{hypothesis_id}")
    def rename_hypothesis(hypothesis_id: str, body: NameBody):
        try:
            hypothesis = engine.workspace.rename_hypothesis(hypothesis_id, body.name)
        except ValueError as exc:
            raise _as_http_error(exc)
        return hypothesis.summary_dict()

    @app.get("/api/hypotheses")
    def list_hypotheses():
        return {"hypotheses": [h.summary_dict() for h in engine.workspace.list_hypotheses()]}

    @app.post("/api/hypotheses/{hypothesis_id}/reports")
    def attach_report(hypothesis_id: str, body: ReportRef):
        try:
            hypothesis = engine.workspace.attach_report(hypothesis_id, body.report_id)
        except ValueError as exc:
            raise _as_http_error(exc)
        return hypothesis.summary_dict()

    @app.delete("/api/hypotheses/{hypothesis_id}/reports")
    def detach_report(hypothesis_id: str, body: ReportRef):
        try:
            hypothesis = engine.workspace.detach_report(hypothesis_id, body.report_id)
        except ValueError as exc:
            raise _as_http_error(exc)
        return hypothesis.summary_dict()

    @app.get("/api/hypotheses/{hypothesis_id}/reports/{report_id}/concepts")
    def related_concepts(hypothesis_id: str, report_id: str):
        view = engine.view
        if view.index is None:
            return {"concept_ids": []}
        try:
            ids = engine.workspace.related_concepts(view.index, hypothesis_id, report_id)
        except ValueError as exc:
            raise _as_http_error(exc)
        return {"concept_ids": ids}

    # -- evidence ---------------------------------------------------------------

    @app.post("/api/hypotheses/{hypothesis_id}/evidence/additional", status_code=201)
    def add_additional(hypothesis_id: str, body: AdditionalBody):
        try:
            output = engine.predict(body.instance_id)
            item = engine.workspace.add_additional_instance(
                hypothesis_id, body.instance_id, output, body.origin
            )
        except (ValueError, RuntimeError) as exc:
            raise _as_http_error(exc)
        return item.to_dict()

    @app.patch("/api/hypotheses/{hypothesis_id}/evidence/additional/{item_id}/verdict")
    def set_additional_verdict(hypothesis_id: str, item_id: str, body: VerdictBody):
        try:
            item = engine.workspace.set_additional_verdict(hypothesis_id, item_id, body.verdict)
        except ValueError as exc:
            raise _as_http_error(exc)
        return item.to_dict()

    @app.post("/api/hypotheses/{hypothesis_id}/evidence/modified", status_code=201)
    def add_modified(hypothesis_id: str, body: ModifiedBody):
        try:
            original_output = engine.predict(body.original_id)
            modified_output = engine.predict(body.modified_id)
            pair = engine.workspace.add_modified_pair(
                hypothesis_id, body.original_id, original_output, body.modified_id, modified_output
            )
        except (ValueError, RuntimeError) as exc:
            raise _as_http_error(exc)
        return pair.to_dict()

    @app.patch("/api/hypotheses/{hypothesis_id}/evidence/modified/{pair_id}/verdict")
    def set_modified_verdict(hypothesis_id: str, pair_id: str, body: VerdictBody):
        try:
            pair = engine.workspace.set_modified_verdict(hypothesis_id, pair_id, body.verdict)
        except ValueError as exc:
            raise _as_http_error(exc)
        return pair.to_dict()

    @app.get("/api/hypotheses/{hypothesis_id}/summary")
    def summary(hypothesis_id: str):
        try:
            return engine.workspace.validity_summary(hypothesis_id).to_dict()
        except ValueError as exc:
            raise _as_http_error(exc)

    # -- image search -------------------------------------------------------------

    @app.get("/api/search/images")
    def search_images(q: str = "", limit: int = 20):
        try:
            results = engine.image_search(q, limit)
        except (ValueError, RuntimeError) as exc:
            raise _as_http_error(exc)
        return {"results": [r.to_dict() for r in results]}

    @app.post("/api/search/images/fetch", status_code=201)
    def fetch_image(body: FetchBody):
        try:
            instance = engine.fetch_result(body.remote_url)
        except (ValueError, RuntimeError) as exc:
            raise _as_http_error(exc)
        return {"id": instance.id, "media_type": instance.media_type, "byte_len": instance.byte_len}

    # -- bundles --------------------------------------------------------------------

    @app.get("/api/export")
    def export_bundle(ids: Optional[str] = None, blobs: bool = False):
        hypothesis_ids = [part for part in ids.split(",") if part] if ids else None
        try:
            payload = engine.export_bundle(hypothesis_ids, include_blobs=blobs)
        except ValueError as exc:
            raise _as_http_error(exc)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": "attachment; filename=bundle.zip"},
        )

    @app.post("/api/import")
    async def import_bundle(request: Request):
        data = await request.body()
        try:
            report = engine.import_bundle(data)
        except ValueError as exc:
            raise _as_http_error(exc)
        return report.to_dict()

    return app


def create_app_from_env() -> FastAPI:
    return create_app(TriageEngine(EngineConfig.from_env()))
