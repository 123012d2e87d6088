"""Blind-spot hypotheses: attached reports, validation evidence, and
shareable bundles.

A hypothesis names a suspected systematic failure and carries two evidence
ledgers: additional instances (found via image search or upload, judged
correct/incorrect) and modified pairs (an instance edited by the analyst
and re-run, judged as-expected or not). Validity summaries are recomputed
from the ledgers on every read; unlabeled evidence never enters a
denominator.

Bundles are deterministic ZIP archives (stored entries, zeroed timestamps)
holding the manifest, line-delimited entity files, the layout snapshot, and
optionally the referenced blobs. Import merges by id: identical content is
a no-op, conflicting content rejects the whole bundle atomically.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
import warnings
import zipfile
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .concepts import ConceptIndex
from .corpus import (
    CorpusStore,
    FailureReport,
    ModelOutput,
    REPORT_FIELDS,
    UnknownInstanceError,
    UnknownReportError,
    utcnow_rfc3339,
)

__all__ = [
    "HypothesisError",
    "UnknownHypothesisError",
    "BundleError",
    "BundleVersionError",
    "BundleConflictError",
    "AdditionalItem",
    "ModifiedPair",
    "Hypothesis",
    "ValiditySummary",
    "ImportReport",
    "Workspace",
    "BUNDLE_FORMAT_VERSION",
    "ADDITIONAL_VERDICTS",
    "MODIFIED_VERDICTS",
    "EVIDENCE_ORIGINS",
]

BUNDLE_FORMAT_VERSION = 1

ADDITIONAL_VERDICTS = ("correct", "incorrect", "unlabeled")
MODIFIED_VERDICTS = ("as_expected", "not_as_expected", "unlabeled")
EVIDENCE_ORIGINS = ("image_search", "upload")


class HypothesisError(ValueError):
    pass


class UnknownHypothesisError(HypothesisError):
    pass


class BundleError(ValueError):
    pass


class BundleVersionError(BundleError):
    pass


class BundleConflictError(BundleError):
    def __init__(self, conflicts: Sequence[str]):
        self.conflicts = tuple(sorted(conflicts))
        super().__init__(f"conflicting ids: {', '.join(self.conflicts)}")


@dataclass
class AdditionalItem:
    id: str
    instance_ref: str
    model_output: ModelOutput
    origin: str
    verdict: str = "unlabeled"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "instance_ref": self.instance_ref,
            "model_output": self.model_output.to_dict(),
            "origin": self.origin,
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AdditionalItem":
        return cls(
            id=raw["id"],
            instance_ref=raw["instance_ref"],
            model_output=ModelOutput.from_dict(raw["model_output"]),
            origin=raw["origin"],
            verdict=raw["verdict"],
        )


@dataclass
class ModifiedPair:
    id: str
    original_ref: str
    original_output: ModelOutput
    modified_ref: str
    modified_output: ModelOutput
    verdict: str = "unlabeled"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "original_ref": self.original_ref,
            "original_output": self.original_output.to_dict(),
            "modified_ref": self.modified_ref,
            "modified_output": self.modified_output.to_dict(),
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ModifiedPair":
        return cls(
            id=raw["id"],
            original_ref=raw["original_ref"],
            original_output=ModelOutput.from_dict(raw["original_output"]),
            modified_ref=raw["modified_ref"],
            modified_output=ModelOutput.from_dict(raw["modified_output"]),
            verdict=raw["verdict"],
        )


@dataclass
class Hypothesis:
    id: str
    name: str
    created_at: str
    updated_at: str
    attached_report_ids: list[str] = field(default_factory=list)
    additional_evidence: list[AdditionalItem] = field(default_factory=list)
    modified_evidence: list[ModifiedPair] = field(default_factory=list)

    def summary_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "attached_report_ids": list(self.attached_report_ids),
            "additional_count": len(self.additional_evidence),
            "modified_count": len(self.modified_evidence),
        }

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "attached_report_ids": list(self.attached_report_ids),
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }


@dataclass(frozen=True)
class ValiditySummary:
    additional_accuracy: Optional[float]
    additional_counts: dict[str, int]
    modified_expected_rate: Optional[float]
    modified_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "additional_accuracy": self.additional_accuracy,
            "additional_counts": dict(self.additional_counts),
            "modified_expected_rate": self.modified_expected_rate,
            "modified_counts": dict(self.modified_counts),
        }


@dataclass(frozen=True)
class ImportReport:
    added_reports: int
    noop_reports: int
    added_instances: int
    noop_instances: int
    added_hypotheses: int
    noop_hypotheses: int
    corpus_version: int
    layout_seed: Optional[int]
    layout_entries: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "added_reports": self.added_reports,
            "noop_reports": self.noop_reports,
            "added_instances": self.added_instances,
            "noop_instances": self.noop_instances,
            "added_hypotheses": self.added_hypotheses,
            "noop_hypotheses": self.noop_hypotheses,
            "corpus_version": self.corpus_version,
        }


def _json_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False)


class Workspace:
    """All hypotheses over one corpus. Mutations are serialized by a lock;
    imports hold it for their whole duration."""

    def __init__(self, store: CorpusStore):
        self.store = store
        self._hypotheses: dict[str, Hypothesis] = {}
        self._lock = threading.RLock()

    # -- hypothesis lifecycle ---------------------------------------------

    def create_hypothesis(self, name: str) -> Hypothesis:
        cleaned = name.strip()
        if not cleaned:
            raise HypothesisError("empty name")
        with self._lock:
            if any(h.name == cleaned for h in self._hypotheses.values()):
                warnings.warn(f"duplicate hypothesis name: {cleaned!r}", stacklevel=2)
            now = utcnow_rfc3339()
            hypothesis = Hypothesis(id=uuid.uuid4().hex, name=cleaned, created_at=now, updated_at=now)
            self._hypotheses[hypothesis.id] = hypothesis
            return hypothesis

    def rename_hypothesis(self, hypothesis_id: str, name: str) -> Hypothesis:
        cleaned = name.strip()
        if not cleaned:
            raise HypothesisError("empty name")
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            hypothesis.name = cleaned
            hypothesis.updated_at = utcnow_rfc3339()
            return hypothesis

    def get(self, hypothesis_id: str) -> Hypothesis:
        try:
            return self._hypotheses[hypothesis_id]
        except KeyError:
            raise UnknownHypothesisError("unknown hypothesis") from None

    def list_hypotheses(self) -> list[Hypothesis]:
        return sorted(self._hypotheses.values(), key=lambda h: (h.created_at, h.id))

    def name_is_duplicate(self, name: str) -> bool:
        return sum(1 for h in self._hypotheses.values() if h.name == name.strip()) > 1

    # -- attached reports ---------------------------------------------------

    def attach_report(self, hypothesis_id: str, report_id: str) -> Hypothesis:
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            if not self.store.has_report(report_id):
                raise UnknownReportError("unknown report")
            if report_id not in hypothesis.attached_report_ids:
                hypothesis.attached_report_ids.append(report_id)
                hypothesis.updated_at = utcnow_rfc3339()
            return hypothesis

    def detach_report(self, hypothesis_id: str, report_id: str) -> Hypothesis:
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            if not self.store.has_report(report_id):
                raise UnknownReportError("unknown report")
            if report_id in hypothesis.attached_report_ids:
                hypothesis.attached_report_ids.remove(report_id)
                hypothesis.updated_at = utcnow_rfc3339()
            return hypothesis

    def related_concepts(self, index: ConceptIndex, hypothesis_id: str, report_id: str) -> list[str]:
        """Concept ids whose report memberships include an attached report."""
        hypothesis = self.get(hypothesis_id)
        if report_id not in hypothesis.attached_report_ids:
            raise HypothesisError("report not attached to hypothesis")
        return [c.id for c in index.concepts.values() if report_id in c.report_ids]

    # -- evidence -----------------------------------------------------------

    def add_additional_instance(
        self,
        hypothesis_id: str,
        instance_ref: str,
        model_output: ModelOutput,
        origin: str,
    ) -> AdditionalItem:
        if origin not in EVIDENCE_ORIGINS:
            raise HypothesisError(f"origin must be one of {EVIDENCE_ORIGINS}")
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            if not self.store.has_instance(instance_ref):
                raise UnknownInstanceError("unknown instance")
            item = AdditionalItem(
                id=uuid.uuid4().hex,
                instance_ref=instance_ref,
                model_output=model_output,
                origin=origin,
            )
            hypothesis.additional_evidence.append(item)
            hypothesis.updated_at = utcnow_rfc3339()
            return item

    def set_additional_verdict(self, hypothesis_id: str, item_id: str, verdict: str) -> AdditionalItem:
        if verdict not in ADDITIONAL_VERDICTS:
            raise HypothesisError(f"verdict must be one of {ADDITIONAL_VERDICTS}")
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            for item in hypothesis.additional_evidence:
                if item.id == item_id:
                    item.verdict = verdict
                    hypothesis.updated_at = utcnow_rfc3339()
                    return item
            raise HypothesisError("unknown evidence item")

    def add_modified_pair(
        self,
        hypothesis_id: str,
        original_ref: str,
        original_output: ModelOutput,
        modified_ref: str,
        modified_output: ModelOutput,
    ) -> ModifiedPair:
        if original_ref == modified_ref:
            raise HypothesisError("modified instance equals original")
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            for ref in (original_ref, modified_ref):
                if not self.store.has_instance(ref):
                    raise UnknownInstanceError("unknown instance")
            pair = ModifiedPair(
                id=uuid.uuid4().hex,
                original_ref=original_ref,
                original_output=original_output,
                modified_ref=modified_ref,
                modified_output=modified_output,
            )
            hypothesis.modified_evidence.append(pair)
            hypothesis.updated_at = utcnow_rfc3339()
            return pair

    def set_modified_verdict(self, hypothesis_id: str, pair_id: str, verdict: str) -> ModifiedPair:
        if verdict not in MODIFIED_VERDICTS:
            raise HypothesisError(f"verdict must be one of {MODIFIED_VERDICTS}")
        with self._lock:
            hypothesis = self.get(hypothesis_id)
            for pair in hypothesis.modified_evidence:
                if pair.id == pair_id:
                    pair.verdict = verdict
                    hypothesis.updated_at = utcnow_rfc3339()
                    return pair
            raise HypothesisError("unknown evidence pair")

    def validity_summary(self, hypothesis_id: str) -> ValiditySummary:
        """Fractions over labeled evidence only; absent on empty denominators."""
        hypothesis = self.get(hypothesis_id)
        additional = {v: 0 for v in ADDITIONAL_VERDICTS}
        for item in hypothesis.additional_evidence:
            additional[item.verdict] += 1
        modified = {v: 0 for v in MODIFIED_VERDICTS}
        for pair in hypothesis.modified_evidence:
            modified[pair.verdict] += 1
        labeled_additional = additional["correct"] + additional["incorrect"]
        labeled_modified = modified["as_expected"] + modified["not_as_expected"]
        return ValiditySummary(
            additional_accuracy=(additional["correct"] / labeled_additional) if labeled_additional else None,
            additional_counts=additional,
            modified_expected_rate=(modified["as_expected"] / labeled_modified) if labeled_modified else None,
            modified_counts=modified,
        )

    # -- bundles ------------------------------------------------------------

    def _referenced_instances(self, hypotheses: Sequence[Hypothesis], reports: Sequence[FailureReport]) -> list[str]:
        refs: list[str] = []
        seen: set[str] = set()

        def add(ref: str) -> None:
            if ref not in seen:
                seen.add(ref)
                refs.append(ref)

        for report in reports:
            add(report.instance_ref)
        for hypothesis in hypotheses:
            for item in hypothesis.additional_evidence:
                add(item.instance_ref)
            for pair in hypothesis.modified_evidence:
                add(pair.original_ref)
                add(pair.modified_ref)
        return sorted(refs)

    def export_bundle(
        self,
        hypothesis_ids: Optional[Sequence[str]] = None,
        layout_entries: Optional[Sequence[dict]] = None,
        layout_seed: Optional[int] = None,
        include_blobs: bool = False,
    ) -> bytes:
        """Serialize hypotheses plus their referenced entities into a
        deterministic archive. With no ids given, the whole workspace and
        the full report corpus are exported."""
        with self._lock:
            if hypothesis_ids is None:
                hypotheses = self.list_hypotheses()
                snapshot = self.store.snapshot()
                reports = sorted(snapshot.reports, key=lambda r: r.id)
            else:
                hypotheses = sorted(
                    (self.get(hid) for hid in hypothesis_ids),
                    key=lambda h: (h.created_at, h.id),
                )
                report_ids = sorted({rid for h in hypotheses for rid in h.attached_report_ids})
                reports = [self.store.get_report(rid) for rid in report_ids]

            instance_ids = self._referenced_instances(hypotheses, reports)

            manifest = {
                "format_version": BUNDLE_FORMAT_VERSION,
                "corpus_version": self.store.version,
                "layout_seed": layout_seed,
                "config": self.store.config.to_dict(),
            }
            hypothesis_lines = [_json_line(h.to_dict()) for h in hypotheses]
            report_lines = [r.record_line() for r in reports]
            instance_lines = []
            for iid in instance_ids:
                media_type, byte_len = self.store.instance_meta(iid)
                instance_lines.append(_json_line({"id": iid, "media_type": media_type, "byte_len": byte_len}))
            evidence_lines = []
            for hypothesis in hypotheses:
                for item in hypothesis.additional_evidence:
                    evidence_lines.append(
                        _json_line({"hypothesis_id": hypothesis.id, "kind": "additional", **item.to_dict()})
                    )
                for pair in hypothesis.modified_evidence:
                    evidence_lines.append(
                        _json_line({"hypothesis_id": hypothesis.id, "kind": "modified", **pair.to_dict()})
                    )
            layout_lines = [_json_line(entry) for entry in (layout_entries or [])]

            buffer = io.BytesIO()
            with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_STORED) as archive:

                def put(name: str, payload: bytes) -> None:
                    info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                    archive.writestr(info, payload)

                put("manifest.json", (json.dumps(manifest, indent=2) + "\n").encode("utf-8"))
                put("hypotheses.ndjson", "".join(l + "\n" for l in hypothesis_lines).encode("utf-8"))
                put("reports.ndjson", "".join(l + "\n" for l in report_lines).encode("utf-8"))
                put("instances.ndjson", "".join(l + "\n" for l in instance_lines).encode("utf-8"))
                put("evidence.ndjson", "".join(l + "\n" for l in evidence_lines).encode("utf-8"))
                put("layout.ndjson", "".join(l + "\n" for l in layout_lines).encode("utf-8"))
                if include_blobs:
                    for iid in instance_ids:
                        if self.store.has_blob(iid):
                            put(f"blobs/{iid}", self.store.get_instance(iid).data)
            return buffer.getvalue()

    def import_bundle(self, data: bytes) -> ImportReport:
        """Merge a bundle by id. Identical entities are no-ops; any id whose
        content differs rejects the whole import with nothing applied."""
        with self._lock:
            try:
                archive = zipfile.ZipFile(io.BytesIO(data))
            except zipfile.BadZipFile as exc:
                raise BundleError("not a bundle archive") from exc
            with archive:
                try:
                    manifest = json.loads(archive.read("manifest.json"))
                except KeyError:
                    raise BundleError("bundle has no manifest") from None
                if manifest.get("format_version") != BUNDLE_FORMAT_VERSION:
                    raise BundleVersionError("unsupported bundle version")

                def read_lines(name: str) -> list[dict]:
                    try:
                        text = archive.read(name).decode("utf-8")
                    except KeyError:
                        return []
                    return [json.loads(line) for line in text.splitlines() if line.strip()]

                hypothesis_rows = read_lines("hypotheses.ndjson")
                report_rows = read_lines("reports.ndjson")
                instance_rows = read_lines("instances.ndjson")
                evidence_rows = read_lines("evidence.ndjson")
                layout_rows = read_lines("layout.ndjson")
                blob_names = {n for n in archive.namelist() if n.startswith("blobs/")}

                conflicts: list[str] = []
                new_reports: list[FailureReport] = []
                noop_reports = 0
                for row in report_rows:
                    report = FailureReport(**{name: row.get(name) for name in REPORT_FIELDS})
                    if self.store.has_report(report.id):
                        if self.store.get_report(report.id).to_record() != report.to_record():
                            conflicts.append(report.id)
                        else:
                            noop_reports += 1
                    else:
                        new_reports.append(report)

                new_instances: list[dict] = []
                noop_instances = 0
                for row in instance_rows:
                    if self.store.has_instance(row["id"]):
                        media_type, byte_len = self.store.instance_meta(row["id"])
                        if (media_type, byte_len) != (row["media_type"], row["byte_len"]):
                            conflicts.append(row["id"])
                        else:
                            noop_instances += 1
                    else:
                        new_instances.append(row)

                evidence_by_hypothesis: dict[str, list[dict]] = {}
                for row in evidence_rows:
                    evidence_by_hypothesis.setdefault(row["hypothesis_id"], []).append(row)

                new_hypotheses: list[Hypothesis] = []
                noop_hypotheses = 0
                for row in hypothesis_rows:
                    incoming = Hypothesis(
                        id=row["id"],
                        name=row["name"],
                        created_at=row["created_at"],
                        updated_at=row["updated_at"],
                        attached_report_ids=list(row["attached_report_ids"]),
                    )
                    for ev in evidence_by_hypothesis.get(incoming.id, []):
                        if ev["kind"] == "additional":
                            incoming.additional_evidence.append(AdditionalItem.from_dict(ev))
                        elif ev["kind"] == "modified":
                            incoming.modified_evidence.append(ModifiedPair.from_dict(ev))
                        else:
                            raise BundleError(f"unknown evidence kind: {ev['kind']!r}")
                    existing = self._hypotheses.get(incoming.id)
                    if existing is not None:
                        if self._hypothesis_state(existing) != self._hypothesis_state(incoming):
                            conflicts.append(incoming.id)
                        else:
                            noop_hypotheses += 1
                    else:
                        new_hypotheses.append(incoming)

                if conflicts:
                    raise BundleConflictError(conflicts)

                # Referential integrity before touching anything.
                known_instances = {row["id"] for row in instance_rows} | set(self.store.instance_ids())
                known_reports = {row["id"] for row in report_rows} | {
                    r.id for r in self.store.snapshot().reports
                }
                for report in new_reports:
                    if report.instance_ref not in known_instances:
                        raise BundleError(f"bundle references unknown instance: {report.instance_ref}")
                for hypothesis in new_hypotheses:
                    for rid in hypothesis.attached_report_ids:
                        if rid not in known_reports:
                            raise BundleError(f"bundle references unknown report: {rid}")
                    for item in hypothesis.additional_evidence:
                        if item.instance_ref not in known_instances:
                            raise BundleError(f"bundle references unknown instance: {item.instance_ref}")
                    for pair in hypothesis.modified_evidence:
                        for ref in (pair.original_ref, pair.modified_ref):
                            if ref not in known_instances:
                                raise BundleError(f"bundle references unknown instance: {ref}")

                for row in new_instances:
                    blob_name = f"blobs/{row['id']}"
                    if blob_name in blob_names:
                        self.store.store_instance(archive.read(blob_name), row["media_type"])
                    else:
                        self.store.register_instance(row["id"], row["media_type"], row["byte_len"])
                self.store.insert_reports(new_reports, adopt_version=manifest.get("corpus_version"))
                for hypothesis in new_hypotheses:
                    self._hypotheses[hypothesis.id] = hypothesis

                return ImportReport(
                    added_reports=len(new_reports),
                    noop_reports=noop_reports,
                    added_instances=len(new_instances),
                    noop_instances=noop_instances,
                    added_hypotheses=len(new_hypotheses),
                    noop_hypotheses=noop_hypotheses,
                    corpus_version=self.store.version,
                    layout_seed=manifest.get("layout_seed"),
                    layout_entries=tuple(layout_rows),
                )

    @staticmethod
    def _hypothesis_state(hypothesis: Hypothesis) -> dict:
        state = hypothesis.to_dict()
        state["additional"] = [i.to_dict() for i in hypothesis.additional_evidence]
        state["modified"] = [p.to_dict() for p in hypothesis.modified_evidence]
        return state
