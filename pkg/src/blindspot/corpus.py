"""Persistent store for failure reports and content-addressed instances.

A corpus lives in a single directory:

    manifest.json     version counter + domain configuration
    reports.ndjson    one report record per line, canonical field order
    instances.ndjson  instance metadata (id, media type, byte length)
    blobs/<id>        raw instance bytes, keyed by content hash

Snapshots are immutable values safe to hand to any thread. All writes are
serialized through a single lock; files are replaced atomically (write to a
temp file, then rename) so a crashed write never leaves a torn corpus.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "CorpusError",
    "UnknownInstanceError",
    "UnknownReportError",
    "DomainConfig",
    "Instance",
    "FailureReport",
    "ModelOutput",
    "CorpusSnapshot",
    "ReportPage",
    "IngestResult",
    "CorpusStore",
    "content_hash",
    "parse_rfc3339",
    "utcnow_rfc3339",
    "SUPPORTED_MEDIA_TYPES",
    "REPORT_FIELDS",
]

SUPPORTED_MEDIA_TYPES = frozenset(
    {
        "image/png",
        "image/jpeg",
        "image/gif",
        "image/webp",
        "text/plain",
        "application/octet-stream",
    }
)

# Canonical record field order for the line-delimited corpus format.
REPORT_FIELDS = (
    "id",
    "instance_ref",
    "model_output",
    "ground_truth",
    "text",
    "source",
    "created_at",
)

REPORT_SOURCES = ("deployed", "crowdsourced")
TASK_KINDS = ("classification", "generation")
PROMPT_KINDS = ("why", "how")

MAX_PAGE_SIZE = 500


class CorpusError(ValueError):
    """Malformed input or an invalid corpus operation."""


class UnknownInstanceError(CorpusError):
    pass


class UnknownReportError(CorpusError):
    pass


def content_hash(data: bytes) -> str:
    """Content address of an instance blob: hex SHA-256 of its bytes."""
    return hashlib.sha256(data).hexdigest()


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp, accepting the 'Z' suffix."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise CorpusError(f"invalid created_at: {value!r}") from exc
    if parsed.tzinfo is None:
        raise CorpusError(f"invalid created_at (missing UTC offset): {value!r}")
    return parsed


def utcnow_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class DomainConfig:
    """Fixed per-corpus settings: what kind of model is being audited and
    whether reporters were asked why or how it failed."""

    task_kind: str
    prompt_kind: str
    label_set: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.task_kind not in TASK_KINDS:
            raise CorpusError(f"task_kind must be one of {TASK_KINDS}")
        if self.prompt_kind not in PROMPT_KINDS:
            raise CorpusError(f"prompt_kind must be one of {PROMPT_KINDS}")
        object.__setattr__(self, "label_set", tuple(self.label_set))
        if self.task_kind == "classification" and len(self.label_set) < 2:
            raise CorpusError("classification corpora need at least 2 labels")

    def to_dict(self) -> dict:
        return {
            "task_kind": self.task_kind,
            "prompt_kind": self.prompt_kind,
            "label_set": list(self.label_set),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DomainConfig":
        return cls(
            task_kind=raw["task_kind"],
            prompt_kind=raw["prompt_kind"],
            label_set=tuple(raw.get("label_set") or ()),
        )


@dataclass(frozen=True)
class Instance:
    """A content-addressed input blob. The id is a pure function of the
    bytes, so re-storing identical data is a no-op."""

    id: str
    media_type: str
    byte_len: int
    data: Optional[bytes] = None


@dataclass(frozen=True)
class ModelOutput:
    """The external model's prediction for one instance."""

    label_or_caption: str
    confidence: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.label_or_caption:
            raise CorpusError("model output text must be nonempty")
        if self.confidence is not None and not (0.0 <= self.confidence <= 1.0):
            raise CorpusError("confidence must be in [0, 1]")

    def to_dict(self) -> dict:
        out: dict = {"label_or_caption": self.label_or_caption}
        if self.confidence is not None:
            out["confidence"] = self.confidence
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelOutput":
        return cls(
            label_or_caption=raw["label_or_caption"],
            confidence=raw.get("confidence"),
        )


@dataclass(frozen=True)
class FailureReport:
    """One end-user description of a model error, bound to the instance it
    happened on and the output the model produced."""

    id: str
    instance_ref: str
    model_output: str
    ground_truth: Optional[str]
    text: str
    source: str
    created_at: str

    @property
    def created_at_dt(self) -> datetime:
        return parse_rfc3339(self.created_at)

    def sort_key(self) -> tuple:
        return (self.created_at_dt, self.id)

    def to_record(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    def record_line(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, separators=(", ", ": "))


@dataclass(frozen=True)
class CorpusSnapshot:
    """Immutable view of the corpus at one version. Later writes never
    alter an existing snapshot."""

    version: int
    reports: tuple[FailureReport, ...]
    config: DomainConfig

    def get(self, report_id: str) -> Optional[FailureReport]:
        for report in self.reports:
            if report.id == report_id:
                return report
        return None


@dataclass(frozen=True)
class ReportPage:
    items: tuple[FailureReport, ...]
    total: int
    page: int
    page_size: int


@dataclass(frozen=True)
class IngestResult:
    accepted: int
    rejected: tuple[tuple[int, str], ...]
    version: int


def _validate_record(raw: object, config: DomainConfig) -> Optional[str]:
    """Return a rejection reason for a parsed record, or None if valid."""
    if not isinstance(raw, dict):
        return "record is not an object"
    for name in REPORT_FIELDS:
        if name == "ground_truth":
            continue
        if name not in raw:
            return f"missing field: {name}"
    for key in raw:
        if key not in REPORT_FIELDS:
            return f"unexpected field: {key}"
    for name in REPORT_FIELDS:
        value = raw.get(name)
        if name == "ground_truth":
            if value is not None and not isinstance(value, str):
                return "ground_truth must be text or null"
            continue
        if not isinstance(value, str):
            return f"field is not text: {name}"
    if not raw["id"]:
        return "empty id"
    if not raw["text"].strip():
        return "empty report"
    if raw["source"] not in REPORT_SOURCES:
        return f"invalid source: {raw['source']!r}"
    if config.task_kind == "classification" and raw["model_output"] not in config.label_set:
        return f"model output not in label set: {raw['model_output']!r}"
    try:
        parse_rfc3339(raw["created_at"])
    except CorpusError:
        return f"invalid created_at: {raw['created_at']!r}"
    return None


class CorpusStore:
    """On-disk failure-report corpus with versioned immutable snapshots.

    Many concurrent readers are fine; every mutation takes the writer lock,
    bumps the version by exactly one, and flushes to disk atomically.
    Instance blobs are content-addressed and do not affect the version (the
    blob set is a pure function of its contents and never conflicts).
    """

    def __init__(self, root: Path | str, config: Optional[DomainConfig] = None):
        self.root = Path(root)
        self._blob_dir = self.root / "blobs"
        self._blob_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._reports: list[FailureReport] = []
        self._by_id: dict[str, FailureReport] = {}
        self._instances: dict[str, tuple[str, int]] = {}  # id -> (media_type, byte_len)
        manifest_path = self.root / "manifest.json"
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            self._version = int(manifest["version"])
            self._config = DomainConfig.from_dict(manifest["config"])
            if config is not None and config != self._config:
                raise CorpusError("corpus directory already has a different config")
            self._load()
        else:
            if config is None:
                raise CorpusError("new corpus needs a DomainConfig")
            self._version = 0
            self._config = config
            self._flush()

    # -- loading / persistence -------------------------------------------

    def _load(self) -> None:
        records_path = self.root / "reports.ndjson"
        if records_path.exists():
            for line in records_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                raw = json.loads(line)
                report = FailureReport(**{name: raw.get(name) for name in REPORT_FIELDS})
                self._reports.append(report)
                self._by_id[report.id] = report
        meta_path = self.root / "instances.ndjson"
        if meta_path.exists():
            for line in meta_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                raw = json.loads(line)
                self._instances[raw["id"]] = (raw["media_type"], int(raw["byte_len"]))

    def _atomic_write(self, path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)

    def _flush(self) -> None:
        lines = [report.record_line() for report in self._reports]
        self._atomic_write(self.root / "reports.ndjson", "".join(line + "\n" for line in lines))
        meta_lines = [
            json.dumps({"id": iid, "media_type": mt, "byte_len": bl}, ensure_ascii=False)
            for iid, (mt, bl) in sorted(self._instances.items())
        ]
        self._atomic_write(self.root / "instances.ndjson", "".join(line + "\n" for line in meta_lines))
        manifest = {"version": self._version, "config": self._config.to_dict()}
        self._atomic_write(self.root / "manifest.json", json.dumps(manifest, indent=2) + "\n")

    # -- instances --------------------------------------------------------

    def store_instance(self, data: bytes, media_type: str) -> Instance:
        if not data:
            raise CorpusError("empty instance")
        if media_type not in SUPPORTED_MEDIA_TYPES:
            supported = ", ".join(sorted(SUPPORTED_MEDIA_TYPES))
            raise CorpusError(f"unsupported media type {media_type!r}; supported: {supported}")
        instance_id = content_hash(data)
        with self._lock:
            if instance_id not in self._instances or not (self._blob_dir / instance_id).exists():
                blob_path = self._blob_dir / instance_id
                tmp = blob_path.with_suffix(".tmp")
                tmp.write_bytes(data)
                tmp.replace(blob_path)
                self._instances[instance_id] = (media_type, len(data))
                self._flush()
        return Instance(id=instance_id, media_type=media_type, byte_len=len(data), data=data)

    def register_instance(self, instance_id: str, media_type: str, byte_len: int) -> None:
        """Record instance metadata without bytes (bundle import without blobs)."""
        with self._lock:
            if instance_id not in self._instances:
                self._instances[instance_id] = (media_type, byte_len)
                self._flush()

    def has_instance(self, instance_id: str) -> bool:
        return instance_id in self._instances

    def instance_count(self) -> int:
        return len(self._instances)

    def instance_meta(self, instance_id: str) -> tuple[str, int]:
        try:
            return self._instances[instance_id]
        except KeyError:
            raise UnknownInstanceError("unknown instance") from None

    def instance_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._instances))

    def get_instance(self, instance_id: str) -> Instance:
        media_type, byte_len = self.instance_meta(instance_id)
        blob_path = self._blob_dir / instance_id
        if not blob_path.exists():
            raise CorpusError(f"instance bytes unavailable: {instance_id}")
        return Instance(id=instance_id, media_type=media_type, byte_len=byte_len, data=blob_path.read_bytes())

    def has_blob(self, instance_id: str) -> bool:
        return (self._blob_dir / instance_id).exists()

    # -- reports ----------------------------------------------------------

    def add_report(
        self,
        *,
        instance_ref: str,
        model_output: str,
        text: str,
        source: str = "deployed",
        ground_truth: Optional[str] = None,
    ) -> FailureReport:
        if not text or not text.strip():
            raise CorpusError("empty report")
        if source not in REPORT_SOURCES:
            raise CorpusError(f"invalid source: {source!r}")
        with self._lock:
            if instance_ref not in self._instances:
                raise UnknownInstanceError("unknown instance")
            if self._config.task_kind == "classification" and model_output not in self._config.label_set:
                raise CorpusError(f"model output not in label set: {model_output!r}")
            report = FailureReport(
                id=uuid.uuid4().hex,
                instance_ref=instance_ref,
                model_output=model_output,
                ground_truth=ground_truth,
                text=text,
                source=source,
                created_at=utcnow_rfc3339(),
            )
            self._reports.append(report)
            self._by_id[report.id] = report
            self._version += 1
            self._flush()
            return report

    def ingest_reports(self, stream: str | bytes | Iterable[str]) -> IngestResult:
        """Bulk-load line-delimited report records.

        All valid records land under a single new version; invalid lines are
        reported with their 1-based line number and stored nowhere. An
        exception while reading the stream leaves the corpus untouched.
        """
        if isinstance(stream, bytes):
            lines: Iterable[str] = stream.decode("utf-8").splitlines()
        elif isinstance(stream, str):
            lines = stream.splitlines()
        else:
            lines = stream
        with self._lock:
            accepted: list[FailureReport] = []
            rejected: list[tuple[int, str]] = []
            seen_ids = set(self._by_id)
            for line_no, line in enumerate(lines, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    rejected.append((line_no, f"malformed record: {exc.msg}"))
                    continue
                reason = _validate_record(raw, self._config)
                if reason is None and raw["instance_ref"] not in self._instances:
                    reason = "unknown instance"
                if reason is None and raw["id"] in seen_ids:
                    reason = "duplicate report id"
                if reason is not None:
                    rejected.append((line_no, reason))
                    continue
                seen_ids.add(raw["id"])
                accepted.append(FailureReport(**{name: raw.get(name) for name in REPORT_FIELDS}))
            if accepted:
                self._reports.extend(accepted)
                for report in accepted:
                    self._by_id[report.id] = report
                self._version += 1
                self._flush()
            return IngestResult(accepted=len(accepted), rejected=tuple(rejected), version=self._version)

    def insert_reports(self, reports: Sequence[FailureReport], adopt_version: Optional[int] = None) -> None:
        """Insert fully-formed reports (bundle import). One version bump; if
        ``adopt_version`` is given and the corpus is empty, take that version
        verbatim so a restored corpus matches the bundle manifest."""
        with self._lock:
            fresh = [r for r in reports if r.id not in self._by_id]
            for report in fresh:
                if report.instance_ref not in self._instances:
                    raise UnknownInstanceError("unknown instance")
            adopt = adopt_version is not None and self._version == 0 and not self._reports
            if not fresh and not adopt:
                return
            self._reports.extend(fresh)
            for report in fresh:
                self._by_id[report.id] = report
            self._version = adopt_version if adopt else self._version + 1
            self._flush()

    def get_report(self, report_id: str) -> FailureReport:
        try:
            return self._by_id[report_id]
        except KeyError:
            raise UnknownReportError("unknown report") from None

    def has_report(self, report_id: str) -> bool:
        return report_id in self._by_id

    def list_reports(
        self,
        *,
        text_query: Optional[str] = None,
        within_ids: Optional[set[str]] = None,
        page: int = 0,
        page_size: int = 50,
    ) -> ReportPage:
        if not (1 <= page_size <= MAX_PAGE_SIZE):
            raise CorpusError(f"page_size must be in [1, {MAX_PAGE_SIZE}]")
        if page < 0:
            raise CorpusError("page must be nonnegative")
        with self._lock:
            matched = list(self._reports)
        if within_ids is not None:
            matched = [r for r in matched if r.id in within_ids]
        if text_query:
            needle = text_query.lower()
            matched = [r for r in matched if needle in r.text.lower()]
        matched.sort(key=FailureReport.sort_key)
        start = page * page_size
        return ReportPage(
            items=tuple(matched[start : start + page_size]),
            total=len(matched),
            page=page,
            page_size=page_size,
        )

    # -- snapshots / export ----------------------------------------------

    @property
    def version(self) -> int:
        return self._version

    @property
    def config(self) -> DomainConfig:
        return self._config

    def is_empty(self) -> bool:
        return self._version == 0 and not self._reports and not self._instances

    def snapshot(self) -> CorpusSnapshot:
        with self._lock:
            return CorpusSnapshot(version=self._version, reports=tuple(self._reports), config=self._config)

    def export_records(self) -> Iterator[str]:
        """Canonical line-delimited serialization of every stored report."""
        for report in self.snapshot().reports:
            yield report.record_line()
