"""Hypothesis workspace: lifecycle, attached reports, evidence ledgers,
validity summaries, and bundle export/import."""

import json
import zipfile
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindspot.concepts import score_corpus
from blindspot.corpus import CorpusStore, DomainConfig, ModelOutput, UnknownInstanceError, UnknownReportError
from blindspot.hypotheses import (
    BundleConflictError,
    BundleVersionError,
    HypothesisError,
    UnknownHypothesisError,
    Workspace,
)

OUT = ModelOutput(label_or_caption="no_glasses", confidence=0.8)


@pytest.fixture
def workspace(store):
    return Workspace(store)


@pytest.fixture
def seeded(workspace):
    """Workspace with two instances and two reports."""
    store = workspace.store
    inst_a = store.store_instance(b"photo a", "image/png")
    inst_b = store.store_instance(b"photo b", "image/png")
    report_1 = store.add_report(
        instance_ref=inst_a.id, model_output="no_glasses", text="thin clear frames", source="crowdsourced"
    )
    report_2 = store.add_report(
        instance_ref=inst_b.id, model_output="no_glasses", text="the rims are transparent", source="crowdsourced"
    )
    return workspace, (inst_a, inst_b), (report_1, report_2)


class TestLifecycle:
    def test_create_starts_empty(self, workspace):
        hypothesis = workspace.create_hypothesis("thin, clear, or no rims")
        assert hypothesis.name == "thin, clear, or no rims"
        assert hypothesis.attached_report_ids == []
        assert hypothesis.additional_evidence == []
        assert hypothesis.modified_evidence == []

    def test_blank_name_rejected(self, workspace):
        with pytest.raises(HypothesisError, match="empty name"):
            workspace.create_hypothesis("   ")

    def test_rename_to_blank_rejected(self, workspace):
        hypothesis = workspace.create_hypothesis("dark or tinted lenses")
        with pytest.raises(HypothesisError, match="empty name"):
            workspace.rename_hypothesis(hypothesis.id, "")

    def test_listing_in_creation_order(self, workspace):
        first = workspace.create_hypothesis("first idea")
        second = workspace.create_hypothesis("second idea")
        listed = workspace.list_hypotheses()
        assert [h.id for h in listed] == [first.id, second.id]

    def test_duplicate_names_allowed_with_warning(self, workspace):
        workspace.create_hypothesis("eyes occluded")
        with pytest.warns(UserWarning, match="duplicate"):
            duplicate = workspace.create_hypothesis("eyes occluded")
        assert workspace.name_is_duplicate(duplicate.name)

    def test_unknown_hypothesis(self, workspace):
        with pytest.raises(UnknownHypothesisError):
            workspace.rename_hypothesis("nope", "x")


class TestAttachDetach:
    def test_attach_idempotent(self, seeded):
        workspace, _, (report_1, _) = seeded
        hyp = workspace.create_hypothesis("h")
        workspace.attach_report(hyp.id, report_1.id)
        workspace.attach_report(hyp.id, report_1.id)
        assert hyp.attached_report_ids == [report_1.id]

    def test_attach_then_detach_restores(self, seeded):
        workspace, _, (report_1, report_2) = seeded
        hyp = workspace.create_hypothesis("h")
        workspace.attach_report(hyp.id, report_1.id)
        workspace.attach_report(hyp.id, report_2.id)
        workspace.detach_report(hyp.id, report_2.id)
        assert hyp.attached_report_ids == [report_1.id]

    def test_attach_preserves_order(self, seeded):
        workspace, _, (report_1, report_2) = seeded
        hyp = workspace.create_hypothesis("h")
        workspace.attach_report(hyp.id, report_2.id)
        workspace.attach_report(hyp.id, report_1.id)
        assert hyp.attached_report_ids == [report_2.id, report_1.id]

    def test_unknown_report_named(self, seeded):
        workspace, _, _ = seeded
        hyp = workspace.create_hypothesis("h")
        with pytest.raises(UnknownReportError, match="unknown report"):
            workspace.attach_report(hyp.id, "missing")


class TestRelatedConcepts:
    def test_concepts_of_attached_report(self, seeded):
        workspace, _, (report_1, _) = seeded
        index = score_corpus(workspace.store.snapshot())
        hyp = workspace.create_hypothesis("h")
        workspace.attach_report(hyp.id, report_1.id)
        ids = workspace.related_concepts(index, hyp.id, report_1.id)
        expected = [c.id for c in index if report_1.id in c.report_ids]
        assert ids == expected
        assert index.get("thin clear frames").id in ids

    def test_unattached_report_rejected(self, seeded):
        workspace, _, (report_1, _) = seeded
        index = score_corpus(workspace.store.snapshot())
        hyp = workspace.create_hypothesis("h")
        with pytest.raises(HypothesisError, match="not attached"):
            workspace.related_concepts(index, hyp.id, report_1.id)

    def test_matches_inverted_index(self, seeded):
        workspace, _, (report_1, report_2) = seeded
        index = score_corpus(workspace.store.snapshot())
        hyp = workspace.create_hypothesis("h")
        for report in (report_1, report_2):
            workspace.attach_report(hyp.id, report.id)
        # brute-force inversion of the index
        inverted = {}
        for concept in index:
            for rid in concept.report_ids:
                inverted.setdefault(rid, []).append(concept.id)
        for report in (report_1, report_2):
            assert workspace.related_concepts(index, hyp.id, report.id) == inverted[report.id]


class TestEvidence:
    def test_additional_counts(self, seeded):
        workspace, (inst_a, inst_b), _ = seeded
        hyp = workspace.create_hypothesis("h")
        items = []
        for i in range(4):
            inst = workspace.store.store_instance(f"extra {i}".encode(), "image/png")
            items.append(workspace.add_additional_instance(hyp.id, inst.id, OUT, "image_search"))
        for item in items[:3]:
            workspace.set_additional_verdict(hyp.id, item.id, "correct")
        workspace.set_additional_verdict(hyp.id, items[3].id, "incorrect")
        summary = workspace.validity_summary(hyp.id)
        assert summary.additional_counts == {"correct": 3, "incorrect": 1, "unlabeled": 0}
        assert summary.additional_accuracy == 0.75

    def test_verdict_last_write_wins(self, seeded):
        workspace, (inst_a, _), _ = seeded
        hyp = workspace.create_hypothesis("h")
        item = workspace.add_additional_instance(hyp.id, inst_a.id, OUT, "upload")
        workspace.set_additional_verdict(hyp.id, item.id, "correct")
        workspace.set_additional_verdict(hyp.id, item.id, "incorrect")
        assert item.verdict == "incorrect"

    def test_additional_with_unknown_instance(self, seeded):
        workspace, _, _ = seeded
        hyp = workspace.create_hypothesis("h")
        with pytest.raises(UnknownInstanceError, match="unknown instance"):
            workspace.add_additional_instance(hyp.id, "missing", OUT, "upload")

    def test_modified_pair_happy_path(self, seeded):
        workspace, (inst_a, inst_b), _ = seeded
        hyp = workspace.create_hypothesis("h")
        pair = workspace.add_modified_pair(
            hyp.id, inst_a.id, ModelOutput("no_glasses"), inst_b.id, ModelOutput("glasses")
        )
        workspace.set_modified_verdict(hyp.id, pair.id, "as_expected")
        summary = workspace.validity_summary(hyp.id)
        assert summary.modified_counts["as_expected"] == 1
        assert summary.modified_expected_rate == 1.0

    def test_identical_refs_rejected(self, seeded):
        workspace, (inst_a, _), _ = seeded
        hyp = workspace.create_hypothesis("h")
        with pytest.raises(HypothesisError, match="equals original"):
            workspace.add_modified_pair(hyp.id, inst_a.id, OUT, inst_a.id, OUT)

    def test_unlabeled_excluded_from_rate(self, seeded):
        workspace, (inst_a, inst_b), _ = seeded
        hyp = workspace.create_hypothesis("h")
        workspace.add_modified_pair(hyp.id, inst_a.id, OUT, inst_b.id, OUT)
        summary = workspace.validity_summary(hyp.id)
        assert summary.modified_expected_rate is None
        assert summary.modified_counts["unlabeled"] == 1

    def test_no_evidence_no_fractions(self, seeded):
        workspace, _, _ = seeded
        hyp = workspace.create_hypothesis("h")
        summary = workspace.validity_summary(hyp.id)
        assert summary.additional_accuracy is None
        assert summary.modified_expected_rate is None


class TestValidityProperty:
    @given(
        additional=st.lists(st.sampled_from(["correct", "incorrect", "unlabeled"]), max_size=30),
        modified=st.lists(st.sampled_from(["as_expected", "not_as_expected", "unlabeled"]), max_size=30),
    )
    @settings(max_examples=60, deadline=None)
    def test_fractions_equal_recounts(self, tmp_path_factory, additional, modified):
        root = tmp_path_factory.mktemp("ws")
        store = CorpusStore(root, DomainConfig(task_kind="generation", prompt_kind="how"))
        workspace = Workspace(store)
        hyp = workspace.create_hypothesis("random ledger")
        for i, verdict in enumerate(additional):
            inst = store.store_instance(f"add {i}".encode(), "image/png")
            item = workspace.add_additional_instance(hyp.id, inst.id, OUT, "upload")
            if verdict != "unlabeled":
                workspace.set_additional_verdict(hyp.id, item.id, verdict)
        for i, verdict in enumerate(modified):
            a = store.store_instance(f"orig {i}".encode(), "image/png")
            b = store.store_instance(f"mod {i}".encode(), "image/png")
            pair = workspace.add_modified_pair(hyp.id, a.id, OUT, b.id, OUT)
            if verdict != "unlabeled":
                workspace.set_modified_verdict(hyp.id, pair.id, verdict)

        summary = workspace.validity_summary(hyp.id)
        n_correct = additional.count("correct")
        n_incorrect = additional.count("incorrect")
        n_expected = modified.count("as_expected")
        n_unexpected = modified.count("not_as_expected")
        assert summary.additional_counts == {
            "correct": n_correct,
            "incorrect": n_incorrect,
            "unlabeled": additional.count("unlabeled"),
        }
        assert summary.modified_counts == {
            "as_expected": n_expected,
            "not_as_expected": n_unexpected,
            "unlabeled": modified.count("unlabeled"),
        }
        if n_correct + n_incorrect:
            assert summary.additional_accuracy == n_correct / (n_correct + n_incorrect)
        else:
            assert summary.additional_accuracy is None
        if n_expected + n_unexpected:
            assert summary.modified_expected_rate == n_expected / (n_expected + n_unexpected)
        else:
            assert summary.modified_expected_rate is None


def build_rich_workspace(root):
    store = CorpusStore(
        root, DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses"))
    )
    workspace = Workspace(store)
    inst_a = store.store_instance(b"photo a", "image/png")
    inst_b = store.store_instance(b"photo b", "image/png")
    inst_c = store.store_instance(b"photo c", "image/png")
    r1 = store.add_report(instance_ref=inst_a.id, model_output="no_glasses", text="thin clear frames")
    r2 = store.add_report(instance_ref=inst_b.id, model_output="no_glasses", text="the rims are transparent")
    hyp = workspace.create_hypothesis("thin, clear, or no rims")
    workspace.attach_report(hyp.id, r1.id)
    workspace.attach_report(hyp.id, r2.id)
    item = workspace.add_additional_instance(hyp.id, inst_c.id, OUT, "image_search")
    workspace.set_additional_verdict(hyp.id, item.id, "correct")
    pair = workspace.add_modified_pair(
        hyp.id, inst_a.id, ModelOutput("no_glasses"), inst_c.id, ModelOutput("glasses")
    )
    workspace.set_modified_verdict(hyp.id, pair.id, "as_expected")
    return workspace


LAYOUT_ENTRIES = [
    {"concept_id": "abc123", "x": 0.25, "y": -1.5, "font_scale": 10.0, "opacity": 0.4},
    {"concept_id": "def456", "x": -0.25, "y": 1.5, "font_scale": 32.0, "opacity": 1.0},
]


class TestBundles:
    def test_export_import_export_byte_identical(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=LAYOUT_ENTRIES, layout_seed=42, include_blobs=True)

        fresh_store = CorpusStore(
            tmp_path / "fresh",
            DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses")),
        )
        fresh = Workspace(fresh_store)
        report = fresh.import_bundle(bundle)
        assert report.added_hypotheses == 1
        assert report.added_reports == 2
        re_exported = fresh.export_bundle(
            layout_entries=list(report.layout_entries), layout_seed=report.layout_seed, include_blobs=True
        )
        assert re_exported == bundle

    def test_import_twice_all_noops(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=[], layout_seed=1)
        fresh = Workspace(
            CorpusStore(
                tmp_path / "fresh",
                DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses")),
            )
        )
        first = fresh.import_bundle(bundle)
        second = fresh.import_bundle(bundle)
        assert first.added_reports == 2 and first.added_hypotheses == 1
        assert second.added_reports == 0 and second.added_hypotheses == 0
        assert second.noop_reports == 2 and second.noop_hypotheses == 1

    def test_workspace_equals_original_after_import(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=[], layout_seed=1, include_blobs=True)
        fresh = Workspace(
            CorpusStore(
                tmp_path / "fresh",
                DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses")),
            )
        )
        fresh.import_bundle(bundle)
        original_hypotheses = [Workspace._hypothesis_state(h) for h in workspace.list_hypotheses()]
        imported_hypotheses = [Workspace._hypothesis_state(h) for h in fresh.list_hypotheses()]
        assert imported_hypotheses == original_hypotheses
        assert sorted(fresh.store.export_records()) == sorted(workspace.store.export_records())
        assert fresh.store.version == workspace.store.version

    def test_conflicting_report_rejected_atomically(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=[], layout_seed=1)

        # Tamper: same report id, different text.
        source = zipfile.ZipFile(io.BytesIO(bundle))
        tampered = io.BytesIO()
        tampered_id = None
        with zipfile.ZipFile(tampered, "w", zipfile.ZIP_STORED) as out:
            for name in source.namelist():
                data = source.read(name)
                if name == "reports.ndjson":
                    rows = [json.loads(line) for line in data.decode().splitlines()]
                    rows[0]["text"] = "tampered text"
                    tampered_id = rows[0]["id"]
                    data = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows).encode()
                out.writestr(name, data)

        before_reports = list(workspace.store.export_records())
        before_hypotheses = [Workspace._hypothesis_state(h) for h in workspace.list_hypotheses()]
        with pytest.raises(BundleConflictError) as excinfo:
            workspace.import_bundle(tampered.getvalue())
        assert tampered_id in excinfo.value.conflicts
        assert list(workspace.store.export_records()) == before_reports
        assert [Workspace._hypothesis_state(h) for h in workspace.list_hypotheses()] == before_hypotheses

    def test_unsupported_version_rejected(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=[], layout_seed=1)
        source = zipfile.ZipFile(io.BytesIO(bundle))
        tampered = io.BytesIO()
        with zipfile.ZipFile(tampered, "w", zipfile.ZIP_STORED) as out:
            for name in source.namelist():
                data = source.read(name)
                if name == "manifest.json":
                    manifest = json.loads(data)
                    manifest["format_version"] = 99
                    data = json.dumps(manifest).encode()
                out.writestr(name, data)
        with pytest.raises(BundleVersionError, match="unsupported bundle version"):
            workspace.import_bundle(tampered.getvalue())

    def test_selective_export_contains_only_referenced(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        other = workspace.create_hypothesis("dark or tinted lenses")
        bundle = workspace.export_bundle(hypothesis_ids=[other.id], layout_entries=[], layout_seed=1)
        archive = zipfile.ZipFile(io.BytesIO(bundle))
        hypothesis_rows = archive.read("hypotheses.ndjson").decode().splitlines()
        report_rows = archive.read("reports.ndjson").decode().splitlines()
        assert len(hypothesis_rows) == 1
        assert json.loads(hypothesis_rows[0])["name"] == "dark or tinted lenses"
        assert report_rows == []

    def test_import_without_blobs_keeps_metadata(self, tmp_path):
        workspace = build_rich_workspace(tmp_path / "original")
        bundle = workspace.export_bundle(layout_entries=[], layout_seed=1, include_blobs=False)
        fresh = Workspace(
            CorpusStore(
                tmp_path / "fresh",
                DomainConfig(task_kind="classification", prompt_kind="why", label_set=("glasses", "no_glasses")),
            )
        )
        report = fresh.import_bundle(bundle)
        assert report.added_instances == 3
        for iid in fresh.store.instance_ids():
            assert fresh.store.has_instance(iid)
            assert not fresh.store.has_blob(iid)
