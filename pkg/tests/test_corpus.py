"""Corpus store: content addressing, versioning, ingest, listing, snapshots."""

import json

import pytest

from blindspot.corpus import (
    CorpusError,
    CorpusStore,
    DomainConfig,
    UnknownInstanceError,
    content_hash,
)


def make_record(i, instance_id, text=None, **overrides):
    record = {
        "id": f"r-{i:03d}",
        "instance_ref": instance_id,
        "model_output": "no_glasses",
        "ground_truth": "glasses",
        "text": text or f"report number {i} about thin frames",
        "source": "crowdsourced",
        "created_at": f"2021-03-01T09:{i % 60:02d}:00+00:00",
    }
    record.update(overrides)
    return record


class TestDomainConfig:
    def test_classification_needs_two_labels(self):
        with pytest.raises(CorpusError):
            DomainConfig(task_kind="classification", prompt_kind="why", label_set=("only",))

    def test_generation_allows_empty_labels(self):
        config = DomainConfig(task_kind="generation", prompt_kind="how")
        assert config.label_set == ()

    def test_invalid_kinds_rejected(self):
        with pytest.raises(CorpusError):
            DomainConfig(task_kind="regression", prompt_kind="why", label_set=("a", "b"))
        with pytest.raises(CorpusError):
            DomainConfig(task_kind="generation", prompt_kind="when")


class TestInstances:
    def test_same_bytes_same_id_store_unchanged(self, store):
        first = store.store_instance(b"payload", "image/png")
        count = store.instance_count()
        second = store.store_instance(b"payload", "image/png")
        assert first.id == second.id
        assert store.instance_count() == count

    def test_empty_blob_rejected(self, store):
        with pytest.raises(CorpusError, match="empty instance"):
            store.store_instance(b"", "image/png")

    def test_one_byte_difference_distinct_ids(self, store):
        a = store.store_instance(b"payload-a", "image/png")
        b = store.store_instance(b"payload-b", "image/png")
        assert a.id != b.id
        # independent check against the digest itself
        assert a.id == content_hash(b"payload-a")
        assert b.id == content_hash(b"payload-b")

    def test_unsupported_media_type_lists_supported(self, store):
        with pytest.raises(CorpusError, match="supported:.*image/png"):
            store.store_instance(b"payload", "video/mp4")

    def test_roundtrip_bytes(self, store):
        stored = store.store_instance(b"some bytes", "text/plain")
        loaded = store.get_instance(stored.id)
        assert loaded.data == b"some bytes"
        assert loaded.media_type == "text/plain"
        assert loaded.byte_len == len(b"some bytes")

    def test_instances_do_not_bump_version(self, store):
        version = store.version
        store.store_instance(b"payload", "image/png")
        assert store.version == version


class TestAddReport:
    def test_happy_path_bumps_version(self, store, stored_instance):
        before = store.version
        report = store.add_report(
            instance_ref=stored_instance.id,
            model_output="no_glasses",
            text="the glasses have thin clear frames",
            source="crowdsourced",
        )
        assert store.version == before + 1
        assert store.get_report(report.id).text == "the glasses have thin clear frames"

    def test_blank_text_rejected(self, store, stored_instance):
        with pytest.raises(CorpusError, match="empty report"):
            store.add_report(instance_ref=stored_instance.id, model_output="glasses", text="   ")

    def test_unknown_instance_rejected(self, store):
        with pytest.raises(UnknownInstanceError, match="unknown instance"):
            store.add_report(instance_ref="deadbeef", model_output="glasses", text="some text")

    def test_label_outside_label_set_rejected(self, store, stored_instance):
        with pytest.raises(CorpusError, match="not in label set"):
            store.add_report(instance_ref=stored_instance.id, model_output="maybe", text="some text")

    def test_generation_corpus_allows_any_output(self, tmp_path):
        store = CorpusStore(tmp_path / "c", DomainConfig(task_kind="generation", prompt_kind="how"))
        inst = store.store_instance(b"pic", "image/png")
        report = store.add_report(instance_ref=inst.id, model_output="a dog with a frisbee", text="no frisbee there")
        assert report.ground_truth is None


class TestIngest:
    def test_valid_stream_single_version_bump(self, store, stored_instance):
        lines = [json.dumps(make_record(i, stored_instance.id)) for i in range(10)]
        before = store.version
        result = store.ingest_reports("\n".join(lines))
        assert result.accepted == 10
        assert result.rejected == ()
        assert store.version == before + 1

    def test_empty_stream_version_unchanged(self, store):
        before = store.version
        result = store.ingest_reports("")
        assert result.accepted == 0
        assert store.version == before

    def test_partial_validity_reports_line_numbers(self, store, stored_instance):
        records = [make_record(i, stored_instance.id) for i in range(10)]
        del records[4]["text"]
        result = store.ingest_reports("\n".join(json.dumps(r) for r in records))
        assert result.accepted == 9
        assert len(result.rejected) == 1
        line, reason = result.rejected[0]
        assert line == 5
        assert "text" in reason

    def test_malformed_json_rejected_with_line(self, store, stored_instance):
        lines = [json.dumps(make_record(0, stored_instance.id)), "{not json"]
        result = store.ingest_reports("\n".join(lines))
        assert result.accepted == 1
        assert result.rejected[0][0] == 2
        assert "malformed" in result.rejected[0][1]

    def test_duplicate_id_rejected(self, store, stored_instance):
        record = make_record(1, stored_instance.id)
        result = store.ingest_reports(json.dumps(record) + "\n" + json.dumps(record))
        assert result.accepted == 1
        assert result.rejected[0][1] == "duplicate report id"

    def test_duplicate_against_existing_rejected(self, store, stored_instance):
        record = make_record(1, stored_instance.id)
        store.ingest_reports(json.dumps(record))
        result = store.ingest_reports(json.dumps(record))
        assert result.accepted == 0
        assert result.rejected[0][1] == "duplicate report id"

    def test_dangling_instance_rejected(self, store):
        result = store.ingest_reports(json.dumps(make_record(1, "no-such-instance")))
        assert result.accepted == 0
        assert result.rejected[0][1] == "unknown instance"

    def test_stream_error_leaves_corpus_unchanged(self, store, stored_instance):
        def broken():
            yield json.dumps(make_record(0, stored_instance.id))
            raise IOError("disk died mid-stream")

        before = store.snapshot()
        with pytest.raises(IOError):
            store.ingest_reports(broken())
        after = store.snapshot()
        assert after.version == before.version
        assert after.reports == before.reports

    def test_roundtrip_field_for_field(self, store, stored_instance):
        records = [make_record(i, stored_instance.id) for i in range(7)]
        store.ingest_reports("\n".join(json.dumps(r) for r in records))
        exported = [json.loads(line) for line in store.export_records()]
        assert exported == records


class TestListReports:
    @pytest.fixture
    def populated(self, store, stored_instance):
        texts = [
            "the frames are thin",
            "THIN FRAMES again",
            "dark tinted lenses",
            "hair covering the face",
        ]
        for i, text in enumerate(texts):
            store.ingest_reports(json.dumps(make_record(i, stored_instance.id, text=text)))
        return store

    def test_substring_match_case_insensitive(self, populated):
        page = populated.list_reports(text_query="frames")
        assert page.total == 2
        assert all("frames" in r.text.lower() for r in page.items)

    def test_no_match_empty_page(self, populated):
        page = populated.list_reports(text_query="zzqq")
        assert page.total == 0
        assert page.items == ()

    def test_stable_order_by_created_at_then_id(self, populated):
        page = populated.list_reports(page_size=10)
        keys = [r.sort_key() for r in page.items]
        assert keys == sorted(keys)

    def test_page_size_bounds(self, populated):
        with pytest.raises(CorpusError):
            populated.list_reports(page_size=0)
        with pytest.raises(CorpusError):
            populated.list_reports(page_size=501)

    def test_pagination_arithmetic(self, store, stored_instance):
        lines = [json.dumps(make_record(i, stored_instance.id)) for i in range(11)]
        store.ingest_reports("\n".join(lines))
        sizes = [len(store.list_reports(page=p, page_size=4).items) for p in range(4)]
        assert sizes == [4, 4, 3, 0]


class TestSnapshots:
    def test_snapshot_unchanged_by_later_writes(self, store, stored_instance):
        old = store.snapshot()
        store.add_report(instance_ref=stored_instance.id, model_output="glasses", text="something new")
        new = store.snapshot()
        assert new.version == old.version + 1
        assert len(old.reports) == 0
        assert len(new.reports) == 1

    def test_snapshot_idempotent_without_writes(self, store):
        a = store.snapshot()
        b = store.snapshot()
        assert a.version == b.version
        assert a.reports == b.reports

    def test_empty_corpus_snapshot(self, store):
        snap = store.snapshot()
        assert snap.version == 0
        assert snap.reports == ()


class TestPersistence:
    def test_reopen_preserves_state(self, tmp_path, classification_config):
        store = CorpusStore(tmp_path / "c", classification_config)
        inst = store.store_instance(b"pic", "image/png")
        report = store.add_report(instance_ref=inst.id, model_output="glasses", text="thin frames")
        reopened = CorpusStore(tmp_path / "c")
        assert reopened.version == store.version
        assert reopened.get_report(report.id) == report
        assert reopened.get_instance(inst.id).data == b"pic"

    def test_conflicting_config_rejected(self, tmp_path, classification_config):
        CorpusStore(tmp_path / "c", classification_config)
        other = DomainConfig(task_kind="generation", prompt_kind="how")
        with pytest.raises(CorpusError):
            CorpusStore(tmp_path / "c", other)
