"""Walkthrough: create a blind-spot hypothesis, collect both kinds of
validation evidence, and share the result as a bundle.

The two ledgers mirror how an analyst works: run the model on additional
instances that match the hypothesis (is it actually wrong there?) and on
counterfactual edits of a failing instance (does removing the suspected
feature flip the output?).
"""

import tempfile
from pathlib import Path

from blindspot import ModelOutput, Workspace, score_corpus
from blindspot.corpus import CorpusStore
from blindspot.fixtures import eyeglass_config, load_eyeglass_corpus

workdir = Path(tempfile.mkdtemp(prefix="triage-demo-"))
store = load_eyeglass_corpus(workdir / "corpus")
workspace = Workspace(store)
index = score_corpus(store.snapshot())

# Name the suspicion, then attach the reports that motivated it.
hypothesis = workspace.create_hypothesis("thin, clear, or no rims")
thin_reports = store.list_reports(text_query="thin", page_size=3).items
for report in thin_reports:
    workspace.attach_report(hypothesis.id, report.id)
print(f"hypothesis {hypothesis.name!r} with {len(hypothesis.attached_report_ids)} reports")

# Hovering an attached report highlights its concepts in the embedding.
related = workspace.related_concepts(index, hypothesis.id, thin_reports[0].id)
phrases = [index.by_id(cid).phrase for cid in related]
print(f"report {thin_reports[0].id} relates to concepts: {phrases}")

# Additional-instance validation: found images, model output recorded at
# add time, analyst marks each correct/incorrect.
verdicts = ["correct", "correct", "incorrect", "correct"]
for i, verdict in enumerate(verdicts):
    instance = store.store_instance(f"downloaded photo {i}".encode(), "image/png")
    item = workspace.add_additional_instance(
        hypothesis.id, instance.id, ModelOutput("no_glasses", 0.6), "image_search"
    )
    workspace.set_additional_verdict(hypothesis.id, item.id, verdict)

# Modified-instance validation: darkening the frames flipped the output.
original = store.get_instance(thin_reports[0].instance_ref)
edited = store.store_instance(original.data + b" (frames darkened)", "image/png")
pair = workspace.add_modified_pair(
    hypothesis.id,
    original.id,
    ModelOutput("no_glasses", 0.6),
    edited.id,
    ModelOutput("glasses", 0.9),
)
workspace.set_modified_verdict(hypothesis.id, pair.id, "as_expected")

summary = workspace.validity_summary(hypothesis.id)
print(f"\nadditional instances: {summary.additional_counts}")
print(f"accuracy bar: {summary.additional_accuracy:.0%} of labeled instances still misclassified-as-expected")
print(f"modified pairs: {summary.modified_counts}, changed as expected: {summary.modified_expected_rate:.0%}")

# Bundles round-trip the whole workspace for sharing.
bundle = workspace.export_bundle(include_blobs=True, layout_entries=[], layout_seed=42)
fresh = Workspace(CorpusStore(workdir / "imported", eyeglass_config()))
report = fresh.import_bundle(bundle)
print(f"\nexported {len(bundle)} bytes; fresh import added "
      f"{report.added_reports} reports, {report.added_hypotheses} hypotheses")
round_trip = fresh.export_bundle(include_blobs=True, layout_entries=[], layout_seed=42)
print(f"re-export byte-identical: {round_trip == bundle}")
