"""Walkthrough: load the bundled eyeglass corpus and explore its concepts.

Covers the first half of the triage pipeline: content-addressed instance
storage, bulk report ingest, keyphrase extraction, concept search, and
analyst-added custom keywords.
"""

import tempfile
from pathlib import Path

from blindspot import add_custom_keyword, extract_candidates, score_corpus, search_concepts
from blindspot.fixtures import load_eyeglass_corpus

workdir = Path(tempfile.mkdtemp(prefix="triage-demo-"))
store = load_eyeglass_corpus(workdir / "corpus")
snapshot = store.snapshot()
print(f"corpus at {workdir}")
print(f"version {snapshot.version}: {len(snapshot.reports)} reports, {store.instance_count()} instances\n")

# A single report text turns into candidate phrases by splitting at
# punctuation and stopwords.
example = snapshot.reports[0]
print(f"report {example.id}: {example.text!r}")
print(f"  model said {example.model_output!r}, truth {example.ground_truth!r}")
print(f"  candidates: {extract_candidates(example.text)}\n")

# Scoring the whole corpus merges candidates into counted concepts.
index = score_corpus(snapshot)
print(f"{len(index)} concepts extracted; most mentioned:")
for concept in sorted(index, key=lambda c: -c.mention_count)[:10]:
    print(f"  {concept.phrase:<28} x{concept.mention_count:<3} score {concept.rake_score:.2f}")

# Substring search, most-mentioned first.
print("\nsearch 'frame':")
for concept in search_concepts(index, "frame")[:5]:
    print(f"  {concept.phrase:<28} in {len(concept.report_ids)} reports")

# The analyst can add their own keyword; mentions come from substring
# matching against every report text.
custom = add_custom_keyword(index, list(snapshot.reports), "reflective")
print(f"\ncustom keyword {custom.phrase!r}: {custom.mention_count} mentions in {len(custom.report_ids)} reports")

# Reports panel search, paged.
page = store.list_reports(text_query="transparent", page=0, page_size=5)
print(f"\nreports mentioning 'transparent' ({page.total} total):")
for report in page.items:
    print(f"  {report.id}: {report.text}")
