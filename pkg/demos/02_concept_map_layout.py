"""Walkthrough: project concepts onto the 2D map the embedding view draws.

Each concept gets a phrase vector (mean of its word vectors), the vectors
form an exact cosine kNN graph, and seeded SGD lays the graph out in 2D.
The same seed always reproduces the same picture, bit for bit. Saves the
map to concept_map.png next to this script.
"""

import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from blindspot import fit_layout, knn_graph, load_vectors, phrase_vector, score_corpus, visual_encoding
from blindspot.embedding import OutOfVocabularyError
from blindspot.fixtures import eyeglass_vector_file, load_eyeglass_corpus
from blindspot.layout import place_new_point

store = load_eyeglass_corpus(Path(tempfile.mkdtemp(prefix="triage-demo-")) / "corpus")
snapshot = store.snapshot()
index = score_corpus(snapshot)
vectors_store = load_vectors(eyeglass_vector_file())
print(f"{len(index)} concepts, vector store dimension {vectors_store.dimension}")

# Compose one vector per concept; out-of-vocabulary concepts stay listed in
# the index but get no position.
vectors = {}
for concept in index:
    try:
        vectors[concept.id] = phrase_vector(vectors_store, concept.phrase, concept.id).vector
    except OutOfVocabularyError:
        print(f"  (no vector for {concept.phrase!r})")
print(f"{len(vectors)} embeddable concepts")

graph = knn_graph(vectors, k=15)
print(f"kNN graph: {graph.n_nodes} nodes, {len(graph.weights)} symmetrized edges")

layout = fit_layout(graph, seed=42, corpus_version=snapshot.version)
again = fit_layout(graph, seed=42, corpus_version=snapshot.version)
print(f"determinism check (same seed, refit): identical = {layout.points == again.points}")

# Count-driven text encoding: sqrt font ramp, log opacity ramp.
encodings = visual_encoding({c.id: c.mention_count for c in index})

by_id = {c.id: c for c in index}
fig, ax = plt.subplots(figsize=(11, 8))
for cid, (x, y) in layout.points.items():
    concept = by_id[cid]
    enc = encodings[cid]
    ax.text(x, y, concept.phrase, fontsize=enc.font_scale * 0.45, alpha=enc.opacity,
            ha="center", va="center")
xs = [p[0] for p in layout.points.values()]
ys = [p[1] for p in layout.points.values()]
ax.set_xlim(min(xs) - 1, max(xs) + 1)
ax.set_ylim(min(ys) - 1, max(ys) + 1)
ax.set_axis_off()
out_path = Path(__file__).parent / "concept_map.png"
fig.savefig(out_path, dpi=120, bbox_inches="tight")
print(f"wrote {out_path}")

# An added keyword lands where it semantically belongs, without refitting.
new_vec = phrase_vector(vectors_store, "tinted shades").vector
x, y = place_new_point(layout, vectors, new_vec)
print(f"'tinted shades' would be placed at ({x:.2f}, {y:.2f})")

# Sanity: related eyewear words sit near each other on the map.
import numpy as np

def concept_point(phrase):
    return np.array(layout.points[index.get(phrase).id])

d_related = np.linalg.norm(concept_point("thin") - concept_point("transparent"))
spread = np.array(list(layout.points.values())).std()
print(f"distance thin<->transparent = {d_related:.2f} (layout std {spread:.2f})")
