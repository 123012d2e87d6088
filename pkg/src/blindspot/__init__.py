"""blindspot: failure-report triage for ML models.

Ingests end-user failure reports, aggregates them into a spatially
organized concept map (keyphrase extraction, word-vector composition, and a
deterministic neighbor-embedding layout), and tracks analyst hypotheses
about systematic failures with two validation ledgers. A REST service ties
the pipeline to an external inference endpoint and an image-search
provider.
"""

from .concepts import (
    Concept,
    ConceptIndex,
    add_custom_keyword,
    canonicalize,
    default_stopwords,
    extract_candidates,
    score_corpus,
    search_concepts,
)
from .corpus import (
    CorpusSnapshot,
    CorpusStore,
    DomainConfig,
    FailureReport,
    Instance,
    ModelOutput,
    content_hash,
)
from .embedding import VectorStore, cosine_similarity, load_vectors, phrase_vector
from .hypotheses import Hypothesis, ValiditySummary, Workspace
from .layout import (
    Layout,
    LayoutParams,
    NeighborGraph,
    fit_layout,
    knn_graph,
    place_new_point,
    visual_encoding,
)

__version__ = "0.1.0"

__all__ = [
    "Concept",
    "ConceptIndex",
    "add_custom_keyword",
    "canonicalize",
    "default_stopwords",
    "extract_candidates",
    "score_corpus",
    "search_concepts",
    "CorpusSnapshot",
    "CorpusStore",
    "DomainConfig",
    "FailureReport",
    "Instance",
    "ModelOutput",
    "content_hash",
    "VectorStore",
    "cosine_similarity",
    "load_vectors",
    "phrase_vector",
    "Hypothesis",
    "ValiditySummary",
    "Workspace",
    "Layout",
    "LayoutParams",
    "NeighborGraph",
    "fit_layout",
    "knn_graph",
    "place_new_point",
    "visual_encoding",
    "__version__",
]
