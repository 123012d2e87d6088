"""Keyphrase concept extraction and aggregation over a report corpus.

Candidates come from RAKE-style segmentation: report text is lowercased,
split at phrase punctuation, and broken at stopwords; each surviving run of
content tokens becomes a candidate phrase. Words are scored deg(w)/freq(w)
over all candidate occurrences and a phrase scores the sum of its word
scores. Concepts are candidates merged by canonical phrase, carrying their
occurrence count and the set of reports that mention them.

Everything here is a pure function of the snapshot plus extractor
parameters, so indices can be rebuilt per corpus version from any thread.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import CorpusSnapshot, FailureReport

__all__ = [
    "Concept",
    "ConceptIndex",
    "WordStat",
    "ConceptError",
    "DuplicateConceptError",
    "load_stopwords",
    "default_stopwords",
    "canonicalize",
    "concept_id",
    "extract_candidates",
    "score_corpus",
    "search_concepts",
    "add_custom_keyword",
    "MAX_PHRASE_WORDS",
    "MIN_TOKEN_CHARS",
]

# Candidate phrases are split at these characters before stopword breaking.
PHRASE_DELIMITERS = '.,;:!?()"—'
_DELIMITER_RE = re.compile("[" + re.escape(PHRASE_DELIMITERS) + "]")
_NUMERIC_RE = re.compile(r"[0-9]+")

MAX_PHRASE_WORDS = 4
MIN_TOKEN_CHARS = 2

_STOPWORD_CACHE: Optional[frozenset[str]] = None


class ConceptError(ValueError):
    pass


class DuplicateConceptError(ConceptError):
    pass


def load_stopwords(lines: Iterable[str]) -> frozenset[str]:
    """Build a stopword set from one-token-per-line text, ignoring blanks."""
    return frozenset(word.strip().lower() for word in lines if word.strip())


def default_stopwords() -> frozenset[str]:
    """The bundled SMART English stopword list."""
    global _STOPWORD_CACHE
    if _STOPWORD_CACHE is None:
        text = resources.files("blindspot").joinpath("data/smart_stopwords.txt").read_text("utf-8")
        _STOPWORD_CACHE = load_stopwords(text.splitlines())
    return _STOPWORD_CACHE


def canonicalize(phrase: str) -> str:
    """Canonical concept text: lowercased, internal whitespace collapsed."""
    return " ".join(phrase.lower().split())


def concept_id(phrase: str) -> str:
    """Stable identifier for a canonical phrase."""
    return hashlib.sha256(phrase.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Concept:
    id: str
    phrase: str
    rake_score: float
    mention_count: int
    report_ids: tuple[str, ...]
    custom: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "phrase": self.phrase,
            "rake_score": self.rake_score,
            "mention_count": self.mention_count,
            "report_ids": list(self.report_ids),
            "custom": self.custom,
        }


@dataclass(frozen=True)
class WordStat:
    freq: int
    deg: int


@dataclass
class ConceptIndex:
    """Concepts keyed by canonical phrase, plus the word statistics they
    were scored from. Custom keywords may be layered on after extraction."""

    corpus_version: int
    concepts: dict[str, Concept]
    word_stats: dict[str, WordStat]

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts.values())

    def get(self, phrase: str) -> Optional[Concept]:
        return self.concepts.get(phrase)

    def by_id(self, cid: str) -> Optional[Concept]:
        for concept in self.concepts.values():
            if concept.id == cid:
                return concept
        return None

    def concepts_for_report(self, report_id: str) -> list[Concept]:
        return [c for c in self.concepts.values() if report_id in c.report_ids]


def _candidate_runs(text: str, stopwords: frozenset[str]) -> list[list[str]]:
    """Maximal runs of consecutive content tokens, per delimiter segment.

    Stopwords, tokens under MIN_TOKEN_CHARS characters, and purely numeric
    tokens all break a run.
    """
    runs: list[list[str]] = []
    for segment in _DELIMITER_RE.split(text.lower()):
        current: list[str] = []
        for token in segment.split():
            if token in stopwords or len(token) < MIN_TOKEN_CHARS or _NUMERIC_RE.fullmatch(token):
                if current:
                    runs.append(current)
                    current = []
            else:
                current.append(token)
        if current:
            runs.append(current)
    return runs


def extract_candidates(
    text: str,
    stopwords: Optional[frozenset[str]] = None,
    max_words: int = MAX_PHRASE_WORDS,
) -> list[str]:
    """Candidate phrases of a single report, one entry per occurrence, in
    textual order. Runs longer than ``max_words`` produce no candidate."""
    if stopwords is None:
        stopwords = default_stopwords()
    return [" ".join(run) for run in _candidate_runs(text, stopwords) if len(run) <= max_words]


def score_corpus(
    snapshot: CorpusSnapshot,
    stopwords: Optional[frozenset[str]] = None,
    max_words: int = MAX_PHRASE_WORDS,
) -> ConceptIndex:
    """Extract and score concepts over every report in the snapshot.

    freq(w) counts occurrences of w across all candidates; deg(w) adds each
    containing candidate's word length; a phrase scores sum over its tokens
    of deg/freq. Deterministic for a fixed snapshot.
    """
    if stopwords is None:
        stopwords = default_stopwords()

    occurrences: list[tuple[str, str]] = []  # (candidate phrase, report id)
    for report in snapshot.reports:
        for phrase in extract_candidates(report.text, stopwords, max_words):
            occurrences.append((phrase, report.id))

    freq: dict[str, int] = {}
    deg: dict[str, int] = {}
    for phrase, _ in occurrences:
        words = phrase.split(" ")
        for word in words:
            freq[word] = freq.get(word, 0) + 1
        for word in set(words):
            deg[word] = deg.get(word, 0) + len(words)

    mention_count: dict[str, int] = {}
    report_ids: dict[str, list[str]] = {}
    for phrase, report_id in occurrences:
        mention_count[phrase] = mention_count.get(phrase, 0) + 1
        seen = report_ids.setdefault(phrase, [])
        if report_id not in seen:
            seen.append(report_id)

    concepts: dict[str, Concept] = {}
    for phrase in mention_count:
        score = sum(deg[word] / freq[word] for word in phrase.split(" "))
        concepts[phrase] = Concept(
            id=concept_id(phrase),
            phrase=phrase,
            rake_score=score,
            mention_count=mention_count[phrase],
            report_ids=tuple(report_ids[phrase]),
        )

    word_stats = {word: WordStat(freq=freq[word], deg=deg[word]) for word in freq}
    return ConceptIndex(corpus_version=snapshot.version, concepts=concepts, word_stats=word_stats)


def search_concepts(index: ConceptIndex, query: str) -> list[Concept]:
    """Case-insensitive substring search over concept phrases, most
    mentioned first, ties broken alphabetically."""
    needle = query.lower()
    matched = [c for c in index.concepts.values() if needle in c.phrase]
    matched.sort(key=lambda c: (-c.mention_count, c.phrase))
    return matched


def add_custom_keyword(
    index: ConceptIndex,
    reports: Sequence[FailureReport] | Mapping[str, str],
    phrase: str,
) -> Concept:
    """Add an analyst-supplied keyword to the index.

    Mentions are found by substring-matching the canonical phrase against
    every report text; a keyword matching nothing is kept with count 0.
    """
    canonical = canonicalize(phrase)
    if not canonical:
        raise ConceptError("empty phrase")
    if canonical in index.concepts:
        raise DuplicateConceptError("duplicate concept")

    if isinstance(reports, Mapping):
        texts = list(reports.items())
    else:
        texts = [(report.id, report.text) for report in reports]

    total = 0
    matched: list[str] = []
    for report_id, text in texts:
        count = text.lower().count(canonical)
        if count:
            total += count
            matched.append(report_id)

    concept = Concept(
        id=concept_id(canonical),
        phrase=canonical,
        rake_score=0.0,
        mention_count=total,
        report_ids=tuple(matched),
        custom=True,
    )
    index.concepts[canonical] = concept
    return concept
