"""Shared fixtures: synthetic corpora and in-memory snapshots."""

from __future__ import annotations

import numpy as np
import pytest

from clinsearch.corpus import CorpusStore, DocumentRecord, PartialDate
from clinsearch.embedding import EmbeddingMatrix
from clinsearch.invindex import build_index
from clinsearch.service import Snapshot
from clinsearch.textpipe import Lexicon, StopwordList, text_to_tids

TITLE_VOCAB = [
    "stroke", "myocardial", "infarction", "depression", "screening",
    "therapy", "acute", "chronic", "ischemic", "coronary", "carotid",
    "thrombolysis", "aspirin", "statin", "hypertension", "diabetes",
    "sepsis", "pneumonia", "asthma", "migraine",
]
ABSTRACT_VOCAB = TITLE_VOCAB + [
    "patients", "randomized", "trial", "cohort", "outcomes", "mortality",
    "risk", "treatment", "placebo", "dose", "followup", "baseline",
    "prevalence", "incidence", "WHO", "ECG", "imaging", "biomarker",
]
PUB_TYPE_POOLS = [
    {"Journal Article"},
    {"Review"},
    {"Systematic Review", "Journal Article"},
    {"Practice Guideline"},
    {"Guideline", "Journal Article"},
    {"Consensus Development Conference"},
    {"Randomized Controlled Trial"},
    {"Case Reports", "Journal Article"},
    {"Review", "Practice Guideline"},
    {"Multicenter Study"},
]
LANGUAGES = ["eng", "eng", "eng", "eng", "eng", "eng", "ENG", "fre", "ger"]

JOURNALS = [
    ("New England Journal of Medicine", "N Engl J Med", 79.26),
    ("Lancet", "Lancet", 53.254),
    ("BMJ", "BMJ", 23.562),
    ("Annals of Internal Medicine", "Ann Intern Med", 19.384),
    ("Pediatrics", "Pediatrics", 5.515),
    ("Unranked Medical Reports", "Unranked Med Rep", 0.0),
]


def random_document(rng: np.random.Generator, pmid: int) -> tuple[DocumentRecord, float]:
    """One synthetic journal-joined document with randomized fields."""
    title_len = int(rng.integers(2, 6))
    title = " ".join(rng.choice(TITLE_VOCAB, size=title_len, replace=False)) + "."
    abstract_len = int(rng.integers(0, 25))
    abstract = " ".join(rng.choice(ABSTRACT_VOCAB, size=abstract_len))

    year = int(rng.integers(1985, 2025))
    month = int(rng.integers(1, 13)) if rng.random() < 0.8 else None
    day = int(rng.integers(1, 29)) if month is not None and rng.random() < 0.6 else None
    if rng.random() < 0.01:
        year, month, day = 1990, 1, 1  # zero date subscore edge

    journal_name, journal_iso, jif = JOURNALS[int(rng.integers(len(JOURNALS)))]
    if rng.random() < 0.15:
        jif = 0.0
    pub_types = set(PUB_TYPE_POOLS[int(rng.integers(len(PUB_TYPE_POOLS)))])
    is_erratum = bool(rng.random() < 0.04)
    if is_erratum:
        pub_types.add("Published Erratum")
    doc = DocumentRecord(
        pmid=pmid,
        title=title,
        abstract=abstract,
        journal_name=journal_name,
        journal_iso_abbrev=journal_iso,
        authors=[f"Author{pmid % 7} A"],
        pub_date=PartialDate(year, month, day),
        pub_types=pub_types,
        language=str(rng.choice(LANGUAGES)),
        is_erratum=is_erratum,
        is_retracted=bool(rng.random() < 0.04),
    )
    return doc, float(jif)


def make_corpus(seed: int, n_docs: int) -> list[tuple[DocumentRecord, float]]:
    rng = np.random.default_rng(seed)
    return [random_document(rng, pmid) for pmid in range(1, n_docs + 1)]


def build_store(docs_with_jif: list[tuple[DocumentRecord, float]]) -> CorpusStore:
    store = CorpusStore()
    for doc, jif in docs_with_jif:
        store.documents[doc.pmid] = doc
        store.doc_jif[doc.pmid] = jif
    return store


def build_snapshot(
    docs_with_jif: list[tuple[DocumentRecord, float]],
    seed: int = 0,
    dim: int = 24,
    version: str = "test-1",
) -> Snapshot:
    """Full in-memory snapshot with a seeded random embedding matrix."""
    store = build_store(docs_with_jif)
    stops = StopwordList()
    lexicon = Lexicon()
    for pmid in sorted(store.documents):
        doc = store.documents[pmid]
        text = f"{doc.title} {doc.abstract}" if doc.abstract else doc.title
        text_to_tids(text, lexicon, stops, update_lexicon=True)
    rng = np.random.default_rng(seed)
    matrix = EmbeddingMatrix(
        dim=dim,
        vectors={tid: rng.normal(size=dim) for tid in sorted(lexicon.tid_to_token)},
    )
    index = build_index(
        (
            pmid,
            text_to_tids(store.documents[pmid].title, lexicon, stops, False),
            text_to_tids(store.documents[pmid].abstract, lexicon, stops, False),
        )
        for pmid in sorted(store.documents)
    )
    return Snapshot(store, lexicon, matrix, index, stops=stops, version=version)


@pytest.fixture(scope="session")
def small_snapshot() -> Snapshot:
    return build_snapshot(make_corpus(seed=11, n_docs=120), seed=11)
