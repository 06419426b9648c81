"""End-to-end query execution over an immutable snapshot.

A snapshot bundles the corpus store, lexicon, embedding matrix, and
inverted index, precomputing per-document title vectors, TID sets, and
filter flags. Queries retrieve candidates from the rarest token's
postings, filter, score within the requested category, cache the top
500, and paginate. Snapshot replacement is atomic from the readers'
perspective; cache entries are keyed to the snapshot version.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .corpus import CorpusStore, DocumentRecord
from .embedding import EmbeddingMatrix, embed_weighted, load_matrix
from .invindex import PostingsIndex, load_index, lookup, rarest_token
from .ranking import (
    DEFAULT_BOOSTS,
    DEFAULT_TOP_K,
    BoostingFactors,
    Category,
    RawSubscores,
    categorize,
    date_score,
    score_category,
    top_k,
)
from .textpipe import (
    Lexicon,
    StopwordList,
    load_stopwords,
    normalize_token,
    remove_stopwords,
    text_to_tids,
    tokenize,
)

ENGLISH_LANGUAGE = "eng"
MIN_YEAR = 1990
DEFAULT_PAGE_SIZE = 10


class EmptyQueryError(ValueError):
    """Query has no tokens left after stopword removal."""


@dataclass(frozen=True)
class SearchRequest:
    query: str
    category: Category = Category.REVIEWS
    page: int = 1


@dataclass(frozen=True)
class DisplayResult:
    pmid: int
    title: str
    abstract: str
    author_abbrevs: list[str]
    journal_iso_abbrev: str
    year: int
    relevance: float

    def to_payload(self) -> dict:
        return {
            "pmid": self.pmid,
            "title": self.title,
            "abstract": self.abstract,
            "authors": list(self.author_abbrevs),
            "journal": self.journal_iso_abbrev,
            "year": self.year,
            "score": self.relevance,
        }


@dataclass(frozen=True)
class SearchResponse:
    total_cached: int
    page: int
    page_size: int
    results: list[DisplayResult]

    def to_payload(self) -> dict:
        return {
            "total": self.total_cached,
            "page": self.page,
            "page_size": self.page_size,
            "results": [r.to_payload() for r in self.results],
        }


@dataclass
class _CacheEntry:
    version: str
    results: list[tuple[int, float]]
    created_at: float = field(default_factory=time.monotonic)


class ResultCache:
    """Concurrent (query tokens, category) -> ranked top-500 cache.

    Entries carry the snapshot version they were computed against and
    are ignored once a newer snapshot is in play. Last writer wins per
    key.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[tuple, _CacheEntry] = {}

    def get(self, key: tuple, version: str) -> list[tuple[int, float]] | None:
        with self._lock:
            entry = self._entries.get(key)
        if entry is None or entry.version != version:
            return None
        return entry.results

    def put(self, key: tuple, version: str, results: list[tuple[int, float]]) -> None:
        with self._lock:
            self._entries[key] = _CacheEntry(version=version, results=results)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class Snapshot:
    """Immutable bundle of corpus, lexicon, matrix, and index.

    Precomputes everything query execution needs per document: the
    title/abstract TID sets, idf-weighted title vectors (stacked for
    vectorized cosine), date subscores, categories, and the
    query-independent filter flags.
    """

    def __init__(
        self,
        store: CorpusStore,
        lexicon: Lexicon,
        matrix: EmbeddingMatrix,
        index: PostingsIndex,
        stops: StopwordList | None = None,
        version: str = "0",
    ):
        self.store = store
        self.lexicon = lexicon
        self.matrix = matrix
        self.index = index
        self.stops = stops if stops is not None else StopwordList()
        self.version = version

        pmids = sorted(store.documents)
        self.row_of: dict[int, int] = {pmid: row for row, pmid in enumerate(pmids)}
        self.title_tids: dict[int, frozenset[int]] = {}
        self.all_tids: dict[int, frozenset[int]] = {}
        self.date_days: dict[int, float] = {}
        self.category: dict[int, Category] = {}
        self.passes_base_filters: dict[int, bool] = {}

        vecs = np.zeros((len(pmids), matrix.dim))
        for row, pmid in enumerate(pmids):
            doc = store.documents[pmid]
            title_tids = text_to_tids(doc.title, lexicon, self.stops, update_lexicon=False)
            abstract_tids = text_to_tids(doc.abstract, lexicon, self.stops, update_lexicon=False)
            self.title_tids[pmid] = frozenset(title_tids)
            self.all_tids[pmid] = frozenset(title_tids) | frozenset(abstract_tids)
            self.date_days[pmid] = date_score(doc.pub_date)
            self.category[pmid] = categorize(doc.pub_types)
            self.passes_base_filters[pmid] = (
                doc.language.lower() == ENGLISH_LANGUAGE
                and not doc.is_erratum
                and not doc.is_retracted
                and doc.pub_date.year >= MIN_YEAR
            )
            vecs[row] = embed_weighted(title_tids, matrix, lexicon)
        self.title_vecs = vecs
        self.title_norms = np.linalg.norm(vecs, axis=1)

    @property
    def doc_count(self) -> int:
        return len(self.store.documents)


def load_snapshot(
    store_path: str,
    lexicon_path: str,
    matrix_path: str,
    index_path: str,
    stopword_path: str | None = None,
) -> Snapshot:
    """Build a snapshot from persisted artifacts.

    The snapshot version is the MD5 of the index file, so republishing
    the index invalidates caches.
    """
    store = CorpusStore.load(store_path)
    lexicon = Lexicon.load(lexicon_path)
    matrix = load_matrix(matrix_path)
    index = load_index(index_path)
    stops = load_stopwords(stopword_path) if stopword_path else None
    with open(index_path, "rb") as fh:
        version = hashlib.md5(fh.read()).hexdigest()
    return Snapshot(store, lexicon, matrix, index, stops=stops, version=version)


def paginate(items: list, page: int, page_size: int = DEFAULT_PAGE_SIZE) -> list:
    """Slice out one page (1-based); pages past the end are empty."""
    if page < 1:
        raise ValueError(f"page must be >= 1, got {page}")
    start = (page - 1) * page_size
    return items[start : start + page_size]


class SearchEngine:
    """Executes search requests against one snapshot."""

    def __init__(
        self,
        snapshot: Snapshot,
        boosts: dict[Category, BoostingFactors] | None = None,
        page_size: int = DEFAULT_PAGE_SIZE,
        cache: ResultCache | None = None,
    ):
        self.snapshot = snapshot
        self.boosts = boosts if boosts is not None else DEFAULT_BOOSTS
        self.page_size = page_size
        self.cache = cache if cache is not None else ResultCache()

    def _query_tokens(self, query: str) -> list[str]:
        raw = remove_stopwords(tokenize(query), self.snapshot.stops)
        if not raw:
            raise EmptyQueryError("query is empty after stopword removal")
        return [normalize_token(t) for t in raw]

    def _rank(self, tids: list[int], category: Category, current_year: int) -> list[tuple[int, float]]:
        snap = self.snapshot
        query_set = frozenset(tids)
        query_vec = embed_weighted(tids, snap.matrix, snap.lexicon)
        query_norm = float(np.linalg.norm(query_vec))

        candidates: list[tuple[int, DocumentRecord]] = []
        for pmid in lookup(snap.index, rarest_token(tids, snap.lexicon)):
            doc = snap.store.documents.get(pmid)
            if doc is None:
                continue
            if not snap.passes_base_filters[pmid]:
                continue
            if not query_set <= snap.all_tids[pmid]:
                continue
            if snap.category[pmid] is not category:
                continue
            candidates.append((pmid, doc))
        if not candidates:
            return []

        rows = np.fromiter(
            (snap.row_of[pmid] for pmid, _ in candidates), dtype=np.intp, count=len(candidates)
        )
        dots = snap.title_vecs[rows] @ query_vec
        norms = snap.title_norms[rows] * query_norm
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = np.where(norms > 0.0, dots / norms, 0.0)
        sims = np.clip(sims, -1.0, 1.0)

        scored_input = [
            (
                pmid,
                RawSubscores(
                    semantic=float(sims[i]),
                    title_count=1.0 if query_set <= snap.title_tids[pmid] else 0.0,
                    date=snap.date_days[pmid],
                    journal=snap.store.doc_jif.get(pmid, 0.0),
                ),
                doc.pub_date.year,
            )
            for i, (pmid, doc) in enumerate(candidates)
        ]
        ranked = score_category(
            scored_input, self.boosts[category], current_year, category=category
        )
        return [(r.pmid, r.relevance) for r in top_k(ranked, DEFAULT_TOP_K)]

    def execute_search(
        self, req: SearchRequest, current_year: int | None = None
    ) -> SearchResponse:
        """Run the full pipeline for one request and return one page."""
        if current_year is None:
            current_year = date.today().year
        snap = self.snapshot
        tokens = self._query_tokens(req.query)
        key = (tuple(tokens), req.category)

        cached = self.cache.get(key, snap.version)
        if cached is None:
            tids = [
                tid for t in tokens
                if (tid := snap.lexicon.token_to_tid.get(t)) is not None
            ]
            cached = self._rank(tids, req.category, current_year) if tids else []
            self.cache.put(key, snap.version, cached)

        page_items = paginate(cached, req.page, self.page_size)
        results = []
        for pmid, relevance in page_items:
            doc = snap.store.documents[pmid]
            results.append(
                DisplayResult(
                    pmid=pmid,
                    title=doc.title,
                    abstract=doc.abstract,
                    author_abbrevs=list(doc.authors),
                    journal_iso_abbrev=doc.journal_iso_abbrev,
                    year=doc.pub_date.year,
                    relevance=relevance,
                )
            )
        return SearchResponse(
            total_cached=len(cached),
            page=req.page,
            page_size=self.page_size,
            results=results,
        )
