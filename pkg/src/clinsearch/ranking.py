"""Category assignment and relevance scoring.

Within one publication category, each candidate's raw subscores
(query-title cosine, all-tokens-in-title flag, days since 1990-01-01,
journal impact factor) are min-max normalized across the candidate
pool, weighted by per-category boosting factors, and summed. Documents
older than twenty years keep a tenth of their score; any zero raw
subscore zeroes the whole score.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Iterable, Sequence

from .corpus import PartialDate

DATE_EPOCH = date(1990, 1, 1)
OLD_DOC_YEARS = 20
OLD_DOC_FACTOR = 0.1
DEFAULT_TOP_K = 500

GUIDELINE_TYPES = frozenset(
    {"Guideline", "Practice Guideline", "Consensus Development Conference"}
)
REVIEW_TYPES = frozenset({"Review", "Systematic Review"})


class Category(str, Enum):
    REVIEWS = "reviews"
    GUIDELINES = "guidelines"
    STUDIES = "studies"


@dataclass(frozen=True)
class BoostingFactors:
    title_cosine: float
    title_count: float
    date: float
    journal: float

    def __post_init__(self):
        if min(self.title_cosine, self.title_count, self.date, self.journal) <= 0:
            raise ValueError("all boosting factors must be positive")


DEFAULT_BOOSTS: dict[Category, BoostingFactors] = {
    Category.REVIEWS: BoostingFactors(4, 3, 1, 2),
    Category.GUIDELINES: BoostingFactors(6, 8, 1, 4),
    Category.STUDIES: BoostingFactors(3, 5, 1, 1),
}


@dataclass(frozen=True)
class RawSubscores:
    semantic: float
    title_count: float
    date: float
    journal: float

    def __post_init__(self):
        if self.title_count not in (0.0, 1.0):
            raise ValueError("title_count must be 0 or 1")
        if self.date < 0 or self.journal < 0:
            raise ValueError("date and journal subscores must be non-negative")

    def has_zero(self) -> bool:
        return 0.0 in (self.semantic, self.title_count, self.date, self.journal)


@dataclass(frozen=True)
class ScoredResult:
    pmid: int
    category: Category
    raw: RawSubscores
    normalized: tuple[float, float, float, float]
    relevance: float
    pub_year: int


def categorize(pub_types: set[str]) -> Category:
    """Map publication-type labels to a category.

    Precedence: guidelines > reviews > studies; anything unmatched
    falls through to studies.
    """
    if not pub_types:
        raise ValueError("pub_types must be non-empty")
    if pub_types & GUIDELINE_TYPES:
        return Category.GUIDELINES
    if pub_types & REVIEW_TYPES:
        return Category.REVIEWS
    return Category.STUDIES


def date_score(pub_date: PartialDate) -> float:
    """Estimated days elapsed from 1990-01-01 to the publication date.

    Missing month defaults to July, missing day to the 15th; days are
    clamped to the month's length.
    """
    month = pub_date.month if pub_date.month is not None else 7
    day = pub_date.day if pub_date.day is not None else 15
    day = min(day, calendar.monthrange(pub_date.year, month)[1])
    return float((date(pub_date.year, month, day) - DATE_EPOCH).days)


def min_max_normalize(values: Sequence[float]) -> list[float]:
    """Rescale onto [0, 1]; a constant list maps to all ones."""
    if not values:
        raise ValueError("cannot normalize an empty list")
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [1.0] * len(values)
    span = hi - lo
    return [(v - lo) / span for v in values]


def score_category(
    candidates: Iterable[tuple[int, RawSubscores, int]],
    boosts: BoostingFactors,
    current_year: int,
    category: Category = Category.REVIEWS,
) -> list[ScoredResult]:
    """Score one category's candidates, sorted by relevance descending.

    Candidates are (pmid, raw subscores, publication year) and must
    already be filtered to one category. Candidates with any zero raw
    subscore get relevance 0 and are left out of the normalization
    pools. Ties break toward the larger PMID.
    """
    candidates = list(candidates)
    zeroed = [(pmid, raw, year) for pmid, raw, year in candidates if raw.has_zero()]
    live = [(pmid, raw, year) for pmid, raw, year in candidates if not raw.has_zero()]

    results = [
        ScoredResult(
            pmid=pmid,
            category=category,
            raw=raw,
            normalized=(0.0, 0.0, 0.0, 0.0),
            relevance=0.0,
            pub_year=year,
        )
        for pmid, raw, year in zeroed
    ]

    if live:
        norm_semantic = min_max_normalize([raw.semantic for _, raw, _ in live])
        norm_title = min_max_normalize([raw.title_count for _, raw, _ in live])
        norm_date = min_max_normalize([raw.date for _, raw, _ in live])
        norm_journal = min_max_normalize([raw.journal for _, raw, _ in live])
        for i, (pmid, raw, year) in enumerate(live):
            relevance = (
                boosts.title_cosine * norm_semantic[i]
                + boosts.title_count * norm_title[i]
                + boosts.date * norm_date[i]
                + boosts.journal * norm_journal[i]
            )
            if current_year - year > OLD_DOC_YEARS:
                relevance *= OLD_DOC_FACTOR
            results.append(
                ScoredResult(
                    pmid=pmid,
                    category=category,
                    raw=raw,
                    normalized=(norm_semantic[i], norm_title[i], norm_date[i], norm_journal[i]),
                    relevance=relevance,
                    pub_year=year,
                )
            )

    results.sort(key=lambda r: (-r.relevance, -r.pmid))
    return results


def top_k(results: list[ScoredResult], k: int = DEFAULT_TOP_K) -> list[ScoredResult]:
    """First min(k, len) results of a descending-sorted list."""
    return results[:k]


def load_boosts(path: str) -> dict[Category, BoostingFactors]:
    """Read per-category boosting factors.

    One record per category: the category name then four positive
    reals, comma- or whitespace-separated; `#` starts a comment. All
    three categories must be present.
    """
    boosts: dict[Category, BoostingFactors] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.replace(",", " ").split()
            if len(fields) != 5:
                raise ValueError(
                    f"{path}:{lineno}: expected category plus 4 factors, got {len(fields)} fields"
                )
            try:
                category = Category(fields[0].lower())
            except ValueError as exc:
                valid = ", ".join(c.value for c in Category)
                raise ValueError(
                    f"{path}:{lineno}: unknown category {fields[0]!r} (valid: {valid})"
                ) from exc
            boosts[category] = BoostingFactors(*(float(f) for f in fields[1:]))
    missing = [c.value for c in Category if c not in boosts]
    if missing:
        raise ValueError(f"{path}: missing categories: {', '.join(missing)}")
    return boosts
