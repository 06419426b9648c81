"""Category assignment, subscores, normalization, and relevance."""

import random

import pytest

from clinsearch.corpus import PartialDate
from clinsearch.ranking import (
    DEFAULT_BOOSTS,
    BoostingFactors,
    Category,
    RawSubscores,
    ScoredResult,
    categorize,
    date_score,
    load_boosts,
    min_max_normalize,
    score_category,
    top_k,
)

import reference

REVIEWS_BOOSTS = DEFAULT_BOOSTS[Category.REVIEWS]


class TestCategorize:
    def test_guideline_precedence(self):
        assert categorize({"Practice Guideline", "Journal Article"}) == Category.GUIDELINES

    def test_review(self):
        assert categorize({"Review"}) == Category.REVIEWS

    def test_fallthrough_to_studies(self):
        assert categorize({"Randomized Controlled Trial"}) == Category.STUDIES

    def test_guidelines_beat_reviews(self):
        assert categorize({"Review", "Guideline"}) == Category.GUIDELINES
        assert categorize({"Systematic Review", "Consensus Development Conference"}) \
            == Category.GUIDELINES

    def test_systematic_review(self):
        assert categorize({"Systematic Review"}) == Category.REVIEWS

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            categorize(set())


class TestDateScore:
    def test_epoch_anchor(self):
        assert date_score(PartialDate(1990, 1, 1)) == 0.0

    def test_one_day(self):
        assert date_score(PartialDate(1990, 1, 2)) == 1.0

    def test_year_only_midpoint(self):
        assert date_score(PartialDate(2017)) == 10057.0

    def test_missing_day_mid_month(self):
        assert date_score(PartialDate(1990, 2)) == date_score(PartialDate(1990, 2, 15))

    def test_day_clamped_to_month_length(self):
        assert date_score(PartialDate(2001, 2, 31)) == date_score(PartialDate(2001, 2, 28))


class TestMinMax:
    def test_affine_map(self):
        assert min_max_normalize([0.0, 5.0, 10.0]) == [0.0, 0.5, 1.0]

    def test_constant_maps_to_ones(self):
        assert min_max_normalize([7.0, 7.0, 7.0]) == [1.0, 1.0, 1.0]

    def test_singleton(self):
        assert min_max_normalize([3.0]) == [1.0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            min_max_normalize([])

    def test_range_bounds(self):
        rng = random.Random(2)
        for _ in range(50):
            values = [rng.uniform(-100, 100) for _ in range(rng.randrange(1, 30))]
            out = min_max_normalize(values)
            assert all(0.0 <= v <= 1.0 for v in out)


def candidate(pmid, semantic=0.9, title=1.0, days=5000.0, jif=10.0, year=2015):
    return (pmid, RawSubscores(semantic, title, days, jif), year)


class TestScoreCategory:
    def test_zero_jif_zeroes_relevance(self):
        results = score_category(
            [candidate(1, jif=0.0), candidate(2, jif=5.0)],
            REVIEWS_BOOSTS,
            current_year=2019,
        )
        by_pmid = {r.pmid: r for r in results}
        assert by_pmid[1].relevance == 0.0
        assert by_pmid[2].relevance > 0.0
        assert results[0].pmid == 2

    @pytest.mark.parametrize("field", ["semantic", "title_count", "date", "journal"])
    def test_any_zero_subscore_zeroes_relevance(self, field):
        values = {"semantic": 0.8, "title_count": 1.0, "date": 900.0, "journal": 3.0}
        values[field] = 0.0
        raw = RawSubscores(**values)
        results = score_category([(1, raw, 2015), candidate(2)], REVIEWS_BOOSTS, 2019)
        assert {r.pmid: r.relevance for r in results}[1] == 0.0

    def test_twenty_year_penalty_exact_tenth(self):
        pool = [candidate(1, year=1995), candidate(2, semantic=0.5, year=2017)]
        with_penalty = score_category(pool, REVIEWS_BOOSTS, current_year=2019)
        without_penalty = score_category(pool, REVIEWS_BOOSTS, current_year=2015)
        old_doc_with = {r.pmid: r.relevance for r in with_penalty}[1]
        old_doc_without = {r.pmid: r.relevance for r in without_penalty}[1]
        assert old_doc_with == pytest.approx(0.1 * old_doc_without, abs=0.0)

    def test_boundary_twenty_years_unpenalized(self):
        pool = [candidate(1, year=1999), candidate(2, semantic=0.5)]
        exactly_20 = score_category(pool, REVIEWS_BOOSTS, current_year=2019)
        just_over = score_category(pool, REVIEWS_BOOSTS, current_year=2020)
        at_boundary = {r.pmid: r.relevance for r in exactly_20}[1]
        over_boundary = {r.pmid: r.relevance for r in just_over}[1]
        assert over_boundary == pytest.approx(0.1 * at_boundary, abs=0.0)

    def test_single_candidate_scores_full_boost_sum(self):
        results = score_category([candidate(1)], REVIEWS_BOOSTS, 2019)
        assert results[0].relevance == pytest.approx(4 + 3 + 1 + 2)
        assert results[0].normalized == (1.0, 1.0, 1.0, 1.0)

    def test_empty_candidates(self):
        assert score_category([], REVIEWS_BOOSTS, 2019) == []

    def test_tie_breaks_to_larger_pmid(self):
        pool = [candidate(3), candidate(9)]
        results = score_category(pool, REVIEWS_BOOSTS, 2019)
        assert [r.pmid for r in results] == [9, 3]

    def test_zeroed_never_outrank_positive(self):
        rng = random.Random(7)
        pool = []
        for pmid in range(1, 40):
            if rng.random() < 0.3:
                pool.append(candidate(pmid, jif=0.0))
            else:
                pool.append(
                    candidate(
                        pmid,
                        semantic=rng.uniform(0.01, 1),
                        days=rng.uniform(1, 12000),
                        jif=rng.uniform(0.1, 80),
                        year=rng.randrange(1990, 2020),
                    )
                )
        results = score_category(pool, REVIEWS_BOOSTS, 2019)
        seen_zero = False
        for r in results:
            if r.relevance == 0.0:
                seen_zero = True
            else:
                assert not seen_zero, "positive relevance after a zero"

    def random_pool(self, rng, n):
        pool = []
        for pmid in range(1, n + 1):
            pool.append(
                (
                    pmid,
                    RawSubscores(
                        semantic=rng.choice([0.0, rng.uniform(-1, 1)]),
                        title_count=rng.choice([0.0, 1.0]),
                        date=rng.choice([0.0, rng.uniform(1, 12700)]),
                        journal=rng.choice([0.0, rng.uniform(0.1, 90)]),
                    ),
                    rng.randrange(1990, 2025),
                )
            )
        return pool

    def test_matches_independent_scorer(self):
        rng = random.Random(99)
        for trial in range(20):
            pool = self.random_pool(rng, rng.randrange(1, 60))
            category = rng.choice(list(Category))
            boosts = DEFAULT_BOOSTS[category]
            current_year = rng.randrange(2010, 2030)
            mine = score_category(pool, boosts, current_year, category=category)
            expected = reference_rank(
                pool,
                (boosts.title_cosine, boosts.title_count, boosts.date, boosts.journal),
                current_year,
            )
            assert [(r.pmid, pytest.approx(r.relevance, abs=1e-9)) for r in mine] == expected

    def test_rank_monotone_in_raw_subscores(self):
        rng = random.Random(55)
        for trial in range(30):
            pool = self.random_pool(rng, rng.randrange(2, 40))
            target = rng.choice(pool)
            field = rng.choice(["semantic", "title_count", "date", "journal"])
            raw = target[1]
            bumped_value = {
                "semantic": min(1.0, (raw.semantic if raw.semantic else 0.0) + rng.uniform(0.01, 0.5)),
                "title_count": 1.0,
                "date": raw.date + rng.uniform(1, 2000),
                "journal": raw.journal + rng.uniform(0.5, 30),
            }[field]
            bumped = RawSubscores(**{**raw.__dict__, field: bumped_value})
            before = score_category(pool, REVIEWS_BOOSTS, 2024)
            after_pool = [
                (pmid, bumped if pmid == target[0] else subs, year)
                for pmid, subs, year in pool
            ]
            after = score_category(after_pool, REVIEWS_BOOSTS, 2024)
            rank_before = [r.pmid for r in before].index(target[0])
            rank_after = [r.pmid for r in after].index(target[0])
            assert rank_after <= rank_before

    def test_jif_scaling_leaves_order_unchanged(self):
        rng = random.Random(31)
        pool = self.random_pool(rng, 30)
        base = score_category(pool, REVIEWS_BOOSTS, 2024)
        for alpha in (0.01, 3.7, 1000.0):
            scaled_pool = [
                (pmid, RawSubscores(s.semantic, s.title_count, s.date, s.journal * alpha), y)
                for pmid, s, y in pool
            ]
            scaled = score_category(scaled_pool, REVIEWS_BOOSTS, 2024)
            assert [r.pmid for r in scaled] == [r.pmid for r in base]


def reference_rank(pool, boosts, current_year):
    """Plain re-statement of the scoring recipe for comparison."""
    rows = [(pmid, year, [s.semantic, s.title_count, s.date, s.journal]) for pmid, s, year in pool]
    live = [r for r in rows if 0.0 not in r[2]]
    scored = [(pmid, 0.0) for pmid, _, subs in rows if 0.0 in subs]
    if live:
        columns = [reference.minmax([r[2][i] for r in live]) for i in range(4)]
        for i, (pmid, year, _) in enumerate(live):
            value = sum(boosts[d] * columns[d][i] for d in range(4))
            if current_year - year > 20:
                value *= 0.1
            scored.append((pmid, value))
    scored.sort(key=lambda pr: (-pr[1], -pr[0]))
    return [(pmid, pytest.approx(value, abs=1e-9)) for pmid, value in scored]


class TestTopK:
    def test_truncates_to_500(self):
        results = [
            ScoredResult(pmid, Category.REVIEWS, RawSubscores(0.5, 1, 1, 1), (1, 1, 1, 1), 700 - pmid, 2015)
            for pmid in range(700)
        ]
        assert len(top_k(results)) == 500

    def test_short_list_unchanged(self):
        results = [
            ScoredResult(p, Category.REVIEWS, RawSubscores(0.5, 1, 1, 1), (1, 1, 1, 1), 1.0, 2015)
            for p in range(12)
        ]
        assert top_k(results) == results

    def test_empty(self):
        assert top_k([]) == []


class TestBoosts:
    def test_defaults_match_contract(self):
        assert DEFAULT_BOOSTS[Category.REVIEWS] == BoostingFactors(4, 3, 1, 2)
        assert DEFAULT_BOOSTS[Category.GUIDELINES] == BoostingFactors(6, 8, 1, 4)
        assert DEFAULT_BOOSTS[Category.STUDIES] == BoostingFactors(3, 5, 1, 1)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            BoostingFactors(0, 1, 1, 1)

    def test_load_file(self, tmp_path):
        path = tmp_path / "boosts.conf"
        path.write_text(
            "# category factors\n"
            "reviews 4 3 1 2\n"
            "guidelines,6,8,1,4\n"
            "studies 3 5 1 1\n"
        )
        boosts = load_boosts(str(path))
        assert boosts == DEFAULT_BOOSTS

    def test_load_missing_category(self, tmp_path):
        path = tmp_path / "boosts.conf"
        path.write_text("reviews 4 3 1 2\n")
        with pytest.raises(ValueError, match="missing categories"):
            load_boosts(str(path))

    def test_load_unknown_category(self, tmp_path):
        path = tmp_path / "boosts.conf"
        path.write_text("letters 1 1 1 1\n")
        with pytest.raises(ValueError, match="unknown category"):
            load_boosts(str(path))
