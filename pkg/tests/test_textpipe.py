"""Tokenization, normalization, stopwords, and the lexicon."""

import random

import pytest

from clinsearch.textpipe import (
    Lexicon,
    StopwordList,
    is_fully_capitalized,
    load_stopwords,
    normalize_token,
    remove_stopwords,
    text_to_tids,
    tokenize,
)

STOPS = StopwordList()


class TestTokenize:
    def test_hyphen_split(self):
        assert tokenize("ST-segment elevation") == ["ST", "segment", "elevation"]

    def test_empty(self):
        assert tokenize("") == []

    def test_trailing_period_stripped(self):
        assert tokenize("Acute myocardial infarction.") == [
            "Acute", "myocardial", "infarction",
        ]

    def test_interior_punctuation_survives(self):
        assert tokenize("p53 (6-to-24)") == ["p53", "6", "to", "24"]

    def test_whitespace_variants(self):
        assert tokenize("a\tb\nc  d") == ["a", "b", "c", "d"]

    def test_pure_punctuation_dropped(self):
        assert tokenize("-- (,) .") == []

    def test_no_space_or_hyphen_in_output(self):
        rng = random.Random(5)
        alphabet = "ab- C.()3,‐\t\n'"
        for _ in range(500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
            for token in tokenize(text):
                assert " " not in token and "-" not in token
                assert token


class TestNormalize:
    def test_case_fold(self):
        assert normalize_token("Infarction") == "infarction"

    def test_acronym_preserved(self):
        assert normalize_token("WHO") == "WHO"

    def test_no_uppercase(self):
        assert normalize_token("p53") == "p53"

    def test_single_letter_folds(self):
        assert normalize_token("A") == "a"

    def test_digits_only_not_fully_capitalized(self):
        assert not is_fully_capitalized("1234")
        assert is_fully_capitalized("T4") is True
        assert is_fully_capitalized("WHO")

    def test_normalizer_hook(self):
        assert normalize_token("Colour", normalizer=lambda t: t.replace("our", "or")) == "color"
        assert normalize_token("WHO", normalizer=str.lower) == "who"


class TestStopwords:
    def test_all_but_risk_removed(self):
        assert remove_stopwords(["who", "is", "at", "risk"], STOPS) == ["risk"]

    def test_capitalized_exception(self):
        assert remove_stopwords(["WHO", "guidelines"], STOPS) == ["WHO", "guidelines"]

    def test_three_capitalizations(self):
        assert remove_stopwords(["The", "the", "THE"], STOPS) == ["THE"]

    def test_fully_capitalized_never_removed(self):
        rng = random.Random(9)
        words = sorted(STOPS.words)
        for _ in range(300):
            token = rng.choice(words).upper()
            if len(token) >= 2:
                assert remove_stopwords([token], STOPS) == [token]

    def test_lowercase_enforced(self):
        with pytest.raises(ValueError):
            StopwordList(frozenset({"The"}))

    def test_load_file(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("# comment\nfoo\nbar  # trailing\n\nbaz\n")
        stops = load_stopwords(str(path))
        assert stops.words == {"foo", "bar", "baz"}


class TestLexicon:
    def test_dense_tids_and_doc_freq(self):
        lex = Lexicon()
        t1 = text_to_tids("stroke outcome", lex, STOPS, True)
        t2 = text_to_tids("stroke stroke recurrence", lex, STOPS, True)
        assert t1 == [1, 2]
        assert t2 == [1, 1, 3]
        assert lex.doc_freq == {1: 2, 2: 1, 3: 1}
        assert lex.corpus_size == 2

    def test_determinism(self):
        lex = Lexicon()
        first = text_to_tids("Carotid stenosis treatment", lex, STOPS, True)
        again = text_to_tids("Carotid stenosis treatment", lex, STOPS, False)
        assert first == again

    def test_unknown_token_dropped_on_query(self):
        lex = Lexicon()
        text_to_tids("stroke prevention", lex, STOPS, True)
        assert text_to_tids("stroke unheardof", lex, STOPS, False) == [1]

    def test_shared_tid_across_cases(self):
        lex = Lexicon()
        text_to_tids("Stroke", lex, STOPS, True)
        assert text_to_tids("stroke", lex, STOPS, False) == [1]

    def test_inverse_maps(self):
        lex = Lexicon()
        for text in ("alpha beta", "beta gamma delta", "GAMMA epsilon"):
            text_to_tids(text, lex, STOPS, True)
        assert len(lex.token_to_tid) == len(lex.tid_to_token)
        for token, tid in lex.token_to_tid.items():
            assert lex.tid_to_token[tid] == token
        assert sorted(lex.tid_to_token) == list(range(1, len(lex.tid_to_token) + 1))

    def test_doc_freq_matches_brute_force_recount(self):
        rng = random.Random(17)
        vocab = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"]
        docs = [
            " ".join(rng.choice(vocab) for _ in range(rng.randrange(1, 12)))
            for _ in range(1000)
        ]
        lex = Lexicon()
        for text in docs:
            text_to_tids(text, lex, STOPS, True)
        recount: dict[int, int] = {}
        for text in docs:
            for tid in set(text_to_tids(text, lex, STOPS, False)):
                recount[tid] = recount.get(tid, 0) + 1
        assert recount == lex.doc_freq
        assert lex.corpus_size == len(docs)
        assert all(1 <= df <= lex.corpus_size for df in lex.doc_freq.values())

    def test_save_load_round_trip(self, tmp_path):
        lex = Lexicon()
        for text in ("stroke therapy", "WHO guidance", "p53 pathway"):
            text_to_tids(text, lex, STOPS, True)
        path = str(tmp_path / "lex.tsv")
        lex.save(path)
        loaded = Lexicon.load(path)
        assert loaded.token_to_tid == lex.token_to_tid
        assert loaded.tid_to_token == lex.tid_to_token
        assert loaded.doc_freq == lex.doc_freq
        assert loaded.corpus_size == lex.corpus_size

    def test_load_rejects_missing_header(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("1\tfoo\t1\n")
        with pytest.raises(ValueError):
            Lexicon.load(str(path))
