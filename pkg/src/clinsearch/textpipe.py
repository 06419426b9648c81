"""Text pipeline: raw text to normalized token-id sequences.

Splitting is on space and hyphen characters; stopwords are removed
unless fully capitalized (so acronyms like WHO survive even when their
lowercase form is a stopword); remaining tokens are case-folded unless
fully capitalized. A pluggable normalizer hook runs after case folding
(identity by default).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .stopwords import DEFAULT_STOPWORDS

_SPLIT = re.compile(r"[\s‐‑-]+")
_EDGE_PUNCT = re.compile(r"^[\W_]+|[\W_]+$", re.UNICODE)

Normalizer = Callable[[str], str]


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self):
        if any(w != w.lower() for w in self.words):
            raise ValueError("stopword entries must be lowercase")

    def __contains__(self, word: str) -> bool:
        return word in self.words


def load_stopwords(path: str) -> StopwordList:
    """Read a one-word-per-line stopword file; `#` starts a comment."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip()
            if word:
                words.add(word)
    return StopwordList(frozenset(words))


def tokenize(text: str) -> list[str]:
    """Split on space and hyphen, stripping edge punctuation per fragment.

    Interior punctuation survives (e.g. "p53"); fragments that are
    empty after stripping are dropped.
    """
    tokens = []
    for fragment in _SPLIT.split(text):
        token = _EDGE_PUNCT.sub("", fragment)
        if token:
            tokens.append(token)
    return tokens


def is_fully_capitalized(token: str) -> bool:
    """True for tokens of length >= 2 whose every letter is uppercase."""
    if len(token) < 2:
        return False
    has_alpha = False
    for ch in token:
        if ch.isalpha():
            has_alpha = True
            if not ch.isupper():
                return False
    return has_alpha


def normalize_token(token: str, normalizer: Normalizer | None = None) -> str:
    """Case-fold unless fully capitalized, then apply the hook."""
    normalized = token if is_fully_capitalized(token) else token.casefold()
    if normalizer is not None:
        normalized = normalizer(normalized)
    return normalized


def remove_stopwords(tokens: list[str], stops: StopwordList) -> list[str]:
    """Drop tokens whose lowercase form is a stopword, keeping fully
    capitalized ones."""
    return [
        t for t in tokens
        if is_fully_capitalized(t) or t.lower() not in stops
    ]


class Lexicon:
    """Bidirectional token <-> TID map with per-token document frequency.

    TIDs are assigned densely from 1 in first-seen order. Construction
    is single-writer; once frozen (no further update calls) instances
    are safe to share across readers.
    """

    def __init__(self):
        self.token_to_tid: dict[str, int] = {}
        self.tid_to_token: dict[int, str] = {}
        self.doc_freq: dict[int, int] = {}
        self.corpus_size: int = 0

    def __len__(self) -> int:
        return len(self.token_to_tid)

    def tid(self, token: str) -> int | None:
        return self.token_to_tid.get(token)

    def _assign(self, token: str) -> int:
        tid = self.token_to_tid.get(token)
        if tid is None:
            tid = len(self.token_to_tid) + 1
            self.token_to_tid[token] = tid
            self.tid_to_token[tid] = token
            self.doc_freq[tid] = 0
        return tid

    def add_document(self, tokens: list[str]) -> list[int]:
        """Register one document's normalized tokens; returns the TID stream."""
        tids = [self._assign(t) for t in tokens]
        for tid in set(tids):
            self.doc_freq[tid] += 1
        self.corpus_size += 1
        return tids

    # -- persistence (TSV with a corpus-size header line) -------------

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#corpus_size={self.corpus_size}\n")
            for tid in sorted(self.tid_to_token):
                fh.write(f"{tid}\t{self.tid_to_token[tid]}\t{self.doc_freq[tid]}\n")

    @classmethod
    def load(cls, path: str) -> "Lexicon":
        lexicon = cls()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("#corpus_size="):
                raise ValueError(f"{path}: missing corpus_size header")
            lexicon.corpus_size = int(header.split("=", 1)[1])
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    tid_text, token, df_text = line.split("\t")
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: expected 3 columns") from exc
                tid = int(tid_text)
                lexicon.token_to_tid[token] = tid
                lexicon.tid_to_token[tid] = token
                lexicon.doc_freq[tid] = int(df_text)
        return lexicon


def text_to_tids(
    text: str,
    lexicon: Lexicon,
    stops: StopwordList,
    update_lexicon: bool,
    normalizer: Normalizer | None = None,
) -> list[int]:
    """Run the full pipeline: tokenize, de-stopword, normalize, map to TIDs.

    With ``update_lexicon`` the text counts as one document: unseen
    tokens get fresh TIDs and document frequencies are updated. Without
    it, unseen tokens are silently dropped (closed-lexicon queries).
    """
    raw = remove_stopwords(tokenize(text), stops)
    normalized = [normalize_token(t, normalizer) for t in raw]
    if update_lexicon:
        return lexicon.add_document(normalized)
    return [
        tid for t in normalized
        if (tid := lexicon.token_to_tid.get(t)) is not None
    ]
