"""Inverted index: TID -> sorted PMID postings with binary persistence.

A published index is immutable; incremental merges return a new index
equal to a full rebuild over the union corpus. Persistence mirrors a
two-integer-column table (tid, pmid) sorted by the composite key, with
a reverse-record sidecar holding each document's TID set so updated
documents can be re-indexed.
"""

from __future__ import annotations

import bisect
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .textpipe import Lexicon

_MAGIC = b"TIDX"
_REVERSE_MAGIC = b"TREV"
_VERSION = 1
_U32_MAX = 0xFFFFFFFF


class IndexFormatError(ValueError):
    """Index file is corrupt or has the wrong format."""


@dataclass
class PostingsIndex:
    postings: dict[int, list[int]] = field(default_factory=dict)
    doc_tids: dict[int, frozenset[int]] = field(default_factory=dict)

    @property
    def row_count(self) -> int:
        return sum(len(pmids) for pmids in self.postings.values())


def build_index(
    docs: Iterable[tuple[int, Sequence[int], Sequence[int]]]
) -> PostingsIndex:
    """Index documents given as (pmid, title TIDs, abstract TIDs).

    Each document contributes one posting per distinct TID in the union
    of its title and abstract streams.
    """
    index = PostingsIndex()
    for pmid, title_tids, abstract_tids in docs:
        if pmid in index.doc_tids:
            raise ValueError(f"duplicate PMID {pmid}")
        tid_set = frozenset(title_tids) | frozenset(abstract_tids)
        index.doc_tids[pmid] = tid_set
        for tid in tid_set:
            index.postings.setdefault(tid, []).append(pmid)
    for pmids in index.postings.values():
        pmids.sort()
    return index


def lookup(index: PostingsIndex, tid: int) -> list[int]:
    """Ascending PMIDs of documents containing the token; [] if unknown."""
    return index.postings.get(tid, [])


def rarest_token(tids: Sequence[int], lexicon: Lexicon) -> int:
    """The query TID contained in the fewest documents (ties: smallest TID)."""
    if not tids:
        raise ValueError("empty TID list")
    for tid in tids:
        if tid not in lexicon.doc_freq:
            raise KeyError(f"TID {tid} not in lexicon")
    return min(tids, key=lambda t: (lexicon.doc_freq[t], t))


def merge_incremental(
    index: PostingsIndex, new_docs: Iterable[tuple[int, Iterable[int]]]
) -> PostingsIndex:
    """Return a new index covering the union corpus.

    Re-submitted PMIDs have their old postings replaced. The input
    index is left untouched (copy-on-write on modified postings lists).
    """
    postings = dict(index.postings)
    doc_tids = dict(index.doc_tids)
    copied: set[int] = set()

    def own(tid: int) -> list[int]:
        # Copy-on-write: private list for any postings we touch, including
        # keys deleted earlier in this merge and re-added now.
        pmids = postings.get(tid)
        if pmids is None or tid not in copied:
            pmids = list(pmids) if pmids is not None else []
            postings[tid] = pmids
            copied.add(tid)
        return pmids

    for pmid, tids in new_docs:
        tid_set = frozenset(tids)
        old = doc_tids.get(pmid)
        if old is not None:
            for tid in old:
                pmids = own(tid)
                pos = bisect.bisect_left(pmids, pmid)
                if pos < len(pmids) and pmids[pos] == pmid:
                    del pmids[pos]
                if not pmids:
                    del postings[tid]
        doc_tids[pmid] = tid_set
        for tid in tid_set:
            bisect.insort(own(tid), pmid)
    return PostingsIndex(postings=postings, doc_tids=doc_tids)


def _check_u32(value: int, what: str) -> int:
    if not 0 <= value <= _U32_MAX:
        raise ValueError(f"{what} {value} does not fit in 32 bits")
    return value


def save_index(index: PostingsIndex, path: str) -> None:
    """Write the postings table to ``path`` and reverse records to
    ``path + '.docs'``."""
    rows = sorted(
        (tid, pmid)
        for tid, pmids in index.postings.items()
        for pmid in pmids
    )
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQ", _VERSION, len(rows)))
        for tid, pmid in rows:
            fh.write(struct.pack("<II", _check_u32(tid, "TID"), _check_u32(pmid, "PMID")))
    with open(f"{path}.docs", "wb") as fh:
        fh.write(_REVERSE_MAGIC)
        fh.write(struct.pack("<IQ", _VERSION, len(index.doc_tids)))
        for pmid in sorted(index.doc_tids):
            tids = sorted(index.doc_tids[pmid])
            fh.write(struct.pack("<II", _check_u32(pmid, "PMID"), len(tids)))
            fh.write(struct.pack(f"<{len(tids)}I", *tids))


def load_index(path: str) -> PostingsIndex:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise IndexFormatError(f"{path}: bad magic bytes")
    version, rows = struct.unpack_from("<IQ", data, 4)
    if version != _VERSION:
        raise IndexFormatError(f"{path}: unsupported version {version}")
    if len(data) != 16 + 8 * rows:
        raise IndexFormatError(
            f"{path}: expected {16 + 8 * rows} bytes for {rows} rows, got {len(data)}"
        )
    postings: dict[int, list[int]] = {}
    for i in range(rows):
        tid, pmid = struct.unpack_from("<II", data, 16 + 8 * i)
        postings.setdefault(tid, []).append(pmid)

    reverse_path = f"{path}.docs"
    with open(reverse_path, "rb") as fh:
        rdata = fh.read()
    if rdata[:4] != _REVERSE_MAGIC:
        raise IndexFormatError(f"{reverse_path}: bad magic bytes")
    version, doc_count = struct.unpack_from("<IQ", rdata, 4)
    if version != _VERSION:
        raise IndexFormatError(f"{reverse_path}: unsupported version {version}")
    doc_tids: dict[int, frozenset[int]] = {}
    offset = 16
    for _ in range(doc_count):
        if offset + 8 > len(rdata):
            raise IndexFormatError(f"{reverse_path}: truncated reverse records")
        pmid, count = struct.unpack_from("<II", rdata, offset)
        offset += 8
        if offset + 4 * count > len(rdata):
            raise IndexFormatError(f"{reverse_path}: truncated TID set for PMID {pmid}")
        doc_tids[pmid] = frozenset(struct.unpack_from(f"<{count}I", rdata, offset))
        offset += 4 * count
    if offset != len(rdata):
        raise IndexFormatError(f"{reverse_path}: trailing bytes after reverse records")
    return PostingsIndex(postings=postings, doc_tids=doc_tids)
