"""Document and journal records plus the persistent corpus store.

The store keeps only documents published in medicine-subject journals;
each stored document carries the impact factor of its journal. Batches
are ingested at most once (keyed by batch id), so weekly re-runs are
idempotent.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import sqlite3
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone


class ChecksumFormatError(ValueError):
    """Expected digest is not a 32-char hex string."""


def verify_checksum(batch_bytes: bytes, expected_md5: str) -> bool:
    """Return True iff the MD5 of ``batch_bytes`` equals ``expected_md5``.

    ``expected_md5`` must be 32 lowercase hex characters; anything else
    raises ChecksumFormatError.
    """
    if not re.fullmatch(r"[0-9a-f]{32}", expected_md5):
        raise ChecksumFormatError(
            f"expected a 32-char lowercase hex MD5 digest, got {expected_md5!r}"
        )
    return hashlib.md5(batch_bytes).hexdigest() == expected_md5


@dataclass(frozen=True)
class PartialDate:
    """Publication date with optional month/day precision."""

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if not 1800 <= self.year <= 2100:
            raise ValueError(f"year out of range: {self.year}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if self.day is not None:
            if self.month is None:
                raise ValueError("day given without month")
            if not 1 <= self.day <= 31:
                raise ValueError(f"day out of range: {self.day}")


@dataclass
class DocumentRecord:
    """One publication as parsed from a citation batch."""

    pmid: int
    title: str
    abstract: str
    journal_name: str
    journal_iso_abbrev: str
    authors: list[str]
    pub_date: PartialDate
    pub_types: set[str]
    language: str
    is_erratum: bool = False
    is_retracted: bool = False

    def __post_init__(self):
        if self.pmid <= 0:
            raise ValueError(f"pmid must be positive, got {self.pmid}")
        if not self.title:
            raise ValueError("title must be non-empty")
        if not self.pub_types:
            raise ValueError("pub_types must be non-empty")


@dataclass(frozen=True)
class JournalRecord:
    """Journal-rank metadata joined onto documents at ingest time."""

    journal_name: str
    iso_abbrev: str
    in_medicine_subject: bool
    jif: float

    def __post_init__(self):
        if self.jif < 0:
            raise ValueError(f"jif must be non-negative, got {self.jif}")


@dataclass(frozen=True)
class IngestLogEntry:
    batch_id: str
    checksum: str
    timestamp: str


def normalize_journal_key(name: str) -> str:
    """Case-fold a journal name and collapse punctuation/whitespace.

    Journal names are spelled inconsistently across sources; the
    normalized form is the join key between documents and the journal
    table.
    """
    folded = name.casefold()
    folded = re.sub(r"[^0-9a-z]+", " ", folded)
    return " ".join(folded.split())


def join_journal_metadata(
    docs: list[DocumentRecord], journals: list[JournalRecord]
) -> tuple[list[tuple[DocumentRecord, float]], int]:
    """Pair each document with its journal's impact factor.

    Documents whose journal is missing from the table or is not in the
    medicine subject area are dropped. Returns (kept, dropped_count)
    where kept pairs each surviving document with its journal's JIF.
    """
    table = {normalize_journal_key(j.journal_name): j for j in journals}
    kept: list[tuple[DocumentRecord, float]] = []
    dropped = 0
    for doc in docs:
        journal = table.get(normalize_journal_key(doc.journal_name))
        if journal is not None and journal.in_medicine_subject:
            kept.append((doc, journal.jif))
        else:
            dropped += 1
    return kept, dropped


class CorpusStore:
    """In-memory corpus with atomic SQLite persistence.

    Single-writer: ingestion mutates one store instance; readers work
    from a loaded snapshot. ``save`` publishes atomically via rename.
    """

    def __init__(self):
        self.documents: dict[int, DocumentRecord] = {}
        self.doc_jif: dict[int, float] = {}
        self.journal_table: dict[str, JournalRecord] = {}
        self.ingest_log: list[IngestLogEntry] = []

    def set_journals(self, journals: list[JournalRecord]) -> None:
        self.journal_table = {
            normalize_journal_key(j.journal_name): j for j in journals
        }

    def has_batch(self, batch_id: str) -> bool:
        return any(entry.batch_id == batch_id for entry in self.ingest_log)

    # -- persistence -------------------------------------------------

    _SCHEMA = """
    CREATE TABLE documents (
        pmid INTEGER PRIMARY KEY,
        title TEXT NOT NULL,
        abstract TEXT NOT NULL,
        journal_name TEXT NOT NULL,
        journal_iso TEXT NOT NULL,
        authors TEXT NOT NULL,
        year INTEGER NOT NULL,
        month INTEGER,
        day INTEGER,
        pub_types TEXT NOT NULL,
        language TEXT NOT NULL,
        is_erratum INTEGER NOT NULL,
        is_retracted INTEGER NOT NULL,
        jif REAL NOT NULL
    );
    CREATE TABLE journals (
        key TEXT PRIMARY KEY,
        name TEXT NOT NULL,
        iso TEXT NOT NULL,
        in_medicine INTEGER NOT NULL,
        jif REAL NOT NULL
    );
    CREATE TABLE ingest_log (
        batch_id TEXT PRIMARY KEY,
        checksum TEXT NOT NULL,
        ts TEXT NOT NULL
    );
    """

    def save(self, path: str) -> None:
        """Write the store to ``path``, replacing any previous file atomically."""
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        os.close(fd)
        try:
            conn = sqlite3.connect(tmp)
            try:
                conn.executescript(self._SCHEMA)
                conn.executemany(
                    "INSERT INTO documents VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?)",
                    [
                        (
                            d.pmid,
                            d.title,
                            d.abstract,
                            d.journal_name,
                            d.journal_iso_abbrev,
                            json.dumps(d.authors),
                            d.pub_date.year,
                            d.pub_date.month,
                            d.pub_date.day,
                            json.dumps(sorted(d.pub_types)),
                            d.language,
                            int(d.is_erratum),
                            int(d.is_retracted),
                            self.doc_jif.get(d.pmid, 0.0),
                        )
                        for d in self.documents.values()
                    ],
                )
                conn.executemany(
                    "INSERT INTO journals VALUES (?,?,?,?,?)",
                    [
                        (key, j.journal_name, j.iso_abbrev, int(j.in_medicine_subject), j.jif)
                        for key, j in self.journal_table.items()
                    ],
                )
                conn.executemany(
                    "INSERT INTO ingest_log VALUES (?,?,?)",
                    [(e.batch_id, e.checksum, e.timestamp) for e in self.ingest_log],
                )
                conn.commit()
            finally:
                conn.close()
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str) -> "CorpusStore":
        if not os.path.exists(path):
            raise FileNotFoundError(f"corpus store not found: {path}")
        store = cls()
        conn = sqlite3.connect(path)
        try:
            for row in conn.execute(
                "SELECT pmid, title, abstract, journal_name, journal_iso, authors,"
                " year, month, day, pub_types, language, is_erratum, is_retracted, jif"
                " FROM documents"
            ):
                doc = DocumentRecord(
                    pmid=row[0],
                    title=row[1],
                    abstract=row[2],
                    journal_name=row[3],
                    journal_iso_abbrev=row[4],
                    authors=json.loads(row[5]),
                    pub_date=PartialDate(row[6], row[7], row[8]),
                    pub_types=set(json.loads(row[9])),
                    language=row[10],
                    is_erratum=bool(row[11]),
                    is_retracted=bool(row[12]),
                )
                store.documents[doc.pmid] = doc
                store.doc_jif[doc.pmid] = row[13]
            for row in conn.execute(
                "SELECT key, name, iso, in_medicine, jif FROM journals"
            ):
                store.journal_table[row[0]] = JournalRecord(
                    journal_name=row[1],
                    iso_abbrev=row[2],
                    in_medicine_subject=bool(row[3]),
                    jif=row[4],
                )
            for row in conn.execute(
                "SELECT batch_id, checksum, ts FROM ingest_log ORDER BY ts, batch_id"
            ):
                store.ingest_log.append(IngestLogEntry(row[0], row[1], row[2]))
        finally:
            conn.close()
        return store

    @classmethod
    def open(cls, path: str) -> "CorpusStore":
        """Load ``path`` if it exists, otherwise return a fresh store."""
        if os.path.exists(path):
            return cls.load(path)
        return cls()


def _content_checksum(docs: list[tuple[DocumentRecord, float]]) -> str:
    payload = json.dumps(
        [(d.pmid, d.title, jif) for d, jif in docs], sort_keys=True
    ).encode()
    return hashlib.md5(payload).hexdigest()


def ingest_batch(
    store: CorpusStore,
    batch_id: str,
    docs: list[tuple[DocumentRecord, float]],
    checksum: str | None = None,
) -> CorpusStore:
    """Upsert journal-joined documents into the store.

    A batch id already present in the ingest log is a no-op, making
    re-ingestion idempotent. Within new batches, later records win on
    pmid collision.
    """
    if store.has_batch(batch_id):
        return store
    for doc, jif in docs:
        store.documents[doc.pmid] = doc
        store.doc_jif[doc.pmid] = jif
    store.ingest_log.append(
        IngestLogEntry(
            batch_id=batch_id,
            checksum=checksum if checksum is not None else _content_checksum(docs),
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
    )
    return store


def load_journal_file(path: str) -> list[JournalRecord]:
    """Read the journal metadata table.

    Delimiter-separated text with one header row and columns
    (journal name, iso abbreviation, medicine-subject flag, jif).
    The delimiter is taken from the header row: tab if present,
    otherwise comma.
    """
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline()
        delimiter = "\t" if "\t" in header else ","
        reader = csv.reader(fh, delimiter=delimiter)
        journals = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 4:
                raise ValueError(
                    f"{path}:{lineno}: expected 4 columns, got {len(row)}"
                )
            name, iso, flag, jif = (cell.strip() for cell in row[:4])
            journals.append(
                JournalRecord(
                    journal_name=name,
                    iso_abbrev=iso,
                    in_medicine_subject=flag.lower() in ("1", "true", "yes", "y"),
                    jif=float(jif),
                )
            )
    return journals
