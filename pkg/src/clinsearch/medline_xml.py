"""Parsing and re-serialization of MEDLINE-style citation XML.

Only the element subset needed downstream is handled: PMID,
ArticleTitle, Abstract/AbstractText, Journal/Title, Journal/
ISOAbbreviation, AuthorList/Author, PubDate, PublicationTypeList/
PublicationType, Language, and CommentsCorrectionsList (for retraction
notices). Batches may be raw or gzip-compressed XML.
"""

from __future__ import annotations

import gzip
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .corpus import DocumentRecord, PartialDate

logger = logging.getLogger(__name__)

_MONTHS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6,
    "jul": 7, "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
}

ERRATUM_TYPE = "Published Erratum"
RETRACTED_TYPE = "Retracted Publication"
_RETRACTION_REF_TYPES = {"RetractionIn"}
_DEFAULT_PUB_TYPE = "Journal Article"


class XmlParseError(ValueError):
    """Malformed batch XML; carries the approximate byte offset."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


@dataclass
class BatchParseResult:
    documents: list[DocumentRecord] = field(default_factory=list)
    skipped: int = 0


def _maybe_decompress(data: bytes) -> bytes:
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def _byte_offset(data: bytes, line: int, column: int) -> int:
    lines = data.split(b"\n")
    return sum(len(ln) + 1 for ln in lines[: line - 1]) + column


def _text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return "".join(elem.itertext()).strip()


def _parse_month(raw: str) -> int | None:
    raw = raw.strip()
    if not raw:
        return None
    if raw.isdigit():
        month = int(raw)
        return month if 1 <= month <= 12 else None
    return _MONTHS.get(raw[:3].lower())


def _parse_pub_date(citation: ET.Element) -> PartialDate | None:
    pub_date = citation.find(".//PubDate")
    if pub_date is None:
        return None
    year_text = _text(pub_date.find("Year"))
    month: int | None = None
    day: int | None = None
    if year_text.isdigit():
        year = int(year_text)
        month = _parse_month(_text(pub_date.find("Month")))
        day_text = _text(pub_date.find("Day"))
        if month is not None and day_text.isdigit() and 1 <= int(day_text) <= 31:
            day = int(day_text)
    else:
        # MedlineDate fallback, e.g. "2017 Jan-Feb"
        match = re.search(r"\b(1[89]\d\d|20\d\d|2100)\b", _text(pub_date.find("MedlineDate")))
        if match is None:
            return None
        year = int(match.group(1))
    if not 1800 <= year <= 2100:
        return None
    return PartialDate(year, month, day)


def _author_abbrev(author: ET.Element) -> str:
    collective = _text(author.find("CollectiveName"))
    if collective:
        return collective
    last = _text(author.find("LastName"))
    initials = _text(author.find("Initials"))
    if last and initials:
        return f"{last} {initials}"
    if last:
        return last
    return _text(author.find("ForeName"))


def _parse_citation(citation: ET.Element) -> DocumentRecord | None:
    pmid_text = _text(citation.find("PMID"))
    title = _text(citation.find(".//ArticleTitle"))
    if not pmid_text.isdigit() or int(pmid_text) <= 0 or not title:
        return None
    pub_date = _parse_pub_date(citation)
    if pub_date is None:
        return None

    abstract = " ".join(
        text for node in citation.findall(".//Abstract/AbstractText")
        if (text := _text(node))
    )
    pub_types = {
        text for node in citation.findall(".//PublicationTypeList/PublicationType")
        if (text := _text(node))
    }
    if not pub_types:
        pub_types = {_DEFAULT_PUB_TYPE}
    authors = [
        abbrev for node in citation.findall(".//AuthorList/Author")
        if (abbrev := _author_abbrev(node))
    ]
    retraction_link = any(
        node.get("RefType") in _RETRACTION_REF_TYPES
        for node in citation.findall(".//CommentsCorrectionsList/CommentsCorrections")
    )
    return DocumentRecord(
        pmid=int(pmid_text),
        title=title,
        abstract=abstract,
        journal_name=_text(citation.find(".//Journal/Title")),
        journal_iso_abbrev=_text(citation.find(".//Journal/ISOAbbreviation")),
        authors=authors,
        pub_date=pub_date,
        pub_types=pub_types,
        language=_text(citation.find(".//Language")),
        is_erratum=ERRATUM_TYPE in pub_types,
        is_retracted=RETRACTED_TYPE in pub_types or retraction_link,
    )


def parse_document_batch(xml_bytes: bytes) -> BatchParseResult:
    """Parse one citation batch into document records.

    Records missing a PMID, a title, or a usable publication year are
    skipped and counted rather than aborting the batch. On duplicate
    PMIDs the last occurrence wins, with a warning.
    """
    data = _maybe_decompress(xml_bytes)
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise XmlParseError(str(exc), _byte_offset(data, line, column)) from exc

    citations = list(root.iter("MedlineCitation"))
    if not citations and root.tag == "MedlineCitation":
        citations = [root]

    result = BatchParseResult()
    by_pmid: dict[int, int] = {}
    for citation in citations:
        record = _parse_citation(citation)
        if record is None:
            result.skipped += 1
            continue
        if record.pmid in by_pmid:
            logger.warning("duplicate PMID %d in batch; keeping last occurrence", record.pmid)
            result.documents[by_pmid[record.pmid]] = record
        else:
            by_pmid[record.pmid] = len(result.documents)
            result.documents.append(record)
    return result


def serialize_document_batch(docs: list[DocumentRecord]) -> bytes:
    """Render records back to the citation XML shape.

    Re-parsing the output reproduces the records exactly; author
    abbreviations are emitted as collective names since the split into
    last name and initials is not retained.
    """
    parts = ["<PubmedArticleSet>"]
    for doc in docs:
        parts.append("<PubmedArticle><MedlineCitation>")
        parts.append(f"<PMID>{doc.pmid}</PMID>")
        parts.append("<Article>")
        parts.append("<Journal>")
        parts.append(f"<Title>{escape(doc.journal_name)}</Title>")
        parts.append(f"<ISOAbbreviation>{escape(doc.journal_iso_abbrev)}</ISOAbbreviation>")
        parts.append("<JournalIssue><PubDate>")
        parts.append(f"<Year>{doc.pub_date.year}</Year>")
        if doc.pub_date.month is not None:
            parts.append(f"<Month>{doc.pub_date.month}</Month>")
        if doc.pub_date.day is not None:
            parts.append(f"<Day>{doc.pub_date.day}</Day>")
        parts.append("</PubDate></JournalIssue>")
        parts.append("</Journal>")
        parts.append(f"<ArticleTitle>{escape(doc.title)}</ArticleTitle>")
        if doc.abstract:
            parts.append(f"<Abstract><AbstractText>{escape(doc.abstract)}</AbstractText></Abstract>")
        if doc.authors:
            parts.append("<AuthorList>")
            for author in doc.authors:
                parts.append(f"<Author><CollectiveName>{escape(author)}</CollectiveName></Author>")
            parts.append("</AuthorList>")
        if doc.language:
            parts.append(f"<Language>{escape(doc.language)}</Language>")
        parts.append("<PublicationTypeList>")
        for pub_type in sorted(doc.pub_types):
            parts.append(f"<PublicationType>{escape(pub_type)}</PublicationType>")
        parts.append("</PublicationTypeList>")
        parts.append("</Article>")
        if doc.is_retracted and RETRACTED_TYPE not in doc.pub_types:
            parts.append(
                '<CommentsCorrectionsList>'
                '<CommentsCorrections RefType="RetractionIn"/>'
                "</CommentsCorrectionsList>"
            )
        parts.append("</MedlineCitation></PubmedArticle>")
    parts.append("</PubmedArticleSet>")
    return "\n".join(parts).encode("utf-8")
