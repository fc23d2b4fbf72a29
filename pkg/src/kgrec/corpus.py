"""Candidate-paper ingestion and abstract splitting."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .errors import DuplicateIdError, ParseError, SchemaError

COLUMNS = ("id", "title", "abstract", "keywords", "source_db", "relevant")
REQUIRED_COLUMNS = COLUMNS[:5]
KEYWORD_SEP = ";"

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


class SourceDb(str, Enum):
    GOOGLE_SCHOLAR = "google_scholar"
    EI = "ei"
    IEEE = "ieee"
    OTHER = "other"


@dataclass(frozen=True)
class PaperRecord:
    id: str
    title: str
    abstract: str = ""
    keywords: tuple[str, ...] = ()
    source_db: SourceDb = SourceDb.OTHER
    relevant: Optional[bool] = None

    def __post_init__(self):
        if not self.id:
            raise SchemaError("paper id must be non-empty")
        if not self.title:
            raise SchemaError(f"paper {self.id!r} has an empty title")
        object.__setattr__(self, "keywords", tuple(self.keywords))
        object.__setattr__(self, "source_db", SourceDb(self.source_db))


@dataclass(frozen=True)
class SplitAbstract:
    paper_id: str
    p1_text: str
    p2_text: str
    p1_sentences: tuple[str, ...] = field(default=(), compare=False, repr=False)
    p2_sentences: tuple[str, ...] = field(default=(), compare=False, repr=False)


def _parse_relevant(value: str, line: int) -> Optional[bool]:
    value = value.strip()
    if value == "":
        return None
    if value in ("1", "0"):
        return value == "1"
    raise SchemaError(f"line {line}: relevant must be 1, 0 or empty, got {value!r}")


def load_papers(path) -> list[PaperRecord]:
    """Read a paper-corpus CSV into records, preserving row order."""
    path = Path(path)
    records: list[PaperRecord] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        except csv.Error as exc:
            raise ParseError(str(exc), reader.line_num) from None
        header = [h.strip() for h in header]
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise SchemaError(f"{path}: missing required column {col!r}")
        index = {name: i for i, name in enumerate(header)}
        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                raise ParseError(str(exc), reader.line_num) from None
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, found {len(row)}", line)
            get = lambda col: row[index[col]] if col in index else ""  # noqa: E731
            pid = get("id").strip()
            if pid in seen:
                raise DuplicateIdError(pid)
            seen.add(pid)
            try:
                source = SourceDb(get("source_db").strip() or "other")
            except ValueError:
                raise SchemaError(
                    f"line {line}: unknown source_db {get('source_db')!r}") from None
            keywords = tuple(k.strip() for k in get("keywords").split(KEYWORD_SEP) if k.strip())
            try:
                records.append(PaperRecord(
                    id=pid,
                    title=get("title").strip(),
                    abstract=get("abstract").strip(),
                    keywords=keywords,
                    source_db=source,
                    relevant=_parse_relevant(get("relevant"), line),
                ))
            except SchemaError as exc:
                raise SchemaError(f"line {line}: {exc}") from None
    return records


def write_papers(records: Iterable[PaperRecord], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in records:
            rel = "" if r.relevant is None else ("1" if r.relevant else "0")
            writer.writerow([r.id, r.title, r.abstract, KEYWORD_SEP.join(r.keywords),
                             r.source_db.value, rel])


def split_sentences(text: str) -> list[str]:
    text = text.strip()
    if not text:
        return []
    return [s for s in _SENTENCE_BREAK.split(text) if s]


def split_abstract(record: PaperRecord) -> SplitAbstract:
    """Split an abstract at its sentence midpoint.

    The first ceil(S/2) sentences form ``p1``; the rest are followed by the
    title and the space-joined keywords to form ``p2``.
    """
    sentences = split_sentences(record.abstract)
    cut = math.ceil(len(sentences) / 2)
    head, tail = sentences[:cut], sentences[cut:]
    p2_parts = list(tail) + [record.title]
    if record.keywords:
        p2_parts.append(" ".join(record.keywords))
    return SplitAbstract(
        paper_id=record.id,
        p1_text=" ".join(head),
        p2_text=" ".join(p2_parts),
        p1_sentences=tuple(head),
        p2_sentences=tuple(tail),
    )
