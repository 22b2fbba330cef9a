"""Streaming corpus ingest and serialization.

JSON Lines is the authoritative format, one object per article:

    {"id": "a1", "year": 2005, "fields": ["f1", "f2"], "citations": 3,
     "authors": [{"id": "x1", "last": "Smith", "initial": "J"}, ...],
     "truncated": false}

``truncated`` is optional (default false) and unknown keys are ignored.
The CSV form carries the same columns with ``fields`` joined by ``;`` and
``authors`` as ``;``-joined ``id|last|initial`` triples; it is a convenience
for spreadsheet-origin corpora and cannot represent names containing ``;``
or ``|``. Files whose names end in ``.gz`` are read and written gzipped.

Duplicate author ids within one article are removed (first occurrence wins)
before validation; duplicate article ids across records are an error.
"""

from __future__ import annotations

import csv
import gzip
import json
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import IO, Any

from .model import Article, AuthorRef, ValidationError

FORMATS = ("jsonl", "csv")

_CSV_COLUMNS = ("id", "year", "fields", "citations", "authors", "truncated")
_CSV_REQUIRED = ("id", "year", "fields", "citations", "authors")


class MalformedLine(ValueError):
    """An input line could not be parsed into an article record."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class DuplicateArticleId(ValueError):
    """Two records share one article id."""

    def __init__(self, article_id: str, line_no: int | None = None):
        self.article_id = article_id
        self.line_no = line_no
        suffix = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate article id {article_id!r}{suffix}")


class UnknownArticleId(KeyError):
    """An article id does not resolve in the corpus."""

    def __init__(self, article_id: str):
        self.article_id = article_id
        super().__init__(article_id)

    def __str__(self) -> str:
        return f"unknown article id {self.article_id!r}"


class Corpus:
    """Immutable, id-indexed collection of validated articles.

    Articles keep their input order; ``index`` maps article id to position.
    Instances are safe to share read-only across threads.
    """

    __slots__ = ("articles", "index")

    def __init__(self, articles: Iterable[Article]):
        arts = tuple(articles)
        index: dict[str, int] = {}
        for pos, art in enumerate(arts):
            if art.article_id in index:
                raise DuplicateArticleId(art.article_id)
            index[art.article_id] = pos
        self.articles = arts
        self.index = index

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self) -> Iterator[Article]:
        return iter(self.articles)

    def __contains__(self, article_id: str) -> bool:
        return article_id in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.articles == other.articles

    def __repr__(self) -> str:
        return f"Corpus({len(self.articles)} articles)"

    def article(self, article_id: str) -> Article:
        """Look up one article, raising :class:`UnknownArticleId` if absent."""
        pos = self.index.get(article_id)
        if pos is None:
            raise UnknownArticleId(article_id)
        return self.articles[pos]


def dedupe_authors(authors: Iterable[AuthorRef]) -> list[AuthorRef]:
    """Drop repeated author ids, keeping the first occurrence of each.

    Relative order of the survivors is preserved; applying the function twice
    changes nothing.
    """
    seen: set[str] = set()
    out: list[AuthorRef] = []
    for author in authors:
        if author.author_id in seen:
            continue
        seen.add(author.author_id)
        out.append(author)
    return out


def _decode_lines(source: Iterable[Any]) -> Iterator[tuple[int, str]]:
    for line_no, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MalformedLine(line_no, f"not valid UTF-8: {exc}") from exc
        yield line_no, line


def _authors_from_raw(raw_authors: Any, line_no: int) -> list[AuthorRef]:
    if not isinstance(raw_authors, list):
        raise MalformedLine(line_no, "authors must be a list")
    refs = []
    for entry in raw_authors:
        if not isinstance(entry, dict):
            raise MalformedLine(line_no, "author entries must be objects")
        refs.append(
            AuthorRef(
                author_id=str(entry.get("id", "")),
                last_name=str(entry.get("last", "")),
                first_initial=str(entry.get("initial", "")),
            )
        )
    return refs


def _article_from_json_line(text: str, line_no: int) -> Article:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise MalformedLine(line_no, "expected a JSON object")
    year = raw.get("year")
    if isinstance(year, bool) or not isinstance(year, int):
        raise MalformedLine(line_no, "year must be an integer")
    citations = raw.get("citations")
    if isinstance(citations, bool) or not isinstance(citations, int):
        raise MalformedLine(line_no, "citations must be an integer")
    fields = raw.get("fields")
    if not isinstance(fields, list):
        raise MalformedLine(line_no, "fields must be a list")
    truncated = raw.get("truncated", False)
    if not isinstance(truncated, bool):
        raise MalformedLine(line_no, "truncated must be a boolean")
    authors = dedupe_authors(_authors_from_raw(raw.get("authors"), line_no))
    return Article(
        article_id=str(raw.get("id", "")),
        year=year,
        fields=tuple(str(f) for f in fields),
        citations=citations,
        authors=tuple(authors),
        truncated=truncated,
    )


def _split_csv_authors(cell: str, line_no: int) -> list[AuthorRef]:
    refs = []
    for token in cell.split(";"):
        token = token.strip()
        if not token:
            continue
        parts = token.split("|")
        if len(parts) != 3:
            raise MalformedLine(line_no, f"author triple must be id|last|initial, got {token!r}")
        refs.append(AuthorRef(author_id=parts[0], last_name=parts[1], first_initial=parts[2]))
    return refs


def _parse_csv_bool(cell: str, line_no: int) -> bool:
    value = cell.strip().lower()
    if value in ("", "false", "0"):
        return False
    if value in ("true", "1"):
        return True
    raise MalformedLine(line_no, f"truncated must be true/false, got {cell!r}")


def parse_corpus(source: Iterable[Any] | IO, fmt: str = "jsonl") -> tuple[Corpus, int]:
    """Parse a stream of lines into a corpus.

    Returns ``(corpus, lines_read)``. Blank lines are skipped; article order
    matches input order. Raises :class:`MalformedLine` for structural
    problems, model validation errors (annotated with the line number) for
    semantic ones, and :class:`DuplicateArticleId` for repeated ids.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    articles: list[Article] = []
    seen: dict[str, int] = {}
    lines_read = 0

    def add(article: Article, line_no: int) -> None:
        if article.article_id in seen:
            raise DuplicateArticleId(article.article_id, line_no)
        seen[article.article_id] = line_no
        articles.append(article)

    if fmt == "jsonl":
        for line_no, line in _decode_lines(source):
            lines_read = line_no
            if not line.strip():
                continue
            try:
                add(_article_from_json_line(line, line_no), line_no)
            except ValidationError as exc:
                raise type(exc)(f"line {line_no}: {exc}") from exc
    else:
        text_lines = (line for _, line in _decode_lines(source))
        reader = csv.DictReader(text_lines)
        if reader.fieldnames is None:
            return Corpus(()), 0
        missing = [c for c in _CSV_REQUIRED if c not in reader.fieldnames]
        if missing:
            raise MalformedLine(1, f"missing required columns: {', '.join(missing)}")
        for row in reader:
            line_no = reader.line_num
            lines_read = line_no
            if row.get("id") is None:
                raise MalformedLine(line_no, "row has fewer cells than the header")
            try:
                year = int(row["year"])
                citations = int(row["citations"])
            except (TypeError, ValueError):
                raise MalformedLine(line_no, "year and citations must be integers") from None
            fields = tuple(f.strip() for f in (row["fields"] or "").split(";") if f.strip())
            authors = dedupe_authors(_split_csv_authors(row["authors"] or "", line_no))
            truncated = _parse_csv_bool(row.get("truncated") or "", line_no)
            try:
                add(
                    Article(
                        article_id=row["id"],
                        year=year,
                        fields=fields,
                        citations=citations,
                        authors=tuple(authors),
                        truncated=truncated,
                    ),
                    line_no,
                )
            except ValidationError as exc:
                raise type(exc)(f"line {line_no}: {exc}") from exc
    return Corpus(articles), lines_read


def _infer_format(path: str | Path) -> str:
    name = str(path)
    if name.endswith(".gz"):
        name = name[: -len(".gz")]
    return "csv" if name.endswith(".csv") else "jsonl"


def load_corpus(path: str | Path, fmt: str | None = None) -> tuple[Corpus, int]:
    """Read a corpus file, transparently decompressing ``.gz`` sources."""
    fmt = fmt or _infer_format(path)
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8", newline="") as fh:
        return parse_corpus(fh, fmt)


def article_to_record(article: Article) -> dict[str, Any]:
    """Article as a JSON-serializable record in the ingest schema."""
    record: dict[str, Any] = {
        "id": article.article_id,
        "year": article.year,
        "fields": list(article.fields),
        "citations": article.citations,
        "authors": [
            {"id": a.author_id, "last": a.last_name, "initial": a.first_initial}
            for a in article.authors
        ],
    }
    if article.truncated:
        record["truncated"] = True
    return record


def write_corpus(corpus: Corpus, dest: str | Path | IO[str], fmt: str = "jsonl") -> None:
    """Serialize a corpus so that re-parsing yields an equal corpus."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    if isinstance(dest, (str, Path)):
        opener = gzip.open if str(dest).endswith(".gz") else open
        with opener(dest, "wt", encoding="utf-8", newline="") as fh:
            _write_corpus_stream(corpus, fh, fmt)
    else:
        _write_corpus_stream(corpus, dest, fmt)


def _write_corpus_stream(corpus: Corpus, fh: IO[str], fmt: str) -> None:
    if fmt == "jsonl":
        for article in corpus:
            fh.write(json.dumps(article_to_record(article), ensure_ascii=False))
            fh.write("\n")
        return
    writer = csv.writer(fh)
    writer.writerow(_CSV_COLUMNS)
    for article in corpus:
        writer.writerow(
            [
                article.article_id,
                article.year,
                ";".join(article.fields),
                article.citations,
                ";".join(
                    f"{a.author_id}|{a.last_name}|{a.first_initial}" for a in article.authors
                ),
                "true" if article.truncated else "false",
            ]
        )
