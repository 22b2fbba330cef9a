"""Field-and-year-normalized log citation scores.

Citation counts enter every computation as ln(1+c). An article's normalized
score divides its ln(1+c) by the mean ln(1+c) of all reference-corpus
articles sharing a field and year (its stratum), averaged over the article's
fields; the mean of those scores over a set of articles is centred on 1.0
for the reference corpus by construction.

A stratum whose citation counts are all zero has mean 0 and cannot
normalize anything: that field's contribution is skipped, and an article is
excluded (and counted) when every one of its strata is degenerate.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .ingest import Corpus
from .model import Article, NormTable, StratumStat

NORM_CHUNK = 65536


class MissingStratum(KeyError):
    """A (field, year) stratum required for normalization is absent."""

    def __init__(self, field_code: str, year: int):
        self.field_code = field_code
        self.year = year
        super().__init__((field_code, year))

    def __str__(self) -> str:
        return f"no stratum for field {self.field_code!r}, year {self.year}"


@dataclass(frozen=True, slots=True)
class MnlcsResult:
    """Mean normalized score over a set of articles, with exclusion counts."""

    value: float | None
    included: int
    excluded: int


def _scan_chunk(articles, lo: int, hi: int) -> dict[tuple[str, int], list]:
    # Neumaier-compensated per-stratum sums of ln(1+c): [sum, compensation, n].
    acc: dict[tuple[str, int], list] = {}
    for art in articles[lo:hi]:
        value = math.log1p(art.citations)
        year = art.year
        for field_code in art.fields:
            state = acc.get((field_code, year))
            if state is None:
                acc[(field_code, year)] = state = [0.0, 0.0, 0]
            total = state[0] + value
            if abs(state[0]) >= value:
                state[1] += (state[0] - total) + value
            else:
                state[1] += (value - total) + state[0]
            state[0] = total
            state[2] += 1
    return acc


def _merge_value(state: list, value: float) -> None:
    total = state[0] + value
    if abs(state[0]) >= abs(value):
        state[1] += (state[0] - total) + value
    else:
        state[1] += (value - total) + state[0]
    state[0] = total


def build_norm_table(corpus: Corpus, workers: int = 1) -> NormTable:
    """Mean ln(1+c) per (field, year) over the whole corpus.

    An article with k fields contributes its ln(1+c) to each of its k
    strata. Chunk boundaries are fixed, and partial sums merge in chunk
    order, so the table is identical for any worker count.
    """
    articles = corpus.articles
    ranges = [(lo, min(lo + NORM_CHUNK, len(articles))) for lo in range(0, len(articles), NORM_CHUNK)]
    if workers <= 1 or len(ranges) <= 1:
        partials = [_scan_chunk(articles, lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda r: _scan_chunk(articles, r[0], r[1]), ranges))
    merged: dict[tuple[str, int], list] = {}
    for partial in partials:
        for key, state in partial.items():
            target = merged.get(key)
            if target is None:
                merged[key] = [state[0], state[1], state[2]]
                continue
            _merge_value(target, state[0])
            _merge_value(target, state[1])
            target[2] += state[2]
    strata = {
        key: StratumStat(mean_log=max(0.0, (s + c) / n), n=n)
        for key, (s, c, n) in merged.items()
    }
    return NormTable(strata)


def nlcs(article: Article, table: NormTable) -> float | None:
    """Normalized log citation score of one article.

    Mean over the article's fields of ln(1+c) divided by the stratum mean;
    degenerate strata (mean 0) are skipped, and the result is None when all
    of the article's strata are degenerate. Raises :class:`MissingStratum`
    when a required stratum is absent from the table.
    """
    log_score = math.log1p(article.citations)
    values = []
    for field_code in article.fields:
        stat = table.get(field_code, article.year)
        if stat is None:
            raise MissingStratum(field_code, article.year)
        if stat.mean_log == 0.0:
            continue
        values.append(log_score / stat.mean_log)
    if not values:
        return None
    return math.fsum(values) / len(values)


def mnlcs(article_ids: Iterable[str], corpus: Corpus, table: NormTable) -> MnlcsResult:
    """Mean NLCS over a set of articles.

    Articles whose strata are all degenerate are excluded and counted;
    the value is None when no article yields a score.
    """
    values = []
    excluded = 0
    for article_id in sorted(set(article_ids)):
        score = nlcs(corpus.article(article_id), table)
        if score is None:
            excluded += 1
        else:
            values.append(score)
    if not values:
        return MnlcsResult(value=None, included=0, excluded=excluded)
    return MnlcsResult(
        value=math.fsum(values) / len(values), included=len(values), excluded=excluded
    )


def write_norm_table(table: NormTable, dest: str | Path | IO[str]) -> None:
    """Write a table as CSV rows of (field, year, mean_log, n).

    Floats are written in shortest round-trip form, so reading the file back
    reproduces each mean exactly.
    """
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_norm_table(table, fh)
        return
    writer = csv.writer(dest)
    writer.writerow(["field", "year", "mean_log", "n"])
    for (field_code, year), stat in sorted(table.items()):
        writer.writerow([field_code, year, repr(stat.mean_log), stat.n])


def read_norm_table(source: str | Path | IO[str]) -> NormTable:
    """Read a table written by :func:`write_norm_table`."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_norm_table(fh)
    reader = csv.DictReader(source)
    strata = {}
    for row in reader:
        key = (row["field"], int(row["year"]))
        strata[key] = StratumStat(mean_log=float(row["mean_log"]), n=int(row["n"]))
    return NormTable(strata)
