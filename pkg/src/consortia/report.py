"""Report assembly and serialization for the detect and score paths.

JSON payloads embed the resolved run configuration under ``config`` so a
report is reproducible from its own header; CSV files carry the same
configuration as leading ``#`` comment lines above the header row. All
writers emit deterministic bytes for a given input.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .authorship import alpha_pair_counts, consortium_alpha
from .impact import mnlcs
from .ingest import Corpus
from .model import AlphaBand, Consortium, ConsortiumReport, NormTable
from .stats import (
    BandTally,
    CorrelationSummary,
    SizeHistogram,
    TooShort,
    correlate_consortia,
    size_distribution,
    tally_bands,
)


def consortium_to_dict(consortium: Consortium) -> dict[str, Any]:
    return {
        "consortium_id": consortium.consortium_id,
        "size": consortium.size,
        "first_year": consortium.first_year,
        "last_year": consortium.last_year,
        "article_ids": list(consortium.article_ids),
    }


def consortium_from_dict(raw: Mapping[str, Any]) -> Consortium:
    return Consortium(
        consortium_id=raw["consortium_id"],
        article_ids=tuple(raw["article_ids"]),
        size=int(raw["size"]),
        first_year=int(raw["first_year"]),
        last_year=int(raw["last_year"]),
    )


def detect_payload(
    consortia: list[Consortium], config: Mapping[str, Any], summary: Mapping[str, Any]
) -> dict[str, Any]:
    return {
        "config": dict(config),
        "summary": dict(summary),
        "consortia": [consortium_to_dict(c) for c in consortia],
    }


def write_json(payload: Mapping[str, Any], dest: str | Path) -> None:
    with open(dest, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_consortia_json(source: str | Path) -> list[Consortium]:
    with open(source, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return [consortium_from_dict(raw) for raw in payload.get("consortia", [])]


def _write_config_comments(fh: IO[str], config: Mapping[str, Any]) -> None:
    for key, value in config.items():
        fh.write(f"# {key}={value}\n")


def write_consortia_csv(
    consortia: Iterable[Consortium], dest: str | Path, config: Mapping[str, Any]
) -> None:
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_config_comments(fh, config)
        writer = csv.writer(fh)
        writer.writerow(["consortium_id", "size", "first_year", "last_year", "article_ids"])
        for c in consortia:
            writer.writerow(
                [c.consortium_id, c.size, c.first_year, c.last_year, ";".join(c.article_ids)]
            )


def build_reports(
    consortia: Iterable[Consortium], corpus: Corpus, table: NormTable
) -> list[ConsortiumReport]:
    """Join each consortium with its MNLCS and ordering summary."""
    reports = []
    for consortium in consortia:
        impact = mnlcs(consortium.article_ids, corpus, table)
        alpha = consortium_alpha(consortium, corpus)
        reports.append(
            ConsortiumReport(
                consortium=consortium,
                mnlcs=impact.value,
                excluded_articles=impact.excluded,
                alpha_mean=alpha.alpha_mean,
                alpha_band=alpha.band,
                per_paper_alpha=alpha.per_paper,
            )
        )
    return reports


def _correlations_dict(summary: CorrelationSummary | None, note: str | None) -> dict[str, Any]:
    if summary is None:
        return {
            "year_vs_mnlcs": None,
            "size_vs_mnlcs": None,
            "n_used": 0,
            "n_excluded": 0,
            "notes": [note] if note else [],
        }

    def one(result):
        if result is None:
            return None
        return {
            "rho": result.rho,
            "p": result.p,
            "n": result.n,
            "small_sample": result.n < 10,
        }

    return {
        "year_vs_mnlcs": one(summary.year_vs_mnlcs),
        "size_vs_mnlcs": one(summary.size_vs_mnlcs),
        "n_used": summary.n_used,
        "n_excluded": summary.n_excluded,
        "notes": list(summary.notes),
    }


def report_to_dict(report: ConsortiumReport, truncated_members: int) -> dict[str, Any]:
    c = report.consortium
    return {
        "consortium_id": c.consortium_id,
        "size": c.size,
        "first_year": c.first_year,
        "last_year": c.last_year,
        "article_ids": list(c.article_ids),
        "mnlcs": report.mnlcs,
        "excluded_articles": report.excluded_articles,
        "alpha_mean": report.alpha_mean,
        "alpha_band": None if report.alpha_band is None else report.alpha_band.value,
        "per_paper_alpha": list(report.per_paper_alpha),
        "truncated_members": truncated_members,
    }


def score_payload(
    reports: list[ConsortiumReport],
    corpus: Corpus,
    config: Mapping[str, Any],
    paper_bands: str = "per_paper",
) -> dict[str, Any]:
    """Full score report: per-consortium rows, tallies, correlations, histogram."""
    tallies = tally_bands(reports, paper_bands=paper_bands)
    histogram = size_distribution([r.consortium for r in reports])
    try:
        correlations = _correlations_dict(correlate_consortia(reports), None)
    except TooShort as exc:
        correlations = _correlations_dict(None, f"correlations unavailable: {exc}")
    rows = []
    for report in reports:
        truncated = sum(
            1 for aid in report.consortium.article_ids if corpus.article(aid).truncated
        )
        rows.append(report_to_dict(report, truncated))
    return {
        "config": dict(config),
        "summary": {
            "consortia": len(reports),
            "consortia_with_mnlcs": sum(1 for r in reports if r.mnlcs is not None),
            "papers": sum(r.consortium.size for r in reports),
        },
        "consortia": rows,
        "band_tally": {
            band.value: {
                "consortium_count": tally.consortium_count,
                "paper_count": tally.paper_count,
            }
            for band, tally in tallies.items()
        },
        "correlations": correlations,
        "size_histogram": {str(size): count for size, count in histogram.counts.items()},
    }


def write_reports_csv(
    reports: Iterable[ConsortiumReport],
    corpus: Corpus,
    dest: str | Path,
    config: Mapping[str, Any],
) -> None:
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_config_comments(fh, config)
        writer = csv.writer(fh)
        writer.writerow(
            [
                "consortium_id",
                "size",
                "first_year",
                "last_year",
                "mnlcs",
                "excluded_articles",
                "alpha_mean",
                "alpha_band",
                "truncated_members",
            ]
        )
        for report in reports:
            c = report.consortium
            truncated = sum(1 for aid in c.article_ids if corpus.article(aid).truncated)
            writer.writerow(
                [
                    c.consortium_id,
                    c.size,
                    c.first_year,
                    c.last_year,
                    "" if report.mnlcs is None else repr(report.mnlcs),
                    report.excluded_articles,
                    "" if report.alpha_mean is None else repr(report.alpha_mean),
                    "" if report.alpha_band is None else report.alpha_band.value,
                    truncated,
                ]
            )


def write_band_tally_csv(
    tallies: Mapping[AlphaBand, BandTally], dest: str | Path, config: Mapping[str, Any]
) -> None:
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_config_comments(fh, config)
        writer = csv.writer(fh)
        writer.writerow(["band", "consortium_count", "paper_count"])
        for band in AlphaBand:
            tally = tallies[band]
            writer.writerow([band.value, tally.consortium_count, tally.paper_count])


def write_histogram_csv(
    histogram: SizeHistogram, dest: str | Path, config: Mapping[str, Any]
) -> None:
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_config_comments(fh, config)
        writer = csv.writer(fh)
        writer.writerow(["size", "count"])
        for size, count in sorted(histogram.counts.items()):
            writer.writerow([size, count])


def write_histogram_points_csv(histogram: SizeHistogram, dest: str | Path) -> None:
    """Log-log points of the size distribution, one (x, y) pair per size."""
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["log10_size", "log10_count"])
        for x, y in histogram.log_points():
            writer.writerow([repr(x), repr(y)])


def write_per_paper_alpha_csv(
    reports: Iterable[ConsortiumReport], corpus: Corpus, dest: str | Path
) -> None:
    """Per-paper ordering detail: pair counts and score for every member."""
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["article_id", "pairs_counted", "pairs_in_order", "score"])
        for report in reports:
            for article_id in report.consortium.article_ids:
                counted, in_order = alpha_pair_counts(corpus.article(article_id).authors)
                score = "" if counted == 0 else repr(in_order / counted)
                writer.writerow([article_id, counted, in_order, score])
