"""Command-line pipeline: detect consortia, score them, simulate corpora.

Exit codes: 0 success, 1 parse/validation failure, 2 I/O failure, 3 a
norm-table file is missing a required stratum.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import figures, report
from .cluster import cluster_consortia, qualifying_positions
from .impact import MissingStratum, build_norm_table, read_norm_table, write_norm_table
from .ingest import (
    DuplicateArticleId,
    MalformedLine,
    UnknownArticleId,
    load_corpus,
    write_corpus,
)
from .model import ClusterParams, InvalidSpec, OverlapMode, SynthSpec, ValidationError
from .stats import size_distribution, tally_bands
from .synth import evaluate_detection, generate_corpus, write_ground_truth

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_MISSING_STRATUM = 3


def _add_cluster_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-authors", type=int, default=20,
                        help="minimum unique authors per qualifying article (default 20)")
    parser.add_argument("--min-overlap", type=float, default=0.8,
                        help="minimum shared-author fraction for a link (default 0.8)")
    parser.add_argument("--min-cluster-size", type=int, default=3,
                        help="minimum articles per reported consortium (default 3)")
    parser.add_argument("--overlap-mode", choices=["max", "min"], default="max",
                        help="overlap denominator: larger or smaller author list (default max)")


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="corpus file (.jsonl/.csv, .gz ok)")
    parser.add_argument("--format", choices=["jsonl", "csv"], default=None,
                        help="corpus format (default: inferred from the file name)")
    parser.add_argument("--out", default="out", help="output directory (default ./out)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker threads for clustering and normalization; "
                             "output is identical for any count")


def _params_from_args(args: argparse.Namespace) -> ClusterParams:
    mode = OverlapMode.MAX_DENOMINATOR if args.overlap_mode == "max" else OverlapMode.MIN_DENOMINATOR
    return ClusterParams(
        min_authors=args.min_authors,
        min_overlap=args.min_overlap,
        min_cluster_size=args.min_cluster_size,
        overlap_mode=mode,
    )


def _config_echo(args: argparse.Namespace, params: ClusterParams, **extra) -> dict:
    config = {
        "input": args.input,
        "format": args.format or "auto",
        "min_authors": params.min_authors,
        "min_overlap": params.min_overlap,
        "min_cluster_size": params.min_cluster_size,
        "overlap_mode": params.overlap_mode.value,
        "workers": args.workers,
        "out": args.out,
    }
    config.update(extra)
    return config


def cmd_detect(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus, lines = load_corpus(args.input, args.format)
    consortia = cluster_consortia(corpus, params, workers=args.workers)
    qualifying = len(qualifying_positions(corpus, params))
    config = _config_echo(args, params)
    summary = {
        "lines_read": lines,
        "articles": len(corpus),
        "qualifying_articles": qualifying,
        "consortia": len(consortia),
    }
    report.write_json(report.detect_payload(consortia, config, summary),
                      out_dir / "consortia.json")
    report.write_consortia_csv(consortia, out_dir / "consortia.csv", config)
    print(f"articles: {len(corpus)}")
    print(f"qualifying articles: {qualifying}")
    print(f"consortia: {len(consortia)}")
    print(f"wrote {out_dir / 'consortia.json'} and {out_dir / 'consortia.csv'}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus, _ = load_corpus(args.input, args.format)
    if args.consortia:
        consortia = report.read_consortia_json(args.consortia)
    else:
        consortia = cluster_consortia(corpus, params, workers=args.workers)
    if args.norm_table == "compute":
        table = build_norm_table(corpus, workers=args.workers)
        write_norm_table(table, out_dir / "norm_table.csv")
    else:
        table = read_norm_table(args.norm_table)
    reports = report.build_reports(consortia, corpus, table)
    config = _config_echo(
        args,
        params,
        consortia=args.consortia or "detected in-process",
        norm_table=args.norm_table,
        paper_bands=args.paper_bands,
    )
    payload = report.score_payload(reports, corpus, config, paper_bands=args.paper_bands)
    report.write_json(payload, out_dir / "reports.json")
    report.write_reports_csv(reports, corpus, out_dir / "reports.csv", config)
    tallies = tally_bands(reports, paper_bands=args.paper_bands)
    histogram = size_distribution([r.consortium for r in reports])
    report.write_band_tally_csv(tallies, out_dir / "band_tally.csv", config)
    report.write_histogram_csv(histogram, out_dir / "size_histogram.csv", config)
    report.write_per_paper_alpha_csv(reports, corpus, out_dir / "per_paper_alpha.csv")
    if args.plot_data:
        report.write_histogram_points_csv(histogram, out_dir / "size_histogram_loglog.csv")
    rendered = [
        figures.save_size_distribution(histogram, out_dir / "size_distribution.png"),
        figures.save_band_chart(tallies, out_dir / "alpha_bands.png"),
        figures.save_mnlcs_by_year(reports, out_dir / "mnlcs_vs_year.png"),
    ]
    scored = payload["summary"]["consortia_with_mnlcs"]
    print(f"consortia scored: {len(reports)} ({scored} with an MNLCS)")
    correlations = payload["correlations"]
    for name in ("year_vs_mnlcs", "size_vs_mnlcs"):
        entry = correlations[name]
        if entry is None:
            print(f"{name}: unavailable")
        else:
            caveat = " (small sample)" if entry["small_sample"] else ""
            print(f"{name}: rho={entry['rho']:.4f} p={entry['p']:.4g} n={entry['n']}{caveat}")
    for note in correlations["notes"]:
        print(f"note: {note}")
    written = [str(p) for p in rendered if p is not None]
    print(f"wrote reports to {out_dir}" + (f" with figures: {', '.join(written)}" if written else ""))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw = dict(raw)
        raw["seed"] = args.seed
    spec = SynthSpec.from_dict(raw)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = generate_corpus(spec)
    corpus_path = out_dir / f"corpus.{args.format}"
    write_corpus(result.corpus, corpus_path, fmt=args.format)
    truth_path = out_dir / "ground_truth.json"
    write_ground_truth(result.truth, truth_path)
    planted = sum(1 for v in result.truth.assignments.values() if v is not None)
    print(f"articles: {len(result.corpus)} ({planted} planted, "
          f"{len(result.corpus) - planted} noise)")
    print(f"wrote {corpus_path} and {truth_path}")
    if args.run_detect:
        params = ClusterParams(
            min_authors=args.min_authors,
            min_overlap=args.min_overlap,
            min_cluster_size=args.min_cluster_size,
            overlap_mode=OverlapMode.MAX_DENOMINATOR
            if args.overlap_mode == "max"
            else OverlapMode.MIN_DENOMINATOR,
        )
        detected = cluster_consortia(result.corpus, params, workers=args.workers)
        metrics = evaluate_detection(detected, result.truth)
        print(
            f"detection: consortia={len(detected)} recall={metrics.recall:.4f} "
            f"merges={metrics.merges} splits={metrics.splits} spurious={metrics.spurious}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="consortia",
        description="Detect large publishing consortia, score their normalized "
                    "citation impact and author-ordering patterns, and generate "
                    "synthetic validation corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="find consortia in a corpus")
    _add_io_flags(detect)
    _add_cluster_flags(detect)
    detect.set_defaults(func=cmd_detect)

    score = sub.add_parser("score", help="score detected consortia and write reports/figures")
    _add_io_flags(score)
    _add_cluster_flags(score)
    score.add_argument("--consortia", default=None,
                       help="consortia.json from a detect run (default: detect in-process)")
    score.add_argument("--norm-table", default="compute",
                       help="'compute' (default) builds the normalization table from the "
                            "input corpus; a path loads a precomputed CSV table")
    score.add_argument("--paper-bands", choices=["per_paper", "consortium"],
                       default="per_paper",
                       help="classify papers by their own score (default) or by their "
                            "consortium's band")
    score.add_argument("--plot-data", action="store_true",
                       help="also write the log-log size-distribution point file")
    score.set_defaults(func=cmd_score)

    simulate = sub.add_parser("simulate", help="generate a synthetic corpus with ground truth")
    simulate.add_argument("--spec", required=True, help="synthetic-corpus spec (JSON)")
    simulate.add_argument("--out", default="out", help="output directory (default ./out)")
    simulate.add_argument("--format", choices=["jsonl", "csv"], default="jsonl",
                          help="corpus output format (default jsonl)")
    simulate.add_argument("--seed", type=int, default=None,
                          help="override the spec's seed")
    simulate.add_argument("--run-detect", action="store_true",
                          help="run detection on the generated corpus and print recovery metrics")
    simulate.add_argument("--workers", type=int, default=1)
    _add_cluster_flags(simulate)
    simulate.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingStratum as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_STRATUM
    except (ValidationError, MalformedLine, DuplicateArticleId, UnknownArticleId,
            InvalidSpec, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
