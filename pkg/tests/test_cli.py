import json

import pytest

from consortia import Corpus, write_corpus
from consortia.cli import main
from conftest import make_article


def write_trio(path):
    base = [f"a{i}" for i in range(1, 21)]
    fresh_b = [f"b{i}" for i in range(1, 5)]
    fresh_c = [f"c{i}" for i in range(1, 5)]
    corpus = Corpus(
        [
            make_article("art1", base, year=2001, citations=3),
            make_article("art2", base[:16] + fresh_b, year=2002, citations=3),
            make_article("art3", base[:12] + fresh_b + fresh_c, year=2003, citations=3),
        ]
    )
    write_corpus(corpus, path)
    return corpus


def spec_file(tmp_path, churn=0.10, planted=3, noise=100, seed=42):
    spec = {
        "seed": seed,
        "planted": [
            {"pool_size": 20 + i, "churn_rate": churn, "papers": 4 + i} for i in range(planted)
        ],
        "noise_articles": noise,
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


class TestDetect:
    def test_trio_fixture(self, tmp_path, capsys):
        corpus_path = tmp_path / "corpus.jsonl"
        write_trio(corpus_path)
        out_dir = tmp_path / "out"
        code = main(["detect", "--input", str(corpus_path), "--out", str(out_dir)])
        assert code == 0
        captured = capsys.readouterr().out
        assert "consortia: 1" in captured
        assert "qualifying articles: 3" in captured
        payload = json.loads((out_dir / "consortia.json").read_text())
        assert payload["summary"]["consortia"] == 1
        (consortium,) = payload["consortia"]
        assert consortium["size"] == 3
        assert consortium["article_ids"] == ["art1", "art2", "art3"]
        assert payload["config"]["min_overlap"] == 0.8
        csv_text = (out_dir / "consortia.csv").read_text()
        assert "# min_authors=20" in csv_text
        assert "art1;art2;art3" in csv_text

    def test_empty_input(self, tmp_path, capsys):
        corpus_path = tmp_path / "empty.jsonl"
        corpus_path.write_text("")
        code = main(["detect", "--input", str(corpus_path), "--out", str(tmp_path / "o")])
        assert code == 0
        assert "consortia: 0" in capsys.readouterr().out

    def test_malformed_line_names_line_and_exits_one(self, tmp_path, capsys):
        write_trio(tmp_path / "tmp.jsonl")
        trio_lines = (tmp_path / "tmp.jsonl").read_text().splitlines()
        good_lines = [
            json.dumps({**json.loads(line), "id": f"r{i}"})
            for i, line in enumerate(trio_lines * 2)
        ]
        corpus_path = tmp_path / "bad.jsonl"
        corpus_path.write_text("\n".join(good_lines) + "\n{oops\n")
        code = main(["detect", "--input", str(corpus_path), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "line 7" in capsys.readouterr().err

    def test_missing_input_exits_two(self, tmp_path, capsys):
        code = main(["detect", "--input", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "o")])
        assert code == 2

    def test_csv_input(self, tmp_path, capsys):
        corpus = write_trio(tmp_path / "ignored.jsonl")
        corpus_path = tmp_path / "corpus.csv"
        write_corpus(corpus, corpus_path, fmt="csv")
        code = main(["detect", "--input", str(corpus_path), "--out", str(tmp_path / "o")])
        assert code == 0
        assert "consortia: 1" in capsys.readouterr().out


class TestScore:
    def _detect_then_score(self, tmp_path, extra_score_args=()):
        corpus_path = tmp_path / "corpus.jsonl"
        write_trio(corpus_path)
        det_dir = tmp_path / "det"
        assert main(["detect", "--input", str(corpus_path), "--out", str(det_dir)]) == 0
        score_dir = tmp_path / "score"
        code = main(
            ["score", "--input", str(corpus_path), "--consortia",
             str(det_dir / "consortia.json"), "--out", str(score_dir), *extra_score_args]
        )
        return code, score_dir

    def test_uniform_citations_score_one(self, tmp_path):
        code, score_dir = self._detect_then_score(tmp_path)
        assert code == 0
        payload = json.loads((score_dir / "reports.json").read_text())
        (row,) = payload["consortia"]
        assert row["mnlcs"] == pytest.approx(1.0, abs=1e-12)
        assert row["excluded_articles"] == 0
        assert payload["config"]["min_cluster_size"] == 3

    def test_figures_rendered_alongside_csv(self, tmp_path):
        code, score_dir = self._detect_then_score(tmp_path, ("--plot-data",))
        assert code == 0
        for name in (
            "reports.json",
            "reports.csv",
            "band_tally.csv",
            "size_histogram.csv",
            "size_histogram_loglog.csv",
            "per_paper_alpha.csv",
            "size_distribution.png",
            "alpha_bands.png",
            "mnlcs_vs_year.png",
        ):
            assert (score_dir / name).exists(), name

    def test_alphabetical_consortium_banded_close(self, tmp_path):
        spec = {
            "seed": 5,
            "planted": [{"pool_size": 20, "churn_rate": 0.1, "papers": 5,
                         "ordering_policy": "fully_alphabetical"}],
            "noise_articles": 40,
        }
        (tmp_path / "spec.json").write_text(json.dumps(spec))
        sim_dir = tmp_path / "sim"
        assert main(["simulate", "--spec", str(tmp_path / "spec.json"),
                     "--out", str(sim_dir)]) == 0
        score_dir = tmp_path / "score"
        assert main(["score", "--input", str(sim_dir / "corpus.jsonl"),
                     "--out", str(score_dir)]) == 0
        payload = json.loads((score_dir / "reports.json").read_text())
        (row,) = payload["consortia"]
        assert row["alpha_band"] == "close_alphabetical"
        assert row["alpha_mean"] == 1.0

    def test_three_consortia_emit_correlations_with_small_sample_flag(self, tmp_path, capsys):
        sim_dir = tmp_path / "sim"
        assert main(["simulate", "--spec", str(spec_file(tmp_path, planted=3, noise=50)),
                     "--out", str(sim_dir)]) == 0
        score_dir = tmp_path / "score"
        assert main(["score", "--input", str(sim_dir / "corpus.jsonl"),
                     "--out", str(score_dir)]) == 0
        payload = json.loads((score_dir / "reports.json").read_text())
        correlations = payload["correlations"]
        assert correlations["n_used"] == 3
        for key in ("year_vs_mnlcs", "size_vs_mnlcs"):
            entry = correlations[key]
            if entry is not None:
                assert entry["n"] == 3
                assert entry["small_sample"] is True

    def test_norm_table_file_missing_stratum_exits_three(self, tmp_path, capsys):
        corpus_path = tmp_path / "corpus.jsonl"
        write_trio(corpus_path)
        table_path = tmp_path / "norm.csv"
        table_path.write_text("field,year,mean_log,n\nf,2001,0.5,1\n")  # 2002/2003 missing
        code = main(["score", "--input", str(corpus_path), "--norm-table", str(table_path),
                     "--out", str(tmp_path / "o")])
        assert code == 3
        assert "no stratum" in capsys.readouterr().err

    def test_score_detects_in_process_without_consortia_file(self, tmp_path):
        corpus_path = tmp_path / "corpus.jsonl"
        write_trio(corpus_path)
        score_dir = tmp_path / "score"
        assert main(["score", "--input", str(corpus_path), "--out", str(score_dir)]) == 0
        payload = json.loads((score_dir / "reports.json").read_text())
        assert payload["summary"]["consortia"] == 1

    def test_byte_identical_reports_across_runs_and_workers(self, tmp_path):
        sim_dir = tmp_path / "sim"
        assert main(["simulate", "--spec", str(spec_file(tmp_path, planted=4, noise=200)),
                     "--out", str(sim_dir)]) == 0
        outputs = []
        for tag, workers in (("s1", "1"), ("s2", "1"), ("s8", "8")):
            score_dir = tmp_path / tag
            assert main(["score", "--input", str(sim_dir / "corpus.jsonl"),
                         "--out", str(score_dir), "--workers", workers]) == 0
            payload = json.loads((score_dir / "reports.json").read_text())
            payload["config"].pop("out")
            payload["config"].pop("workers")
            outputs.append(json.dumps(payload, sort_keys=True))
        assert outputs[0] == outputs[1] == outputs[2]


class TestSimulate:
    def test_run_detect_prints_metrics(self, tmp_path, capsys):
        code = main(["simulate", "--spec", str(spec_file(tmp_path, planted=2, noise=60)),
                     "--out", str(tmp_path / "sim"), "--run-detect"])
        assert code == 0
        out = capsys.readouterr().out
        assert "recall=1.0000" in out
        assert "spurious=0" in out

    def test_high_churn_prints_zero_recall(self, tmp_path, capsys):
        code = main(["simulate", "--spec", str(spec_file(tmp_path, churn=0.25, planted=1)),
                     "--out", str(tmp_path / "sim"), "--run-detect"])
        assert code == 0
        assert "recall=0.0000" in capsys.readouterr().out

    def test_repeat_seed_reproduces_bytes(self, tmp_path):
        spec = spec_file(tmp_path, planted=2, noise=80)
        for tag in ("one", "two"):
            assert main(["simulate", "--spec", str(spec), "--out", str(tmp_path / tag)]) == 0
        assert (tmp_path / "one/corpus.jsonl").read_bytes() == (
            tmp_path / "two/corpus.jsonl"
        ).read_bytes()
        assert (tmp_path / "one/ground_truth.json").read_bytes() == (
            tmp_path / "two/ground_truth.json"
        ).read_bytes()

    def test_seed_flag_overrides_spec(self, tmp_path):
        spec = spec_file(tmp_path, planted=1, noise=40, seed=1)
        assert main(["simulate", "--spec", str(spec), "--out", str(tmp_path / "a")]) == 0
        assert main(["simulate", "--spec", str(spec), "--out", str(tmp_path / "b"),
                     "--seed", "2"]) == 0
        assert (tmp_path / "a/corpus.jsonl").read_bytes() != (
            tmp_path / "b/corpus.jsonl"
        ).read_bytes()

    def test_invalid_spec_exits_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"seed": 1, "noise_articles": -5}))
        assert main(["simulate", "--spec", str(path), "--out", str(tmp_path / "o")]) == 1
        assert "noise_articles" in capsys.readouterr().err

    def test_ground_truth_written(self, tmp_path):
        assert main(["simulate", "--spec", str(spec_file(tmp_path, planted=1, noise=10)),
                     "--out", str(tmp_path / "sim")]) == 0
        truth = json.loads((tmp_path / "sim/ground_truth.json").read_text())
        planted = [k for k, v in truth.items() if v is not None]
        noise = [k for k, v in truth.items() if v is None]
        assert len(planted) == 4 and len(noise) == 10
