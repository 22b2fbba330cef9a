import gzip
import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consortia import (
    AuthorRef,
    Corpus,
    DuplicateArticleId,
    MalformedLine,
    NegativeCitations,
    UnknownArticleId,
    dedupe_authors,
    load_corpus,
    parse_corpus,
    write_corpus,
)
from conftest import authors_from_ids, make_article


def jsonl_record(article_id="r1", n_authors=20, dup_author=None, **overrides):
    authors = [{"id": f"x{i}", "last": f"last{i}", "initial": "j"} for i in range(n_authors)]
    if dup_author is not None:
        # keep the raw count at n_authors but repeat one id
        authors[-1] = dict(authors[dup_author])
    rec = {"id": article_id, "year": 2005, "fields": ["f1"], "citations": 2, "authors": authors}
    rec.update(overrides)
    return json.dumps(rec)


class TestDedupeAuthors:
    def test_first_occurrence_wins(self):
        a1, a2, a3 = authors_from_ids(["a1", "a2", "a3"])
        assert dedupe_authors([a1, a2, a1, a3]) == [a1, a2, a3]

    def test_already_unique(self):
        refs = list(authors_from_ids(["a1", "a2", "a3"]))
        assert dedupe_authors(refs) == refs

    def test_all_duplicates(self):
        a1 = AuthorRef("a1", "n", "a")
        assert dedupe_authors([a1, a1, a1]) == [a1]

    @given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=30))
    @settings(max_examples=100)
    def test_idempotent_and_order_preserving(self, ids):
        refs = [AuthorRef(f"id-{c}", c, "a") for c in ids]
        once = dedupe_authors(refs)
        assert dedupe_authors(once) == once
        # survivors appear in their original relative order
        positions = [refs.index(r) for r in once]
        assert positions == sorted(positions)
        assert len({r.author_id for r in once}) == len(once)


class TestParseJsonl:
    def test_empty_stream(self):
        corpus, lines = parse_corpus(io.StringIO(""))
        assert len(corpus) == 0 and lines == 0

    def test_duplicate_author_id_removed(self):
        # 20 author entries with one repeated id collapse to 19 unique authors
        corpus, lines = parse_corpus(io.StringIO(jsonl_record(n_authors=20, dup_author=5)))
        assert lines == 1
        (article,) = corpus.articles
        assert len(article.authors) == 19
        assert [a.author_id for a in article.authors] == [f"x{i}" for i in range(19)]

    def test_duplicate_article_id(self):
        text = jsonl_record("X") + "\n" + jsonl_record("X")
        with pytest.raises(DuplicateArticleId) as err:
            parse_corpus(io.StringIO(text))
        assert err.value.article_id == "X"

    def test_malformed_line_names_line_number(self):
        text = jsonl_record("a") + "\n" + jsonl_record("b") + "\n{broken"
        with pytest.raises(MalformedLine) as err:
            parse_corpus(io.StringIO(text))
        assert err.value.line_no == 3
        assert "line 3" in str(err.value)

    def test_validation_error_carries_line_number(self):
        text = jsonl_record("a") + "\n" + jsonl_record("b", citations=-1)
        with pytest.raises(NegativeCitations) as err:
            parse_corpus(io.StringIO(text))
        assert "line 2" in str(err.value)

    def test_non_object_line(self):
        with pytest.raises(MalformedLine):
            parse_corpus(io.StringIO("[1, 2]"))

    def test_blank_lines_skipped(self):
        text = jsonl_record("a") + "\n\n" + jsonl_record("b") + "\n"
        corpus, lines = parse_corpus(io.StringIO(text))
        assert len(corpus) == 2
        assert lines == 3

    def test_order_preserved(self):
        text = "\n".join(jsonl_record(f"r{i}") for i in range(5))
        corpus, _ = parse_corpus(io.StringIO(text))
        assert [a.article_id for a in corpus] == [f"r{i}" for i in range(5)]

    def test_unknown_keys_ignored(self):
        rec = json.loads(jsonl_record("a"))
        rec["doi"] = "10.1/xyz"
        corpus, _ = parse_corpus(io.StringIO(json.dumps(rec)))
        assert corpus.articles[0].article_id == "a"

    def test_bytes_stream(self):
        corpus, _ = parse_corpus(io.BytesIO(jsonl_record("a").encode()))
        assert len(corpus) == 1

    def test_year_type_checked(self):
        with pytest.raises(MalformedLine):
            parse_corpus(io.StringIO(jsonl_record("a", year="2005")))


class TestParseCsv:
    HEADER = "id,year,fields,citations,authors,truncated\n"

    def test_round_trippable_row(self):
        row = 'a1,2003,f1;f2,7,x1|smith|j;x2|jones|k,true\n'
        corpus, _ = parse_corpus(io.StringIO(self.HEADER + row), fmt="csv")
        (article,) = corpus.articles
        assert article.fields == ("f1", "f2")
        assert article.truncated is True
        assert [a.author_id for a in article.authors] == ["x1", "x2"]

    def test_missing_column(self):
        with pytest.raises(MalformedLine):
            parse_corpus(io.StringIO("id,year\n1,2000\n"), fmt="csv")

    def test_bad_author_triple(self):
        with pytest.raises(MalformedLine):
            parse_corpus(io.StringIO(self.HEADER + "a1,2003,f1,0,x1|smith,\n"), fmt="csv")

    def test_author_dedupe_applies(self):
        row = "a1,2003,f1,0,x1|smith|j;x1|smith|j;x2|a|b,\n"
        corpus, _ = parse_corpus(io.StringIO(self.HEADER + row), fmt="csv")
        assert len(corpus.articles[0].authors) == 2

    def test_empty_csv(self):
        corpus, lines = parse_corpus(io.StringIO(""), fmt="csv")
        assert len(corpus) == 0 and lines == 0


class TestRoundTrip:
    def _corpus(self):
        return Corpus(
            [
                make_article("a1", [f"x{i}" for i in range(20)], year=2001, citations=5),
                make_article("a2", [f"y{i}" for i in range(3)], year=2002,
                             fields=("f1", "f2"), truncated=True),
            ]
        )

    @pytest.mark.parametrize("fmt", ["jsonl", "csv"])
    def test_write_then_parse_is_identity(self, fmt):
        corpus = self._corpus()
        buf = io.StringIO()
        write_corpus(corpus, buf, fmt=fmt)
        buf.seek(0)
        reparsed, _ = parse_corpus(buf, fmt=fmt)
        assert reparsed == corpus

    def test_gzip_round_trip(self, tmp_path):
        corpus = self._corpus()
        path = tmp_path / "corpus.jsonl.gz"
        write_corpus(corpus, path)
        with gzip.open(path, "rt") as fh:
            assert len(fh.readlines()) == 2
        loaded, lines = load_corpus(path)
        assert loaded == corpus and lines == 2

    def test_format_inferred_from_suffix(self, tmp_path):
        corpus = self._corpus()
        path = tmp_path / "corpus.csv"
        write_corpus(corpus, path, fmt="csv")
        loaded, _ = load_corpus(path)
        assert loaded == corpus


class TestCorpus:
    def test_lookup(self):
        corpus = Corpus([make_article("a", ["x"]), make_article("b", ["y"])])
        assert corpus.article("b").article_id == "b"
        assert "a" in corpus and "zz" not in corpus
        with pytest.raises(UnknownArticleId):
            corpus.article("zz")

    def test_duplicate_ids_rejected(self):
        with pytest.raises(DuplicateArticleId):
            Corpus([make_article("a", ["x"]), make_article("a", ["y"])])

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            parse_corpus(io.StringIO(""), fmt="xml")
