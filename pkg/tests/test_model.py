import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consortia import (
    AlphaBand,
    Article,
    AuthorRef,
    ClusterParams,
    Consortium,
    ConsortiumReport,
    EmptyArticleId,
    EmptyAuthors,
    EmptyFields,
    InvalidSpec,
    NegativeCitations,
    OrderingPolicy,
    OutOfRange,
    PlantedSpec,
    SynthSpec,
    ValidationError,
    normalize_name,
    satisfies_invariants,
    validate_article,
)
from conftest import authors_from_ids, make_article


def record(n_authors=20, **overrides):
    base = {
        "id": "rec1",
        "year": 2005,
        "fields": ["f1"],
        "citations": 3,
        "authors": [
            {"id": f"x{i}", "last": f"Last{i}", "initial": "J"} for i in range(n_authors)
        ],
    }
    base.update(overrides)
    return base


class TestValidateArticle:
    def test_empty_authors_rejected(self):
        with pytest.raises(EmptyAuthors) as err:
            validate_article(record(authors=[]))
        assert "rec1" in str(err.value)

    def test_negative_citations_rejected(self):
        with pytest.raises(NegativeCitations) as err:
            validate_article(record(citations=-1))
        assert "rec1" in str(err.value)

    def test_empty_fields_rejected(self):
        with pytest.raises(EmptyFields):
            validate_article(record(fields=[]))

    def test_empty_article_id_rejected(self):
        with pytest.raises(EmptyArticleId):
            validate_article(record(id=""))

    def test_well_formed_record_passes_through(self):
        article = validate_article(record(n_authors=20))
        assert article.article_id == "rec1"
        assert len(article.authors) == 20
        assert article.citations == 3
        # author order untouched
        assert [a.author_id for a in article.authors] == [f"x{i}" for i in range(20)]

    def test_idempotent(self):
        once = validate_article(record())
        twice = validate_article(once)
        assert once == twice

    def test_duplicate_author_ids_rejected(self):
        bad = record()
        bad["authors"][3] = dict(bad["authors"][0])
        with pytest.raises(ValidationError):
            validate_article(bad)

    def test_truncated_defaults_false(self):
        assert validate_article(record()).truncated is False
        assert validate_article(record(truncated=True)).truncated is True

    @given(
        st.builds(
            record,
            n_authors=st.integers(min_value=1, max_value=8),
            citations=st.integers(min_value=0, max_value=50),
            year=st.integers(min_value=1900, max_value=2100),
        )
    )
    @settings(max_examples=50)
    def test_idempotence_property(self, raw):
        article = validate_article(raw)
        assert validate_article(article) == article


class TestAuthorRef:
    def test_names_normalized(self):
        ref = AuthorRef("a1", "  SMITH ", " J ")
        assert ref.last_name == "smith"
        assert ref.first_initial == "j"

    def test_empty_id_rejected(self):
        with pytest.raises(ValidationError):
            AuthorRef("")

    def test_long_initial_rejected(self):
        with pytest.raises(ValidationError):
            AuthorRef("a1", "smith", "jo")

    def test_empty_names_allowed(self):
        ref = AuthorRef("a1")
        assert ref.last_name == "" and ref.first_initial == ""

    def test_normalize_name(self):
        assert normalize_name("  McGregor\t") == "mcgregor"


class TestArticle:
    def test_duplicate_authors_rejected(self):
        with pytest.raises(ValidationError):
            Article("a", 2000, ("f",), 0, authors_from_ids(["x", "y", "x"]))

    def test_bool_year_rejected(self):
        with pytest.raises(ValidationError):
            Article("a", True, ("f",), 0, authors_from_ids(["x"]))

    def test_coerces_sequences_to_tuples(self):
        art = Article("a", 2000, ["f"], 0, list(authors_from_ids(["x"])))
        assert isinstance(art.fields, tuple) and isinstance(art.authors, tuple)


class TestClusterParams:
    def test_defaults(self):
        p = ClusterParams()
        assert (p.min_authors, p.min_overlap, p.min_cluster_size) == (20, 0.8, 3)
        assert p.overlap_mode.value == "max"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"min_authors": 0},
            {"min_overlap": 0.0},
            {"min_overlap": 1.2},
            {"min_cluster_size": 0},
        ],
    )
    def test_bounds(self, kwargs):
        with pytest.raises(ValidationError):
            ClusterParams(**kwargs)

    def test_overlap_of_one_allowed(self):
        assert ClusterParams(min_overlap=1.0).min_overlap == 1.0


class TestConsortium:
    def test_valid(self):
        c = Consortium("a", ("a", "b", "c"), 3, 2000, 2005)
        assert satisfies_invariants(c)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"consortium_id": "b"},
            {"size": 2},
            {"first_year": 2010},
        ],
    )
    def test_invariants(self, kwargs):
        base = dict(
            consortium_id="a", article_ids=("a", "b", "c"), size=3, first_year=2000, last_year=2005
        )
        base.update(kwargs)
        with pytest.raises(ValidationError):
            Consortium(**base)

    def test_unsorted_ids_rejected(self):
        with pytest.raises(ValidationError):
            Consortium("a", ("b", "a"), 2, 2000, 2001)


class TestConsortiumReport:
    def _consortium(self):
        return Consortium("a", ("a", "b", "c"), 3, 2000, 2005)

    def test_band_must_match_mean(self):
        with pytest.raises(ValidationError):
            ConsortiumReport(
                consortium=self._consortium(),
                mnlcs=1.0,
                excluded_articles=0,
                alpha_mean=0.95,
                alpha_band=AlphaBand.PARTIAL_ALPHABETICAL,
                per_paper_alpha=(1.0, 0.9, 0.95),
            )

    def test_absent_scores_allowed(self):
        rep = ConsortiumReport(
            consortium=self._consortium(),
            mnlcs=None,
            excluded_articles=3,
            alpha_mean=None,
            alpha_band=None,
            per_paper_alpha=(None, None, None),
        )
        assert satisfies_invariants(rep)

    def test_per_paper_length_checked(self):
        with pytest.raises(ValidationError):
            ConsortiumReport(
                consortium=self._consortium(),
                mnlcs=1.0,
                excluded_articles=0,
                alpha_mean=None,
                alpha_band=None,
                per_paper_alpha=(None,),
            )


class TestAlphaBand:
    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            AlphaBand.from_score(1.5)
        with pytest.raises(OutOfRange):
            AlphaBand.from_score(-0.1)

    def test_labels_cover_all_bands(self):
        assert len({band.label for band in AlphaBand}) == 4


class TestSynthSpec:
    def test_round_trip(self):
        spec = SynthSpec(
            seed=9,
            planted=(
                PlantedSpec(pool_size=20, churn_rate=0.1, papers=5,
                            ordering_policy=OrderingPolicy.FULLY_ALPHABETICAL),
            ),
            noise_articles=10,
        )
        assert SynthSpec.from_dict(spec.to_dict()) == spec

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"noise_articles": -1},
            {"noise_author_range": (0, 5)},
            {"noise_author_range": (6, 5)},
            {"fields_per_article": 2},
            {"noise_year_range": (2010, 2000)},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSpec):
            SynthSpec(seed=1, **kwargs)

    def test_planted_churn_bounds(self):
        with pytest.raises(InvalidSpec):
            PlantedSpec(pool_size=20, churn_rate=1.0, papers=3)

    def test_from_dict_requires_seed(self):
        with pytest.raises(InvalidSpec):
            SynthSpec.from_dict({})

    def test_from_dict_ignores_unknown_keys(self):
        spec = SynthSpec.from_dict({"seed": 3, "surprise": True})
        assert spec.seed == 3


class TestSatisfiesInvariants:
    def test_detects_tampering(self):
        article = make_article("a", [f"x{i}" for i in range(3)])
        assert satisfies_invariants(article)
        object.__setattr__(article, "citations", -2)
        assert not satisfies_invariants(article)

    def test_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            satisfies_invariants("not a model type")
