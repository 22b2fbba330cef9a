"""Domain types shared by every pipeline stage.

Every type validates its invariants at construction time;
:func:`satisfies_invariants` re-runs the same checks on an existing instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping


class ValidationError(ValueError):
    """A record violates a domain invariant.

    ``record_id`` names the offending record when one is available.
    """

    def __init__(self, message: str, record_id: str | None = None):
        self.record_id = record_id
        super().__init__(f"{record_id}: {message}" if record_id else message)


class EmptyArticleId(ValidationError):
    """Article id is missing or empty."""


class EmptyAuthors(ValidationError):
    """Article has no authors."""


class EmptyFields(ValidationError):
    """Article carries no field codes."""


class NegativeCitations(ValidationError):
    """Citation count is negative."""


class OutOfRange(ValueError):
    """A score fell outside [0, 1]."""


class InvalidSpec(ValueError):
    """A synthetic-corpus spec is inconsistent."""


def normalize_name(value: str) -> str:
    """Strip surrounding whitespace and lowercase, character by character.

    Ordering comparisons downstream are plain code-point comparisons of the
    normalized text, which is deterministic across locales and platforms.
    """
    return value.strip().lower()


@dataclass(frozen=True, slots=True)
class AuthorRef:
    """One author occurrence: opaque id plus (last name, first initial).

    Names are stored normalized (see :func:`normalize_name`); the initial is
    at most one character.
    """

    author_id: str
    last_name: str = ""
    first_initial: str = ""

    def __post_init__(self):
        if not isinstance(self.last_name, str) or not isinstance(self.first_initial, str):
            raise ValidationError("author names must be strings", record_id=str(self.author_id))
        object.__setattr__(self, "last_name", normalize_name(self.last_name))
        object.__setattr__(self, "first_initial", normalize_name(self.first_initial))
        _check_author_ref(self)


def _check_author_ref(a: AuthorRef) -> None:
    if not isinstance(a.author_id, str) or not a.author_id:
        raise ValidationError("author_id must be a non-empty string")
    if a.last_name != normalize_name(a.last_name):
        raise ValidationError("last_name is not normalized", record_id=a.author_id)
    if a.first_initial != normalize_name(a.first_initial):
        raise ValidationError("first_initial is not normalized", record_id=a.author_id)
    if len(a.first_initial) > 1:
        raise ValidationError(
            f"first_initial must be 0 or 1 characters, got {a.first_initial!r}",
            record_id=a.author_id,
        )


@dataclass(frozen=True, slots=True)
class Article:
    """One journal-article record with an ordered, id-deduplicated author list."""

    article_id: str
    year: int
    fields: tuple[str, ...]
    citations: int
    authors: tuple[AuthorRef, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "authors", tuple(self.authors))
        _check_article(self)

    def author_ids(self) -> set[str]:
        """Set of unique author ids (equal in size to ``authors``)."""
        return {a.author_id for a in self.authors}


def _check_article(a: Article) -> None:
    if not isinstance(a.article_id, str) or not a.article_id:
        raise EmptyArticleId("article_id must be a non-empty string")
    if isinstance(a.year, bool) or not isinstance(a.year, int):
        raise ValidationError("year must be an integer", record_id=a.article_id)
    if len(a.fields) == 0:
        raise EmptyFields("field list is empty", record_id=a.article_id)
    if not all(isinstance(f, str) and f for f in a.fields):
        raise ValidationError("field codes must be non-empty strings", record_id=a.article_id)
    if isinstance(a.citations, bool) or not isinstance(a.citations, int):
        raise ValidationError("citations must be an integer", record_id=a.article_id)
    if a.citations < 0:
        raise NegativeCitations(
            f"citations must be >= 0, got {a.citations}", record_id=a.article_id
        )
    if len(a.authors) == 0:
        raise EmptyAuthors("author list is empty", record_id=a.article_id)
    ids = [x.author_id for x in a.authors]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate author ids in author list", record_id=a.article_id)
    if not isinstance(a.truncated, bool):
        raise ValidationError("truncated must be a boolean", record_id=a.article_id)


class OverlapMode(str, Enum):
    """Denominator convention for the author-overlap link test."""

    MAX_DENOMINATOR = "max"
    MIN_DENOMINATOR = "min"


@dataclass(frozen=True, slots=True)
class ClusterParams:
    """Thresholds for consortium detection.

    Defaults: at least 20 unique authors per article, at least 80% shared
    authors for a link, and at least 3 articles per reported consortium.
    """

    min_authors: int = 20
    min_overlap: float = 0.8
    min_cluster_size: int = 3
    overlap_mode: OverlapMode = OverlapMode.MAX_DENOMINATOR

    def __post_init__(self):
        object.__setattr__(self, "overlap_mode", OverlapMode(self.overlap_mode))
        _check_cluster_params(self)


def _check_cluster_params(p: ClusterParams) -> None:
    if p.min_authors < 1:
        raise ValidationError("min_authors must be >= 1")
    if not (0.0 < p.min_overlap <= 1.0):
        raise ValidationError("min_overlap must lie in (0, 1]")
    if p.min_cluster_size < 1:
        raise ValidationError("min_cluster_size must be >= 1")


@dataclass(frozen=True, slots=True)
class Consortium:
    """A detected cluster of articles, stored as a sorted id tuple.

    ``consortium_id`` is the lexicographically smallest member article id,
    which is stable across runs and worker counts.
    """

    consortium_id: str
    article_ids: tuple[str, ...]
    size: int
    first_year: int
    last_year: int

    def __post_init__(self):
        object.__setattr__(self, "article_ids", tuple(self.article_ids))
        _check_consortium(self)


def _check_consortium(c: Consortium) -> None:
    if len(c.article_ids) == 0:
        raise ValidationError("consortium must contain at least one article")
    if len(set(c.article_ids)) != len(c.article_ids):
        raise ValidationError("duplicate article ids", record_id=c.consortium_id)
    if list(c.article_ids) != sorted(c.article_ids):
        raise ValidationError("article_ids must be sorted", record_id=c.consortium_id)
    if c.consortium_id != c.article_ids[0]:
        raise ValidationError(
            "consortium_id must equal the smallest member article id",
            record_id=c.consortium_id,
        )
    if c.size != len(c.article_ids):
        raise ValidationError("size must equal the member count", record_id=c.consortium_id)
    if c.first_year > c.last_year:
        raise ValidationError("first_year must not exceed last_year", record_id=c.consortium_id)


class AlphaBand(str, Enum):
    """Degree-of-alphabetical-ordering band for a score in [0, 1]."""

    CLOSE_ALPHABETICAL = "close_alphabetical"
    PARTIAL_ALPHABETICAL = "partial_alphabetical"
    CLOSE_NON_ALPHABETICAL = "close_non_alphabetical"
    ANTI_ALPHABETICAL = "anti_alphabetical"

    @classmethod
    def from_score(cls, score: float) -> "AlphaBand":
        """Band for ``score``: >=0.90 close, (0.60, 0.90) partial,
        [0.40, 0.60] close to non-alphabetical, <0.40 anti-alphabetic."""
        if not (0.0 <= score <= 1.0):
            raise OutOfRange(f"alphabetical score must lie in [0, 1], got {score!r}")
        if score >= 0.90:
            return cls.CLOSE_ALPHABETICAL
        if score > 0.60:
            return cls.PARTIAL_ALPHABETICAL
        if score >= 0.40:
            return cls.CLOSE_NON_ALPHABETICAL
        return cls.ANTI_ALPHABETICAL

    @property
    def label(self) -> str:
        return _BAND_LABELS[self]


_BAND_LABELS = {
    AlphaBand.CLOSE_ALPHABETICAL: "Close to alphabetical",
    AlphaBand.PARTIAL_ALPHABETICAL: "Partial alphabetical",
    AlphaBand.CLOSE_NON_ALPHABETICAL: "Close to non-alphabetical",
    AlphaBand.ANTI_ALPHABETICAL: "Anti-alphabetic",
}


@dataclass(frozen=True, slots=True)
class StratumStat:
    """Mean of ln(1+c) and article count for one (field, year) stratum."""

    mean_log: float
    n: int

    def __post_init__(self):
        _check_stratum_stat(self)


def _check_stratum_stat(s: StratumStat) -> None:
    if s.mean_log < 0.0:
        raise ValidationError(f"mean_log must be >= 0, got {s.mean_log}")
    if s.n < 1:
        raise ValidationError(f"stratum count must be >= 1, got {s.n}")


@dataclass(frozen=True)
class NormTable:
    """Per-(field, year) citation normalizers over a reference corpus."""

    strata: dict[tuple[str, int], StratumStat]

    def __post_init__(self):
        _check_norm_table(self)

    def get(self, field_code: str, year: int) -> StratumStat | None:
        return self.strata.get((field_code, year))

    def __contains__(self, key: tuple[str, int]) -> bool:
        return key in self.strata

    def __len__(self) -> int:
        return len(self.strata)

    def items(self):
        return self.strata.items()


def _check_norm_table(t: NormTable) -> None:
    for (field_code, year), stat in t.strata.items():
        if not isinstance(field_code, str) or not field_code:
            raise ValidationError("stratum field code must be a non-empty string")
        if isinstance(year, bool) or not isinstance(year, int):
            raise ValidationError("stratum year must be an integer")
        _check_stratum_stat(stat)


@dataclass(frozen=True, slots=True)
class ConsortiumReport:
    """Consortium joined with its impact and author-ordering summaries.

    ``per_paper_alpha`` aligns with ``consortium.article_ids``; entries are
    None for papers with no distinct consecutive author pair.
    """

    consortium: Consortium
    mnlcs: float | None
    excluded_articles: int
    alpha_mean: float | None
    alpha_band: AlphaBand | None
    per_paper_alpha: tuple[float | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_paper_alpha", tuple(self.per_paper_alpha))
        _check_consortium_report(self)


def _check_consortium_report(r: ConsortiumReport) -> None:
    if r.mnlcs is not None and r.mnlcs < 0.0:
        raise ValidationError("mnlcs must be >= 0", record_id=r.consortium.consortium_id)
    if r.excluded_articles < 0:
        raise ValidationError("excluded_articles must be >= 0", record_id=r.consortium.consortium_id)
    if (r.alpha_mean is None) != (r.alpha_band is None):
        raise ValidationError(
            "alpha_mean and alpha_band must be present or absent together",
            record_id=r.consortium.consortium_id,
        )
    if r.alpha_mean is not None and r.alpha_band is not AlphaBand.from_score(r.alpha_mean):
        raise ValidationError(
            "alpha_band does not match the band of alpha_mean",
            record_id=r.consortium.consortium_id,
        )
    if len(r.per_paper_alpha) != r.consortium.size:
        raise ValidationError(
            "per_paper_alpha must have one entry per member article",
            record_id=r.consortium.consortium_id,
        )


class OrderingPolicy(str, Enum):
    """Author-order policy for generated consortium papers."""

    FULLY_ALPHABETICAL = "fully_alphabetical"
    MIDDLE_ALPHABETICAL = "middle_alphabetical"
    RANDOM = "random"


@dataclass(frozen=True)
class CitationModel:
    """Geometric citation-count model with an optional per-year mean override."""

    mean: float = 5.0
    year_means: dict[int, float] | None = None

    def __post_init__(self):
        _check_citation_model(self)

    def mean_for(self, year: int) -> float:
        if self.year_means is not None and year in self.year_means:
            return self.year_means[year]
        return self.mean


def _check_citation_model(m: CitationModel) -> None:
    if m.mean < 0.0:
        raise InvalidSpec("citation mean must be >= 0")
    if m.year_means is not None:
        for year, mean in m.year_means.items():
            if isinstance(year, bool) or not isinstance(year, int):
                raise InvalidSpec("year_means keys must be integers")
            if mean < 0.0:
                raise InvalidSpec("year_means values must be >= 0")


@dataclass(frozen=True)
class PlantedSpec:
    """One synthetic consortium: an author pool publishing papers with churn."""

    pool_size: int
    churn_rate: float
    papers: int
    start_year: int = 2000
    papers_per_year: int = 1
    ordering_policy: OrderingPolicy = OrderingPolicy.RANDOM

    def __post_init__(self):
        object.__setattr__(self, "ordering_policy", OrderingPolicy(self.ordering_policy))
        _check_planted_spec(self)


def _check_planted_spec(p: PlantedSpec) -> None:
    if p.pool_size < 1:
        raise InvalidSpec("pool_size must be >= 1")
    if not (0.0 <= p.churn_rate < 1.0):
        raise InvalidSpec("churn_rate must lie in [0, 1)")
    if p.papers < 1:
        raise InvalidSpec("papers must be >= 1")
    if p.papers_per_year < 1:
        raise InvalidSpec("papers_per_year must be >= 1")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic corpus with planted consortia and noise articles.

    All randomness flows from ``seed``. Noise authors are drawn from a bounded
    id universe disjoint from every planted pool; ``noise_author_universe``
    defaults to max(1000, noise_articles // 2).
    """

    seed: int
    planted: tuple[PlantedSpec, ...] = ()
    noise_articles: int = 0
    noise_author_range: tuple[int, int] = (5, 10)
    citation_model: CitationModel = field(default_factory=CitationModel)
    field_pool: tuple[str, ...] = ("f1",)
    fields_per_article: int = 1
    noise_year_range: tuple[int, int] = (2000, 2018)
    noise_author_universe: int | None = None
    random_churn: bool = False

    def __post_init__(self):
        object.__setattr__(self, "planted", tuple(self.planted))
        object.__setattr__(self, "field_pool", tuple(self.field_pool))
        object.__setattr__(self, "noise_author_range", tuple(self.noise_author_range))
        object.__setattr__(self, "noise_year_range", tuple(self.noise_year_range))
        _check_synth_spec(self)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SynthSpec":
        """Build a spec from a parsed JSON object; unknown keys are ignored."""
        if not isinstance(raw, Mapping):
            raise InvalidSpec("spec must be a JSON object")
        if "seed" not in raw:
            raise InvalidSpec("spec requires a seed")
        try:
            planted = tuple(
                PlantedSpec(
                    pool_size=int(p["pool_size"]),
                    churn_rate=float(p["churn_rate"]),
                    papers=int(p["papers"]),
                    start_year=int(p.get("start_year", 2000)),
                    papers_per_year=int(p.get("papers_per_year", 1)),
                    ordering_policy=OrderingPolicy(p.get("ordering_policy", "random")),
                )
                for p in raw.get("planted", [])
            )
            cm_raw = raw.get("citation_model", {})
            year_means = cm_raw.get("year_means")
            if year_means is not None:
                year_means = {int(k): float(v) for k, v in year_means.items()}
            citation_model = CitationModel(
                mean=float(cm_raw.get("mean", 5.0)), year_means=year_means
            )
            universe = raw.get("noise_author_universe")
            return cls(
                seed=int(raw["seed"]),
                planted=planted,
                noise_articles=int(raw.get("noise_articles", 0)),
                noise_author_range=tuple(int(v) for v in raw.get("noise_author_range", (5, 10))),
                citation_model=citation_model,
                field_pool=tuple(str(f) for f in raw.get("field_pool", ("f1",))),
                fields_per_article=int(raw.get("fields_per_article", 1)),
                noise_year_range=tuple(int(v) for v in raw.get("noise_year_range", (2000, 2018))),
                noise_author_universe=None if universe is None else int(universe),
                random_churn=bool(raw.get("random_churn", False)),
            )
        except InvalidSpec:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed spec: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        cm: dict[str, Any] = {"mean": self.citation_model.mean}
        if self.citation_model.year_means is not None:
            cm["year_means"] = {str(k): v for k, v in self.citation_model.year_means.items()}
        return {
            "seed": self.seed,
            "planted": [
                {
                    "pool_size": p.pool_size,
                    "churn_rate": p.churn_rate,
                    "papers": p.papers,
                    "start_year": p.start_year,
                    "papers_per_year": p.papers_per_year,
                    "ordering_policy": p.ordering_policy.value,
                }
                for p in self.planted
            ],
            "noise_articles": self.noise_articles,
            "noise_author_range": list(self.noise_author_range),
            "citation_model": cm,
            "field_pool": list(self.field_pool),
            "fields_per_article": self.fields_per_article,
            "noise_year_range": list(self.noise_year_range),
            "noise_author_universe": self.noise_author_universe,
            "random_churn": self.random_churn,
        }


def _check_synth_spec(s: SynthSpec) -> None:
    if isinstance(s.seed, bool) or not isinstance(s.seed, int):
        raise InvalidSpec("seed must be an integer")
    for p in s.planted:
        _check_planted_spec(p)
    if s.noise_articles < 0:
        raise InvalidSpec("noise_articles must be >= 0")
    lo, hi = s.noise_author_range
    if not (1 <= lo <= hi):
        raise InvalidSpec("noise_author_range must satisfy 1 <= min <= max")
    _check_citation_model(s.citation_model)
    if len(s.field_pool) == 0:
        raise InvalidSpec("field_pool must be non-empty")
    if not (1 <= s.fields_per_article <= len(s.field_pool)):
        raise InvalidSpec("fields_per_article must lie in [1, len(field_pool)]")
    y0, y1 = s.noise_year_range
    if y0 > y1:
        raise InvalidSpec("noise_year_range must satisfy min <= max")
    if s.noise_author_universe is not None and s.noise_author_universe < hi:
        raise InvalidSpec("noise_author_universe must cover noise_author_range")


def validate_article(raw: Article | Mapping[str, Any]) -> Article:
    """Validate an article-shaped record and return an :class:`Article`.

    Accepts either an existing Article (re-checked and returned unchanged,
    so validation is idempotent) or a mapping with the ingest schema keys
    ``id, year, fields, citations, authors[, truncated]``. Author order is
    never altered.
    """
    if isinstance(raw, Article):
        _check_article(raw)
        for a in raw.authors:
            _check_author_ref(a)
        return raw
    if not isinstance(raw, Mapping):
        raise ValidationError(f"expected a mapping or Article, got {type(raw).__name__}")
    rid = raw.get("id")
    rid = "" if rid is None else str(rid)
    authors_raw = raw.get("authors") or ()
    if not isinstance(authors_raw, (list, tuple)):
        raise ValidationError("authors must be a list", record_id=rid or None)
    authors = []
    for entry in authors_raw:
        if not isinstance(entry, Mapping):
            raise ValidationError("author entries must be objects", record_id=rid or None)
        try:
            authors.append(
                AuthorRef(
                    author_id=str(entry.get("id", "")),
                    last_name=str(entry.get("last", "")),
                    first_initial=str(entry.get("initial", "")),
                )
            )
        except ValidationError as exc:
            raise type(exc)(str(exc), record_id=rid or None) from exc
    fields = raw.get("fields") or ()
    if not isinstance(fields, (list, tuple)):
        raise ValidationError("fields must be a list", record_id=rid or None)
    year = raw.get("year")
    if isinstance(year, bool) or not isinstance(year, int):
        raise ValidationError("year must be an integer", record_id=rid or None)
    citations = raw.get("citations")
    if isinstance(citations, bool) or not isinstance(citations, int):
        raise ValidationError("citations must be an integer", record_id=rid or None)
    truncated = raw.get("truncated", False)
    if not isinstance(truncated, bool):
        raise ValidationError("truncated must be a boolean", record_id=rid or None)
    return Article(
        article_id=rid,
        year=year,
        fields=tuple(str(f) for f in fields),
        citations=citations,
        authors=tuple(authors),
        truncated=truncated,
    )


_CHECKERS = {
    AuthorRef: _check_author_ref,
    Article: _check_article,
    ClusterParams: _check_cluster_params,
    Consortium: _check_consortium,
    StratumStat: _check_stratum_stat,
    NormTable: _check_norm_table,
    ConsortiumReport: _check_consortium_report,
    CitationModel: _check_citation_model,
    PlantedSpec: _check_planted_spec,
    SynthSpec: _check_synth_spec,
}


def satisfies_invariants(obj: Any) -> bool:
    """True when ``obj`` still satisfies its type's declared invariants."""
    checker = _CHECKERS.get(type(obj))
    if checker is None:
        raise TypeError(f"no invariant checks registered for {type(obj).__name__}")
    try:
        checker(obj)
    except (ValidationError, InvalidSpec):
        return False
    return True
