"""Synthetic corpora with planted consortia, noise articles, and ground truth.

Each planted consortium is an author pool that publishes a sequence of
papers. Paper 1 carries the full pool; each later paper replaces
floor(churn_rate * pool_size) members of the previous paper's author set
with fresh ids that are never reused anywhere else, so a churn rate below
1 - min_overlap keeps consecutive papers linked and the whole sequence in
one detected cluster. Noise articles draw author sets from a bounded,
pool-disjoint id universe and are inert unless they qualify by size.

Generation is a pure function of the spec: per-consortium generators are
seeded independently from the top-level seed, so output is byte-identical
across runs.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping

from .authorship import order_key
from .ingest import Corpus
from .model import (
    Article,
    AuthorRef,
    CitationModel,
    Consortium,
    InvalidSpec,
    OrderingPolicy,
    PlantedSpec,
    SynthSpec,
)

_LOWER = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GroundTruth:
    """Which planted consortium, if any, produced each article."""

    assignments: dict[str, int | None]

    def planted_groups(self) -> dict[int, set[str]]:
        groups: dict[int, set[str]] = {}
        for article_id, index in self.assignments.items():
            if index is not None:
                groups.setdefault(index, set()).add(article_id)
        return groups

    def to_dict(self) -> dict[str, int | None]:
        return dict(self.assignments)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "GroundTruth":
        return cls({str(k): (None if v is None else int(v)) for k, v in raw.items()})


@dataclass(frozen=True)
class SynthResult:
    corpus: Corpus
    truth: GroundTruth


@dataclass(frozen=True, slots=True)
class DetectionMetrics:
    """Recovery quality of a detection run against planted ground truth."""

    recall: float
    merges: int
    splits: int
    spurious: int


def _child_rng(seed: int, label: str) -> random.Random:
    digest = hashlib.blake2b(f"{seed}:{label}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _random_last_name(rng: random.Random) -> str:
    return "".join(rng.choice(_LOWER) for _ in range(rng.randint(4, 9)))


def _draw_citations(rng: random.Random, model: CitationModel, year: int) -> int:
    mean = model.mean_for(year)
    if mean <= 0.0:
        return 0
    success = 1.0 / (mean + 1.0)
    u = rng.random()
    return int(math.log(1.0 - u) / math.log(1.0 - success))


def _draw_fields(rng: random.Random, spec: SynthSpec) -> tuple[str, ...]:
    if spec.fields_per_article == 1 and len(spec.field_pool) == 1:
        return spec.field_pool
    if spec.fields_per_article == 1:
        return (rng.choice(spec.field_pool),)
    return tuple(rng.sample(spec.field_pool, spec.fields_per_article))


def _order_authors(
    members: list[AuthorRef], policy: OrderingPolicy, rng: random.Random
) -> list[AuthorRef]:
    if policy is OrderingPolicy.FULLY_ALPHABETICAL:
        return sorted(members, key=order_key)
    if policy is OrderingPolicy.MIDDLE_ALPHABETICAL:
        ordered = sorted(members, key=order_key)
        if len(ordered) < 7:
            return ordered
        # Head and tail carry designated members placed against key order
        # (the main-author positions); the middle stays sorted.
        head = ordered[-3:][::-1]
        tail = ordered[:2][::-1]
        return head + ordered[2:-3] + tail
    shuffled = list(members)
    rng.shuffle(shuffled)
    return shuffled


def _generate_planted(
    index: int, planted: PlantedSpec, spec: SynthSpec
) -> list[Article]:
    rng = _child_rng(spec.seed, f"planted:{index}")
    next_author = 0

    def fresh_author() -> AuthorRef:
        nonlocal next_author
        author = AuthorRef(
            author_id=f"p{index:04d}.{next_author:05d}",
            last_name=_random_last_name(rng),
            first_initial=rng.choice(_LOWER),
        )
        next_author += 1
        return author

    current = [fresh_author() for _ in range(planted.pool_size)]
    # Exact decimal floor: 0.3 * 10 must replace 3 members, never 2.
    replace_n = int(Fraction(str(planted.churn_rate)) * planted.pool_size)
    articles = []
    for paper_no in range(planted.papers):
        if paper_no > 0 and replace_n > 0:
            if spec.random_churn:
                victims = set(rng.sample(range(len(current)), replace_n))
                current = [a for i, a in enumerate(current) if i not in victims]
            else:
                doomed = {
                    a.author_id
                    for a in sorted(current, key=lambda a: a.author_id)[-replace_n:]
                }
                current = [a for a in current if a.author_id not in doomed]
            current.extend(fresh_author() for _ in range(replace_n))
        year = planted.start_year + paper_no // planted.papers_per_year
        articles.append(
            Article(
                article_id=f"c{index:04d}-{paper_no:04d}",
                year=year,
                fields=_draw_fields(rng, spec),
                citations=_draw_citations(rng, spec.citation_model, year),
                authors=tuple(_order_authors(current, planted.ordering_policy, rng)),
            )
        )
    return articles


def _noise_author(universe_index: int, cache: dict[int, AuthorRef]) -> AuthorRef:
    author = cache.get(universe_index)
    if author is None:
        # Arithmetic name derivation keeps the big-universe path allocation-light.
        scrambled = (universe_index * 2654435761) & 0xFFFFFFFF
        letters = []
        for _ in range(6):
            letters.append(_LOWER[scrambled % 26])
            scrambled //= 26
        cache[universe_index] = author = AuthorRef(
            author_id=f"x{universe_index:07d}",
            last_name="".join(letters),
            first_initial=_LOWER[(universe_index * 11) % 26],
        )
    return author


def generate_corpus(spec: SynthSpec) -> SynthResult:
    """Materialize a spec into a corpus plus ground-truth assignments.

    Article order is planted consortia in spec order (papers in sequence),
    then noise articles. Identical spec implies byte-identical output.
    """
    if not isinstance(spec, SynthSpec):
        raise InvalidSpec(f"expected SynthSpec, got {type(spec).__name__}")
    articles: list[Article] = []
    assignments: dict[str, int | None] = {}
    for index, planted in enumerate(spec.planted):
        for article in _generate_planted(index, planted, spec):
            articles.append(article)
            assignments[article.article_id] = index
    if spec.noise_articles:
        rng = _child_rng(spec.seed, "noise")
        lo, hi = spec.noise_author_range
        y0, y1 = spec.noise_year_range
        universe = spec.noise_author_universe
        if universe is None:
            universe = max(1000, spec.noise_articles // 2)
        cache: dict[int, AuthorRef] = {}
        for noise_no in range(spec.noise_articles):
            size = rng.randint(lo, hi)
            authors = tuple(
                _noise_author(u, cache) for u in rng.sample(range(universe), size)
            )
            year = rng.randint(y0, y1)
            article = Article(
                article_id=f"noise-{noise_no:06d}",
                year=year,
                fields=_draw_fields(rng, spec),
                citations=_draw_citations(rng, spec.citation_model, year),
                authors=authors,
            )
            articles.append(article)
            assignments[article.article_id] = None
    return SynthResult(corpus=Corpus(articles), truth=GroundTruth(assignments))


def evaluate_detection(
    detected: Iterable[Consortium], truth: GroundTruth
) -> DetectionMetrics:
    """Score detected consortia against the planted assignment.

    A planted consortium is recovered when exactly one detected consortium
    contains its articles and that consortium contains nothing else. Merges
    count detected consortia spanning two or more planted ones; splits count
    planted consortia spread over two or more detected ones; spurious counts
    detected consortia made only of noise.
    """
    planted_groups = truth.planted_groups()
    detected_sets = [set(c.article_ids) for c in detected]
    merges = 0
    spurious = 0
    touched_by: dict[int, list[int]] = {index: [] for index in planted_groups}
    for det_no, members in enumerate(detected_sets):
        indices = {
            truth.assignments.get(article_id) for article_id in members
        } - {None}
        if len(indices) >= 2:
            merges += 1
        if not indices:
            spurious += 1
        for index in indices:
            if index in touched_by:
                touched_by[index].append(det_no)
    splits = sum(1 for hits in touched_by.values() if len(hits) >= 2)
    recovered = 0
    for index, group in planted_groups.items():
        hits = touched_by[index]
        if len(hits) == 1 and detected_sets[hits[0]] == group:
            recovered += 1
    recall = recovered / len(planted_groups) if planted_groups else 1.0
    return DetectionMetrics(recall=recall, merges=merges, splits=splits, spurious=spurious)


def write_ground_truth(truth: GroundTruth, dest: str | Path) -> None:
    with open(dest, "w", encoding="utf-8") as fh:
        json.dump(truth.to_dict(), fh, indent=0, sort_keys=True)
        fh.write("\n")


def read_ground_truth(source: str | Path) -> GroundTruth:
    with open(source, "r", encoding="utf-8") as fh:
        return GroundTruth.from_dict(json.load(fh))
