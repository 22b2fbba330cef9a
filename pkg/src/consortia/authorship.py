"""Alphabetical author-ordering scores and their bands.

A paper's score is the proportion of consecutive author pairs with distinct
(last name, first initial) keys that appear in ascending key order. Equal
keys are never counted as pairs, so repeated surnames do not dilute the
score, and a paper whose consecutive keys are all identical has no score.
A long random author list scores 0.5 on average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import Corpus
from .model import AlphaBand, AuthorRef, Consortium, OutOfRange

__all__ = [
    "OutOfRange",
    "ConsortiumAlpha",
    "order_key",
    "alpha_pair_counts",
    "alpha_score",
    "classify_alpha",
    "consortium_alpha",
]


def order_key(author: AuthorRef) -> tuple[str, str]:
    """Sort key: normalized last name, then normalized first initial.

    Comparison is by code points of the normalized text; an empty initial
    sorts before any non-empty one.
    """
    return (author.last_name, author.first_initial)


def alpha_pair_counts(authors: Sequence[AuthorRef]) -> tuple[int, int]:
    """(distinct consecutive pairs, pairs in strictly ascending order)."""
    distinct = 0
    in_order = 0
    for current, following in zip(authors, authors[1:]):
        key_a = order_key(current)
        key_b = order_key(following)
        if key_a == key_b:
            continue
        distinct += 1
        if key_a < key_b:
            in_order += 1
    return distinct, in_order


def alpha_score(authors: Sequence[AuthorRef]) -> float | None:
    """Fraction of distinct consecutive pairs in ascending order.

    None when no consecutive pair has differing keys. The list is expected
    to be id-deduplicated already (the same list clustering uses).
    """
    distinct, in_order = alpha_pair_counts(authors)
    if distinct == 0:
        return None
    return in_order / distinct


def classify_alpha(score: float) -> AlphaBand:
    """Band of a score in [0, 1]; raises :class:`OutOfRange` otherwise."""
    return AlphaBand.from_score(score)


@dataclass(frozen=True, slots=True)
class ConsortiumAlpha:
    """Per-consortium ordering summary; ``per_paper`` aligns with member ids."""

    alpha_mean: float | None
    band: AlphaBand | None
    per_paper: tuple[float | None, ...]


def consortium_alpha(consortium: Consortium, corpus: Corpus) -> ConsortiumAlpha:
    """Mean per-paper score across the consortium and its band.

    Papers without a score are skipped in the mean; the summary is absent
    when no member paper has one.
    """
    per_paper = tuple(
        alpha_score(corpus.article(article_id).authors) for article_id in consortium.article_ids
    )
    present = [score for score in per_paper if score is not None]
    if not present:
        return ConsortiumAlpha(alpha_mean=None, band=None, per_paper=per_paper)
    mean = math.fsum(present) / len(present)
    return ConsortiumAlpha(alpha_mean=mean, band=classify_alpha(mean), per_paper=per_paper)
