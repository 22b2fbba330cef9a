"""Shared builders for corpus-shaped test data."""

from __future__ import annotations

import pytest

from consortia import Article, AuthorRef, Corpus


def authors_from_ids(ids, last_prefix="name-") -> tuple[AuthorRef, ...]:
    """One AuthorRef per id; last names derive from the id, initial 'a'."""
    return tuple(AuthorRef(i, f"{last_prefix}{i}", "a") for i in ids)


def make_article(article_id, ids, year=2000, fields=("f",), citations=3, truncated=False):
    return Article(
        article_id=article_id,
        year=year,
        fields=tuple(fields),
        citations=citations,
        authors=authors_from_ids(ids),
        truncated=truncated,
    )


@pytest.fixture
def trio_corpus() -> Corpus:
    """Three 20-author articles sharing 16/16/12 authors pairwise.

    Articles 1-2 and 2-3 each share 16 of 20 (80%), articles 1-3 share only
    12, so single linkage must still put all three in one cluster.
    """
    base = [f"a{i}" for i in range(1, 21)]
    fresh_b = [f"b{i}" for i in range(1, 5)]
    fresh_c = [f"c{i}" for i in range(1, 5)]
    return Corpus(
        [
            make_article("art1", base, year=2001),
            make_article("art2", base[:16] + fresh_b, year=2002),
            make_article("art3", base[:12] + fresh_b + fresh_c, year=2003),
        ]
    )
