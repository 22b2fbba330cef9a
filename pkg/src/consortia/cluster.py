"""Consortium detection via single-linkage over an author-overlap graph.

Two qualifying articles (each with at least ``min_authors`` unique authors)
are linked when their shared-author count reaches ``min_overlap`` of the
chosen denominator. Connected components of the link graph with at least
``min_cluster_size`` members are reported as consortia, so a consortium can
evolve gradually: a chain of pairwise-linked articles stays in one cluster
even when its endpoints share fewer authors.

The fast path builds candidate pairs through an inverted index from author
id to qualifying article positions, then verifies each candidate exactly.
``brute_force_cluster`` is an independent quadratic oracle over the same
link relation, for validation on small corpora.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .ingest import Corpus
from .model import Article, ClusterParams, Consortium, OverlapMode, ValidationError

BRUTE_FORCE_GUARD = 10_000


class TooLarge(ValueError):
    """Corpus exceeds the quadratic-oracle guard."""


@dataclass(frozen=True, slots=True)
class CandidatePair:
    """Two qualifying article positions sharing at least one author."""

    a: int
    b: int
    shared: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValidationError("candidate pair requires a < b")
        if self.shared < 1:
            raise ValidationError("candidate pair requires shared >= 1")


def shared_authors(a: Article, b: Article) -> int:
    """Number of author ids the two articles have in common."""
    return len(a.author_ids() & b.author_ids())


def _overlap_fraction(min_overlap: float) -> Fraction:
    # Fraction of the decimal digits of min_overlap as written, so that a
    # 16-of-20 overlap meets a 0.8 threshold exactly, with no float boundary.
    return Fraction(str(min_overlap))


def _meets_overlap(shared: int, denominator: int, threshold: Fraction) -> bool:
    return shared * threshold.denominator >= threshold.numerator * denominator


def link_predicate(a: Article, b: Article, params: ClusterParams) -> bool:
    """True when the two articles share enough authors to be linked.

    MAX_DENOMINATOR mode tests the overlap against the larger author list,
    which guarantees both endpoints have the required fraction in common;
    MIN_DENOMINATOR tests against the smaller list. Symmetric in both modes.
    """
    shared = shared_authors(a, b)
    if params.overlap_mode is OverlapMode.MAX_DENOMINATOR:
        denominator = max(len(a.authors), len(b.authors))
    else:
        denominator = min(len(a.authors), len(b.authors))
    return _meets_overlap(shared, denominator, _overlap_fraction(params.min_overlap))


def qualifying_positions(corpus: Corpus, params: ClusterParams) -> list[int]:
    """Positions of articles with at least ``min_authors`` unique authors."""
    return [
        pos for pos, art in enumerate(corpus.articles) if len(art.authors) >= params.min_authors
    ]


def _pairs_for_range(
    positions: list[int],
    lo: int,
    hi: int,
    postings: dict[str, list[int]],
    articles,
) -> list[CandidatePair]:
    out: list[CandidatePair] = []
    for idx in range(lo, hi):
        pos = positions[idx]
        counts: dict[int, int] = {}
        for author in articles[pos].authors:
            for other in postings[author.author_id]:
                if other > pos:
                    counts[other] = counts.get(other, 0) + 1
        for other in sorted(counts):
            out.append(CandidatePair(pos, other, counts[other]))
    return out


def build_candidate_pairs(
    corpus: Corpus, params: ClusterParams, workers: int = 1
) -> list[CandidatePair]:
    """Every pair of qualifying articles sharing at least one author.

    Built via an inverted index from author id to qualifying positions, so
    disjoint articles never materialize a pair. Output is sorted by
    (a, b) and identical for any worker count.
    """
    positions = qualifying_positions(corpus, params)
    postings: dict[str, list[int]] = {}
    articles = corpus.articles
    for pos in positions:
        for author in articles[pos].authors:
            postings.setdefault(author.author_id, []).append(pos)
    if not positions:
        return []
    if workers <= 1 or len(positions) < 256:
        return _pairs_for_range(positions, 0, len(positions), postings, articles)
    chunk = max(1, (len(positions) + workers * 4 - 1) // (workers * 4))
    ranges = [(lo, min(lo + chunk, len(positions))) for lo in range(0, len(positions), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(
            lambda r: _pairs_for_range(positions, r[0], r[1], postings, articles), ranges
        )
        return [pair for part in chunks for pair in part]


class DisjointSet:
    """Union-find with path compression and union by size."""

    __slots__ = ("parent", "rank_size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank_size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank_size[ra] < self.rank_size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.rank_size[ra] += self.rank_size[rb]


def _consortium_from_positions(corpus: Corpus, members: list[int]) -> Consortium:
    articles = [corpus.articles[pos] for pos in members]
    ids = sorted(a.article_id for a in articles)
    return Consortium(
        consortium_id=ids[0],
        article_ids=tuple(ids),
        size=len(ids),
        first_year=min(a.year for a in articles),
        last_year=max(a.year for a in articles),
    )


def _emit_consortia(
    corpus: Corpus, components: list[list[int]], min_cluster_size: int
) -> list[Consortium]:
    out = [
        _consortium_from_positions(corpus, members)
        for members in components
        if len(members) >= min_cluster_size
    ]
    out.sort(key=lambda c: (-c.size, c.consortium_id))
    return out


def cluster_consortia(
    corpus: Corpus, params: ClusterParams | None = None, workers: int = 1
) -> list[Consortium]:
    """Detect consortia as connected components of the link graph.

    Candidate pairs are verified against the overlap threshold and merged
    through a sequential union-find pass over the sorted pair list, so the
    result is byte-identical across runs and worker counts. Consortia are
    returned sorted by (size descending, consortium_id ascending).
    """
    params = params or ClusterParams()
    positions = qualifying_positions(corpus, params)
    slot_of = {pos: slot for slot, pos in enumerate(positions)}
    pairs = build_candidate_pairs(corpus, params, workers=workers)
    threshold = _overlap_fraction(params.min_overlap)
    use_max = params.overlap_mode is OverlapMode.MAX_DENOMINATOR
    articles = corpus.articles
    dsu = DisjointSet(len(positions))
    for pair in pairs:
        na = len(articles[pair.a].authors)
        nb = len(articles[pair.b].authors)
        denominator = max(na, nb) if use_max else min(na, nb)
        if _meets_overlap(pair.shared, denominator, threshold):
            dsu.union(slot_of[pair.a], slot_of[pair.b])
    groups: dict[int, list[int]] = {}
    for slot, pos in enumerate(positions):
        groups.setdefault(dsu.find(slot), []).append(pos)
    return _emit_consortia(corpus, list(groups.values()), params.min_cluster_size)


def brute_force_cluster(corpus: Corpus, params: ClusterParams | None = None) -> list[Consortium]:
    """Quadratic oracle: evaluate the link predicate on every qualifying pair.

    Shares only the predicate with :func:`cluster_consortia`; candidate
    generation and component extraction are independent (direct pairwise
    evaluation plus breadth-first search). Guarded to at most
    ``BRUTE_FORCE_GUARD`` qualifying articles.
    """
    params = params or ClusterParams()
    positions = qualifying_positions(corpus, params)
    if len(positions) > BRUTE_FORCE_GUARD:
        raise TooLarge(
            f"{len(positions)} qualifying articles exceed the "
            f"{BRUTE_FORCE_GUARD}-article brute-force guard"
        )
    articles = corpus.articles
    adjacency: dict[int, list[int]] = {pos: [] for pos in positions}
    for i, pa in enumerate(positions):
        for pb in positions[i + 1 :]:
            if link_predicate(articles[pa], articles[pb], params):
                adjacency[pa].append(pb)
                adjacency[pb].append(pa)
    components: list[list[int]] = []
    visited: set[int] = set()
    for pos in positions:
        if pos in visited:
            continue
        queue = deque([pos])
        visited.add(pos)
        members = []
        while queue:
            current = queue.popleft()
            members.append(current)
            for neighbor in adjacency[current]:
                if neighbor not in visited:
                    visited.add(neighbor)
                    queue.append(neighbor)
        components.append(members)
    return _emit_consortia(corpus, components, params.min_cluster_size)
