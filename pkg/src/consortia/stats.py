"""Summary statistics: Spearman correlation, band tallies, size histogram.

Spearman rho is the Pearson correlation of average (fractional) ranks.
Ranks and moments are carried in exact rational arithmetic; when the
variance product is a perfect rational square (always true without ties)
the returned rho is the correctly rounded float of an exact rational, so
untied small-n results match the classic 1 - 6*sum(d^2)/(n(n^2-1)) formula
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

from scipy.stats import t as student_t

from .model import AlphaBand, Consortium, ConsortiumReport


class LengthMismatch(ValueError):
    """Input vectors differ in length."""


class TooShort(ValueError):
    """Fewer usable observations than the statistic requires."""


class ConstantInput(ValueError):
    """A vector has no variation, so ranks carry no information."""


@dataclass(frozen=True, slots=True)
class SpearmanResult:
    rho: float
    p: float
    n: int


def _average_ranks(values: Sequence[float]) -> list[Fraction]:
    # Average fractional ranks; a tie run over positions i..j (0-based)
    # receives rank (i + j + 2) / 2.
    n = len(values)
    order = sorted(range(n), key=lambda idx: values[idx])
    ranks: list[Fraction] = [Fraction(0)] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = Fraction(i + j + 2, 2)
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _rank_moments(x: Sequence[float], y: Sequence[float]):
    n = len(x)
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    mean = Fraction(n + 1, 2)
    dx = [r - mean for r in rx]
    dy = [r - mean for r in ry]
    cov = sum(a * b for a, b in zip(dx, dy))
    var_x = sum(a * a for a in dx)
    var_y = sum(b * b for b in dy)
    return dx, dy, cov, var_x, var_y


def _exact_sqrt(value: Fraction) -> Fraction | None:
    num_root = math.isqrt(value.numerator)
    den_root = math.isqrt(value.denominator)
    if num_root * num_root == value.numerator and den_root * den_root == value.denominator:
        return Fraction(num_root, den_root)
    return None


def _check_inputs(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise LengthMismatch(f"got {len(x)} x values and {len(y)} y values")
    if len(x) < 3:
        raise TooShort(f"need at least 3 observations, got {len(x)}")
    if all(v == x[0] for v in x):
        raise ConstantInput("x is constant")
    if all(v == y[0] for v in y):
        raise ConstantInput("y is constant")


def spearman(x: Sequence[float], y: Sequence[float], method: str = "t-approx") -> SpearmanResult:
    """Spearman rank correlation with a two-sided p-value.

    ``method="t-approx"`` uses t = rho * sqrt((n-2)/(1-rho^2)) with n-2
    degrees of freedom. ``method="exact"`` enumerates all permutations of
    one vector (n <= 8) and reports the exact two-sided tail probability.
    """
    _check_inputs(x, y)
    n = len(x)
    dx, dy, cov, var_x, var_y = _rank_moments(x, y)
    product_root = _exact_sqrt(var_x * var_y)
    if product_root is not None:
        rho = float(cov / product_root)
    else:
        rho = float(cov) / math.sqrt(float(var_x * var_y))
    rho = max(-1.0, min(1.0, rho))
    if method == "exact":
        p = _permutation_p(dx, dy, cov)
    elif method == "t-approx":
        p = _t_approx_p(rho, n)
    else:
        raise ValueError(f"unknown method {method!r}; expected 't-approx' or 'exact'")
    return SpearmanResult(rho=rho, p=p, n=n)


def _t_approx_p(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return 0.0
    t_stat = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * student_t.sf(abs(t_stat), n - 2))


def _permutation_p(dx, dy, cov: Fraction) -> float:
    # |rho_perm| >= |rho_obs| reduces to cov_perm^2 >= cov_obs^2 because the
    # rank variances are permutation-invariant. Ranks are half-integers, so
    # doubling the deviations makes every covariance an exact integer.
    n = len(dx)
    if n > 8:
        raise ValueError("exact permutation p-value is limited to n <= 8")
    ix = [int(2 * d) for d in dx]
    iy = [int(2 * d) for d in dy]
    target = (4 * cov) ** 2
    if target.denominator != 1:
        raise AssertionError("scaled covariance must be an integer")
    target_sq = target.numerator
    hits = 0
    total = 0
    for perm in permutations(iy):
        total += 1
        cov_perm = sum(a * b for a, b in zip(ix, perm))
        if cov_perm * cov_perm >= target_sq:
            hits += 1
    return hits / total


@dataclass(frozen=True, slots=True)
class CorrelationSummary:
    """Correlations of consortium MNLCS against first year and size.

    A correlation is None when its inputs are degenerate; ``notes`` says
    why. ``small_sample`` flags n below 10.
    """

    year_vs_mnlcs: SpearmanResult | None
    size_vs_mnlcs: SpearmanResult | None
    n_used: int
    n_excluded: int
    notes: tuple[str, ...]

    @property
    def small_sample(self) -> bool:
        return self.n_used < 10


def correlate_consortia(reports: Iterable[ConsortiumReport]) -> CorrelationSummary:
    """Spearman correlations over consortia with a present MNLCS.

    Pairs each consortium's first publication year, then its size, with its
    MNLCS. Raises :class:`TooShort` below 3 usable reports; constant inputs
    surface as an absent correlation with a diagnostic note.
    """
    reports = list(reports)
    usable = [r for r in reports if r.mnlcs is not None]
    return _correlate(usable, excluded=len(reports) - len(usable))


def _correlate(usable: list[ConsortiumReport], excluded: int) -> CorrelationSummary:
    if len(usable) < 3:
        raise TooShort(f"need at least 3 consortia with an MNLCS, got {len(usable)}")
    mnlcs_values = [r.mnlcs for r in usable]
    notes: list[str] = []
    results: dict[str, SpearmanResult | None] = {}
    for name, xs in (
        ("year_vs_mnlcs", [float(r.consortium.first_year) for r in usable]),
        ("size_vs_mnlcs", [float(r.consortium.size) for r in usable]),
    ):
        try:
            results[name] = spearman(xs, mnlcs_values)
        except ConstantInput as exc:
            results[name] = None
            notes.append(f"{name} unavailable: {exc}")
    return CorrelationSummary(
        year_vs_mnlcs=results["year_vs_mnlcs"],
        size_vs_mnlcs=results["size_vs_mnlcs"],
        n_used=len(usable),
        n_excluded=excluded,
        notes=tuple(notes),
    )


@dataclass(frozen=True, slots=True)
class BandTally:
    consortium_count: int
    paper_count: int


def tally_bands(
    reports: Iterable[ConsortiumReport], paper_bands: str = "per_paper"
) -> dict[AlphaBand, BandTally]:
    """Counts of consortia and papers per ordering band.

    Each consortium counts once by its mean-score band. With
    ``paper_bands="per_paper"`` each scored paper counts by its own band;
    with ``"consortium"`` papers inherit their consortium's band.
    """
    if paper_bands not in ("per_paper", "consortium"):
        raise ValueError(f"unknown paper_bands mode {paper_bands!r}")
    consortium_counts = {band: 0 for band in AlphaBand}
    paper_counts = {band: 0 for band in AlphaBand}
    for report in reports:
        if report.alpha_band is not None:
            consortium_counts[report.alpha_band] += 1
        for score in report.per_paper_alpha:
            if score is None:
                continue
            if paper_bands == "per_paper":
                paper_counts[AlphaBand.from_score(score)] += 1
            elif report.alpha_band is not None:
                paper_counts[report.alpha_band] += 1
    return {
        band: BandTally(consortium_counts[band], paper_counts[band]) for band in AlphaBand
    }


@dataclass(frozen=True)
class SizeHistogram:
    """Count of consortia per member-count, with log-log points for plotting."""

    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def log_points(self) -> list[tuple[float, float]]:
        return [
            (math.log10(size), math.log10(count))
            for size, count in sorted(self.counts.items())
        ]


def size_distribution(consortia: Iterable[Consortium]) -> SizeHistogram:
    """Exact count of consortia at each size."""
    counts: dict[int, int] = {}
    for consortium in consortia:
        counts[consortium.size] = counts.get(consortium.size, 0) + 1
    return SizeHistogram(dict(sorted(counts.items())))
