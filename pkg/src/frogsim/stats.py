"""Empirical CDFs, dominance checks, total variation and summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Z95 = 1.959963984540054


class Ecdf:
    """Right-continuous empirical CDF of a finite sample."""

    def __init__(self, samples):
        values = np.sort(np.asarray(samples, dtype=np.float64).ravel())
        if values.size == 0:
            raise ValueError("ecdf of an empty sample")
        self.values = values
        self.count = values.size

    def __call__(self, x):
        return np.searchsorted(self.values, x, side="right") / self.count

    def __eq__(self, other):
        return isinstance(other, Ecdf) and np.array_equal(self.values, other.values)

    __hash__ = None


def ecdf(samples) -> Ecdf:
    return Ecdf(samples)


@dataclass(frozen=True)
class DominanceResult:
    passed: bool
    worst_gap: float
    at: float
    slack: float


def dominance_test(lower: Ecdf, upper: Ecdf, slack: float = 0.0) -> DominanceResult:
    """Check that ``upper`` stochastically dominates ``lower``.

    Passes iff ``F_upper(a) <= F_lower(a) + slack`` at every observed sample
    point ``a`` of either sample (enough for step functions).  ``worst_gap``
    is ``max_a F_upper(a) - F_lower(a)``, clipped below at 0.
    """
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    points = np.union1d(lower.values, upper.values)
    gaps = upper(points) - lower(points)
    i = int(np.argmax(gaps))
    worst = max(float(gaps[i]), 0.0)
    return DominanceResult(worst <= slack, worst, float(points[i]), slack)


def dkw_slack(m: int, n: int, delta: float = 1e-3) -> float:
    """Two-sample DKW allowance: each ECDF is within
    ``sqrt(ln(2/delta) / (2 size))`` of its CDF with probability ``1 - delta``."""
    c = math.log(2.0 / delta) / 2.0
    return math.sqrt(c / m) + math.sqrt(c / n)


def empirical_pmf(samples) -> dict[int, float]:
    values, counts = np.unique(np.asarray(samples, dtype=np.int64), return_counts=True)
    total = counts.sum()
    return {int(v): c / total for v, c in zip(values, counts)}


def _as_mapping(p) -> dict[int, float]:
    if isinstance(p, dict):
        return p
    return p.as_dict()


def tv_distance(p, q) -> float:
    """Total-variation distance between two PMFs on the integers.

    Accepts ``Pmf`` objects or ``{value: mass}`` mappings.
    """
    p, q = _as_mapping(p), _as_mapping(q)
    support = set(p) | set(q)
    return 0.5 * sum(abs(p.get(t, 0.0) - q.get(t, 0.0)) for t in support)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    variance: float
    ci_low: float
    ci_high: float
    min: float
    max: float
    variance_defined: bool = True

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count)


def summarize(samples) -> Summary:
    """Mean, unbiased variance and a normal-approximation 95% interval
    ``mean +/- 1.96 * sqrt(variance / count)``.  A single sample gets
    variance 0 with ``variance_defined=False``."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("summary of an empty sample")
    mean = float(x.mean())
    defined = x.size > 1
    var = float(x.var(ddof=1)) if defined else 0.0
    half = Z95 * math.sqrt(var / x.size)
    return Summary(int(x.size), mean, var, mean - half, mean + half,
                   float(x.min()), float(x.max()), defined)
