"""Closed-form bounds for the batch-waking argument and reference curves.

``q_{k,n}`` is the probability that ``k`` awake frogs on K_n with self-loops
visit at least ``ceil(alpha k)`` sleeping vertices in one step.  Letting the
frogs jump one at a time, the number of jumps needed is dominated by
``X = sum_{i=0}^{ceil(alpha k)} Geometric((n - k - i) / n)``, so Markov's
inequality gives ``q_{k,n} >= 1 - E[X] / k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import Variant, as_fraction, batch_quota

ASYMPTOTIC_SLOPE = 1.0 + 1.0 / math.log(2.0)
ASYMPTOTIC_INTERCEPT = 2.765


def mean_wait(n: int, k: int, alpha) -> Fraction:
    """``E[X] = sum_{i=0}^{ceil(alpha k)} n / (n - k - i)``."""
    alpha = as_fraction(alpha)
    if not 0 < alpha:
        raise ValueError("alpha must be positive")
    if k < 1:
        raise ValueError("k must be at least 1")
    m = batch_quota(alpha, k)
    if k + m >= n:
        raise ValueError(f"need k + ceil(alpha k) < n, got n={n}, k={k}, alpha={alpha}")
    return sum((Fraction(n, n - k - i) for i in range(m + 1)), Fraction(0))


def q_markov_bound(n: int, k: int, alpha) -> Fraction:
    """Lower bound on ``q_{k,n}``; may be negative (see ``bound_report``).

    For a single awake frog the exact value ``1 - 1/n`` is returned: it needs
    no estimate, and the Markov bound is vacuous there.
    """
    if k == 1:
        mean_wait(n, k, alpha)  # domain check
        return 1 - Fraction(1, n)
    return 1 - mean_wait(n, k, alpha) / k


def harmonic_chain_bound(n: int, k: int, alpha) -> Fraction:
    """``1 - n ceil(alpha k) / ((n - ceil(alpha k)) k)``, the looser closed form
    reached by bounding the harmonic sum.  Reported for comparison only: it is
    not below ``q_markov_bound`` in general."""
    m = batch_quota(as_fraction(alpha), k)
    return 1 - Fraction(n * m, (n - m) * k)


def p_star_bound(alpha) -> Fraction:
    """``1 - (alpha + 1/2) / (2/3 - alpha/2)``, uniform in ``n >= 3``, ``k < n/2``."""
    alpha = as_fraction(alpha)
    if not 0 < alpha < Fraction(1, 3):
        raise ValueError(f"alpha must lie in (0, 1/3), got {alpha}")
    return 1 - (alpha + Fraction(1, 2)) / (Fraction(2, 3) - alpha / 2)


def n_star(n: int, alpha) -> int:
    """``floor(log(n/2) / log(1 + alpha))``: successes needed to pass n/2."""
    alpha = as_fraction(alpha)
    return math.floor(math.log(n / 2) / math.log(1 + alpha))


def exact_q(n: int, k: int, alpha, mode: str = "float") -> float | Fraction:
    """Exact ``q_{k,n}`` from the self-loop transition row."""
    from .exact import iter_float_rows, transition_prob

    m = batch_quota(as_fraction(alpha), k)
    if mode == "rational":
        return sum(
            (transition_prob(n, k, j, Variant.SELF_LOOP) for j in range(m, min(k, n - k) + 1)),
            Fraction(0),
        )
    for kk, off, a in iter_float_rows(n, Variant.SELF_LOOP, stop=k):
        if kk == k:
            return float(a[max(0, m - off):].sum())
    raise ValueError(f"need 1 <= k <= n - 1, got k={k}")


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    alpha: Fraction
    mean_x: Fraction
    q_raw: Fraction
    p_star: Fraction

    @property
    def clamped(self) -> bool:
        return self.q_raw < 0

    @property
    def q_lower(self) -> Fraction:
        """Markov bound clamped to ``[0, 1]``."""
        return max(self.q_raw, Fraction(0))

    @property
    def dominates_p_star(self) -> bool:
        return self.q_raw >= self.p_star


def bound_report(n: int, k: int, alpha) -> BoundReport:
    alpha = as_fraction(alpha)
    return BoundReport(n, k, alpha, mean_wait(n, k, alpha),
                       q_markov_bound(n, k, alpha), p_star_bound(alpha))


def admissible_ks(n: int, alpha, policy: str = "all") -> list[int]:
    """``k`` with ``2 <= k < n/2`` (and ``k + ceil(alpha k) < n``).

    ``policy="ends"`` keeps only the smallest and largest such ``k``.
    """
    alpha = as_fraction(alpha)
    ks = [k for k in range(2, n) if 2 * k < n and k + batch_quota(alpha, k) < n]
    if policy == "all":
        return ks
    if policy == "ends":
        return sorted({ks[0], ks[-1]}) if ks else []
    raise ValueError(f"unknown k policy {policy!r}")


def reference_curve(n: int) -> tuple[int, float]:
    """``(ceil(log2 n), (1 + 1/ln 2) ln n + 2.765)``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return (n - 1).bit_length(), ASYMPTOTIC_SLOPE * math.log(n) + ASYMPTOTIC_INTERCEPT
