"""Exact law of the wakeup time on the complete graph.

With ``k`` frogs awake, each frog jumps to one of ``B`` equally likely
targets (``B = n - 1`` on K_n, ``B = n`` with self-loops), ``n - k`` of which
hold a sleeping frog.  The number ``j`` of distinct sleeping vertices hit has

    p_{j,k} = C(n-k, j) / B^k * sum_{l=j..k} C(k, l) surj(l, j) a^(k-l)

where ``a = B - (n - k)`` counts the awake targets and ``surj(l, j)`` is the
number of maps from ``l`` labelled frogs onto ``j`` labelled vertices.  The
awake count is then a Markov chain on ``1..n`` absorbed at ``n``.

Two arithmetic modes are offered.  ``"rational"`` evaluates the formula above
with ``Fraction``.  ``"float"`` builds row ``k + 1`` from row ``k`` with two
positive recurrences (hand one sleeping vertex over to the awake side, then
throw one more frog), so a row costs O(width) and nothing cancels; this is
what makes ``n = 10**5`` tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .model import Variant

FLOAT_TOL = 1e-40


@lru_cache(maxsize=None)
def surjections(l: int, j: int) -> int:
    """Number of surjections from an ``l``-set onto a ``j``-set,
    ``sum_i (-1)^i C(j, i) (j - i)^l``  ( = ``j! S(l, j)`` )."""
    if l < 0 or j < 0:
        raise ValueError("arguments must be nonnegative")
    return sum((-1) ** i * math.comb(j, i) * (j - i) ** l for i in range(j + 1))


def _targets(n: int, variant: Variant) -> int:
    return n - 1 + variant.choices


def _check_nk(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n - 1, got k={k}, n={n}")


def _row_numerators(n: int, k: int, variant: Variant) -> list[int]:
    """Integer counts ``B^k p_{j,k}`` for ``j = 0..min(k, n-k)``."""
    b = _targets(n, variant)
    a = b - (n - k)
    out = []
    for j in range(min(k, n - k) + 1):
        inner = sum(
            math.comb(k, l) * surjections(l, j) * a ** (k - l) for l in range(j, k + 1)
        )
        out.append(math.comb(n - k, j) * inner)
    return out


def transition_prob(n: int, k: int, j: int, variant: Variant = Variant.SIMPLE) -> Fraction:
    """Probability that ``k`` awake frogs wake exactly ``j`` new ones."""
    _check_nk(n, k)
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j > min(k, n - k):
        return Fraction(0)
    b = _targets(n, variant)
    a = b - (n - k)
    inner = sum(math.comb(k, l) * surjections(l, j) * a ** (k - l) for l in range(j, k + 1))
    return Fraction(math.comb(n - k, j) * inner, b**k)


# --- float rows -------------------------------------------------------------


def _trim(off: int, a: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    keep = np.flatnonzero(a > tol)
    lo, hi = keep[0], keep[-1] + 1
    return off + int(lo), a[lo:hi]


def _next_row(n: int, b: int, k: int, off: int, a: np.ndarray,
              tol: float) -> tuple[int, np.ndarray]:
    """Row ``k + 1`` from row ``k`` (row 0 is the point mass at 0)."""
    big = n - k  # sleeping vertices before the hand-over
    small = big - 1
    d = off + np.arange(a.size)
    thinned = np.zeros(a.size + 1)
    # Given d hits among `big` sleeping targets, the handed-over vertex was
    # one of them with probability d / big.
    thinned[1:] += a * (big - d) / big
    thinned[:-1] += a * d / big
    off -= 1
    d = off + np.arange(thinned.size)
    hit = np.clip((small - d) / b, 0.0, 1.0)
    thrown = np.zeros(thinned.size + 1)
    thrown[:-1] += thinned * (1.0 - hit)
    thrown[1:] += thinned * hit
    return _trim(off, thrown, tol)


def iter_float_rows(n: int, variant: Variant = Variant.SIMPLE, tol: float = FLOAT_TOL,
                    start: tuple[int, int, np.ndarray] | None = None, stop: int | None = None):
    """Yield ``(k, offset, probs)`` for ``k = 1..n-1`` (or a sub-range).

    ``probs[i]`` is ``p_{offset+i, k}``; entries below ``tol`` at either end
    are dropped.  ``start`` resumes from a previously yielded row.
    """
    b = _targets(n, variant)
    stop = n - 1 if stop is None else stop
    if start is None:
        k, off, a = 0, 0, np.ones(1)
    else:
        k, off, a = start
        yield k, off, a
    while k < stop:
        off, a = _next_row(n, b, k, off, a, tol)
        k += 1
        yield k, off, a


def _iter_rows_descending(n: int, variant: Variant, tol: float):
    block = max(1, math.isqrt(n))
    checkpoints = []
    for k, off, a in iter_float_rows(n, variant, tol):
        if (k - 1) % block == 0:
            checkpoints.append((k, off, a))
    for start in reversed(checkpoints):
        rows = list(iter_float_rows(n, variant, tol, start=start,
                                    stop=min(start[0] + block - 1, n - 1)))
        yield from reversed(rows)


# --- kernels ------------------------------------------------------------------


@dataclass
class TransitionKernel:
    """Rows ``p_{., k}`` for ``k = 1..n-1``.

    ``rows[k - 1]`` is ``(offset, probs)``; in rational mode ``probs`` is a
    list of ``Fraction`` starting at ``j = 0``; in float mode it is a numpy
    array starting at ``j = offset``.
    """

    n: int
    variant: Variant
    mode: str
    rows: list

    def prob(self, k: int, j: int):
        _check_nk(self.n, k)
        off, probs = self.rows[k - 1]
        i = j - off
        if 0 <= i < len(probs):
            return probs[i]
        return Fraction(0) if self.mode == "rational" else 0.0

    def row(self, k: int) -> list:
        """Dense row over ``j = 0..min(k, n-k)``."""
        return [self.prob(k, j) for j in range(min(k, self.n - k) + 1)]

    def float_rows(self):
        for k, (off, probs) in enumerate(self.rows, start=1):
            if self.mode == "rational":
                yield k, off, np.array([float(p) for p in probs])
            else:
                yield k, off, probs


def _check_mode(mode: str) -> None:
    if mode not in ("rational", "float"):
        raise ValueError(f"mode must be 'rational' or 'float', got {mode!r}")


def transition_kernel(n: int, mode: str = "rational",
                      variant: Variant = Variant.SIMPLE) -> TransitionKernel:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    _check_mode(mode)
    rows = []
    if mode == "rational":
        denom_base = _targets(n, variant)
        for k in range(1, n):
            nums = _row_numerators(n, k, variant)
            if sum(nums) != denom_base**k:
                raise AssertionError(f"row {k} of the n={n} kernel does not sum to 1")
            rows.append((0, [Fraction(c, denom_base**k) for c in nums]))
    else:
        for k, off, a in iter_float_rows(n, variant):
            if abs(a.sum() - 1.0) > 1e-12:
                raise AssertionError(f"row {k} of the n={n} kernel does not sum to 1")
            rows.append((off, a))
    return TransitionKernel(n, variant, mode, rows)


# --- expectations -------------------------------------------------------------


def expected_sigma(n: int, mode: str = "rational", variant: Variant = Variant.SIMPLE):
    """``E[sigma_k]`` (remaining time to wake everyone from ``k`` awake),
    indexed by ``k``: entry ``k`` for ``k = 1..n``, entry 0 unused.

    Uses the hitting-time recursion
    ``E sigma_k = (1 + sum_{j>=1} p_{j,k} E sigma_{k+j}) / (1 - p_{0,k})``.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    _check_mode(mode)
    if mode == "rational":
        sigma: list = [None] * (n + 1)
        sigma[n] = Fraction(0)
        for k in range(n - 1, 0, -1):
            row = [Fraction(c, _targets(n, variant) ** k) for c in _row_numerators(n, k, variant)]
            acc = 1 + sum(row[j] * sigma[k + j] for j in range(1, len(row)))
            sigma[k] = acc / (1 - row[0])
        return sigma
    sigma = np.full(n + 1, np.nan)
    sigma[n] = 0.0
    for k, off, a in _iter_rows_descending(n, variant, FLOAT_TOL):
        js = off + np.arange(a.size)
        p0 = a[0] if off == 0 else 0.0
        move = js >= 1
        acc = 1.0 + float(np.dot(a[move], sigma[k + js[move]]))
        sigma[k] = acc / (1.0 - p0)
    return sigma


def expected_wakeup(n: int, mode: str = "float", variant: Variant = Variant.SIMPLE):
    """``E[T_n]``.

    Float mode accumulates ``sum_k P(chain visits k) / (1 - p_{0,k})`` in a
    single forward pass over the rows, so memory stays O(n).
    """
    _check_mode(mode)
    if mode == "rational":
        return expected_sigma(n, "rational", variant)[1]
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    visit = np.zeros(n + 1)
    visit[1] = 1.0
    total = 0.0
    for k, off, a in iter_float_rows(n, variant):
        p0 = a[0] if off == 0 else 0.0
        stay = visit[k] / (1.0 - p0)
        total += stay
        s = 1 if off == 0 else 0
        lo = k + off + s
        visit[lo : lo + a.size - s] += stay * a[s:]
    return total


# --- distributions ------------------------------------------------------------


@dataclass
class Pmf:
    """Masses ``masses[i] = P[X = offset + i]``; at most ``eps`` is missing."""

    offset: int
    masses: np.ndarray
    eps: float = 0.0

    @property
    def support(self) -> np.ndarray:
        return self.offset + np.arange(self.masses.size)

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def mean(self) -> float:
        return float(np.dot(self.support, self.masses))

    def as_dict(self) -> dict[int, float]:
        return {int(t): float(m) for t, m in zip(self.support, self.masses) if m > 0}


def _forward_pmf(n: int, rows, horizon: int) -> np.ndarray:
    """``P[T_n = t]`` for ``t = 0..horizon`` by pushing the law of the awake
    count through ``rows`` once, all times at a time."""
    mass = np.zeros((horizon + 1, n + 1))
    mass[0, 1] = 1.0
    for k, off, a in rows:
        x = mass[:, k]
        p0 = a[0] if off == 0 else 0.0
        # Holding at k: y_t = x_t + p0 * y_{t-1}.
        y = lfilter([1.0], [1.0, -p0], x) if p0 > 0 else x.copy()
        live = np.flatnonzero(y[:-1] > 0)
        if live.size == 0:
            continue
        lo, hi = live[0], live[-1] + 1
        s = 1 if off == 0 else 0
        c = k + off + s
        mass[lo + 1 : hi + 1, c : c + a.size - s] += np.outer(y[lo:hi], a[s:])
    return mass[:, n]


def wakeup_pmf(n: int, eps: float = 1e-9, mode: str = "float",
               variant: Variant = Variant.SIMPLE) -> Pmf:
    """Law of ``T_n`` up to the first time its CDF reaches ``1 - eps``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    _check_mode(mode)
    kernel = transition_kernel(n, mode, variant) if mode == "rational" else None
    horizon = (n - 1).bit_length() + int(4 * math.log(n) + 2 * math.log(1 / eps)) + 16
    while True:
        rows = kernel.float_rows() if kernel else iter_float_rows(n, variant)
        pmf = _forward_pmf(n, rows, horizon)
        cdf = np.cumsum(pmf)
        hit = np.flatnonzero(cdf >= 1.0 - eps)
        if hit.size:
            end = int(hit[0]) + 1
            first = int(np.flatnonzero(pmf > 0)[0])
            return Pmf(first, pmf[first:end].copy(), eps)
        horizon *= 2


def geo_sum_mean(n: int) -> Fraction:
    """``E[C_1]`` on K_n with self-loops: ``sum_{i=1}^{n-1} n / (n - i)``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return sum((Fraction(n, n - i) for i in range(1, n)), Fraction(0))


def geo_sum_pmf(n: int, k: int = 1, eps: float = 1e-12) -> Pmf:
    """Law of ``ceil(G / k)`` where ``G = sum_{i=1}^{n-1} Geometric((n-i)/n)``
    (support of each geometric starting at 1).  For ``k = 1`` this is the
    single-walker cover time on K_n with self-loops; for ``k > 1`` it is the
    cover time of ``k`` walkers in whole steps."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    length = int(n * (math.log(n) + 1) + n * math.log(n / eps)) + 16
    while True:
        x = np.zeros(length)
        x[0] = 1.0
        for i in range(1, n):
            p = (n - i) / n
            x = lfilter([0.0, p], [1.0, -(1.0 - p)], x)
        if x.sum() >= 1.0 - eps:
            break
        length *= 2
    if k > 1:
        steps = -(-np.arange(length) // k)
        x = np.bincount(steps, weights=x)
    first = int(np.flatnonzero(x > 0)[0])
    cdf = np.cumsum(x)
    end = int(np.flatnonzero(cdf >= 1.0 - eps)[0]) + 1
    return Pmf(first, x[first:end].copy(), eps)


def deterministic_recursion(n: int, tmax: int) -> np.ndarray:
    """``N(t+1) = n - (n - N(t)) exp(-N(t) / n)`` from ``N(0) = 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    out = np.empty(tmax + 1)
    out[0] = 1.0
    for t in range(tmax):
        x = out[t]
        out[t + 1] = n - (n - x) * math.exp(-x / n)
    return out


def recursion_finish_time(n: int) -> int:
    """First ``t`` at which fewer than one resident remains uninformed in the
    deterministic recursion (``N(t) > n - 1``)."""
    x, t = 1.0, 0
    while not x > n - 1:
        x = n - (n - x) * math.exp(-x / n)
        t += 1
    return t
