"""State and one-step dynamics of the frog model on the complete graph.

Two graphs are supported: ``K_n`` (``Variant.SIMPLE``), where a frog moves to
one of the ``n - 1`` other vertices, and ``K_n`` with a self-loop at every
vertex (``Variant.SELF_LOOP``), where it moves to one of all ``n`` vertices.
Waking is either ``Rule.FULL`` (every visited sleeping vertex wakes) or
``Rule.BATCH`` (only when at least ``ceil(alpha * k)`` sleeping vertices are
visited, and then exactly that many, lowest index first).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit


class Variant(enum.Enum):
    SIMPLE = "simple"
    SELF_LOOP = "loop"

    @property
    def choices(self) -> int:
        """Offset added to ``n - 1`` to get the number of move targets."""
        return 1 if self is Variant.SELF_LOOP else 0


class Rule(enum.Enum):
    FULL = "full"
    BATCH = "batch"


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through their shortest repr so that ``0.1`` becomes ``1/10``
    rather than the nearest binary fraction (which would break ceilings).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def batch_quota(alpha: Fraction, k: int) -> int:
    """``ceil(alpha * k)`` computed exactly."""
    return math.ceil(alpha * k)


@dataclass(frozen=True)
class ModelConfig:
    n: int
    variant: Variant = Variant.SIMPLE
    rule: Rule = Rule.FULL
    alpha: Fraction | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.rule is Rule.BATCH:
            if self.alpha is None:
                raise ValueError("batch rule requires alpha")
            alpha = as_fraction(self.alpha)
            if not 0 < alpha <= 1:
                raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha is not None:
            object.__setattr__(self, "alpha", as_fraction(self.alpha))

    @property
    def targets(self) -> int:
        return self.n - 1 + self.variant.choices

    def quota(self, k: int) -> int:
        """Number of wakes demanded by the batch rule; 0 under the full rule."""
        if self.rule is Rule.FULL:
            return 0
        return batch_quota(self.alpha, k)

    def rational_alpha(self) -> tuple[int, int]:
        """(numerator, denominator) of alpha, (0, 1) under the full rule."""
        if self.rule is Rule.FULL:
            return 0, 1
        return self.alpha.numerator, self.alpha.denominator


@dataclass
class FrogState:
    """Awake flags per vertex plus the positions of the ``k`` awake frogs.

    ``positions`` is a length-``n`` buffer; only ``positions[:k]`` is live.
    ``awake`` uses 1 for awake and 0 for asleep.
    """

    awake: np.ndarray
    positions: np.ndarray
    k: int
    t: int = 0
    _scratch: np.ndarray = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.awake.size

    @property
    def frog_positions(self) -> np.ndarray:
        return self.positions[: self.k]

    @property
    def done(self) -> bool:
        return self.k == self.n

    def check(self, rule: Rule = Rule.FULL) -> None:
        """Assert the structural invariants; used by tests.

        Under the batch rule a frog may stand on a sleeping vertex it failed
        to wake, so the last check only applies to the full rule.
        """
        assert int(self.awake.sum()) == self.k
        assert 1 <= self.k <= self.n
        live = self.frog_positions
        assert live.size == self.k
        if rule is Rule.FULL:
            assert np.all(self.awake[live] == 1)


@dataclass(frozen=True)
class StepOutcome:
    woken: int
    visited_sleeping: int


def new_state(config: ModelConfig) -> FrogState:
    n = config.n
    if n < 2:
        raise ValueError("n must be at least 2")
    awake = np.zeros(n, dtype=np.int8)
    awake[0] = 1
    positions = np.zeros(n, dtype=np.int64)
    return FrogState(awake, positions, 1, 0, np.empty(n, dtype=np.int64))


@njit(cache=True)
def select_wakes(awake, dests, k, quota, buf):
    """Apply a waking rule to the landing sites ``dests[:k]``.

    Distinct sleeping sites are collected into ``buf`` in frog order.  With
    ``quota == 0`` all of them wake; otherwise the lowest ``quota`` wake if at
    least ``quota`` were visited and none wake if fewer were.  Newly woken
    vertices are left in ``buf[:woken]`` and flagged in ``awake``.
    Returns ``(woken, visited)``.
    """
    cnt = 0
    for i in range(k):
        v = dests[i]
        if awake[v] == 0:
            awake[v] = 2
            buf[cnt] = v
            cnt += 1
    if quota == 0:
        woken = cnt
    elif cnt >= quota:
        buf[:cnt].sort()
        woken = quota
    else:
        woken = 0
    for i in range(cnt):
        awake[buf[i]] = 1 if i < woken else 0
    return woken, cnt


def _draw_moves(positions: np.ndarray, n: int, variant: Variant, rng) -> np.ndarray:
    if variant is Variant.SELF_LOOP:
        return rng.integers(0, n, size=positions.size)
    r = rng.integers(0, n - 1, size=positions.size)
    return r + (r >= positions)


def step(state: FrogState, config: ModelConfig, rng: np.random.Generator) -> StepOutcome:
    """Advance ``state`` by one time unit in place.

    All awake frogs move simultaneously; frogs woken during this step stay on
    their own vertex until the next one.
    """
    k = state.k
    if k >= config.n:
        raise RuntimeError("cannot step a fully awake state")
    if state._scratch is None:
        state._scratch = np.empty(config.n, dtype=np.int64)
    dests = _draw_moves(state.positions[:k], config.n, config.variant, rng)
    state.positions[:k] = dests
    woken, visited = select_wakes(
        state.awake, state.positions, k, config.quota(k), state._scratch
    )
    state.positions[k : k + woken] = state._scratch[:woken]
    state.k = k + woken
    state.t += 1
    return StepOutcome(int(woken), int(visited))


def run(config: ModelConfig, rng: np.random.Generator, tmax: int | None = None) -> list[int]:
    """Step from the initial state until all frogs are awake (or ``tmax``).

    Returns the trajectory ``[N_0, N_1, ...]``.
    """
    state = new_state(config)
    counts = [state.k]
    while not state.done and (tmax is None or state.t < tmax):
        step(state, config, rng)
        counts.append(state.k)
    return counts


def rumor_step(k: int, n: int, rng: np.random.Generator) -> int:
    """One round of push gossip: each of the ``k`` informed residents calls one
    of the other ``n - 1`` residents uniformly.  Residents ``0..k-1`` are the
    informed ones (labels are exchangeable).  Returns the new informed count.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        return n
    callers = np.arange(k)
    r = rng.integers(0, n - 1, size=k)
    callees = r + (r >= callers)
    return k + int(np.unique(callees[callees >= k]).size)


def walkers_step(
    positions: np.ndarray, visited: np.ndarray, variant: Variant, rng: np.random.Generator
) -> np.ndarray:
    """Move every walker once (in place) and mark the landing sites visited."""
    if positions.size == 0:
        raise ValueError("need at least one walker")
    n = visited.size
    positions[:] = _draw_moves(positions, n, variant, rng)
    visited[positions] = True
    return visited
