"""Monte Carlo harness: wakeup times, trajectories, cover times and the
per-path couplings behind the stochastic dominance relations.

Trials are reproducible and order independent: trial ``i`` of a run seeded
with ``seed`` only uses the SplitMix64 stream ``derive(seed, i)`` (see
``frogsim._rng``).  Work is split into fixed chunks which may be farmed out to
worker processes; the merge is ordered, so the output never depends on the
worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rng import as_key
from .model import ModelConfig, Rule, Variant, as_fraction, batch_quota
from .stats import dkw_slack, dominance_test, ecdf

CHUNK = 1 << 14
THREADS_ENV = "FROGSIM_THREADS"


def worker_count(workers: int | None = None) -> int:
    """Explicit value, else ``$FROGSIM_THREADS``, else the CPU count."""
    if workers is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, workers)


def _call(name, master, start, stop, args):
    return getattr(_kernels, name)(master, start, stop, *args)


def _run(name: str, seed: int, trials: int, args: tuple, workers: int | None = None):
    if trials < 1:
        raise ValueError("trials must be at least 1")
    master = as_key(seed)
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    nworkers = min(worker_count(workers), len(bounds))
    if nworkers == 1:
        parts = [_call(name, master, a, b, args) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            futures = [pool.submit(_call, name, master, a, b, args) for a, b in bounds]
            parts = [f.result() for f in futures]
    return tuple(np.concatenate([p[j] for p in parts]) for j in range(len(parts[0])))


def _mode(variant: Variant) -> int:
    return 1 if variant is Variant.SELF_LOOP else 0


def log2_ceil(n: int) -> int:
    return (n - 1).bit_length()


@dataclass
class SampleSet:
    values: np.ndarray
    n: int
    seed: int
    kind: str
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.size == 0:
            raise ValueError("empty sample set")


@dataclass
class CouplingReport:
    """Paired samples ``(x, y)`` for a claim ``x <= y``.

    ``violations`` counts paths where the per-path ordering failed (for the
    distributional claims it counts failed dominance checks).  ``checks``
    holds named distributional checks, each a ``DominanceResult``.
    """

    claim: str
    trials: int
    violations: int
    x: np.ndarray
    y: np.ndarray
    checks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and all(c.passed for c in self.checks.values())


def batch_feasible(n: int, alpha) -> bool:
    """Whether the batch rule can reach ``n`` awake frogs.

    From ``k`` awake the batch rule only ever moves to ``k + ceil(alpha k)``,
    so the reachable counts form a fixed sequence; the run is stuck if some
    reachable ``k < n`` demands more wakes than there are sleeping frogs.
    """
    alpha = as_fraction(alpha)
    k = 1
    while k < n:
        m = batch_quota(alpha, k)
        if m > n - k:
            return False
        k += m
    return True


def sample_wakeup(config: ModelConfig, trials: int, seed: int | None = None,
                  workers: int | None = None) -> SampleSet:
    """Wakeup times of ``trials`` independent runs."""
    seed = config.seed if seed is None else seed
    if config.rule is Rule.BATCH and not batch_feasible(config.n, config.alpha):
        raise ValueError(
            f"batch rule with alpha={config.alpha} cannot wake all {config.n} frogs"
        )
    a_num, a_den = config.rational_alpha()
    (values,) = _run("wakeup_times", seed, trials,
                     (config.n, _mode(config.variant), a_num, a_den), workers)
    return SampleSet(values, config.n, seed, "wakeup", _config_echo(config))


def _config_echo(config: ModelConfig) -> dict:
    return {
        "n": config.n,
        "variant": config.variant.value,
        "rule": config.rule.value,
        "alpha": None if config.alpha is None else str(config.alpha),
    }


@dataclass
class TrajectorySummary:
    t: np.ndarray
    mean: np.ndarray
    q05: np.ndarray
    median: np.ndarray
    q95: np.ndarray
    counts: np.ndarray = field(repr=False)


def trajectory(config: ModelConfig, tmax: int, trials: int, seed: int | None = None,
               workers: int | None = None, stop_k: int | None = None) -> TrajectorySummary:
    """Per-time summary of ``N_t`` for ``t = 0..tmax``.

    Batch runs stop (and stay frozen) at ``ceil(n/2)`` awake frogs unless
    ``stop_k`` says otherwise; full runs stop at ``n``.
    """
    if tmax < 0:
        raise ValueError("tmax must be nonnegative")
    seed = config.seed if seed is None else seed
    if stop_k is None:
        stop_k = (config.n + 1) // 2 if config.rule is Rule.BATCH else config.n
    a_num, a_den = config.rational_alpha()
    (counts,) = _run("trajectories", seed, trials,
                     (config.n, _mode(config.variant), a_num, a_den, stop_k, tmax), workers)
    q05, med, q95 = np.quantile(counts, [0.05, 0.5, 0.95], axis=0)
    return TrajectorySummary(np.arange(tmax + 1), counts.mean(axis=0), q05, med, q95, counts)


def sample_cover(n: int, k: int, variant: Variant = Variant.SELF_LOOP,
                 placement: str = "single", trials: int = 1000, seed: int = 0,
                 workers: int | None = None) -> SampleSet:
    """Cover times ``C_k`` of ``k`` walkers started together at one vertex.

    ``placement`` may be ``"single"`` or ``"adversarial"``; on the complete
    graph the worst start is all walkers on one vertex, so both coincide.
    ``extra["moves"]`` holds the number of individual walker moves up to the
    covering one, i.e. the cover time measured in units of ``1/k`` step.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if placement not in ("single", "adversarial"):
        raise ValueError(f"unknown placement {placement!r}")
    steps, moves = _run("cover_times", seed, trials,
                        (n, k, variant is Variant.SELF_LOOP), workers)
    return SampleSet(steps, n, seed, "cover",
                     {"n": n, "walkers": k, "variant": variant.value, "placement": placement},
                     {"moves": moves})


def coupled_bernoulli(qs, p: float, trials: int, seed: int = 0,
                      workers: int | None = None, delta: float = 1e-3) -> CouplingReport:
    """Shared-uniform coupling of ``sum Ber(q_i)`` and ``Bin(t, p)``."""
    qs = np.asarray(qs, dtype=np.float64)
    if qs.ndim != 1 or qs.size == 0:
        raise ValueError("qs must be a nonempty sequence")
    if not (np.all(qs >= 0) and np.all(qs <= 1) and 0 <= p <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if not np.all(qs > p):
        raise ValueError("every q_i must exceed p")
    x, y = _run("bernoulli_pairs", seed, trials, (qs, float(p)), workers)
    # X is the dominating variable here, Y = Bin(t, p) the dominated one.
    checks = {"ecdf": dominance_test(ecdf(y), ecdf(x), dkw_slack(trials, trials, delta))}
    return CouplingReport("I", trials, int(np.sum(x < y)), y, x, checks)


def coupled_selfloop(n: int, trials: int, seed: int = 0,
                     workers: int | None = None, delta: float = 1e-3) -> CouplingReport:
    """``(T_n, T_n°)`` per path; K_n frogs follow their self-loop partners."""
    if n < 2:
        raise ValueError("n must be at least 2")
    x, y = _run("selfloop_pairs", seed, trials, (n,), workers)
    checks = {"ecdf": dominance_test(ecdf(x), ecdf(y), dkw_slack(trials, trials, delta))}
    return CouplingReport("II", trials, int(np.sum(x > y)), x, y, checks)


def coupled_phase(n: int, trials: int, seed: int = 0,
                  workers: int | None = None) -> CouplingReport:
    """``(T_n, tau_{n/2} + C_{n/2})`` per path on K_n."""
    if n < 4:
        raise ValueError("n must be at least 4")
    x, y, taus = _run("phase_pairs", seed, trials, (n,), workers)
    violations = int(np.sum(x > y)) + int(np.sum(taus > x))
    return CouplingReport("III", trials, violations, x, y, extra={"tau": taus})


def coupled_batch(n: int, alpha, trials: int, seed: int = 0, tmax: int = 50,
                  p_star=None, workers: int | None = None,
                  delta: float = 1e-3) -> CouplingReport:
    """Batch rule against the full rule on K_n with self-loops.

    Per path: ``N_t(batch) <= N_t(full)`` for every ``t <= tmax`` (``x`` and
    ``y`` hold the two hitting times of ceil(n/2), which inherit the order).
    Distributional: ``(1+alpha)^S_t`` with ``S_t ~ Bin(t, p_star)`` is
    dominated by ``N_t(batch)`` at each ``t``, and ``tau_{n/2}(batch)`` is
    dominated by a sum of ``n*`` Geometric(``p_star``) variables.
    """
    from .bounds import n_star, p_star_bound

    alpha = as_fraction(alpha)
    if n < 3:
        raise ValueError("n must be at least 3")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    p = as_fraction(p_star if p_star is not None else p_star_bound(alpha))
    if not 0 < p <= 1:
        raise ValueError(f"p_star must lie in (0, 1], got {p}")
    half = (n + 1) // 2
    k = 1
    while k < half:
        if batch_quota(alpha, k) > n - k:
            raise ValueError("batch rule cannot reach n/2 for these parameters")
        k += batch_quota(alpha, k)
    nstar = n_star(n, alpha)
    nb, nf, succ, tau_b, tau_f, geo = _run(
        "batch_pairs", seed, trials,
        (n, alpha.numerator, alpha.denominator, tmax, p.numerator, p.denominator, nstar),
        workers,
    )
    violations = int(np.sum(np.any(nb > nf, axis=1)))
    slack = dkw_slack(trials, trials, delta)
    growth = float(1 + alpha) ** succ.astype(np.float64)
    checks = {}
    for t in range(tmax + 1):
        checks[f"N_{t}"] = dominance_test(ecdf(growth[:, t]), ecdf(nb[:, t]), slack)
    checks["tau"] = dominance_test(ecdf(tau_b), ecdf(geo), slack)
    return CouplingReport(
        "V", trials, violations, tau_f, tau_b, checks,
        {"batch": nb, "full": nf, "successes": succ, "geo_sum": geo,
         "n_star": nstar, "p_star": p},
    )


def empirical_q(n: int, k: int, alpha, trials: int, seed: int = 0,
                workers: int | None = None) -> float:
    """Monte Carlo estimate of the probability that ``k`` awake frogs on K_n
    with self-loops visit at least ``ceil(alpha k)`` sleeping vertices."""
    quota = batch_quota(as_fraction(alpha), k)
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    (hits,) = _run("batch_success", seed, trials, (n, k, quota), workers)
    return float(hits.mean())


__all__ = [
    "CouplingReport",
    "SampleSet",
    "TrajectorySummary",
    "batch_feasible",
    "coupled_batch",
    "coupled_bernoulli",
    "coupled_phase",
    "coupled_selfloop",
    "empirical_q",
    "log2_ceil",
    "sample_cover",
    "sample_wakeup",
    "trajectory",
    "worker_count",
]
