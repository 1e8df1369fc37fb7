import math
from fractions import Fraction

import numpy as np
import pytest

from frogsim import _kernels, exact, simulate
from frogsim._rng import as_key
from frogsim.model import ModelConfig, Rule, Variant, batch_quota

from oracles import replay_wakeup
from splitmix import below, derive


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("n", [2, 5, 23])
def test_kernel_matches_replay_oracle(n, variant):
    seed, trials = 99, 40
    got = simulate.sample_wakeup(ModelConfig(n, variant), trials, seed).values
    want = [replay_wakeup(seed, i, n, variant is Variant.SELF_LOOP) for i in range(trials)]
    assert got.tolist() == want


def reference_batch(master, trial, n, alpha, selfloop):
    """Straightforward stepping of the batch rule on the same frog streams."""
    key = derive(master, trial)
    awake = {0}
    frogs = [[0, derive(key, 0), 0]]  # position, stream, counter
    t = 0
    while len(awake) < n:
        for f in frogs:
            if selfloop:
                f[0] = below(f[1], f[2], n)
            else:
                r = below(f[1], f[2], n - 1)
                f[0] = r + 1 if r >= f[0] else r
            f[2] += 1
        hit = sorted({f[0] for f in frogs} - awake)
        quota = batch_quota(alpha, len(frogs))
        if len(hit) >= quota:
            for v in hit[:quota]:
                awake.add(v)
                frogs.append([v, derive(key, v), 0])
        t += 1
    return t


@pytest.mark.parametrize("variant", list(Variant))
def test_batch_kernel_matches_reference_stepper(variant):
    alpha, n, seed = Fraction(1, 3), 20, 4
    cfg = ModelConfig(n, variant, Rule.BATCH, alpha)
    got = simulate.sample_wakeup(cfg, 30, seed).values
    want = [reference_batch(seed, i, n, alpha, variant is Variant.SELF_LOOP) for i in range(30)]
    assert got.tolist() == want


def test_results_do_not_depend_on_chunking_or_workers(monkeypatch):
    cfg = ModelConfig(40)
    base = simulate.sample_wakeup(cfg, 5000, seed=3, workers=1).values
    (parts,) = _kernels.wakeup_times(as_key(3), 1234, 5000, 40, 0, 0, 1)
    assert np.array_equal(base[1234:], parts)
    monkeypatch.setattr(simulate, "CHUNK", 700)
    assert np.array_equal(simulate.sample_wakeup(cfg, 5000, seed=3, workers=2).values, base)


def test_worker_count(monkeypatch):
    monkeypatch.setenv(simulate.THREADS_ENV, "3")
    assert simulate.worker_count() == 3
    assert simulate.worker_count(5) == 5
    monkeypatch.delenv(simulate.THREADS_ENV)
    assert simulate.worker_count() >= 1


def test_wakeup_examples():
    assert np.all(simulate.sample_wakeup(ModelConfig(2), 10).values == 1)
    values = simulate.sample_wakeup(ModelConfig(1024), 1000, seed=1).values
    assert values.min() >= 10
    with pytest.raises(ValueError):
        simulate.sample_wakeup(ModelConfig(5), 0)


def test_infeasible_batch_rejected():
    assert not simulate.batch_feasible(3, Fraction(1))
    assert simulate.batch_feasible(4, Fraction(1))
    assert not simulate.batch_feasible(17, Fraction(1, 3))
    assert simulate.batch_feasible(5, Fraction(1, 10))
    with pytest.raises(ValueError):
        simulate.sample_wakeup(ModelConfig(3, rule=Rule.BATCH, alpha=1), 10)


def test_self_loop_mean_matches_exact():
    n, trials = 200, 40_000
    values = simulate.sample_wakeup(ModelConfig(n, Variant.SELF_LOOP), trials, seed=8).values
    se = values.std(ddof=1) / math.sqrt(trials)
    assert abs(values.mean() - exact.expected_wakeup(n, variant=Variant.SELF_LOOP)) < 4 * se


def test_trajectory_shape_and_monotonicity():
    cfg = ModelConfig(300)
    summary = simulate.trajectory(cfg, 30, 500, seed=2)
    counts = summary.counts
    assert counts.shape == (500, 31)
    assert np.all(counts[:, 0] == 1)
    assert np.all(np.diff(counts, axis=1) >= 0)
    assert np.all(counts[:, 1:] <= 2 * counts[:, :-1])
    assert np.all(counts[:, -1] == 300)
    assert np.all(summary.q05 <= summary.median) and np.all(summary.median <= summary.q95)


def test_batch_trajectory_freezes_at_half():
    cfg = ModelConfig(64, Variant.SELF_LOOP, Rule.BATCH, Fraction(1, 10))
    counts = simulate.trajectory(cfg, 200, 200, seed=1).counts
    assert np.all(counts[:, -1] >= 32)
    assert np.all(counts <= 32 + batch_quota(Fraction(1, 10), 32))


def test_cover_times():
    s = simulate.sample_cover(12, 3, trials=2000, seed=5)
    moves = s.extra["moves"]
    assert np.all(moves >= 11)
    assert np.all(s.values == (moves + 2) // 3)
    with pytest.raises(ValueError):
        simulate.sample_cover(12, 13)
    with pytest.raises(ValueError):
        simulate.sample_cover(12, 2, placement="spread")


def test_cover_integer_steps_match_ceiling_law():
    n, k, trials = 30, 5, 40_000
    steps = simulate.sample_cover(n, k, trials=trials, seed=6).values
    want = exact.geo_sum_pmf(n, k).mean()
    assert abs(steps.mean() - want) < 4 * steps.std(ddof=1) / math.sqrt(trials)


def test_bernoulli_coupling():
    rep = simulate.coupled_bernoulli([0.6, 0.7, 0.9], 0.5, 20_000, seed=1)
    assert rep.violations == 0 and rep.passed
    assert rep.x.mean() == pytest.approx(1.5, abs=0.03)
    assert rep.y.mean() == pytest.approx(2.2, abs=0.03)
    with pytest.raises(ValueError):
        simulate.coupled_bernoulli([0.6, 0.4], 0.5, 10)
    with pytest.raises(ValueError):
        simulate.coupled_bernoulli([1.5], 0.5, 10)


def test_selfloop_coupling():
    rep = simulate.coupled_selfloop(30, 5000, seed=2)
    assert rep.violations == 0 and rep.passed
    assert rep.y.mean() > rep.x.mean()


def test_phase_coupling():
    rep = simulate.coupled_phase(30, 5000, seed=3)
    assert rep.violations == 0
    assert np.all(rep.extra["tau"] <= rep.x)
    with pytest.raises(ValueError):
        simulate.coupled_phase(3, 10)


def test_batch_coupling():
    rep = simulate.coupled_batch(64, Fraction(1, 10), 3000, seed=4, tmax=30)
    assert rep.violations == 0
    assert np.all(rep.extra["batch"] <= rep.extra["full"])
    assert rep.extra["p_star"] == Fraction(1, 37)
    assert len(rep.checks) == 32
    assert rep.passed


def test_empirical_q_k1():
    q = simulate.empirical_q(10, 1, Fraction(1, 10), 20_000, seed=0)
    assert q == pytest.approx(0.9, abs=0.01)
