from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frogsim import _rng
from frogsim.model import (
    ModelConfig,
    Rule,
    Variant,
    as_fraction,
    batch_quota,
    new_state,
    rumor_step,
    run,
    select_wakes,
    step,
    walkers_step,
)

from splitmix import below, derive


def test_splitmix_matches_reference_stream():
    # first output of the canonical SplitMix64 generator seeded with 0
    assert int(_rng.derive(np.uint64(0), 0)) == 0xE220A8397B1DCDAF
    for key in (0, 1, 12345, (1 << 64) - 1):
        for i in (0, 1, 7, 1000):
            assert int(_rng.derive(np.uint64(key), i)) == derive(key, i)
            assert int(_rng.below(np.uint64(key), i, 17)) == below(key, i, 17)


def test_as_key_rejects_negative_seed():
    with pytest.raises(ValueError):
        _rng.as_key(-1)


def test_as_fraction_is_exact_for_decimal_floats():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("1/10") == Fraction(1, 10)
    assert batch_quota(as_fraction(0.1), 10) == 1
    assert batch_quota(Fraction(1, 10), 11) == 2


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(1)
    with pytest.raises(ValueError):
        ModelConfig(5, rule=Rule.BATCH)
    with pytest.raises(ValueError):
        ModelConfig(5, rule=Rule.BATCH, alpha=2)
    with pytest.raises(ValueError):
        ModelConfig(5, seed=-3)
    cfg = ModelConfig(5, Variant.SELF_LOOP, Rule.BATCH, 0.1)
    assert cfg.alpha == Fraction(1, 10)
    assert cfg.targets == 5
    assert ModelConfig(5).targets == 4
    assert cfg.quota(11) == 2
    assert ModelConfig(5).quota(11) == 0


def test_initial_state():
    state = new_state(ModelConfig(6))
    state.check()
    assert state.k == 1 and state.t == 0
    assert list(state.frog_positions) == [0]
    assert not state.done


def test_n2_wakes_in_one_step():
    rng = np.random.default_rng(0)
    assert run(ModelConfig(2), rng) == [1, 2]


def test_step_on_full_state_raises():
    cfg = ModelConfig(2)
    state = new_state(cfg)
    step(state, cfg, np.random.default_rng(1))
    assert state.done
    with pytest.raises(RuntimeError):
        step(state, cfg, np.random.default_rng(1))


def test_select_wakes_full_and_batch():
    awake = np.array([1, 1, 0, 0, 0, 0], dtype=np.int8)
    dests = np.array([5, 3, 5], dtype=np.int64)
    buf = np.empty(6, dtype=np.int64)
    woken, visited = select_wakes(awake.copy(), dests, 3, 0, buf)
    assert (woken, visited) == (2, 2)

    a = awake.copy()
    woken, visited = select_wakes(a, dests, 3, 1, buf)
    assert (woken, visited) == (1, 2)
    assert buf[0] == 3  # lowest index wins
    assert list(a) == [1, 1, 0, 1, 0, 0]

    a = awake.copy()
    woken, visited = select_wakes(a, dests, 3, 3, buf)
    assert (woken, visited) == (0, 2)
    assert list(a) == list(awake)


def test_self_loop_moves_can_stay_and_simple_moves_cannot():
    rng = np.random.default_rng(3)
    cfg = ModelConfig(3)
    for _ in range(200):
        state = new_state(cfg)
        step(state, cfg, rng)
        assert state.k == 2
    cfg = ModelConfig(3, Variant.SELF_LOOP)
    stays = 0
    for _ in range(300):
        state = new_state(cfg)
        step(state, cfg, rng)
        stays += state.k == 1
    assert 60 < stays < 140  # about a third


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 40),
    seed=st.integers(0, 2**32),
    variant=st.sampled_from(list(Variant)),
    alpha=st.sampled_from([None, Fraction(1, 10), Fraction(1, 3), Fraction(1, 2)]),
)
def test_step_invariants(n, seed, variant, alpha):
    rule = Rule.FULL if alpha is None else Rule.BATCH
    cfg = ModelConfig(n, variant, rule, alpha)
    rng = np.random.default_rng(seed)
    state = new_state(cfg)
    for _ in range(200):
        if state.done:
            break
        k = state.k
        quota = cfg.quota(k)
        if quota > n - k:
            break
        out = step(state, cfg, rng)
        state.check(rule)
        assert out.woken <= out.visited_sleeping <= k
        assert state.k == k + out.woken <= 2 * k
        if rule is Rule.BATCH:
            assert out.woken in (0, quota)
            assert (out.woken == quota) == (out.visited_sleeping >= quota)


def test_newly_woken_frogs_sit_on_their_vertex():
    cfg = ModelConfig(30)
    rng = np.random.default_rng(11)
    state = new_state(cfg)
    while not state.done:
        k = state.k
        step(state, cfg, rng)
        new = state.positions[k : state.k]
        assert len(set(new.tolist())) == new.size
        assert np.all(state.awake[new] == 1)


def test_rumor_step():
    rng = np.random.default_rng(0)
    assert all(rumor_step(1, n, rng) == 2 for n in (2, 3, 10, 1000))
    assert rumor_step(5, 5, rng) == 5
    for _ in range(100):
        k = rumor_step(3, 20, rng)
        assert 3 <= k <= 6
    with pytest.raises(ValueError):
        rumor_step(0, 5, rng)


def test_walkers_step_marks_visits():
    rng = np.random.default_rng(0)
    visited = np.zeros(10, dtype=bool)
    visited[0] = True
    pos = np.zeros(4, dtype=np.int64)
    walkers_step(pos, visited, Variant.SIMPLE, rng)
    assert np.all(pos != 0)
    assert np.all(visited[pos])
    with pytest.raises(ValueError):
        walkers_step(np.zeros(0, dtype=np.int64), visited, Variant.SIMPLE, rng)
