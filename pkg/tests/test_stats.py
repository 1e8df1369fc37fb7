import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frogsim import exact, simulate
from frogsim.model import ModelConfig
from frogsim.stats import dkw_slack, dominance_test, ecdf, empirical_pmf, summarize, tv_distance

samples = st.lists(st.integers(-20, 20), min_size=1, max_size=60)
pmfs = st.dictionaries(st.integers(0, 8), st.floats(0.01, 1.0), min_size=1).map(
    lambda d: {k: v / sum(d.values()) for k, v in d.items()})


def test_ecdf_values():
    f = ecdf([3, 1, 2, 2])
    assert f(0) == 0
    assert f(2) == 0.75
    assert f(10) == 1
    with pytest.raises(ValueError):
        ecdf([])


@given(samples, st.randoms())
def test_ecdf_ignores_order(xs, rnd):
    shuffled = list(xs)
    rnd.shuffle(shuffled)
    assert ecdf(sorted(xs)) == ecdf(shuffled)


@given(samples)
def test_dominance_is_reflexive(xs):
    assert dominance_test(ecdf(xs), ecdf(xs), 0).passed


def test_dominance_direction():
    small, large = ecdf([1, 2, 3]), ecdf([2, 3, 4])
    assert dominance_test(small, large).passed
    res = dominance_test(large, small)
    assert not res.passed
    assert res.worst_gap == pytest.approx(1 / 3)
    assert dominance_test(large, small, slack=0.34).passed


def test_dkw_slack():
    assert dkw_slack(10_000, 10_000) == pytest.approx(2 * math.sqrt(math.log(2000) / 20_000))


def test_tv_examples():
    assert tv_distance({1: 0.5, 2: 0.5}, {1: 0.5, 2: 0.5}) == 0
    assert tv_distance({1: 1.0}, {2: 1.0}) == 1
    assert tv_distance(exact.wakeup_pmf(2), {1: 1.0}) == 0


@given(pmfs, pmfs, pmfs)
def test_tv_symmetric_and_triangle(p, q, r):
    assert tv_distance(p, q) == pytest.approx(tv_distance(q, p))
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12


def test_empirical_pmf():
    assert empirical_pmf([1, 1, 2, 4]) == {1: 0.5, 2: 0.25, 4: 0.25}


def test_summarize_examples():
    s = summarize([5])
    assert s.mean == 5 and s.variance == 0 and not s.variance_defined
    s = summarize([1, 3])
    assert s.mean == 2 and s.variance == 2 and s.variance_defined
    assert s.ci_low < 2 < s.ci_high
    assert s.min == 1 and s.max == 3
    with pytest.raises(ValueError):
        summarize([])


def test_summary_interval_covers_exact_mean():
    values = simulate.sample_wakeup(ModelConfig(3), 200_000, seed=2).values
    s = summarize(values)
    assert s.ci_low <= 7 / 3 <= s.ci_high
    assert s.ci_high - s.ci_low == pytest.approx(2 * 1.959963984540054 * s.stderr)
    np.testing.assert_allclose(s.variance, values.var(ddof=1))
