import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from riskpath.errors import EmptySamples, InvalidParams
from riskpath.quantile import TheoremBounds, clopper_pearson, dkw_gamma, empirical_quantile, order_rank


def test_hand_sorted_example():
    assert empirical_quantile([5, 1, 4, 2, 3], 0.9) == 5
    assert empirical_quantile([5, 1, 4, 2, 3], 0.2) == 1
    assert empirical_quantile([5, 1, 4, 2, 3], 0.0) == 1
    assert empirical_quantile([5, 1, 4, 2, 3], 1.0) == 5


def test_constant_samples():
    assert empirical_quantile([2.5] * 17, 0.37) == 2.5


def test_uniform_quantiles():
    rng = np.random.default_rng(0)
    x = rng.random(10**5)
    assert abs(empirical_quantile(x, 0.95) - 0.95) < 0.01
    y = rng.random(10**4)
    for q in (0.8, 0.9, 0.95):
        assert abs(empirical_quantile(y, q) - q) <= 0.02


def test_rank_absorbs_float_error():
    # 0.9 * 10_000 is 9000.000000000002 in floating point
    assert order_rank(0.9, 10_000) == 9000
    assert order_rank(1 - 3 * 0.1 / 100, 10_000) == 9970


def test_neg_inf_handling():
    assert empirical_quantile([-np.inf] * 4, 0.5) == -np.inf
    assert empirical_quantile([-np.inf, 1.0, 2.0], 0.3) == -np.inf
    assert empirical_quantile([-np.inf, 1.0, 2.0], 0.9) == 2.0


def test_rejections():
    with pytest.raises(EmptySamples):
        empirical_quantile([], 0.5)
    with pytest.raises(InvalidParams):
        empirical_quantile([1.0, np.inf], 0.5)
    with pytest.raises(InvalidParams):
        empirical_quantile([1.0, np.nan], 0.5)
    with pytest.raises(InvalidParams):
        empirical_quantile([1.0], 1.5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.floats(0, 1), st.floats(0, 1))
def test_quantile_properties(xs, l1, l2):
    lo, hi = sorted((l1, l2))
    q_lo, q_hi = empirical_quantile(xs, lo), empirical_quantile(xs, hi)
    assert q_lo <= q_hi
    assert q_hi in xs
    n = len(xs)
    assert sum(x <= q_hi for x in xs) >= math.ceil(hi * n - 1e-9)


def test_dkw_gamma_values():
    g = dkw_gamma(4, 10**4, 5, 0.05)
    assert abs(g - 0.0896) < 1e-4
    assert math.isclose(dkw_gamma(4, 4 * 10**4, 5, 0.05), g / 2)
    seq = [dkw_gamma(10, n, 100, 0.05) for n in (10, 100, 10**3, 10**5, 10**8)]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    with pytest.raises(InvalidParams):
        dkw_gamma(4, 0, 5, 0.05)


def test_theorem_bounds_clamped():
    b = TheoremBounds.compute(0.1, 13, 100, 100, 0.05)
    assert b.lower_level == 0.0
    assert math.isclose(b.upper_level, 0.905)


def test_clopper_pearson_examples():
    assert clopper_pearson(0, 100)[0] == 0.0
    assert clopper_pearson(50, 50)[1] == 1.0
    lo, hi = clopper_pearson(8977, 10**4)
    assert abs(lo - 0.8915) < 1e-3 and abs(hi - 0.9035) < 1e-3


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2000), st.data())
def test_clopper_pearson_against_beta(N, data):
    k = data.draw(st.integers(0, N))
    lo, hi = clopper_pearson(k, N)
    blo = 0.0 if k == 0 else stats.beta.ppf(0.025, k, N - k + 1)
    bhi = 1.0 if k == N else stats.beta.ppf(0.975, k + 1, N - k)
    assert abs(lo - blo) < 1e-7 and abs(hi - bhi) < 1e-7
    assert lo <= k / N <= hi


def test_clopper_pearson_width_shrinks():
    widths = [np.subtract(*clopper_pearson(9 * m, 10 * m)[::-1]) for m in (10, 100, 1000)]
    assert widths[0] > widths[1] > widths[2]


def test_clopper_pearson_rejects():
    with pytest.raises(InvalidParams):
        clopper_pearson(5, 4)
