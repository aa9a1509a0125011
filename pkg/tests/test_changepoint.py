import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combss_cpd.changepoint import (
    DetectionResult,
    apply_merge,
    merge_close,
    restricted_ols,
    s_from_tau,
    segments_from_s,
)

from conftest import dense_restricted_rss


def spans(seg):
    return [(g.start, g.stop, g.zero_mean) for g in seg.segments]


def test_segments_all_free():
    assert spans(segments_from_s([1, 0, 1, 0])) == [(1, 2, False), (3, 4, False)]


def test_segments_zero_leading():
    assert spans(segments_from_s([0, 0, 1, 0])) == [(1, 2, True), (3, 4, False)]


def test_segments_none_selected():
    assert spans(segments_from_s([0, 0, 0])) == [(1, 3, True)]


def test_restricted_ols_exact_fit():
    res = restricted_ols([1, 1, 5, 5], [1, 0, 1, 0])
    assert res.mu_hat == [1, 1, 5, 5]
    assert res.beta_hat == [1, 4]
    assert res.rss == 0
    assert res.tau_hat == [3] and res.includes_tau0 and res.k_hat == 1


def test_restricted_ols_single_mean():
    res = restricted_ols([2, 4], [1, 0])
    assert res.mu_hat == [3, 3] and res.beta_hat == [3] and res.rss == 2


def test_restricted_ols_zero_segment():
    res = restricted_ols([1, 1, 5, 5], [0, 0, 1, 0])
    assert res.mu_hat == [0, 0, 5, 5]
    assert res.rss == 2
    assert not res.includes_tau0


def test_restricted_ols_matches_dense(rng):
    for _ in range(200):
        n = int(rng.integers(1, 31))
        y = rng.normal(size=n) * 2
        s = rng.integers(0, 2, n)
        res = restricted_ols(y, s)
        assert res.rss == pytest.approx(dense_restricted_rss(y, s), abs=1e-10)
        mu = np.array(res.mu_hat)
        prev = np.r_[0.0, mu[:-1]]
        np.testing.assert_allclose(res.beta_hat, (mu - prev)[s == 1], atol=1e-12)


def test_rss_nested_models(rng):
    y = rng.normal(size=25)
    s = np.zeros(25, dtype=int)
    last = restricted_ols(y, s).rss
    for j in rng.permutation(25):
        s[j] = 1
        cur = restricted_ols(y, s).rss
        assert cur <= last + 1e-9
        last = cur


@pytest.mark.parametrize(
    "tau, gap, expected",
    [((90, 91), 2, [90]), ((31, 61, 91), 5, [31, 61, 91]), ((10, 11, 12, 40), 3, [11, 40])],
)
def test_merge_close(tau, gap, expected):
    assert merge_close(tau, gap) == expected


@given(st.lists(st.integers(2, 500), unique=True), st.integers(1, 20))
def test_merge_idempotent_and_spaced(tau, gap):
    once = merge_close(sorted(tau), gap)
    assert merge_close(once, gap) == once
    assert all(b - a >= gap for a, b in zip(once, once[1:]))


def test_apply_merge_refits():
    y = np.r_[np.zeros(5), np.full(5, 4.0)]
    res = restricted_ols(y, s_from_tau([6, 7], 10))
    merged = apply_merge(y, res, 3)
    assert merged.tau_hat == [6] and merged.rss == pytest.approx(0.0)


def test_detection_result_json_round_trip():
    res = restricted_ols([1.0, 2.0, 6.0], [1, 0, 1], lambda_used=0.25)
    data = json.loads(res.to_json())
    assert set(data) == {
        "tau_hat", "includes_tau0", "beta_hat", "mu_hat", "rss", "lambda_used", "k_hat"
    }
    assert DetectionResult.from_dict(data) == res
