import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from combss_cpd.metrics import evaluate, f1_score, hausdorff

TRUTH = (31, 61, 91, 121)
ESTIMATE = (31, 61, 90, 91)


def test_f1_narrative_example():
    p, r, f1 = f1_score(TRUTH, ESTIMATE, 1.5)
    assert (p, r, f1) == (0.75, 0.75, 0.75)


def test_f1_perfect():
    assert f1_score(TRUTH, TRUTH, 0)[2] == 1.0


def test_f1_empty_estimate():
    assert f1_score(TRUTH, (), 3) == (0.0, 0.0, 0.0)


def test_f1_both_empty():
    assert f1_score((), (), 1)[2] == 1.0


def test_f1_one_to_one():
    # two estimates near one truth count once
    assert f1_score((50,), (49, 51), 2) == (0.5, 1.0, pytest.approx(2 / 3))


def test_hausdorff_narrative_example():
    assert hausdorff(TRUTH, ESTIMATE) == 30


def test_hausdorff_basic():
    assert hausdorff(TRUTH, TRUTH) == 0
    assert hausdorff((10,), (12,)) == 2


def test_hausdorff_empty_conventions():
    assert hausdorff((), ()) == 0
    assert math.isinf(hausdorff((5,), ()))


def test_hausdorff_directed():
    # truth side only: every truth point has an estimate within 1
    assert hausdorff((10, 20), (10, 21, 80), directed=True) == 1
    assert hausdorff((10, 20), (10, 21, 80)) == 60


def test_evaluate_standardises():
    rep = evaluate(TRUTH, ESTIMATE, 30)
    assert rep.f1 == 0.75 and rep.hausdorff == 30 and rep.hausdorff_standardized == 1.0


sets = st.lists(st.integers(1, 300), min_size=1, max_size=8, unique=True).map(sorted)


@given(sets, sets)
def test_hausdorff_symmetric(a, b):
    assert hausdorff(a, b) == hausdorff(b, a)
    assert (hausdorff(a, b) == 0) == (a == b)


@given(sets, sets, st.floats(0, 20), st.integers(-50, 50))
def test_f1_properties(a, b, tol, shift):
    p, r, f1 = f1_score(a, b, tol)
    assert 0 <= p <= 1 and 0 <= r <= 1 and 0 <= f1 <= 1
    assert f1 <= min(2 * p, 2 * r) + 1e-12
    assert f1_score([x + shift for x in a], [x + shift for x in b], tol)[2] == f1
    assert f1_score(a, b, tol + 1.0)[2] >= f1
