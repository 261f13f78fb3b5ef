import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qnn_capacity.exceptions import EmptyInput, LengthMismatch, ZeroReference
from qnn_capacity.metrics import mape, metric_pair, rmse

caps = st.lists(st.floats(0.5, 3.0), min_size=1, max_size=30)


def test_rmse_hand_cases():
    assert rmse([2, 2], [2, 2]) == 0.0
    assert rmse([2, 2], [1, 3]) == 1.0
    assert rmse([2], [2.5]) == 0.5


def test_mape_hand_cases():
    assert mape([2, 2], [2, 2]) == 0.0
    assert mape([2.0, 2.0], [1.9, 2.1]) == pytest.approx(5.0, abs=1e-12)


def test_zero_reference():
    with pytest.raises(ZeroReference) as info:
        mape([1.0, 0.0], [1.0, 1.0])
    assert info.value.index == 1


def test_guards():
    with pytest.raises(LengthMismatch):
        rmse([1, 2], [1])
    with pytest.raises(EmptyInput):
        mape([], [])


def test_mape_not_symmetric():
    assert mape([1.0], [2.0]) == 100.0
    assert mape([2.0], [1.0]) == 50.0


def test_metric_pair():
    p = metric_pair([2.0, 2.0], [1.9, 2.1])
    assert p.rmse == pytest.approx(0.1)
    assert p.mape == pytest.approx(5.0)


@given(y=caps, seed=st.integers(0, 1000))
def test_rmse_symmetric(y, seed):
    y_hat = np.asarray(y) + np.random.default_rng(seed).normal(0, 0.1, len(y))
    assert rmse(y, y_hat) == rmse(y_hat, y)


@given(y=caps, seed=st.integers(0, 1000), c=st.floats(0.1, 10))
def test_scale_behaviour(y, seed, c):
    y = np.asarray(y)
    y_hat = y + np.random.default_rng(seed).normal(0, 0.1, y.size)
    assume(np.all(y_hat != 0))
    assert rmse(c * y, c * y_hat) == pytest.approx(c * rmse(y, y_hat), rel=1e-9, abs=1e-12)
    assert rmse(-c * y, -c * y_hat) == pytest.approx(c * rmse(y, y_hat), rel=1e-9, abs=1e-12)
    assert mape(c * y, c * y_hat) == pytest.approx(mape(y, y_hat), rel=1e-9, abs=1e-12)


@given(y=caps)
def test_zero_iff_equal(y):
    assert rmse(y, y) == 0 and mape(y, y) == 0
    bumped = list(y)
    bumped[0] += 0.01
    assert rmse(y, bumped) > 0 and mape(y, bumped) > 0
