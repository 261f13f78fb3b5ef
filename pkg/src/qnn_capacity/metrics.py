"""Regression error metrics: RMSE (Ah) and MAPE (percent)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyInput, LengthMismatch, ZeroReference


@dataclass(frozen=True)
class MetricPair:
    rmse: float
    mape: float

    def as_dict(self):
        return {"rmse": self.rmse, "mape": self.mape}


def _pair(y, y_hat):
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise LengthMismatch(f"{y.size} references vs {y_hat.size} predictions")
    if y.size == 0:
        raise EmptyInput("metrics need at least one value")
    return y, y_hat


def rmse(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    return float(np.sqrt(np.mean((y - y_hat) ** 2)))


def mape(y, y_hat) -> float:
    """Mean of ``|y - y_hat| / y`` times 100. References must be non-zero."""
    y, y_hat = _pair(y, y_hat)
    zeros = np.flatnonzero(y == 0)
    if zeros.size:
        raise ZeroReference(int(zeros[0]))
    return float(np.mean(np.abs(y - y_hat) / y) * 100.0)


def metric_pair(y, y_hat) -> MetricPair:
    return MetricPair(rmse(y, y_hat), mape(y, y_hat))
