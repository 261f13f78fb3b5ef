"""scikit-learn compatible wrapper around the QNN regression pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import CapacitySeries, fit_bounds
from .model import build_model, predict_batch
from .training import TrainConfig, train


def _cycles_column(X):
    cycles = X[:, 0]
    if not np.all(np.isfinite(cycles)) or not np.all(cycles == np.round(cycles)):
        raise ValueError("cycle counts must be integers")
    if np.any(cycles < 1):
        raise ValueError("cycle counts must be >= 1")
    return cycles.astype(np.int64)


class QNNRegressor(RegressorMixin, BaseEstimator):
    """Quantum-circuit regressor of capacity against cycle count.

    ``X`` holds a single column of integer cycle numbers (unique during
    ``fit``) and ``y`` the measured capacities in Ah. Cycles outside the
    range seen in ``fit`` are clamped to its end points at prediction time.

    Parameters
    ----------
    n_qubits, depth : int
        Width and number of layers of the trainable circuit.
    encoding : {"arc", "simple"}
        Angle-encoding scheme for the normalized cycle.
    readout_qubit : int or None
        Qubit whose Z expectation feeds the output head. ``None`` picks
        qubit 1 when there are at least two qubits, else qubit 0.
    max_iters, grad_tol, armijo_c, backtrack_factor, max_backtracks
        BFGS settings, see :class:`qnn_capacity.training.TrainConfig`.
    random_state : int
        Seed for the initial circuit angles.
    """

    def __init__(self, n_qubits=4, depth=3, encoding="arc", readout_qubit=None,
                 max_iters=200, grad_tol=1e-6, armijo_c=1e-4, backtrack_factor=0.5,
                 max_backtracks=40, random_state=0):
        self.n_qubits = n_qubits
        self.depth = depth
        self.encoding = encoding
        self.readout_qubit = readout_qubit
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.armijo_c = armijo_c
        self.backtrack_factor = backtrack_factor
        self.max_backtracks = max_backtracks
        self.random_state = random_state

    def _config(self):
        return TrainConfig(max_iters=self.max_iters, grad_tol=self.grad_tol,
                           seed=self.random_state, armijo_c=self.armijo_c,
                           backtrack_factor=self.backtrack_factor,
                           max_backtracks=self.max_backtracks)

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single cycle column, got {X.shape[1]} features")
        cycles = _cycles_column(X)
        if np.unique(cycles).size != cycles.size:
            raise ValueError("cycle counts must be unique")
        series = CapacitySeries.from_arrays(cycles, y, battery_id="fit")
        initial = build_model(self.n_qubits, self.depth, fit_bounds(series),
                              mode=self.encoding, seed=self.random_state,
                              capacities=series.capacities, readout_qubit=self.readout_qubit)
        self.model_, self.report_ = train(initial, series, None, self._config())
        self.loss_curve_ = list(self.report_.loss_history)
        self.n_iter_ = self.report_.iterations
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} feature, got {X.shape[1]}")
        return np.asarray(predict_batch(self.model_, X[:, 0]), dtype=np.float64)
