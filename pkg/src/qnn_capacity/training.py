"""
RMSE objective, its gradient, and the BFGS loop that fits a QnnModel.

Gradients of the readout with respect to circuit angles come from the
parameter-shift rule, which is exact here because every angle feeds exactly
one rotation gate. The output head (scale, bias) has closed-form partials.
"""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from .data import CapacitySeries
from .encoding import normalize_cycles
from .exceptions import EmptyDataset, NonFiniteLoss
from .metrics import MetricPair, metric_pair
from .model import QnnModel, batch_expectations, predict_batch

log = logging.getLogger(__name__)

SHIFT = np.pi / 2
CURVATURE_EPS = 1e-10

STOP_CONVERGED = "converged"
STOP_MAX_ITERS = "max_iters"
STOP_LINE_SEARCH = "line_search_failed"


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 200
    grad_tol: float = 1e-6
    seed: int = 0
    loss_kind: str = "RMSE"
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 40

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if self.loss_kind != "RMSE":
            raise ValueError("only the RMSE objective is supported")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")


@dataclass
class TrainReport:
    iterations: int
    loss_history: List[float]
    final_grad_norm: float
    train_rmse: float
    test_rmse: Optional[float]
    train_mape: float
    test_mape: Optional[float]
    wall_time: float
    initial_loss: float = float("nan")
    stop_reason: str = ""

    def as_dict(self, timing=True) -> dict:
        out = asdict(self)
        if not timing:
            out["wall_time"] = None
        return out


def _xy(model: QnnModel, data: CapacitySeries):
    if len(data) == 0:
        raise EmptyDataset("dataset is empty")
    x = normalize_cycles(data.cycles, model.feature_bounds)
    return x, data.capacities


def _rmse(residuals) -> float:
    return float(np.sqrt(np.mean(residuals * residuals)))


def loss(model: QnnModel, data: CapacitySeries) -> float:
    x, y = _xy(model, data)
    z = batch_expectations(model, x)[0]
    return _rmse(model.out_scale * z + model.out_bias - y)


def _shifted(model: QnnModel, x):
    """Readout at the current angles and its parameter-shift derivatives."""
    p = model.theta.size
    thetas = np.repeat(model.theta[None, :], 2 * p + 1, axis=0)
    idx = np.arange(p)
    thetas[1 + idx, idx] += SHIFT
    thetas[1 + p + idx, idx] -= SHIFT
    z = batch_expectations(model, x, thetas)
    return z[0], 0.5 * (z[1:p + 1] - z[p + 1:])


def shift_rule_jacobian(model: QnnModel, x_norm) -> np.ndarray:
    """d<Z>/d(theta_k) at each feature value, shape ``(n_params, N)``."""
    return _shifted(model, np.atleast_1d(np.asarray(x_norm, dtype=np.float64)))[1]


def _loss_and_gradient(model: QnnModel, x, y):
    p = model.theta.size
    z0, dz = _shifted(model, x)
    residuals = model.out_scale * z0 + model.out_bias - y
    value = _rmse(residuals)
    grad = np.zeros(p + 2)
    if value == 0.0:
        # exact fit: RMSE is not differentiable here, the minimum is reached
        return value, grad
    scale = 1.0 / (y.size * value)
    grad[:p] = model.out_scale * scale * (dz @ residuals)
    grad[p] = scale * (z0 @ residuals)
    grad[p + 1] = scale * residuals.sum()
    return value, grad


def gradient(model: QnnModel, data: CapacitySeries) -> np.ndarray:
    """d RMSE / d (theta..., scale, bias)."""
    x, y = _xy(model, data)
    return _loss_and_gradient(model, x, y)[1]


def finite_diff_gradient(model: QnnModel, data: CapacitySeries, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of :func:`loss`, used only as a test oracle."""
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    w = model.weights()
    out = np.empty_like(w)
    for k in range(w.size):
        up, down = w.copy(), w.copy()
        up[k] += h
        down[k] -= h
        out[k] = (loss(model.with_weights(up), data) - loss(model.with_weights(down), data)) / (2 * h)
    return out


def evaluate(model: QnnModel, data: CapacitySeries) -> MetricPair:
    return metric_pair(data.capacities, predict_batch(model, data.cycles))


def train(initial: QnnModel, train_data: CapacitySeries,
          test_data: Optional[CapacitySeries] = None, cfg: TrainConfig = TrainConfig(),
          frozen=None):
    """Fit scale, bias and circuit angles by BFGS with Armijo backtracking.

    ``frozen`` is an optional boolean mask over the flat weight vector
    (angles, then scale, then bias); masked entries keep their initial value.

    Returns ``(model, report)``. A failed line search ends training with the
    last accepted iterate instead of raising.
    """
    start = time.perf_counter()
    x, y = _xy(initial, train_data)
    model = initial
    mask = None if frozen is None else np.asarray(frozen, dtype=bool)
    if mask is not None and mask.shape != (initial.n_weights,):
        raise ValueError(f"frozen mask needs {initial.n_weights} entries, got {mask.shape}")

    def loss_grad(m):
        value, grad = _loss_and_gradient(m, x, y)
        if mask is not None:
            grad[mask] = 0.0
        return value, grad

    f, g = loss_grad(model)
    if not np.isfinite(f):
        raise NonFiniteLoss(f"initial loss is {f}")
    initial_loss = f
    w = model.weights()
    h_inv = np.eye(w.size)
    history = []
    stop = STOP_MAX_ITERS
    iterations = 0

    for _ in range(cfg.max_iters):
        if np.linalg.norm(g) < cfg.grad_tol:
            stop = STOP_CONVERGED
            break
        direction = -h_inv @ g
        slope = float(g @ direction)
        if slope >= 0:
            # inverse-Hessian estimate lost positive definiteness
            h_inv = np.eye(w.size)
            direction = -g
            slope = float(g @ direction)

        step = 1.0
        accepted = None
        for _ in range(cfg.max_backtracks + 1):
            trial = model.with_weights(w + step * direction)
            f_trial = loss(trial, train_data)
            if not np.isfinite(f_trial):
                raise NonFiniteLoss(
                    f"loss became {f_trial} at iteration {iterations + 1} (step {step:g})")
            if f_trial <= f + cfg.armijo_c * step * slope:
                accepted = trial
                break
            step *= cfg.backtrack_factor
        if accepted is None:
            stop = STOP_LINE_SEARCH
            break

        s = step * direction
        model = accepted
        w = w + s
        _, g_new = loss_grad(model)
        f = f_trial
        yk = g_new - g
        sy = float(s @ yk)
        if sy > CURVATURE_EPS:
            rho = 1.0 / sy
            left = np.eye(w.size) - rho * np.outer(s, yk)
            h_inv = left @ h_inv @ left.T + rho * np.outer(s, s)
        g = g_new
        iterations += 1
        history.append(f)
        log.debug("iter %d loss %.6e |g| %.3e step %.3g", iterations, f, np.linalg.norm(g), step)
    else:
        if np.linalg.norm(g) < cfg.grad_tol:
            stop = STOP_CONVERGED

    train_metrics = evaluate(model, train_data)
    test_metrics = evaluate(model, test_data) if test_data is not None and len(test_data) else None
    report = TrainReport(
        iterations=iterations,
        loss_history=history,
        final_grad_norm=float(np.linalg.norm(g)),
        train_rmse=train_metrics.rmse,
        test_rmse=None if test_metrics is None else test_metrics.rmse,
        train_mape=train_metrics.mape,
        test_mape=None if test_metrics is None else test_metrics.mape,
        wall_time=time.perf_counter() - start,
        initial_loss=initial_loss,
        stop_reason=stop,
    )
    return model, report
