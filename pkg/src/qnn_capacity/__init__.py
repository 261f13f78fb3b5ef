"""Statevector quantum neural network for battery capacity-fade regression."""

__version__ = "0.1.0"

from .data import CapacityRecord, CapacitySeries, chronological_split, fit_bounds, load_csv, write_csv
from .estimator import QNNRegressor
from .metrics import mape, rmse
from .model import QnnModel, build_model, load_model, predict_batch, predict_one, save_model
from .training import TrainConfig, TrainReport, train

__all__ = [
    "CapacityRecord", "CapacitySeries", "QNNRegressor", "QnnModel", "TrainConfig",
    "TrainReport", "build_model", "chronological_split", "fit_bounds", "load_csv",
    "load_model", "mape", "predict_batch", "predict_one", "rmse", "save_model", "train",
    "write_csv",
]
