"""Angle encoding of the (normalized) cycle count into an input circuit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateBounds, FeatureOutOfRange
from .statevector import Circuit, MAX_QUBITS, ry, rz

ARC = "arc"
SIMPLE = "simple"
MODES = (ARC, SIMPLE)

_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class FeatureBounds:
    min_cycle: float
    max_cycle: float

    def __post_init__(self):
        if self.min_cycle == self.max_cycle:
            raise DegenerateBounds(f"min_cycle == max_cycle == {self.min_cycle}")
        if self.min_cycle > self.max_cycle:
            raise ValueError(f"min_cycle {self.min_cycle} > max_cycle {self.max_cycle}")


@dataclass(frozen=True)
class EncodingSpec:
    n_qubits: int
    mode: str = ARC

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        mode = str(self.mode).lower()
        if mode not in MODES:
            raise ValueError(f"encoding mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)


def normalize_cycles(cycles, bounds: FeatureBounds) -> np.ndarray:
    """Vectorized :func:`normalize_cycle`."""
    lo, hi = float(bounds.min_cycle), float(bounds.max_cycle)
    if lo == hi:
        raise DegenerateBounds(f"min_cycle == max_cycle == {lo}")
    x = 2.0 * (np.asarray(cycles, dtype=np.float64) - lo) / (hi - lo) - 1.0
    return np.clip(x, -1.0, 1.0)


def normalize_cycle(cycle, bounds: FeatureBounds) -> float:
    """Map ``cycle`` affinely so the bounds land on -1 and +1, clamping outside."""
    return float(normalize_cycles(cycle, bounds))


def encoding_angles(x_norm, mode: str):
    """Rotation angles used by the encoder for each feature value.

    Returns ``(ry_angle, rz_angle)``; ``rz_angle`` is None in SIMPLE mode.
    Works elementwise on arrays.
    """
    x = np.asarray(x_norm, dtype=np.float64)
    if np.any(np.abs(x) > 1.0 + _RANGE_SLACK):
        raise FeatureOutOfRange(f"normalized feature must lie in [-1, 1], got {x_norm}")
    x = np.clip(x, -1.0, 1.0)
    if mode == SIMPLE:
        return np.arccos(x), None
    return np.arcsin(x), np.arccos(x * x)


def encoding_circuit(x_norm: float, spec: EncodingSpec) -> Circuit:
    ry_angle, rz_angle = encoding_angles(x_norm, spec.mode)
    gates = []
    for j in range(spec.n_qubits):
        gates.append(ry(j, ry_angle))
        if rz_angle is not None:
            gates.append(rz(j, rz_angle))
    return Circuit(spec.n_qubits, gates)
