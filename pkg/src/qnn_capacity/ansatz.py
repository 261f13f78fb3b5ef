"""Trainable layered circuit: RX-RZ-RX on every qubit, then a CNOT ring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParamLengthMismatch
from .statevector import MAX_QUBITS, RX, RZ, Circuit, GateOp, cx

# per-qubit rotation axes inside one layer
LAYER_AXES = (RX, RZ, RX)


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    depth: int

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")


def param_count(spec: AnsatzSpec) -> int:
    return len(LAYER_AXES) * spec.n_qubits * spec.depth


def gate_layout(spec: AnsatzSpec):
    """Gate skeleton of the ansatz in application order.

    Each entry is ``(kind, target, control, param_index)``; rotations have
    ``control=None`` and CNOTs have ``param_index=None``.
    """
    n = spec.n_qubits
    layout = []
    for layer in range(spec.depth):
        for j in range(n):
            base = len(LAYER_AXES) * (layer * n + j)
            for offset, kind in enumerate(LAYER_AXES):
                layout.append((kind, j, None, base + offset))
        if n >= 2:
            for j in range(n):
                layout.append(("CNOT", (j + 1) % n, j, None))
    return layout


def _as_params(spec: AnsatzSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1:] != (param_count(spec),):
        raise ParamLengthMismatch(
            f"ansatz {spec} needs {param_count(spec)} parameters, got shape {theta.shape}")
    return theta


def ansatz_circuit(spec: AnsatzSpec, theta) -> Circuit:
    theta = _as_params(spec, theta)
    if theta.ndim != 1:
        raise ParamLengthMismatch(f"expected a flat parameter vector, got shape {theta.shape}")
    gates = []
    for kind, target, control, k in gate_layout(spec):
        if k is None:
            gates.append(cx(control, target))
        else:
            gates.append(GateOp(kind, target, angle=float(theta[k])))
    return Circuit(spec.n_qubits, gates)


def init_params(spec: AnsatzSpec, seed: int) -> np.ndarray:
    """Uniform draws on [0, 2*pi) from a PCG64 generator seeded with ``seed``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * np.pi, size=param_count(spec))
