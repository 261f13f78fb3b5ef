"""
Quantum regression model: encoder + ansatz + Z readout + affine output head.

Two evaluation routes exist. :func:`raw_expectation` and :func:`predict_one`
run the explicit circuit on a :class:`StateVector` one sample at a time.
:func:`batch_expectations` evaluates many samples under many parameter
vectors at once: it simulates the encoder on all samples, simulates the
ansatz on all computational basis states (which yields its unitary, one per
parameter vector), and contracts the two. Training and batch prediction use
the batched route.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .ansatz import AnsatzSpec, ansatz_circuit, gate_layout, init_params, param_count
from .encoding import EncodingSpec, FeatureBounds, encoding_angles, encoding_circuit, normalize_cycles
from .exceptions import MalformedModelFile, ParamLengthMismatch, QubitIndexOutOfRange, SchemaVersionUnsupported
from .statevector import RZ, cnot, expectation_z, new_zero_state, apply_circuit, rotate, z_signs, RY

SCHEMA_VERSION = 1


def default_readout(n_qubits: int) -> int:
    return 1 if n_qubits >= 2 else 0


@dataclass(frozen=True, eq=False)
class QnnModel:
    encoding: EncodingSpec
    ansatz: AnsatzSpec
    theta: np.ndarray
    readout_qubit: int
    out_scale: float
    out_bias: float
    feature_bounds: FeatureBounds

    def __post_init__(self):
        if self.encoding.n_qubits != self.ansatz.n_qubits:
            raise ValueError("encoding and ansatz disagree on the qubit count")
        if not 0 <= self.readout_qubit < self.n_qubits:
            raise QubitIndexOutOfRange(
                f"readout qubit {self.readout_qubit} on a {self.n_qubits}-qubit model")
        theta = np.array(self.theta, dtype=np.float64)
        if theta.shape != (param_count(self.ansatz),):
            raise ParamLengthMismatch(
                f"expected {param_count(self.ansatz)} circuit parameters, got shape {theta.shape}")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "out_scale", float(self.out_scale))
        object.__setattr__(self, "out_bias", float(self.out_bias))

    @property
    def n_qubits(self) -> int:
        return self.ansatz.n_qubits

    @property
    def n_weights(self) -> int:
        """Length of the flat trainable vector (circuit parameters + a + b)."""
        return self.theta.size + 2

    def weights(self) -> np.ndarray:
        return np.concatenate([self.theta, [self.out_scale, self.out_bias]])

    def with_weights(self, w) -> "QnnModel":
        w = np.asarray(w, dtype=np.float64)
        return replace(self, theta=w[:-2].copy(), out_scale=float(w[-2]), out_bias=float(w[-1]))

    def __eq__(self, other):
        if not isinstance(other, QnnModel):
            return NotImplemented
        return (self.encoding == other.encoding and self.ansatz == other.ansatz
                and np.array_equal(self.theta, other.theta)
                and self.readout_qubit == other.readout_qubit
                and self.out_scale == other.out_scale
                and self.out_bias == other.out_bias
                and self.feature_bounds == other.feature_bounds)


def build_model(n_qubits, depth, bounds, *, mode="arc", seed=0, capacities=None,
                readout_qubit=None, out_scale=None, out_bias=None) -> QnnModel:
    """Fresh model with seeded circuit parameters.

    Unless given explicitly, the output head starts at half the capacity
    range (scale) and the mean capacity (bias) of ``capacities``.
    """
    ansatz = AnsatzSpec(n_qubits, depth)
    if capacities is not None and len(capacities):
        caps = np.asarray(capacities, dtype=np.float64)
        if out_scale is None:
            out_scale = (caps.max() - caps.min()) / 2.0
        if out_bias is None:
            out_bias = caps.mean()
    return QnnModel(
        encoding=EncodingSpec(n_qubits, mode),
        ansatz=ansatz,
        theta=init_params(ansatz, seed),
        readout_qubit=default_readout(n_qubits) if readout_qubit is None else readout_qubit,
        out_scale=1.0 if out_scale is None else out_scale,
        out_bias=0.0 if out_bias is None else out_bias,
        feature_bounds=bounds,
    )


# -- single-sample reference route -------------------------------------------

def raw_expectation(model: QnnModel, x_norm: float) -> float:
    circuit = encoding_circuit(x_norm, model.encoding) + ansatz_circuit(model.ansatz, model.theta)
    out = apply_circuit(new_zero_state(model.n_qubits), circuit)
    return expectation_z(out, model.readout_qubit)


def predict_one(model: QnnModel, cycle) -> float:
    x = float(normalize_cycles(cycle, model.feature_bounds))
    return model.out_scale * raw_expectation(model, x) + model.out_bias


# -- batched route ------------------------------------------------------------

def encoded_states(encoding: EncodingSpec, x_norm) -> np.ndarray:
    """Encoder output for every feature value, shape ``(N, 2**n)``."""
    x = np.atleast_1d(np.asarray(x_norm, dtype=np.float64))
    ry_angle, rz_angle = encoding_angles(x, encoding.mode)
    states = np.zeros((x.size, 2 ** encoding.n_qubits), dtype=np.complex128)
    states[:, 0] = 1.0
    for j in range(encoding.n_qubits):
        states = rotate(states, RY, j, ry_angle)
        if rz_angle is not None:
            states = rotate(states, RZ, j, rz_angle)
    return states


def ansatz_unitaries(spec: AnsatzSpec, thetas) -> np.ndarray:
    """Ansatz action on every basis state for each parameter row.

    Returns ``R`` of shape ``(V, D, D)`` with ``R[v, k]`` the output state
    for basis input ``k``, i.e. ``R[v]`` is the transposed unitary.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if thetas.shape[1] != param_count(spec):
        raise ParamLengthMismatch(
            f"ansatz {spec} needs {param_count(spec)} parameters, got {thetas.shape[1]}")
    dim = 2 ** spec.n_qubits
    rows = np.broadcast_to(np.eye(dim, dtype=np.complex128), (thetas.shape[0], dim, dim)).copy()
    for kind, target, control, k in gate_layout(spec):
        if k is None:
            rows = cnot(rows, control, target)
        else:
            rows = rotate(rows, kind, target, thetas[:, k][:, None])
    return rows


def batch_expectations(model: QnnModel, x_norm, thetas=None) -> np.ndarray:
    """``<Z_readout>`` for every (parameter row, sample) pair, shape ``(V, N)``."""
    if thetas is None:
        thetas = model.theta[None, :]
    psi_in = encoded_states(model.encoding, x_norm)
    psi_out = np.matmul(psi_in, ansatz_unitaries(model.ansatz, thetas))
    probs = psi_out.real ** 2 + psi_out.imag ** 2
    return np.clip(probs @ z_signs(model.n_qubits, model.readout_qubit), -1.0, 1.0)


def predict_batch(model: QnnModel, cycles) -> list:
    cycles = np.asarray(cycles, dtype=np.float64)
    if cycles.size == 0:
        return []
    z = batch_expectations(model, normalize_cycles(cycles.ravel(), model.feature_bounds))[0]
    return (model.out_scale * z + model.out_bias).tolist()


# -- persistence ----------------------------------------------------------------

_TOP_FIELDS = {"schema_version", "encoding", "ansatz", "theta", "readout_qubit",
               "out_scale", "out_bias", "feature_bounds"}
_NESTED_FIELDS = {
    "encoding": {"n_qubits", "mode"},
    "ansatz": {"n_qubits", "depth"},
    "feature_bounds": {"min_cycle", "max_cycle"},
}


def model_to_dict(model: QnnModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "encoding": {"n_qubits": model.encoding.n_qubits, "mode": model.encoding.mode},
        "ansatz": {"n_qubits": model.ansatz.n_qubits, "depth": model.ansatz.depth},
        "theta": [float(t) for t in model.theta],
        "readout_qubit": model.readout_qubit,
        "out_scale": model.out_scale,
        "out_bias": model.out_bias,
        "feature_bounds": {"min_cycle": model.feature_bounds.min_cycle,
                           "max_cycle": model.feature_bounds.max_cycle},
    }


def _require_number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedModelFile(f"{name} must be a finite number, got {value!r}")
    return value


def _require_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedModelFile(f"{name} must be an integer, got {value!r}")
    return value


def model_from_dict(doc) -> QnnModel:
    if not isinstance(doc, dict):
        raise MalformedModelFile("model document must be a JSON object")
    if "schema_version" not in doc:
        raise MalformedModelFile("missing schema_version")
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"schema_version {version!r} not supported (expected {SCHEMA_VERSION})")
    keys = set(doc)
    if keys != _TOP_FIELDS:
        raise MalformedModelFile(
            f"unexpected fields {sorted(keys - _TOP_FIELDS)}, missing {sorted(_TOP_FIELDS - keys)}")
    for name, fields in _NESTED_FIELDS.items():
        sub = doc[name]
        if not isinstance(sub, dict) or set(sub) != fields:
            raise MalformedModelFile(f"{name} must be an object with fields {sorted(fields)}")
    if not isinstance(doc["theta"], list):
        raise MalformedModelFile("theta must be a list")
    try:
        return QnnModel(
            encoding=EncodingSpec(_require_int(doc["encoding"]["n_qubits"], "encoding.n_qubits"),
                                  doc["encoding"]["mode"]),
            ansatz=AnsatzSpec(_require_int(doc["ansatz"]["n_qubits"], "ansatz.n_qubits"),
                              _require_int(doc["ansatz"]["depth"], "ansatz.depth")),
            theta=[_require_number(t, "theta") for t in doc["theta"]],
            readout_qubit=_require_int(doc["readout_qubit"], "readout_qubit"),
            out_scale=_require_number(doc["out_scale"], "out_scale"),
            out_bias=_require_number(doc["out_bias"], "out_bias"),
            feature_bounds=FeatureBounds(
                _require_number(doc["feature_bounds"]["min_cycle"], "min_cycle"),
                _require_number(doc["feature_bounds"]["max_cycle"], "max_cycle")),
        )
    except MalformedModelFile:
        raise
    except (ValueError, TypeError, IndexError) as exc:
        raise MalformedModelFile(str(exc)) from exc


def save_model(model: QnnModel, path) -> None:
    text = json.dumps(model_to_dict(model), indent=2)
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def load_model(path) -> QnnModel:
    with open(os.fspath(path), "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedModelFile(f"{path}: {exc}") from exc
    return model_from_dict(doc)
