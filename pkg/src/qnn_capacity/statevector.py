"""
Exact statevector simulation for circuits made of RX, RY, RZ and CNOT.

Qubit ``j`` is bit ``j`` of the basis-state index (qubit 0 is the least
significant bit). Gates are applied by pairing amplitudes whose indices
differ only in the target bit, so one gate costs O(2^n) and no full
2^n x 2^n operator is ever formed.

The low-level kernels (:func:`rotate`, :func:`cnot`) work on arrays of
shape ``(..., 2**n)`` and accept per-row angles, which is what the batched
model evaluation in :mod:`qnn_capacity.model` builds on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import QubitCountMismatch, QubitCountOutOfRange, QubitIndexOutOfRange

MAX_QUBITS = 20

RX, RY, RZ, CNOT = "RX", "RY", "RZ", "CNOT"
ROTATIONS = (RX, RY, RZ)
GATE_KINDS = ROTATIONS + (CNOT,)


@dataclass(frozen=True)
class GateOp:
    kind: str
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.target < 0 or (self.control is not None and self.control < 0):
            raise QubitIndexOutOfRange(f"negative qubit index in {self}")
        if self.kind == CNOT:
            if self.control is None:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
            if self.angle is not None:
                raise ValueError("CNOT carries no angle")
        else:
            if self.angle is None:
                raise ValueError(f"{self.kind} needs an angle")
            if self.control is not None:
                raise ValueError(f"{self.kind} takes no control qubit")

    @property
    def qubits(self):
        return (self.target,) if self.control is None else (self.control, self.target)


def rx(target, angle):
    return GateOp(RX, target, angle=float(angle))


def ry(target, angle):
    return GateOp(RY, target, angle=float(angle))


def rz(target, angle):
    return GateOp(RZ, target, angle=float(angle))


def cx(control, target):
    return GateOp(CNOT, target, control=control)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _check_indices(g, self.n_qubits)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise QubitCountMismatch(
                f"cannot join {self.n_qubits}-qubit and {other.n_qubits}-qubit circuits")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise ValueError(
                f"expected {2 ** self.n_qubits} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_qubit_count(n):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_QUBITS:
        raise QubitCountOutOfRange(f"n_qubits must be in [1, {MAX_QUBITS}], got {n!r}")


def _check_indices(gate: GateOp, n_qubits: int):
    for q in gate.qubits:
        if q >= n_qubits:
            raise QubitIndexOutOfRange(
                f"{gate.kind} touches qubit {q} on a {n_qubits}-qubit register")


def new_zero_state(n_qubits: int) -> StateVector:
    _check_qubit_count(n_qubits)
    amps = np.zeros(2 ** n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind == RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == RZ:
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]],
                        dtype=np.complex128)
    raise ValueError(f"{kind!r} is not a rotation")


# basis order |c t>: index = 2*control_bit + target_bit
_CNOT_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=np.complex128)


def gate_matrix(gate: GateOp) -> np.ndarray:
    """Local matrix of ``gate``.

    Rotations give a 2x2 matrix on the target qubit. CNOT gives a 4x4 matrix
    in the two-qubit basis ordered ``|control, target>``, i.e. it swaps
    ``|10>`` and ``|11>``.
    """
    if gate.kind == CNOT:
        return _CNOT_MATRIX.copy()
    return rotation_matrix(gate.kind, gate.angle)


def _split(amps: np.ndarray, target: int):
    """View ``amps`` as (..., high, 2, low) so axis -2 is the target bit."""
    dim = amps.shape[-1]
    low = 1 << target
    return amps.reshape(amps.shape[:-1] + (dim // (2 * low), 2, low))


def rotate(amps: np.ndarray, kind: str, target: int, angle) -> np.ndarray:
    """Apply a rotation to the last axis of ``amps``; returns a new array.

    ``angle`` is a scalar or an array broadcastable to ``amps.shape[:-1]``,
    giving every row its own angle.
    """
    view = _split(amps, target)
    angle = np.asarray(angle, dtype=np.float64)[..., None, None]
    a0, a1 = view[..., 0, :], view[..., 1, :]
    out = np.empty_like(view)
    if kind == RZ:
        phase = np.exp(-0.5j * angle)
        out[..., 0, :] = a0 * phase
        out[..., 1, :] = a1 * np.conj(phase)
    else:
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        if kind == RX:
            out[..., 0, :] = c * a0 - 1j * s * a1
            out[..., 1, :] = c * a1 - 1j * s * a0
        elif kind == RY:
            out[..., 0, :] = c * a0 - s * a1
            out[..., 1, :] = s * a0 + c * a1
        else:
            raise ValueError(f"{kind!r} is not a rotation")
    return out.reshape(amps.shape)


def cnot(amps: np.ndarray, control: int, target: int) -> np.ndarray:
    """Flip ``target`` on every basis index whose ``control`` bit is set."""
    dim = amps.shape[-1]
    idx = np.arange(dim)
    perm = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
    return amps[..., perm]


def apply_gate_array(amps: np.ndarray, gate: GateOp) -> np.ndarray:
    if gate.kind == CNOT:
        return cnot(amps, gate.control, gate.target)
    return rotate(amps, gate.kind, gate.target, gate.angle)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    _check_indices(gate, state.n_qubits)
    return StateVector(state.n_qubits, apply_gate_array(state.amplitudes, gate))


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n_qubits != state.n_qubits:
        raise QubitCountMismatch(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}")
    amps = state.amplitudes
    for g in circuit.gates:
        amps = apply_gate_array(amps, g)
    return StateVector(state.n_qubits, amps)


def z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    """+1 where bit ``qubit`` of the index is 0, -1 where it is 1."""
    idx = np.arange(2 ** n_qubits)
    return 1.0 - 2.0 * ((idx >> qubit) & 1)


def expectation_z_array(amps: np.ndarray, qubit: int) -> np.ndarray:
    n = amps.shape[-1].bit_length() - 1
    probs = amps.real ** 2 + amps.imag ** 2
    return probs @ z_signs(n, qubit)


def expectation_z(state: StateVector, qubit: int) -> float:
    if not 0 <= qubit < state.n_qubits:
        raise QubitIndexOutOfRange(
            f"qubit {qubit} out of range for {state.n_qubits}-qubit state")
    value = float(expectation_z_array(state.amplitudes, qubit))
    return min(1.0, max(-1.0, value))


def embed_gate(gate: GateOp, n_qubits: int) -> np.ndarray:
    """Dense 2^n x 2^n operator of ``gate`` on an ``n_qubits`` register.

    Built from Kronecker products; meant as an independent reference for
    tests and small circuits, never used on the simulation path.
    """
    _check_indices(gate, n_qubits)
    eye = np.eye(2, dtype=np.complex128)
    if gate.kind != CNOT:
        factors = [eye] * n_qubits
        factors[gate.target] = gate_matrix(gate)
        out = np.ones((1, 1), dtype=np.complex128)
        # highest qubit leftmost in the Kronecker chain
        for f in reversed(factors):
            out = np.kron(out, f)
        return out
    p0 = np.diag([1, 0]).astype(np.complex128)
    p1 = np.diag([0, 1]).astype(np.complex128)
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    terms = []
    for proj, tgt_op in ((p0, eye), (p1, x)):
        factors = [eye] * n_qubits
        factors[gate.control] = proj
        factors[gate.target] = tgt_op
        out = np.ones((1, 1), dtype=np.complex128)
        for f in reversed(factors):
            out = np.kron(out, f)
        terms.append(out)
    return terms[0] + terms[1]


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit`` as an explicit matrix-product chain."""
    dim = 2 ** circuit.n_qubits
    u = np.eye(dim, dtype=np.complex128)
    for g in circuit.gates:
        u = embed_gate(g, circuit.n_qubits) @ u
    return u


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    kinds: Sequence[str] = GATE_KINDS if n_qubits >= 2 else ROTATIONS
    gates = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == CNOT:
            control, target = rng.choice(n_qubits, size=2, replace=False)
            gates.append(cx(int(control), int(target)))
        else:
            gates.append(GateOp(kind, int(rng.integers(n_qubits)),
                                angle=float(rng.uniform(-2 * np.pi, 2 * np.pi))))
    return Circuit(n_qubits, gates)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def concat(circuits: Iterable[Circuit]) -> Circuit:
    circuits = list(circuits)
    out = circuits[0]
    for c in circuits[1:]:
        out = out + c
    return out
