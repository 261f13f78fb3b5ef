import numpy as np
import pytest

from qnn_capacity.data import synthetic_fade

# Reference gate matrices written out independently of the package.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def ref_rotation(kind, t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]])


def kron_chain(ops_by_qubit):
    """Full operator from one 2x2 factor per qubit; qubit 0 is the least significant bit."""
    out = np.ones((1, 1), dtype=complex)
    for op in reversed(ops_by_qubit):
        out = np.kron(out, op)
    return out


def dense_gate(gate, n):
    if gate.kind == "CNOT":
        a = [I2] * n
        a[gate.control] = P0
        b = [I2] * n
        b[gate.control] = P1
        b[gate.target] = X
        return kron_chain(a) + kron_chain(b)
    ops = [I2] * n
    ops[gate.target] = ref_rotation(gate.kind, gate.angle)
    return kron_chain(ops)


def dense_circuit(circuit):
    u = np.eye(2 ** circuit.n_qubits, dtype=complex)
    for g in circuit.gates:
        u = dense_gate(g, circuit.n_qubits) @ u
    return u


@pytest.fixture(scope="session")
def fade_series():
    return synthetic_fade()


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(name, ok, detail):
        _ACCEPTANCE.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
