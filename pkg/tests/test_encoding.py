import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qnn_capacity.encoding import EncodingSpec, FeatureBounds, encoding_circuit, normalize_cycle
from qnn_capacity.exceptions import DegenerateBounds, FeatureOutOfRange
from qnn_capacity.statevector import apply_circuit, expectation_z, new_zero_state

B = FeatureBounds(1, 168)
unit = st.floats(-1.0, 1.0, allow_nan=False)


def z_per_qubit(x, mode, n):
    out = apply_circuit(new_zero_state(n), encoding_circuit(x, EncodingSpec(n, mode)))
    return [expectation_z(out, q) for q in range(n)]


@pytest.mark.parametrize("cycle, expected", [(1, -1.0), (168, 1.0), (84.5, 0.0)])
def test_normalize_endpoints_and_midpoint(cycle, expected):
    assert normalize_cycle(cycle, B) == pytest.approx(expected, abs=1e-15)


def test_normalize_clamps():
    assert normalize_cycle(500, B) == 1.0
    assert normalize_cycle(-10, B) == -1.0


def test_degenerate_bounds():
    with pytest.raises(DegenerateBounds):
        FeatureBounds(5, 5)


def test_simple_zero():
    c = encoding_circuit(0.0, EncodingSpec(1, "simple"))
    assert [(g.kind, g.target) for g in c.gates] == [("RY", 0)]
    assert c.gates[0].angle == pytest.approx(math.pi / 2)


def test_simple_one_stays_zero_state():
    c = encoding_circuit(1.0, EncodingSpec(1, "simple"))
    assert c.gates[0].angle == 0.0
    assert z_per_qubit(1.0, "simple", 1) == [1.0]


def test_arc_half_two_qubits():
    c = encoding_circuit(0.5, EncodingSpec(2, "arc"))
    assert [(g.kind, g.target) for g in c.gates] == [("RY", 0), ("RZ", 0), ("RY", 1), ("RZ", 1)]
    assert c.gates[0].angle == pytest.approx(math.pi / 6)
    assert c.gates[1].angle == pytest.approx(math.acos(0.25))
    # cos(pi/6)
    np.testing.assert_allclose(z_per_qubit(0.5, "arc", 2), [math.sqrt(3) / 2] * 2, atol=1e-12)


def test_out_of_range_feature():
    with pytest.raises(FeatureOutOfRange):
        encoding_circuit(1.01, EncodingSpec(2))
    encoding_circuit(1.0 + 1e-13, EncodingSpec(2))


def test_gate_counts():
    assert len(encoding_circuit(0.3, EncodingSpec(4, "arc"))) == 8
    assert len(encoding_circuit(0.3, EncodingSpec(4, "simple"))) == 4


def test_mode_validation():
    with pytest.raises(ValueError):
        EncodingSpec(2, "amplitude")


@given(x=unit, n=st.integers(1, 4))
def test_simple_round_trip(x, n):
    for z in z_per_qubit(x, "simple", n):
        assert z == pytest.approx(x, abs=1e-12)


@given(x=unit, n=st.integers(1, 4))
def test_arc_readout(x, n):
    for z in z_per_qubit(x, "arc", n):
        assert z == pytest.approx(math.sqrt(1 - x * x), abs=1e-12)


@given(a=st.integers(-50, 400), b=st.integers(-50, 400))
def test_normalize_monotone(a, b):
    lo, hi = sorted((a, b))
    assert normalize_cycle(lo, B) <= normalize_cycle(hi, B)


@given(x=unit)
def test_encoding_deterministic(x):
    spec = EncodingSpec(3, "arc")
    assert encoding_circuit(x, spec) == encoding_circuit(x, spec)
