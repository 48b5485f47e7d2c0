import numpy as np
import pytest
from hypothesis import given, strategies as st

from dlshor.circuit import (CCX, CX, Circuit, FUSED, H, MCX, Measure, PHASE, SWAP, X,
                            commutes, is_clifford, metrics, optimize, unitary_is_clifford)
from oracles import circuit_unitary, gate_unitary


def random_gate(draw, n):
    kind = draw(st.sampled_from(["H", "X", "CX", "CCX", "PHASE", "CPHASE", "SWAP"]))
    need = {"H": 1, "X": 1, "PHASE": 1, "CX": 2, "CPHASE": 2, "SWAP": 2, "CCX": 3}[kind]
    qs = draw(st.permutations(range(n)))[:need]
    if kind == "H":
        return H(qs[0])
    if kind == "X":
        return X(qs[0])
    if kind == "CX":
        return CX(*qs)
    if kind == "CCX":
        return CCX(*qs)
    if kind == "SWAP":
        return SWAP(*qs)
    j = draw(st.integers(1, 5))
    return PHASE(qs[0], j, draw(st.integers(1, 7)), controls=tuple(qs[1:]))


@st.composite
def gate_lists(draw, max_qubits=4, max_gates=14):
    n = draw(st.integers(3, max_qubits))
    return n, [random_gate(draw, n) for _ in range(draw(st.integers(1, max_gates)))]


def test_metrics_examples():
    m = metrics(Circuit(1, 0, [H(0)]))
    assert (m.gate_count, m.depth, m.non_clifford_count) == (1, 1, 0)
    m = metrics(Circuit(3, 0, [CCX(0, 1, 2)]))
    assert m.non_clifford_count == 1
    m = metrics(Circuit(3, 1, [H(0), H(1), CX(0, 1), Measure(1, 0), X(2, cond=((0, 1),))]))
    assert (m.gate_count, m.depth) == (4, 3)


@pytest.mark.parametrize("gate,expected", [
    (H(0), True), (X(0), True), (CX(0, 1), True), (SWAP(0, 1), True),
    (PHASE(0, 1), True), (PHASE(0, 2), True), (PHASE(0, 3), False),
    (PHASE(1, 1, controls=(0,)), True), (PHASE(1, 2, controls=(0,)), False),
    (CCX(0, 1, 2), False),
])
def test_is_clifford(gate, expected):
    assert is_clifford(gate) is expected


def test_clifford_oracle_on_fused():
    # CZ written as a fused matrix is Clifford; a T-like diagonal is not
    assert is_clifford(FUSED((0, 1), np.diag([1, 1, 1, -1])))
    assert not is_clifford(FUSED((0,), np.diag([1, np.exp(1j * np.pi / 4)])))
    assert unitary_is_clifford(np.kron([[0, 1], [1, 0]], np.eye(2)))


def test_phase_convention():
    assert np.allclose(PHASE(0, 2).local_matrix(), np.diag([1, -1j]))


def test_gate_matrices_match_oracle():
    for g in [H(1), X(0, (2,)), CCX(0, 2, 1), SWAP(0, 2), PHASE(2, 3, 5, controls=(0,))]:
        ref = gate_unitary(g, 3)
        from dlshor.sim import StateVector
        cols = []
        for x in range(8):
            s = StateVector.basis(3, x)
            s.apply(g)
            cols.append(s.amplitudes.copy())
        assert np.allclose(np.array(cols).T, ref)


def test_optimize_hh_is_empty():
    out = optimize(Circuit(1, 0, [H(0), H(0)]))
    assert metrics(out).gate_count == 0


@given(gate_lists())
def test_optimize_preserves_unitary(case):
    n, gates = case
    out = optimize(Circuit(n, 0, gates))
    assert np.allclose(circuit_unitary(out.gates, n), circuit_unitary(gates, n), atol=1e-10)
    assert len(out.gates) <= len(gates)
    assert all(len(g.qubits) <= 3 or g.kind != "FUSED" for g in out.gates)


@given(gate_lists(max_gates=6))
def test_commutes_is_sound(case):
    n, gates = case
    for a in gates:
        for b in gates:
            if commutes(a, b):
                ua, ub = gate_unitary(a, n), gate_unitary(b, n)
                assert np.allclose(ua @ ub, ub @ ua)


def test_optimize_does_not_cross_measurement():
    c = Circuit(1, 1, [H(0), Measure(0, 0), H(0)])
    out = optimize(c)
    assert [type(o).__name__ for o in out.ops] == ["Gate", "Measure", "Gate"]


def test_json_roundtrip():
    c = Circuit(3, 1, [H(0), MCX((0, 1), 2), PHASE(1, 3, 3, controls=(0,)), Measure(2, 0),
                       X(1, cond=((0, 1),)), FUSED((0, 1), np.eye(4))])
    back = Circuit.from_json(c.to_json())
    assert back.to_json() == c.to_json()
    assert np.allclose(circuit_unitary(back.gates[:3], 3), circuit_unitary(c.gates[:3], 3))


def test_inverse():
    gates = [H(0), CX(0, 1), PHASE(1, 3, controls=(0,)), SWAP(0, 2)]
    c = Circuit(3, 0, gates)
    U = circuit_unitary(c.gates + c.inverse().gates, 3)
    assert np.allclose(U, np.eye(8))
