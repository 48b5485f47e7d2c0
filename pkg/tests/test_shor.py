import numpy as np
import pytest
from hypothesis import given, strategies as st

from dlshor.circuit import Measure
from dlshor.numtheory import Adder, make_instance
from dlshor.shor import (FAIL, HSQFT, SEMICLASSICAL, STANDARD, analytic_success_probability,
                         analytic_table, build_dlp_circuit, layout, modal_outcome, outcome_table,
                         postprocess, sample_success_rate, success_probability_exact, sweep)
from oracles import success_probability_loops


def test_layout_counts():
    lay = layout(23, 11, Adder.QADD)
    assert (lay.v1, lay.v2, lay.w, lay.total) == (4, 4, 5, 20)
    assert layout(23, 11, Adder.RADD).total == 25


def test_postprocess_examples():
    # q = 3, v = 2: m = 1 -> round(0.75) = 1, m = 2 -> round(1.5) = 2 (ties go up)
    assert postprocess(0, 0, 2, 2, 3) is FAIL
    assert postprocess(1, 1, 2, 2, 3) == 1
    assert postprocess(2, 1, 2, 2, 3) == 2
    with pytest.raises(ValueError):
        postprocess(4, 0, 2, 2, 3)


@given(st.sampled_from([3, 5, 7, 11, 13]), st.data())
def test_postprocess_inverts_exact_phases(q, data):
    # measurements that encode s*l/q and l/q exactly up to rounding recover s
    s = data.draw(st.integers(0, q - 1))
    l = data.draw(st.integers(1, q - 1))
    v = 12
    m2 = round(l * (1 << v) / q) % (1 << v)
    m1 = round((s * l % q) * (1 << v) / q) % (1 << v)
    assert postprocess(m1, m2, v, v, q) == s


@pytest.mark.parametrize("q,s", [(2, 1), (3, 0), (3, 2), (5, 3), (7, 4)])
def test_analytic_forms_agree(q, s):
    assert abs(analytic_success_probability(q, s) - success_probability_loops(q, s)) < 1e-12


def test_analytic_table_normalised():
    assert np.isclose(analytic_table(5, 2, 3, 3).sum(), 1.0)


@pytest.mark.parametrize("pq", [(5, 2), (7, 3), (11, 5)])
@pytest.mark.parametrize("adder", [Adder.QADD, Adder.RADD])
def test_circuit_matches_analytic(pq, adder):
    inst = make_instance(*pq, 2)
    exact = success_probability_exact(inst, adder)
    assert abs(exact - success_probability_loops(inst.q, inst.s)) < 1e-9


def test_outcome_table_normalised_and_backends_agree():
    inst = make_instance(7, 3, 0)
    a = outcome_table(inst, Adder.QADD, backend="sparse")
    b = outcome_table(inst, Adder.QADD, backend="dense")
    assert np.isclose(a.sum(), 1.0) and np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("variant", [SEMICLASSICAL(1), SEMICLASSICAL(3), HSQFT(1), HSQFT(3)])
def test_variants_on_q5(variant):
    inst = make_instance(11, 5, 4)
    ref = success_probability_exact(inst, Adder.QADD)
    assert abs(success_probability_exact(inst, Adder.QADD, variant) - ref) < 1e-9


def test_recycled_variants_use_fewer_qubits():
    inst = make_instance(11, 5, 0)
    std = build_dlp_circuit(inst, Adder.QADD)
    semi = build_dlp_circuit(inst, Adder.QADD, SEMICLASSICAL(1))
    assert std.n_qubits - semi.n_qubits == 2 * 3 - 1
    assert sum(isinstance(o, Measure) for o in semi.ops) == 6


def test_hsqft_rejects_large_k():
    with pytest.raises(ValueError):
        build_dlp_circuit(make_instance(7, 3, 0), Adder.QADD, HSQFT(3))


def test_modal_outcome_is_secret():
    inst = make_instance(13, 3, 5)
    s, mass = modal_outcome(inst, Adder.RADD)
    assert s == inst.s and sum(mass.values()) <= 1 + 1e-12


def test_sampling_modes_agree_statistically():
    inst = make_instance(7, 3, 0)
    exact = success_probability_exact(inst, Adder.QADD)
    for method, shots in (("state", 4000), ("run", 300)):
        rate = sample_success_rate(inst, Adder.QADD, shots, 7, method=method)
        assert abs(rate - exact) <= 4 * np.sqrt(exact * (1 - exact) / shots)


def test_sampling_reproducible():
    inst = make_instance(5, 2, 0)
    assert sample_success_rate(inst, "qadd", 500, 9) == sample_success_rate(inst, "qadd", 500, 9)


def test_sweep_rows():
    rows = sweep(12, Adder.QADD, "exact", 0)
    assert [(r["p"], r["q"]) for r in rows] == [(3, 2), (5, 2), (7, 2), (7, 3)]
    assert all(0 < r["probability"] <= 1 for r in rows)
