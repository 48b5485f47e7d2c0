import math

import pytest
from hypothesis import given, strategies as st

from dlshor.numtheory import (Adder, DlpInstance, classify_pair, enumerate_pairs,
                              find_subgroup_generator, is_prime, make_instance,
                              primes_upto, qubit_count, same_qubits_target)
from oracles import naive_is_prime, naive_pairs


def test_is_prime_small_range_matches_trial_division():
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if naive_is_prime(n)]


@pytest.mark.parametrize("n,expected", [
    (2**61 - 1, True), (2**64 - 59, True), (3215031751, False),  # strong pseudoprime to 2,3,5,7
    (3825123056546413051, False), (1, False), (0, False),
])
def test_is_prime_large_and_pseudoprimes(n, expected):
    assert is_prime(n) is expected


@given(st.integers(min_value=0, max_value=10**6))
def test_is_prime_property(n):
    assert is_prime(n) == naive_is_prime(n)


def test_primes_upto_sieve():
    assert list(primes_upto(50)) == [n for n in range(51) if naive_is_prime(n)]


def test_enumerate_small_budget():
    assert enumerate_pairs(12, Adder.QADD) == [(3, 2), (5, 2), (7, 2), (7, 3)]


@pytest.mark.parametrize("budget", [14, 18, 22, 26])
@pytest.mark.parametrize("adder,per_w", [(Adder.QADD, 2), (Adder.RADD, 3)])
def test_enumerate_matches_naive(budget, adder, per_w):
    assert enumerate_pairs(budget, adder) == naive_pairs(budget, per_w)


@given(st.integers(min_value=10, max_value=24), st.sampled_from(list(Adder)))
def test_enumerate_within_budget_and_valid(budget, adder):
    for p, q in enumerate_pairs(budget, adder):
        assert is_prime(p) and is_prime(q) and (p - 1) % q == 0
        assert qubit_count(p, q, adder) <= budget


def test_qubit_count_layout():
    # v = 2, w = 3
    assert qubit_count(7, 3, Adder.QADD) == 2 * 2 + 3 + 3 + 2
    assert qubit_count(7, 3, Adder.RADD) == 2 * 2 + 3 + 2 * 3 + 2


def test_classify_safe_prime():
    assert classify_pair(23, 11).safe_prime
    assert not classify_pair(29, 7).safe_prime
    c = classify_pair(283, 47)
    assert (c.bits_p, c.bits_q) == (9, 6)


@given(st.sampled_from(naive_pairs(22, 2)), st.integers(0, 10**6))
def test_generator_has_order_q(pair, seed):
    p, q = pair
    g = find_subgroup_generator(p, q, seed)
    assert g != 1 and pow(g, q, p) == 1


@given(st.sampled_from(naive_pairs(22, 2)), st.integers(0, 10**6))
def test_make_instance_consistent_and_deterministic(pair, seed):
    inst = make_instance(*pair, seed)
    assert inst == make_instance(*pair, seed)
    assert pow(inst.g, inst.s, inst.p) == inst.h and 0 <= inst.s < inst.q


def test_instance_validation():
    with pytest.raises(ValueError):
        DlpInstance(7, 3, 3, 3, 1)  # 3 has order 6 mod 7
    with pytest.raises(ValueError):
        make_instance(9, 2)
    with pytest.raises(ValueError):
        make_instance(7, 5)


def test_same_qubits_target_6659():
    x, y = same_qubits_target(6659, Adder.RADD)
    assert (round(x), round(y)) == (1479, 1109)


def test_same_qubits_ratio_tends_to_four_thirds():
    x, y = same_qubits_target(10**7, Adder.RADD)
    assert math.isclose(x / y, 4 / 3, rel_tol=1e-12)
