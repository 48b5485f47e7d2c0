from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dlshor.timing import (HSQFT, SEMICLASSICAL, TimingModel, makespan_closed_form, min_k_hsqft,
                           schedule_simulate, simulated_min_k)


def test_examples():
    assert makespan_closed_form(TimingModel(10, 1, 2, 5), HSQFT) == 14
    assert schedule_simulate(TimingModel(10, 1, 2, 5), HSQFT) == 14
    assert min_k_hsqft(10, 0.5) == 2
    assert min_k_hsqft(2, 0.5) == 2


def test_min_k_near_one():
    # L/(L + rho - L*rho) < L for every rho < 1, so the threshold is L itself
    rho = Fraction(1) - Fraction(1, 10**9)
    assert min_k_hsqft(10, rho) == 10 == simulated_min_k(10, rho)


def test_min_k_errors():
    for bad in (0, 1, 1.5):
        with pytest.raises(ValueError):
            min_k_hsqft(10, bad)
    with pytest.raises(ValueError):
        min_k_hsqft(1, 0.5)


def test_float_inputs_are_decimal_exact():
    assert TimingModel(3, 0.1, 1).U == Fraction(1, 10)


rhos = st.fractions(min_value=Fraction(1, 100), max_value=3, max_denominator=100)


@given(st.integers(1, 60), rhos, st.integers(1, 10))
def test_semiclassical_closed_form(L, rho, k):
    m = TimingModel(L, rho, 1, k)
    assert schedule_simulate(m, SEMICLASSICAL) == makespan_closed_form(m, SEMICLASSICAL)


@given(st.integers(1, 60), rhos, st.data())
def test_hsqft_closed_form(L, rho, data):
    k = data.draw(st.integers(1, L))
    m = TimingModel(L, rho, 1, k)
    assert schedule_simulate(m, HSQFT) == makespan_closed_form(m, HSQFT)


@given(st.integers(1, 40), rhos, st.integers(1, 10))
def test_whole_block_charging(L, rho, k):
    m = TimingModel(L, rho, 1, k)
    assert schedule_simulate(m, HSQFT, "whole") == L * m.U + -(-L // k) * m.M


@given(st.integers(2, 60), st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100),
                                        max_denominator=100))
def test_threshold_matches_simulation(L, rho):
    assert min_k_hsqft(L, rho) == simulated_min_k(L, rho)


@given(st.integers(2, 40), rhos)
def test_recycling_never_slower_with_more_qubits(L, rho):
    times = [schedule_simulate(TimingModel(L, rho, 1, k), SEMICLASSICAL) for k in range(1, 6)]
    assert times == sorted(times, reverse=True)
