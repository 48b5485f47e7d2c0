"""
How long does a recycled-control run take?
==========================================

Compare the closed-form makespans against an event simulation, and find the
block size at which the half-semiclassical transform overtakes plain
recycling.
"""

from fractions import Fraction

from dlshor.timing import (HSQFT, SEMICLASSICAL, TimingModel, makespan_closed_form, min_k_hsqft,
                           schedule_simulate, simulated_min_k)

L = 20  # number of controlled multiplications
for rho in (Fraction(1, 2), Fraction(2)):
    print(f"rho = U/M = {rho}")
    for k in (1, 2, 4):
        m = TimingModel(L, rho, 1, k)
        print(f"  k={k} semiclassical {schedule_simulate(m, SEMICLASSICAL)} "
              f"(closed form {makespan_closed_form(m, SEMICLASSICAL)}), "
              f"hsqft {schedule_simulate(m, HSQFT)}")

# When multiplications are faster than measurement, blocks of k bits win
# once k passes L / (L + rho - L*rho).
for rho in (0.1, 0.5, 0.9):
    print(f"L={L} rho={rho}: min k {min_k_hsqft(L, rho)} (simulated {simulated_min_k(L, rho)})")

# Charging a short last block a full measurement moves the threshold
print("whole-block threshold at rho=0.9:", simulated_min_k(L, 0.9, "whole"))
