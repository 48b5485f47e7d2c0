"""
Solving a tiny discrete logarithm
=================================

Build the full circuit for one (p, q) pair, look at the exact outcome
distribution, and turn measurements back into the secret exponent.
"""

from dlshor.numtheory import Adder, make_instance
from dlshor.shor import layout, build_dlp_circuit, outcome_table, postprocess, sample_success_rate
from dlshor.circuit import metrics

# An instance is a prime p, a prime q dividing p-1, a generator g of the
# order-q subgroup and h = g^s. The seed fixes g and the secret s.
inst = make_instance(11, 5, seed=4)
print(inst)

# Two control registers of v qubits each, a work register and ancillas.
lay = layout(inst.p, inst.q, Adder.QADD)
print("qubits:", lay.total, "control bits per register:", lay.v1)

circ = build_dlp_circuit(inst, Adder.QADD)
print("gates:", metrics(circ).gate_count)

# Exact probabilities of every (m1, m2) pair
table = outcome_table(inst, Adder.QADD)
best = sorted(((table[m1, m2], m1, m2) for m1 in range(table.shape[0])
               for m2 in range(table.shape[1])), reverse=True)[:5]
for prob, m1, m2 in best:
    print(f"m1={m1} m2={m2} prob={prob:.4f} -> s={postprocess(m1, m2, lay.v1, lay.v2, inst.q)}")

# Shots drawn from the same distribution
print("sampled success rate:", sample_success_rate(inst, Adder.QADD, shots=2000, seed=0))
print("true s:", inst.s)
