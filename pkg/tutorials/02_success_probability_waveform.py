"""
Success probability against q
=============================

The chance that one run yields s depends on how q sits between powers of
two. This prints the exact probability for every small pair, grouped by q,
as CSV for plotting.
"""

import numpy as np

from dlshor.numtheory import Adder, enumerate_pairs, make_instance
from dlshor.shor import analytic_success_probability, success_probability_exact

BUDGET = 20

by_q = {}
for p, q in enumerate_pairs(BUDGET, Adder.QADD):
    prob = success_probability_exact(make_instance(p, q, 0), Adder.QADD)
    by_q.setdefault(q, []).append(prob)

print("q,pairs,mean,min,max")
for q, probs in sorted(by_q.items()):
    print(f"{q},{len(probs)},{np.mean(probs):.4f},{min(probs):.4f},{max(probs):.4f}")

# The same numbers without any circuit: only q and s matter.
for q in (3, 5, 7, 11, 13, 17):
    vals = [analytic_success_probability(q, s) for s in range(q)]
    print(f"analytic q={q}: {min(vals):.4f}..{max(vals):.4f}")
