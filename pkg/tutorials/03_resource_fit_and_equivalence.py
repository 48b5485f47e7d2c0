"""
Fitting resource counts and comparing group types
=================================================

Generate gate counts for small R-ADD circuits, fit the cubic-in-bits model,
and ask which safe-prime size costs as much as a 2048/256-bit Schnorr group.
A short range keeps this quick; the acceptance tests use 12-45 qubits.
"""

from dlshor.estimate import (METRICS, cross_validate, extrapolate, fit, generate_dataset,
                             load_params, safe_prime_equivalent_bits, schnorr_ratio)

rows = generate_dataset((12, 34), per_cell=2, seed=0)
print(len(rows), "circuits")

for metric in ("gates_before", "gates_after"):
    params = fit(rows, metric)
    mean, rmse = cross_validate(rows, metric, folds=5, seed=0)
    target = extrapolate(params, 2048, 256)
    print(f"{metric}: cv rmse/mean {rmse / mean:.3f}, "
          f"safe-prime equivalent {safe_prime_equivalent_bits(params, target):.1f} bits")

# With the published coefficients instead
published = load_params()
for metric in METRICS:
    p = published[metric]
    print(metric, f"{extrapolate(p, 2048, 2047):.3e}", f"{extrapolate(p, 2048, 256):.3e}",
          f"{safe_prime_equivalent_bits(p, extrapolate(p, 2048, 256)):.3f}")

# Leading-order rule: the bit-length ratio is the cube root of log q / log p
print("cube-root rule for 256/2048:", schnorr_ratio(256 / 2048))
