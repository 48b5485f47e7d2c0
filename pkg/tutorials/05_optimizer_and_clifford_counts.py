"""
Gate fusion and non-Clifford counting
=====================================

Fuse neighbouring gates into blocks of at most three qubits and count how
many gates remain outside the Clifford group.
"""

from dlshor.arith import AncillaSpec, build_mcx
from dlshor.circuit import Circuit, H, CX, PHASE, is_clifford, metrics, optimize
from dlshor.numtheory import Adder, make_instance
from dlshor.shor import build_dlp_circuit
from dlshor.sim import outcome_distribution

for gate in (H(0), PHASE(0, 2), PHASE(0, 3), PHASE(1, 2, controls=(0,))):
    print(gate, "Clifford" if is_clifford(gate) else "non-Clifford")

small = Circuit(2, 0, [H(0), CX(0, 1), PHASE(1, 3), CX(0, 1), H(0)])
print("before", metrics(small), "after", metrics(optimize(small)))

# Toffoli costs of the wide controlled NOTs the R-ADD adder relies on
for n, spec in ((3, AncillaSpec(clean=1)), (3, AncillaSpec(dirty=1)), (4, AncillaSpec(clean=2)),
                (4, AncillaSpec(clean=1, dirty=1)), (4, AncillaSpec(dirty=2))):
    print(n, "controls", spec, "->", build_mcx(n, spec)[1], "Toffolis")

circ = build_dlp_circuit(make_instance(7, 3, 0), Adder.RADD)
opt = optimize(circ)
print("DLP circuit before:", metrics(circ))
print("DLP circuit after: ", metrics(opt))
a, b = outcome_distribution(circ), outcome_distribution(opt)
print("largest probability change:", max(abs(a[k] - b.get(k, 0.0)) for k in a))
