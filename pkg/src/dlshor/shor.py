"""Full DLP circuits, classical post-processing and success probabilities.

Register layout of the standard circuit (qubit 0 first)::

    x1 (v1) | x2 (v2) | work (w) | acc (w+1) | flag | carries (RADD only, w)

Measured bit ``m_a`` of a control register comes from its qubit ``v-1-a``
(the register is read most-significant-qubit first), and the measured
integer is ``m = sum(m_a << a)``. Classical bits ``0..v1-1`` hold register
1, ``v1..v1+v2-1`` register 2.

The recycled-control variants keep ``k`` control qubits after the work
register is placed at qubit ``k``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import arith
from .arith import Emitter, emit_mod_exp, mod_exp_bases, mod_mul, width_of
from .circuit import Circuit, Gate, H, Measure, PHASE, X
from .numtheory import Adder, DlpInstance, enumerate_pairs, make_instance
from .rng import stream
from .sim import outcome_distribution

FAIL = None


@dataclass(frozen=True)
class RegisterLayout:
    v1: int
    v2: int
    w: int
    ancillas: int
    total: int
    adder: Adder


def layout(p: int, q: int, adder) -> RegisterLayout:
    adder = Adder.parse(adder)
    v = q.bit_length()  # floor(log2 q) + 1
    w = width_of(p)
    anc = w + 2 if adder is Adder.QADD else 2 * w + 2
    return RegisterLayout(v, v, w, anc, 2 * v + w + anc, adder)


@dataclass(frozen=True)
class Variant:
    kind: str = "STANDARD"  # STANDARD, SEMICLASSICAL or HSQFT
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("STANDARD", "SEMICLASSICAL", "HSQFT"):
            raise ValueError(f"unknown variant {self.kind}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def __str__(self):
        return self.kind if self.kind == "STANDARD" else f"{self.kind}({self.k})"


STANDARD = Variant()


def SEMICLASSICAL(k: int = 1) -> Variant:
    return Variant("SEMICLASSICAL", k)


def HSQFT(k: int) -> Variant:
    return Variant("HSQFT", k)


def _round_half_up(m: int, q: int, v: int) -> int:
    # round(m*q / 2**v) with ties going up, in exact integer arithmetic
    return (2 * m * q + (1 << v)) >> (v + 1)


def postprocess(m1: int, m2: int, v1: int, v2: int, q: int):
    """Recover s from the two measured integers, or FAIL (None)."""
    if not (0 <= m1 < 1 << v1 and 0 <= m2 < 1 << v2):
        raise ValueError("measurement out of range")
    l = _round_half_up(m2, q, v2) % q
    if l == 0:
        return FAIL
    beta = _round_half_up(m1, q, v1) % q
    return beta * pow(l, -1, q) % q


def _iqft_block(ops, qubits):
    """Coherent inverse QFT; ``qubits[0]`` is read first (lowest output bit)."""
    r = len(qubits)
    for a in range(r):
        ops.append(H(qubits[a]))
        for b in range(a + 1, r):
            ops.append(PHASE(qubits[b], b - a + 1, 1, controls=(qubits[a],)))


def _corrections(ops, qubit, b, earlier):
    """Phase corrections for bit ``b`` from already measured bits ``earlier``.

    ``earlier`` maps a bit position ``a < b`` of the same register to its
    classical bit; each contributes R_{b-a+1} when it read 1.
    """
    for a, clbit in earlier:
        ops.append(PHASE(qubit, b - a + 1, 1, cond=((clbit, 1),)))


def build_dlp_circuit(instance: DlpInstance, adder, variant: Variant = STANDARD,
                      clean_idle: bool = True) -> Circuit:
    adder = Adder.parse(adder)
    p, q = instance.p, instance.q
    lay = layout(p, q, adder)
    v1, v2, w = lay.v1, lay.v2, lay.w
    bases = mod_exp_bases(instance.g, instance.h, p, v1, v2)
    if variant.kind == "STANDARD":
        return _build_standard(lay, bases, p, adder, clean_idle)
    k = variant.k
    if variant.kind == "HSQFT" and (k > v1 or k > v2):
        raise ValueError("HSQFT needs k <= v1 and k <= v2")
    n = k + w + lay.ancillas
    work = list(range(k, k + w))
    acc = list(range(k + w, k + 2 * w + 1))
    flag = k + 2 * w + 1
    carries = list(range(flag + 1, n))
    em = Emitter(n)
    em.ops.append(X(work[0]))
    # (register, position within register, base, clbit), in processing order
    bits = [(0, b, bases[b], b) for b in range(v1)] + \
           [(1, b, bases[v1 + b], v1 + b) for b in range(v2)]

    def mul(slot, base):
        em.dirty = work + [s for s in range(k) if s != slot]
        mod_mul(em, adder, base, p, work, acc, flag, carries, (slot,))

    def measured_before(reg, b):
        return [(a, cb) for (r, a, _, cb) in bits if r == reg and a < b]

    if variant.kind == "SEMICLASSICAL":
        pending = deque()

        def finish(slot, reg, b, clbit):
            _corrections(em.ops, slot, b, measured_before(reg, b))
            em.ops.append(H(slot))
            em.ops.append(Measure(slot, clbit))
            em.ops.append(X(slot, cond=((clbit, 1),)))

        for i, (reg, b, base, clbit) in enumerate(bits):
            slot = i % k
            if len(pending) == k:
                finish(*pending.popleft())
            em.ops.append(H(slot))
            mul(slot, base)
            pending.append((slot, reg, b, clbit))
        while pending:
            finish(*pending.popleft())
    else:
        for reg, v in ((0, v1), (1, v2)):
            reg_bits = [bt for bt in bits if bt[0] == reg]
            for start in range(0, v, k):
                block = reg_bits[start:start + k]
                slots = list(range(len(block)))
                for slot, (_, b, base, _) in zip(slots, block):
                    em.ops.append(H(slot))
                    mul(slot, base)
                for slot, (_, b, _, _) in zip(slots, block):
                    _corrections(em.ops, slot, b, measured_before(reg, start))
                _iqft_block(em.ops, slots)
                for slot, (_, _, _, clbit) in zip(slots, block):
                    em.ops.append(Measure(slot, clbit))
                for slot, (_, _, _, clbit) in zip(slots, block):
                    em.ops.append(X(slot, cond=((clbit, 1),)))
    return Circuit(n, v1 + v2, em.ops)


def _build_standard(lay: RegisterLayout, bases, p, adder, clean_idle) -> Circuit:
    v1, v2, w = lay.v1, lay.v2, lay.w
    x1 = list(range(v1))
    x2 = list(range(v1, v1 + v2))
    work = list(range(v1 + v2, v1 + v2 + w))
    acc = list(range(work[-1] + 1, work[-1] + 2 + w))
    flag = acc[-1] + 1
    carries = list(range(flag + 1, lay.total))
    em = Emitter(lay.total)
    em.ops.append(X(work[0]))
    controls = x1[::-1] + x2[::-1]
    emit_mod_exp(em, adder, bases, p, controls, work, acc, flag, carries,
                 prepare=True, clean_idle=clean_idle)
    for reg, off in ((x1, 0), (x2, v1)):
        _iqft_block(em.ops, reg[::-1])
    for reg, off in ((x1, 0), (x2, v1)):
        for a in range(len(reg)):
            em.ops.append(Measure(reg[len(reg) - 1 - a], off + a))
    return Circuit(lay.total, v1 + v2, em.ops)


# probabilities ------------------------------------------------------------------

def outcome_table(instance: DlpInstance, adder, variant: Variant = STANDARD,
                  backend: str = "sparse") -> np.ndarray:
    """Exact P(m1, m2) as a ``(2**v1, 2**v2)`` array from circuit simulation."""
    lay = layout(instance.p, instance.q, adder)
    circ = build_dlp_circuit(instance, adder, variant)
    dist = outcome_distribution(circ, backend=backend)
    table = np.zeros((1 << lay.v1, 1 << lay.v2))
    mask = (1 << lay.v1) - 1
    for val, prob in dist.items():
        table[val & mask, val >> lay.v1] += prob
    return table


def success_from_table(table: np.ndarray, q: int, s: int) -> float:
    v1 = table.shape[0].bit_length() - 1
    v2 = table.shape[1].bit_length() - 1
    total = 0.0
    for m1 in range(table.shape[0]):
        for m2 in range(table.shape[1]):
            if table[m1, m2] and postprocess(m1, m2, v1, v2, q) == s:
                total += table[m1, m2]
    return total


def success_probability_exact(instance: DlpInstance, adder, variant: Variant = STANDARD,
                              backend: str = "sparse") -> float:
    table = outcome_table(instance, adder, variant, backend)
    return success_from_table(table, instance.q, instance.s)


def modal_outcome(instance: DlpInstance, adder, variant: Variant = STANDARD):
    """Post-processing result carrying the most probability (FAIL excluded)."""
    table = outcome_table(instance, adder, variant)
    v1 = table.shape[0].bit_length() - 1
    v2 = table.shape[1].bit_length() - 1
    mass: dict = {}
    for m1 in range(table.shape[0]):
        for m2 in range(table.shape[1]):
            s = postprocess(m1, m2, v1, v2, instance.q)
            if s is not FAIL:
                mass[s] = mass.get(s, 0.0) + table[m1, m2]
    return max(mass, key=lambda key: (mass[key], -key)), mass


def analytic_table(q: int, s: int, v1: int, v2: int) -> np.ndarray:
    """P(m1, m2) straight from the amplitudes, no circuit.

    After exponentiation the work register holds g^e with
    e = s*x1 + x2 mod q, so the control registers of each e-branch carry a
    uniform superposition over {(x1, x2) : s*x1 + x2 = e (mod q)}; the
    inverse QFTs then give amplitude
    A_e(m1, m2) = 2^-(v1+v2) sum exp(-2 pi i (x1 m1 / 2^v1 + x2 m2 / 2^v2)).
    """
    x1 = np.arange(1 << v1)
    x2 = np.arange(1 << v2)
    f1 = np.exp(-2j * np.pi * np.outer(x1, x1) / (1 << v1)) / (1 << v1)
    f2 = np.exp(-2j * np.pi * np.outer(x2, x2) / (1 << v2)) / (1 << v2)
    e = (s * x1[:, None] + x2[None, :]) % q
    table = np.zeros((1 << v1, 1 << v2))
    for ev in range(q):
        amp = f1 @ (e == ev).astype(complex) @ f2.T
        table += np.abs(amp) ** 2
    return table


def analytic_success_probability(q: int, s: int, v1: int | None = None, v2: int | None = None) -> float:
    v1 = q.bit_length() if v1 is None else v1
    v2 = q.bit_length() if v2 is None else v2
    return success_from_table(analytic_table(q, s, v1, v2), q, s)


def sample_success_rate(instance: DlpInstance, adder, shots: int, seed: int = 0,
                        variant: Variant = STANDARD, method: str = "state") -> float:
    """Fraction of ``shots`` whose post-processed measurement equals s.

    ``method="state"`` simulates once and draws all shots from the final
    measurement distribution; ``method="run"`` executes the circuit shot by
    shot with sampled mid-circuit measurements.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    lay = layout(instance.p, instance.q, adder)
    rng = stream(seed, instance.p, instance.q, "shots")
    mask = (1 << lay.v1) - 1
    hits = 0
    if method == "state":
        table = outcome_table(instance, adder, variant).ravel()
        table = np.clip(table, 0, None)
        draws = rng.choice(table.size, size=shots, p=table / table.sum())
        counts = np.bincount(draws, minlength=table.size)
        for flat in np.flatnonzero(counts):
            m1, m2 = divmod(int(flat), 1 << lay.v2)
            if postprocess(m1, m2, lay.v1, lay.v2, instance.q) == instance.s:
                hits += int(counts[flat])
    elif method == "run":
        from .sim import run
        circ = build_dlp_circuit(instance, adder, variant)
        for _ in range(shots):
            rec = run(circ, seed=rng, backend="sparse")
            val = sum(b << i for i, b in enumerate(rec.bits))
            if postprocess(val & mask, val >> lay.v1, lay.v1, lay.v2, instance.q) == instance.s:
                hits += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    return hits / shots


# sweeps ---------------------------------------------------------------------------

SWEEP_COLUMNS = ("p", "q", "bits_p", "bits_q", "g", "h", "s", "probability", "mode", "shots", "seed")


def sweep_row(p: int, q: int, adder, shots, seed: int) -> dict:
    inst = make_instance(p, q, seed)
    if shots is None:
        prob = success_probability_exact(inst, adder)
        mode, nshots = "exact", 0
    else:
        prob = sample_success_rate(inst, adder, shots, seed)
        mode, nshots = "shots", shots
    return {"p": p, "q": q, "bits_p": p.bit_length(), "bits_q": q.bit_length(), "g": inst.g,
            "h": inst.h, "s": inst.s, "probability": prob, "mode": mode, "shots": nshots, "seed": seed}


def _sweep_job(args):
    return sweep_row(*args)


def sweep(qubit_budget: int, adder, mode="exact", seed: int = 0, jobs: int = 1) -> list[dict]:
    """One row per in-budget pair. ``mode`` is "exact" or a shot count."""
    adder = Adder.parse(adder)
    shots = None if mode == "exact" else int(mode)
    tasks = [(p, q, adder, shots, seed) for p, q in enumerate_pairs(qubit_budget, adder)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_job, tasks))
    else:
        rows = [_sweep_job(t) for t in tasks]
    return sorted(rows, key=lambda r: (r["p"], r["q"]))
