"""State-vector simulation with mid-circuit measurement, reset and feedforward.

Two engines share one interface:

* :class:`StateVector` stores all ``2**n`` amplitudes (the reference engine).
* :class:`SparseState` stores only nonzero amplitudes as parallel
  ``(index, amplitude)`` arrays. Shor circuits keep most of the register
  space empty (the work register only ever holds subgroup elements, the
  ancillas are mostly clean), so the support stays tiny compared to ``2**n``.

Both apply the same gates with the same bit conventions (qubit ``q`` is bit
``q`` of the basis index) and are cross-checked in the tests.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, Measure, Reset, SQRT_HALF, phase_factor
from .rng import stream

DEFAULT_QUBIT_CAP = 26
PRUNE = 1e-12


class QubitCapError(RuntimeError):
    pass


def qubit_cap() -> int:
    env = os.environ.get("DLSHOR_QUBIT_CAP")
    return int(env) if env else DEFAULT_QUBIT_CAP


def check_cap(n_qubits: int, cap: int | None = None):
    cap = qubit_cap() if cap is None else cap
    if n_qubits > cap:
        raise QubitCapError(f"{n_qubits} qubits exceeds the simulation cap of {cap}")


# dense engine --------------------------------------------------------------

class StateVector:
    def __init__(self, n_qubits: int, amplitudes=None):
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_qubits, dtype=complex)
            amplitudes[0] = 1.0
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << n_qubits,):
            raise ValueError("amplitude vector has the wrong length")

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_dense(self) -> np.ndarray:
        return self.amplitudes

    def dump(self, path):
        """Write amplitudes as little-endian float64 pairs (re, im)."""
        self.amplitudes.astype("<c16").tofile(path)

    @classmethod
    def load(cls, path) -> "StateVector":
        amps = np.fromfile(path, dtype="<c16")
        return cls(len(amps).bit_length() - 1, amps)

    # -- kernels
    def _tensor(self):
        return self.amplitudes.reshape((2,) * self.n_qubits) if self.n_qubits else self.amplitudes

    def _index(self, fixed):
        n = self.n_qubits
        idx = [slice(None)] * n
        for q, b in fixed:
            idx[n - 1 - q] = slice(b, b + 1)  # keeps a view even when every axis is fixed
        return tuple(idx)

    def apply(self, gate: Gate):
        n = self.n_qubits
        for q in gate.qubits:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n} qubits")
        psi = self._tensor()
        ctrl = [(c, 1) for c in gate.controls]
        kind = gate.kind
        if kind in ("X", "H", "PHASE"):
            t = gate.targets[0]
            v0 = psi[self._index(ctrl + [(t, 0)])]
            v1 = psi[self._index(ctrl + [(t, 1)])]
            if kind == "X":
                tmp = v0.copy()
                v0[...] = v1
                v1[...] = tmp
            elif kind == "PHASE":
                if gate.num:
                    v1 *= phase_factor(gate.j, gate.num)
            else:
                tmp = v0.copy()
                v0 += v1
                v0 *= SQRT_HALF
                v1 -= tmp
                v1 *= -SQRT_HALF
        elif kind == "SWAP" and len(gate.targets) == 2:
            a, b = gate.targets
            v01 = psi[self._index(ctrl + [(a, 1), (b, 0)])]
            v10 = psi[self._index(ctrl + [(a, 0), (b, 1)])]
            tmp = v01.copy()
            v01[...] = v10
            v10[...] = tmp
        else:
            m = gate.local_matrix()
            qs = gate.qubits
            k = len(qs)
            axes = [n - 1 - q for q in reversed(qs)]
            moved = np.moveaxis(psi, axes, list(range(k)))
            shape = moved.shape
            out = (m @ moved.reshape(1 << k, -1)).reshape(shape)
            psi[...] = np.moveaxis(out, list(range(k)), axes)
        return self

    def prob_one(self, qubit: int) -> float:
        v1 = self._tensor()[self._index([(qubit, 1)])]
        return float(np.sum(np.abs(v1) ** 2))

    def project(self, qubit: int, bit: int, prob: float):
        psi = self._tensor()
        psi[self._index([(qubit, 1 - bit)])] = 0
        self.amplitudes /= np.sqrt(prob)
        return self

    def flip(self, qubit: int):
        return self.apply(Gate("X", (qubit,)))

    def distribution(self, qubits) -> np.ndarray:
        qubits = list(qubits)
        n = self.n_qubits
        p = self.probabilities().reshape((2,) * n) if n else self.probabilities()
        keep = [n - 1 - q for q in qubits]
        drop = tuple(a for a in range(n) if a not in keep)
        marg = p.sum(axis=drop) if drop else p
        # remaining axes are in increasing axis order; reorder so the
        # first subset qubit is the least significant output bit
        remaining = sorted(keep)
        order = [remaining.index(a) for a in reversed(keep)]
        return np.transpose(marg, order).reshape(-1) if qubits else np.array([float(np.sum(p))])


# sparse engine -------------------------------------------------------------

def _deposit_table(qubits) -> np.ndarray:
    k = len(qubits)
    table = np.zeros(1 << k, dtype=np.int64)
    for a in range(1 << k):
        v = 0
        for i, q in enumerate(qubits):
            if a >> i & 1:
                v |= 1 << q
        table[a] = v
    return table


def _monomial(m: np.ndarray):
    """(perm, phases) if ``m`` has exactly one nonzero per column, else None."""
    nz = np.abs(m) > 1e-12
    if not np.all(nz.sum(axis=0) == 1):
        return None
    perm = np.argmax(nz, axis=0)
    return perm, m[perm, np.arange(m.shape[1])]


class SparseState:
    def __init__(self, n_qubits: int, index=None, amplitude=None):
        if n_qubits > 62:
            raise ValueError("sparse engine supports at most 62 qubits")
        self.n_qubits = n_qubits
        if index is None:
            index = np.zeros(1, dtype=np.int64)
            amplitude = np.ones(1, dtype=complex)
        self.index = np.asarray(index, dtype=np.int64)
        self.amp = np.asarray(amplitude, dtype=complex)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "SparseState":
        return cls(n_qubits, np.array([index], dtype=np.int64), np.ones(1, dtype=complex))

    @classmethod
    def from_dense(cls, sv) -> "SparseState":
        amps = sv.amplitudes if isinstance(sv, StateVector) else np.asarray(sv)
        nz = np.flatnonzero(np.abs(amps) > PRUNE)
        return cls(len(amps).bit_length() - 1, nz.astype(np.int64), amps[nz].astype(complex))

    def copy(self) -> "SparseState":
        return SparseState(self.n_qubits, self.index.copy(), self.amp.copy())

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n_qubits, dtype=complex)
        out[self.index] = self.amp
        return out

    def support(self) -> int:
        return len(self.index)

    def apply(self, gate: Gate):
        n = self.n_qubits
        for q in gate.qubits:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n} qubits")
        cm = 0
        for c in gate.controls:
            cm |= 1 << c
        idx = self.index
        sel = None if cm == 0 else (idx & cm) == cm
        kind = gate.kind
        if kind == "X":
            bit = np.int64(1 << gate.targets[0])
            if sel is None:
                idx ^= bit
            else:
                idx[sel] ^= bit
        elif kind == "PHASE":
            if gate.num:
                hit = (idx >> gate.targets[0]) & 1 == 1
                if sel is not None:
                    hit &= sel
                self.amp[hit] *= phase_factor(gate.j, gate.num)
        elif kind == "SWAP":
            a, b = gate.targets
            hit = ((idx >> a) ^ (idx >> b)) & 1 == 1
            if sel is not None:
                hit &= sel
            idx[hit] ^= np.int64((1 << a) | (1 << b))
        else:
            self._apply_block(gate.targets, gate.base_matrix(), sel)
        return self

    def _apply_block(self, targets, m, sel):
        k = len(targets)
        dep = _deposit_table(targets)
        tmask = np.int64(int(dep[-1]))
        if sel is None:
            idx, amp = self.index, self.amp
        else:
            idx, amp = self.index[sel], self.amp[sel]
        local = np.zeros(len(idx), dtype=np.int64)
        for i, t in enumerate(targets):
            local |= ((idx >> t) & 1) << i
        base = idx & ~tmask
        mono = _monomial(m)
        if mono is not None:
            perm, ph = mono
            new_idx = base | dep[perm[local]]
            new_amp = amp * ph[local]
        else:
            uniq, inv = np.unique(base, return_inverse=True)
            a = np.zeros((len(uniq), 1 << k), dtype=complex)
            a[inv, local] = amp
            b = a @ m.T
            rows, cols = np.nonzero(np.abs(b) > PRUNE)
            new_idx = uniq[rows] | dep[cols]
            new_amp = b[rows, cols]
        if sel is None:
            self.index, self.amp = new_idx, new_amp
        else:
            keep = ~sel
            self.index = np.concatenate([self.index[keep], new_idx])
            self.amp = np.concatenate([self.amp[keep], new_amp])

    def prob_one(self, qubit: int) -> float:
        hit = (self.index >> qubit) & 1 == 1
        return float(np.sum(np.abs(self.amp[hit]) ** 2))

    def project(self, qubit: int, bit: int, prob: float):
        keep = (self.index >> qubit) & 1 == bit
        self.index = self.index[keep]
        self.amp = self.amp[keep] / np.sqrt(prob)
        return self

    def flip(self, qubit: int):
        self.index ^= np.int64(1 << qubit)
        return self

    def distribution(self, qubits) -> np.ndarray:
        qubits = list(qubits)
        local = np.zeros(len(self.index), dtype=np.int64)
        for i, q in enumerate(qubits):
            local |= ((self.index >> q) & 1) << i
        return np.bincount(local, weights=np.abs(self.amp) ** 2, minlength=1 << len(qubits))


# functional API ----------------------------------------------------------------

def new_state(n_qubits: int, backend: str = "dense"):
    if backend == "dense":
        return StateVector(n_qubits)
    if backend == "sparse":
        return SparseState(n_qubits)
    raise ValueError(f"unknown backend {backend!r}")


def apply_gate(state, gate: Gate):
    return state.apply(gate)


def measure_qubit(state, qubit: int, rng: np.random.Generator):
    p1 = state.prob_one(qubit)
    p1 = min(max(p1, 0.0), 1.0)
    bit = int(rng.random() < p1)
    prob = p1 if bit else 1.0 - p1
    if prob <= 0.0:
        raise RuntimeError("measurement selected a zero-probability branch")
    state.project(qubit, bit, prob)
    return bit, state


def distribution(state, qubits) -> np.ndarray:
    """Marginal Born distribution; bit i of the result index is ``qubits[i]``."""
    return state.distribution(qubits)


@dataclass
class RunRecord:
    bits: tuple
    state: object = None

    def value(self, clbits) -> int:
        return sum(self.bits[c] << i for i, c in enumerate(clbits))


def _cond_ok(gate: Gate, bits) -> bool:
    return all(bits[b] == v for b, v in gate.cond)


def run(circuit: Circuit, seed=0, keep_state: bool = False, backend: str = "dense",
        initial=None, cap: int | None = None) -> RunRecord:
    """Execute ``circuit`` once, sampling each measurement."""
    check_cap(circuit.n_qubits, cap)
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed, "run")
    state = initial.copy() if initial is not None else new_state(circuit.n_qubits, backend)
    bits = [0] * circuit.n_clbits
    for op in circuit.ops:
        if isinstance(op, Gate):
            if not op.cond or _cond_ok(op, bits):
                state.apply(op)
        elif isinstance(op, Measure):
            bits[op.clbit], state = measure_qubit(state, op.qubit, rng)
        elif isinstance(op, Reset):
            bit, state = measure_qubit(state, op.qubit, rng)
            if bit:
                state.flip(op.qubit)
    return RunRecord(tuple(bits), state if keep_state else None)


def _terminal_start(ops) -> int:
    i = len(ops)
    while i > 0 and isinstance(ops[i - 1], Measure):
        i -= 1
    return i


def outcome_distribution(circuit: Circuit, backend: str = "sparse", initial=None,
                         cap: int | None = None, min_weight: float = 1e-15) -> dict:
    """Exact distribution of the classical register, ``{clbit value: prob}``.

    Mid-circuit measurements branch the state; trailing measurements are
    read off the final marginal directly.
    """
    check_cap(circuit.n_qubits, cap)
    ops = circuit.ops
    stop = _terminal_start(ops)
    start = initial.copy() if initial is not None else new_state(circuit.n_qubits, backend)
    branches = [(1.0, [0] * circuit.n_clbits, start)]
    for op in ops[:stop]:
        if isinstance(op, Gate):
            for _, bits, st in branches:
                if not op.cond or _cond_ok(op, bits):
                    st.apply(op)
            continue
        nxt = []
        for w, bits, st in branches:
            p1 = min(max(st.prob_one(op.qubit), 0.0), 1.0)
            for bit, p in ((0, 1.0 - p1), (1, p1)):
                if w * p <= min_weight:
                    continue
                s2 = st.copy() if p < 1.0 else st
                s2.project(op.qubit, bit, p)
                b2 = list(bits)
                if isinstance(op, Measure):
                    b2[op.clbit] = bit
                elif bit:
                    s2.flip(op.qubit)
                nxt.append((w * p, b2, s2))
        branches = nxt
    tail = ops[stop:]
    result: dict = {}
    for w, bits, st in branches:
        base = 0
        tail_bits = {m.clbit for m in tail}
        for c, b in enumerate(bits):
            if b and c not in tail_bits:
                base |= 1 << c
        if tail:
            dist = st.distribution([m.qubit for m in tail])
            for local in np.flatnonzero(dist > 0):
                val = base
                for i, m in enumerate(tail):
                    if local >> i & 1:
                        val |= 1 << m.clbit
                result[val] = result.get(val, 0.0) + w * float(dist[local])
        else:
            result[base] = result.get(base, 0.0) + w
    return result


def final_state(circuit: Circuit, backend: str = "sparse", initial=None, cap: int | None = None):
    """State after the unitary prefix (everything before trailing measurements)."""
    check_cap(circuit.n_qubits, cap)
    ops = circuit.ops[: _terminal_start(circuit.ops)]
    st = initial.copy() if initial is not None else new_state(circuit.n_qubits, backend)
    for op in ops:
        if not isinstance(op, Gate) or op.cond:
            raise ValueError("final_state needs a measurement-free prefix")
        st.apply(op)
    return st


def basis_map(circuit: Circuit, inputs) -> tuple[np.ndarray, np.ndarray]:
    """Push every basis input through a unitary circuit at once.

    Each input is tagged with its position in extra high bits, so one sparse
    run tracks all of them. Returns ``(outputs, phases)``; raises if some
    input does not land on a single basis state.
    """
    inputs = np.asarray(inputs, dtype=np.int64)
    n = circuit.n_qubits
    count = len(inputs)
    tag_bits = max(1, int(count - 1).bit_length())
    if n + tag_bits > 62:
        raise ValueError("too many qubits to tag inputs")
    st = SparseState(n + tag_bits, inputs | (np.arange(count, dtype=np.int64) << n),
                     np.full(count, 1 / np.sqrt(count), dtype=complex))
    for op in circuit.ops:
        if not isinstance(op, Gate) or op.cond:
            raise ValueError("basis_map needs a measurement-free circuit")
        st.apply(op)
    tags = st.index >> n
    if len(tags) != count or len(np.unique(tags)) != count:
        raise ValueError("circuit does not map basis states to basis states")
    order = np.argsort(tags)
    outputs = (st.index & ((1 << n) - 1))[order]
    phases = st.amp[order] * np.sqrt(count)
    if not np.allclose(np.abs(phases), 1.0, atol=1e-9):
        raise ValueError("circuit does not map basis states to basis states")
    return outputs, phases
