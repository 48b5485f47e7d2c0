"""Gate-level circuit IR: gates, metrics, Clifford test and a fusion optimizer.

Conventions
-----------
* Qubit 0 is the least significant bit of a basis index.
* A gate's local matrix acts on ``gate.qubits == controls + targets`` with
  bit ``i`` of the local index belonging to ``gate.qubits[i]``.
* ``PHASE`` stores an exact dyadic angle: ``diag(1, exp(-2j*pi*num/2**j))``.
  ``num == 1`` is the rotation R_j; other numerators are accumulated
  corrections and inverses. Angles are kept reduced (``num`` odd or zero).
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

SQRT_HALF = 1.0 / np.sqrt(2.0)


def dyadic(j: int, num: int) -> tuple[int, int]:
    """Reduce the angle num/2**j (in turns, sign flipped) to lowest terms."""
    if j < 0:
        raise ValueError("phase exponent must be >= 0")
    num %= 1 << j
    while j > 0 and num % 2 == 0:
        num //= 2
        j -= 1
    if num == 0:
        j = 0
    return j, num


@dataclass(frozen=True, slots=True, eq=False)
class Gate:
    kind: str  # H, X, PHASE, SWAP or FUSED
    targets: tuple
    controls: tuple = ()
    j: int = 0
    num: int = 0
    cond: tuple = ()  # ((clbit, value), ...)
    matrix: object = None  # explicit FUSED matrix
    parts: tuple = ()  # FUSED built by the optimizer; matrix derived lazily

    @property
    def qubits(self) -> tuple:
        return self.controls + self.targets

    @property
    def name(self) -> str:
        if self.kind == "X":
            return ("X", "CX", "CCX")[len(self.controls)] if len(self.controls) < 3 else "MCX"
        if self.kind == "PHASE":
            return "CPHASE" if self.controls else "PHASE"
        return self.kind

    def with_cond(self, cond) -> "Gate":
        return Gate(self.kind, self.targets, self.controls, self.j, self.num,
                    tuple(tuple(c) for c in cond), self.matrix, self.parts)

    def base_matrix(self) -> np.ndarray:
        """Matrix on the targets only (no controls)."""
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF
        if self.kind == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == "PHASE":
            return np.diag([1.0, phase_factor(self.j, self.num)])
        if self.kind == "SWAP":
            m = np.zeros((4, 4), dtype=complex)
            m[0, 0] = m[3, 3] = m[1, 2] = m[2, 1] = 1
            return m
        if self.kind == "FUSED":
            return fused_matrix(self)
        raise ValueError(f"unknown gate kind {self.kind}")

    def local_matrix(self) -> np.ndarray:
        return controlled(self.base_matrix(), len(self.controls))

    def inverse(self) -> "Gate":
        if self.cond:
            raise ValueError("classically conditioned gates have no formal inverse")
        if self.kind == "PHASE":
            j, num = dyadic(self.j, -self.num)
            return Gate("PHASE", self.targets, self.controls, j, num)
        if self.kind == "FUSED":
            return Gate("FUSED", self.targets, matrix=fused_matrix(self).conj().T)
        return self

    def __repr__(self):
        extra = f", j={self.j}, num={self.num}" if self.kind == "PHASE" else ""
        cond = f", cond={self.cond}" if self.cond else ""
        return f"{self.name}(t={list(self.targets)}, c={list(self.controls)}{extra}{cond})"


@dataclass(frozen=True, slots=True)
class Measure:
    qubit: int
    clbit: int

    @property
    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True, slots=True)
class Reset:
    qubit: int

    @property
    def qubits(self):
        return (self.qubit,)


# constructors -------------------------------------------------------------

def H(q, cond=()):
    return Gate("H", (q,), cond=cond)


def X(q, controls=(), cond=()):
    return Gate("X", (q,), tuple(controls), cond=cond)


def CX(c, t):
    return Gate("X", (t,), (c,))


def CCX(a, b, t):
    return Gate("X", (t,), (a, b))


def MCX(controls, t):
    return Gate("X", (t,), tuple(controls))


def PHASE(q, j, num=1, controls=(), cond=()):
    j, num = dyadic(j, num)
    return Gate("PHASE", (q,), tuple(controls), j, num, cond)


def SWAP(a, b, controls=()):
    return Gate("SWAP", (a, b), tuple(controls))


def FUSED(qubits, matrix):
    m = np.asarray(matrix, dtype=complex)
    k = len(qubits)
    if m.shape != (1 << k, 1 << k):
        raise ValueError("FUSED matrix shape does not match its qubits")
    if not np.allclose(m @ m.conj().T, np.eye(1 << k), atol=1e-10):
        raise ValueError("FUSED matrix is not unitary")
    return Gate("FUSED", tuple(qubits), matrix=m)


def phase_factor(j: int, num: int) -> complex:
    return complex(np.exp(-2j * np.pi * num / (1 << j)))


def controlled(u: np.ndarray, n_controls: int) -> np.ndarray:
    if n_controls == 0:
        return u
    c = n_controls
    dim = u.shape[0] << c
    m = np.eye(dim, dtype=complex)
    cm = (1 << c) - 1
    idx = np.array([cm | (a << c) for a in range(u.shape[0])])
    m[np.ix_(idx, idx)] = u
    return m


def embed(u: np.ndarray, positions, k: int) -> np.ndarray:
    """Lift ``u`` (acting on local positions) into a 2**k-dimensional space."""
    positions = list(positions)
    r = len(positions)
    others = [i for i in range(k) if i not in positions]
    full = np.zeros((1 << k, 1 << k), dtype=complex)
    for rest in range(1 << (k - r)):
        base = 0
        for bi, pos in enumerate(others):
            if rest >> bi & 1:
                base |= 1 << pos
        idx = []
        for a in range(1 << r):
            v = base
            for bi, pos in enumerate(positions):
                if a >> bi & 1:
                    v |= 1 << pos
            idx.append(v)
        full[np.ix_(idx, idx)] = u
    return full


# FUSED matrices and Clifford status are cached by a canonical local key ----

_FUSED_CACHE: dict = {}
_CLIFF_CACHE: dict = {}


def _canonical(gate: Gate):
    pos = {q: i for i, q in enumerate(gate.targets)}
    return (len(gate.targets),) + tuple(
        (p.kind, tuple(pos[t] for t in p.targets), tuple(pos[c] for c in p.controls), p.j, p.num)
        for p in gate.parts
    )


def fused_matrix(gate: Gate) -> np.ndarray:
    if gate.matrix is not None:
        return gate.matrix
    key = _canonical(gate)
    m = _FUSED_CACHE.get(key)
    if m is None:
        k = key[0]
        m = np.eye(1 << k, dtype=complex)
        for kind, t, c, j, num in key[1:]:
            part = Gate(kind, t, c, j, num)
            m = embed(part.local_matrix(), c + t, k) @ m
        if len(_FUSED_CACHE) > 500_000:
            _FUSED_CACHE.clear()
        _FUSED_CACHE[key] = m
    return m


@lru_cache(maxsize=None)
def _paulis(k: int) -> np.ndarray:
    single = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    mats = []
    for combo in product(range(4), repeat=k):
        m = np.ones((1, 1), dtype=complex)
        for c in combo:  # first factor ends up on the highest bit
            m = np.kron(m, single[c])
        mats.append(m)
    return np.array(mats)


@lru_cache(maxsize=None)
def _generators(k: int) -> tuple:
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1, -1]).astype(complex)
    gens = []
    for i in range(k):
        gens.append(embed(x, [i], k))
        gens.append(embed(z, [i], k))
    return tuple(gens)


def unitary_is_clifford(u: np.ndarray, tol: float = 1e-9) -> bool:
    dim = u.shape[0]
    k = dim.bit_length() - 1
    paulis = _paulis(k)
    for gen in _generators(k):
        v = u @ gen @ u.conj().T
        coeff = np.einsum("pij,ji->p", paulis, v) / dim
        if np.max(np.abs(coeff)) < 1 - tol:
            return False
    return True


def is_clifford(gate: Gate) -> bool:
    """Pauli-conjugation test on gates acting on at most three qubits."""
    if len(gate.qubits) > 3:
        raise ValueError("is_clifford needs a gate on <= 3 qubits; decompose first")
    if gate.kind == "FUSED":
        if gate.matrix is not None:
            return unitary_is_clifford(gate.matrix)
        key = _canonical(gate)
    else:
        key = (gate.kind, len(gate.controls), len(gate.targets), gate.j, gate.num)
    hit = _CLIFF_CACHE.get(key)
    if hit is None:
        hit = unitary_is_clifford(gate.local_matrix())
        _CLIFF_CACHE[key] = hit
    return hit


def is_non_clifford(gate: Gate) -> bool:
    if len(gate.qubits) <= 3:
        return not is_clifford(gate)
    # wide gates only arise as multi-controlled X/PHASE/SWAP
    if gate.kind == "PHASE" and gate.num == 0:
        return False
    return len(gate.controls) >= 2


# circuit ------------------------------------------------------------------

class Circuit:
    """Ordered list of gates, measurements and resets."""

    def __init__(self, n_qubits: int, n_clbits: int = 0, ops=None):
        self.n_qubits = n_qubits
        self.n_clbits = n_clbits
        self.ops = list(ops) if ops is not None else []

    def append(self, op):
        self.ops.append(op)
        return self

    def extend(self, ops):
        self.ops.extend(ops)
        return self

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    @property
    def gates(self):
        return [op for op in self.ops if isinstance(op, Gate)]

    def validate(self):
        written = set()
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit {q} out of range in {op}")
            if isinstance(op, Measure):
                if not 0 <= op.clbit < self.n_clbits:
                    raise ValueError(f"clbit {op.clbit} out of range")
                written.add(op.clbit)
            elif isinstance(op, Gate):
                if len(set(op.qubits)) != len(op.qubits):
                    raise ValueError(f"repeated qubit in {op}")
                for b, _ in op.cond:
                    if b not in written:
                        raise ValueError(f"condition on clbit {b} before it is measured")
        return self

    def inverse(self) -> "Circuit":
        for op in self.ops:
            if not isinstance(op, Gate):
                raise ValueError("cannot invert a circuit containing measurements or resets")
        return Circuit(self.n_qubits, self.n_clbits, [g.inverse() for g in reversed(self.ops)])

    def remapped(self, mapping, n_qubits=None) -> "Circuit":
        """Copy with qubit ``i`` renamed to ``mapping[i]``."""
        out = []
        for op in self.ops:
            if isinstance(op, Measure):
                out.append(Measure(mapping[op.qubit], op.clbit))
            elif isinstance(op, Reset):
                out.append(Reset(mapping[op.qubit]))
            else:
                out.append(Gate(op.kind, tuple(mapping[t] for t in op.targets),
                                tuple(mapping[c] for c in op.controls), op.j, op.num,
                                op.cond, op.matrix,
                                tuple(Gate(p.kind, tuple(mapping[t] for t in p.targets),
                                           tuple(mapping[c] for c in p.controls), p.j, p.num)
                                      for p in op.parts)))
        return Circuit(n_qubits or self.n_qubits, self.n_clbits, out)

    # serialization
    def to_dict(self) -> dict:
        gates = []
        for op in self.ops:
            if isinstance(op, Measure):
                gates.append({"kind": "MEASURE", "targets": [op.qubit], "controls": [],
                              "cond": [], "clbits": [op.clbit]})
            elif isinstance(op, Reset):
                gates.append({"kind": "RESET", "targets": [op.qubit], "controls": [], "cond": []})
            else:
                d = {"kind": op.name, "targets": list(op.targets), "controls": list(op.controls),
                     "cond": [list(c) for c in op.cond]}
                if op.kind == "PHASE":
                    d["param"] = op.j
                    if op.num != 1:
                        d["num"] = op.num
                if op.kind == "FUSED":
                    m = fused_matrix(op)
                    d["matrix"] = [[float(z.real), float(z.imag)] for z in m.ravel()]
                gates.append(d)
        return {"qubits": self.n_qubits, "clbits": self.n_clbits, "gates": gates}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        ops = []
        for g in d["gates"]:
            kind = g["kind"]
            t = tuple(g.get("targets", ()))
            c = tuple(g.get("controls", ()))
            cond = tuple(tuple(x) for x in g.get("cond", ()))
            if kind == "MEASURE":
                ops.append(Measure(t[0], g["clbits"][0]))
            elif kind == "RESET":
                ops.append(Reset(t[0]))
            elif kind in ("X", "CX", "CCX", "MCX"):
                ops.append(Gate("X", t, c, cond=cond))
            elif kind in ("PHASE", "CPHASE"):
                j, num = dyadic(int(g["param"]), int(g.get("num", 1)))
                ops.append(Gate("PHASE", t, c, j, num, cond))
            elif kind in ("H", "SWAP"):
                ops.append(Gate(kind, t, c, cond=cond))
            elif kind == "FUSED":
                flat = np.array([complex(re, im) for re, im in g["matrix"]])
                dim = 1 << len(t)
                ops.append(FUSED(t, flat.reshape(dim, dim)).with_cond(cond))
            else:
                raise ValueError(f"unknown gate kind {kind}")
        return cls(d["qubits"], d["clbits"], ops).validate()

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


# metrics ------------------------------------------------------------------

@dataclass(frozen=True)
class CircuitMetrics:
    n_qubits: int
    gate_count: int
    depth: int
    non_clifford_count: int


def metrics(circuit: Circuit) -> CircuitMetrics:
    qlev = [0] * circuit.n_qubits
    clev = [0] * max(circuit.n_clbits, 1)
    count = depth = nonc = 0
    for op in circuit.ops:
        if isinstance(op, Gate):
            lvl = 0
            for q in op.qubits:
                if qlev[q] > lvl:
                    lvl = qlev[q]
            for b, _ in op.cond:
                if clev[b] > lvl:
                    lvl = clev[b]
            lvl += 1
            for q in op.qubits:
                qlev[q] = lvl
            if lvl > depth:
                depth = lvl
            count += 1
            if is_non_clifford(op):
                nonc += 1
        elif isinstance(op, Measure):
            # measurements fence ordering but take no layer of their own
            lvl = max(qlev[op.qubit], clev[op.clbit])
            qlev[op.qubit] = clev[op.clbit] = lvl
    return CircuitMetrics(circuit.n_qubits, count, depth, nonc)


# optimizer ----------------------------------------------------------------

MERGE_WIDTH = 3
LOOKBACK = 8


def commutes(g1: Gate, g2: Gate) -> bool:
    """Sufficient (not necessary) syntactic test that two gates commute."""
    if g1.cond or g2.cond:
        return False
    s1, s2 = set(g1.qubits), set(g2.qubits)
    if not s1 & s2:
        return True
    k1, k2 = g1.kind, g2.kind
    if k1 == "PHASE" and k2 == "PHASE":
        return True
    if k1 == "X" and k2 == "X":
        return g1.targets[0] not in g2.controls and g2.targets[0] not in g1.controls
    if k1 == "PHASE" and k2 == "X":
        return g2.targets[0] not in s1
    if k2 == "PHASE" and k1 == "X":
        return g1.targets[0] not in s2
    return False


def optimize(circuit: Circuit, lookback: int = LOOKBACK) -> Circuit:
    """Fuse unconditioned gates into blocks acting on at most three qubits.

    Gates are taken in order. A gate walks back over the most recent blocks
    that share a qubit with it (at most ``lookback`` of them) and joins the
    first one whose support, together with its own, still fits in three
    qubits. It may only walk past a block when it commutes with every gate
    in that block; blocks sharing no qubit are skipped freely. Measurements,
    resets and conditioned gates form fences that are never merged into or
    crossed. Fused blocks equal to the identity are dropped.
    """
    hist = [[] for _ in range(circuit.n_qubits)]  # block indices touching each qubit
    supports: list = []  # qubit set, or None for a fence
    members: list = []
    for op in circuit.ops:
        if isinstance(op, Gate) and not op.cond and len(op.qubits) <= MERGE_WIDTH:
            qs = op.qubits
            recent = set()
            for q in qs:
                recent.update(hist[q][-lookback:])
            home = None
            for bi in sorted(recent, reverse=True)[:lookback]:
                sup = supports[bi]
                if sup is None:
                    break
                if len(sup.union(qs)) <= MERGE_WIDTH:
                    home = bi
                    break
                if not all(commutes(op, m) for m in members[bi]):
                    break
            if home is not None:
                supports[home].update(qs)
                members[home].append(op)
                for q in qs:
                    h = hist[q]
                    i = bisect.bisect_left(h, home)
                    if i == len(h) or h[i] != home:
                        h.insert(i, home)
                continue
            supports.append(set(qs))
        else:
            supports.append(None)
        members.append([op])
        idx = len(members) - 1
        for q in op.qubits:
            hist[q].append(idx)
    out = []
    for sup, mem in zip(supports, members):
        if sup is None or len(mem) == 1:
            out.append(mem[0])
            continue
        if any(g.kind == "FUSED" and g.matrix is not None for g in mem):
            fused = FUSED(tuple(sorted(sup)), _product(mem, sorted(sup)))
        else:
            parts = []
            for g in mem:
                parts.extend(g.parts if g.kind == "FUSED" else (g,))
            fused = Gate("FUSED", tuple(sorted(sup)), parts=tuple(parts))
        m = fused_matrix(fused)
        if np.allclose(m, np.eye(m.shape[0]), atol=1e-12):
            continue
        out.append(fused)
    return Circuit(circuit.n_qubits, circuit.n_clbits, out)


def _product(gates, qubits) -> np.ndarray:
    pos = {q: i for i, q in enumerate(qubits)}
    k = len(qubits)
    m = np.eye(1 << k, dtype=complex)
    for g in gates:
        m = embed(g.local_matrix(), [pos[q] for q in g.qubits], k) @ m
    return m
