"""Reversible modular arithmetic: ADD, Mod-ADD, Mod-PS, Mod-MUL, Mod-EXP.

Two adder families are provided:

QADD
    Fourier-space constant addition. The accumulator lives in the phase
    basis (QFT without the final swaps, so qubit ``j`` carries
    ``exp(2*pi*i*b/2**(j+1))``) and adding a constant is a row of PHASE gates.
RADD
    Ripple-carry addition with carry qubits, the constant hardwired into the
    gate pattern. External controls go on every gate, which is what produces
    the 3- and 4-controlled NOTs handled by :func:`build_mcx`.

The modular adder compares through the top (sign) qubit of a ``w+1`` bit
accumulator and one flag qubit, so QADD needs ``w+2`` ancillas and RADD
``2w+2``.

Register conventions: every register is a list of qubit indices, least
significant first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, Gate, H, PHASE, dyadic
from .numtheory import Adder


@dataclass(frozen=True)
class AncillaSpec:
    clean: int = 0
    dirty: int = 0


@dataclass
class Fragment:
    circuit: Circuit
    registers: dict
    toffoli_count: int = 0

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits


def width_of(p: int) -> int:
    """ceil(log2 p) for p >= 2."""
    return (p - 1).bit_length()


# multi-controlled NOT ---------------------------------------------------------

def mcx_gates(controls, target, clean=(), dirty=()):
    """Toffoli-only decomposition of a 3- or 4-controlled NOT.

    ``clean`` ancillas must hold |0> and are returned to |0>; ``dirty``
    ancillas may hold anything and are restored.
    """
    c = list(controls)
    t = target
    ccx = lambda a, b, tt: Gate("X", (tt,), (a, b))
    if len(c) == 3:
        if clean:
            a = clean[0]
            return [ccx(c[0], c[1], a), ccx(a, c[2], t), ccx(c[0], c[1], a)]
        if dirty:
            a = dirty[0]
            return [ccx(a, c[2], t), ccx(c[0], c[1], a), ccx(a, c[2], t), ccx(c[0], c[1], a)]
    elif len(c) == 4:
        if len(clean) >= 2:
            a1, a2 = clean[0], clean[1]
            return [ccx(c[0], c[1], a1), ccx(a1, c[2], a2), ccx(a2, c[3], t),
                    ccx(a1, c[2], a2), ccx(c[0], c[1], a1)]
        if clean and dirty:
            a1, d = clean[0], dirty[0]
            inner = [ccx(d, c[3], t), ccx(a1, c[2], d), ccx(d, c[3], t), ccx(a1, c[2], d)]
            return [ccx(c[0], c[1], a1)] + inner + [ccx(c[0], c[1], a1)]
        if len(dirty) >= 2:
            d1, d2 = dirty[0], dirty[1]
            return [ccx(c[3], d2, t), ccx(c[2], d1, d2), ccx(c[0], c[1], d1), ccx(c[2], d1, d2),
                    ccx(c[3], d2, t), ccx(c[2], d1, d2), ccx(c[0], c[1], d1), ccx(c[2], d1, d2)]
    else:
        raise ValueError("only 3 or 4 controls are decomposed")
    raise ValueError("insufficient ancillas for the requested decomposition")


def build_mcx(n_controls: int, ancillas: AncillaSpec) -> tuple[Fragment, int]:
    """Standalone decomposition on qubits: controls, target, clean, dirty."""
    if n_controls not in (3, 4):
        raise ValueError("n_controls must be 3 or 4")
    need = 1 if n_controls == 3 else 2
    if ancillas.clean + ancillas.dirty < need:
        raise ValueError(f"{n_controls} controls need at least {need} ancillas")
    ctrl = list(range(n_controls))
    tgt = n_controls
    clean = list(range(tgt + 1, tgt + 1 + ancillas.clean))
    dirty = list(range(tgt + 1 + ancillas.clean, tgt + 1 + ancillas.clean + ancillas.dirty))
    if n_controls == 4 and len(clean) == 1 and not dirty:
        raise ValueError("4 controls need two ancillas")
    gates = mcx_gates(ctrl, tgt, clean, dirty)
    n = tgt + 1 + ancillas.clean + ancillas.dirty
    frag = Fragment(Circuit(n, 0, gates),
                    {"controls": ctrl, "target": [tgt], "clean": clean, "dirty": dirty},
                    toffoli_count=len(gates))
    return frag, len(gates)


# gate emitter -----------------------------------------------------------------

@dataclass
class Emitter:
    """Collects gates, routing wide controlled NOTs through ancilla pools.

    ``clean`` lists qubits currently known to be |0>; ``dirty`` lists
    preferred borrowable qubits. Any other qubit outside the gate is a last
    resort dirty ancilla; with none left the gate stays a native MCX.
    """

    n_qubits: int
    clean: list = field(default_factory=list)
    dirty: list = field(default_factory=list)
    ops: list = field(default_factory=list)
    native_mcx: int = 0

    def x(self, target, controls=()):
        controls = tuple(controls)
        if len(controls) <= 2:
            self.ops.append(Gate("X", (target,), controls))
            return
        busy = set(controls)
        busy.add(target)
        clean = [q for q in self.clean if q not in busy][:2]
        busy.update(clean)
        need = 1 if len(controls) == 3 else 2
        dirty = []
        if len(controls) <= 4 and len(clean) < need:
            for q in self.dirty:
                if len(clean) + len(dirty) >= need:
                    break
                if q not in busy:
                    dirty.append(q)
                    busy.add(q)
            for q in range(self.n_qubits):
                if len(clean) + len(dirty) >= need:
                    break
                if q not in busy:
                    dirty.append(q)
                    busy.add(q)
        if len(controls) > 4 or len(clean) + len(dirty) < need:
            self.native_mcx += 1
            self.ops.append(Gate("X", (target,), controls))
            return
        self.ops.extend(mcx_gates(controls, target, clean, dirty))

    def toffoli_count(self) -> int:
        return sum(1 for g in self.ops if g.kind == "X" and len(g.controls) == 2)


# adders ---------------------------------------------------------------------

def qft(em: Emitter, reg):
    m = len(reg)
    for j in range(m - 1, -1, -1):
        em.ops.append(H(reg[j]))
        for i in range(j - 1, -1, -1):
            em.ops.append(PHASE(reg[j], j - i + 1, -1, controls=(reg[i],)))


def iqft(em: Emitter, reg):
    tmp = Emitter(em.n_qubits)
    qft(tmp, reg)
    em.ops.extend(g.inverse() for g in reversed(tmp.ops))


def phi_add(em: Emitter, a: int, reg, controls=(), sign=1):
    """Add ``sign*a`` to a Fourier-space register."""
    controls = tuple(controls)
    for jj, q in enumerate(reg):
        j, num = dyadic(jj + 1, -sign * a)
        if num:
            em.ops.append(Gate("PHASE", (q,), controls, j, num))


def _ripple_add_pattern(a: int, reg, carries):
    """(controls, target) list of the constant ripple-carry adder.

    ``reg`` has n+1 qubits (top one receives the carry out), ``carries`` n.
    """
    n = len(carries)
    b = reg
    c = list(carries) + [b[n]]
    seq = []

    def carry(i):
        ai = a >> i & 1
        out = []
        if ai:
            out.append(((b[i],), c[i + 1]))
            out.append(((), b[i]))
        out.append(((c[i], b[i]), c[i + 1]))
        return out

    def sum_bit(i):
        out = [((), b[i])] if a >> i & 1 else []
        out.append(((c[i],), b[i]))
        return out

    for i in range(n):
        seq.extend(carry(i))

    if a >> (n - 1) & 1:
        seq.append(((), b[n - 1]))  # undo the last carry's a -> b step
    seq.extend(sum_bit(n - 1))
    for i in range(n - 2, -1, -1):
        seq.extend(reversed(carry(i)))
        seq.extend(sum_bit(i))
    return seq


def ripple_add(em: Emitter, a: int, reg, carries, controls=(), sign=1):
    seq = _ripple_add_pattern(a, reg, carries)
    if sign < 0:
        seq = seq[::-1]
    controls = tuple(controls)
    for ctrl, tgt in seq:
        em.x(tgt, controls + ctrl)


def add_const(em: Emitter, adder: Adder, a: int, reg, carries, controls=(), sign=1):
    if adder is Adder.QADD:
        phi_add(em, a, reg, controls, sign)
    else:
        ripple_add(em, a, reg, carries, controls, sign)


def mod_add(em: Emitter, adder: Adder, a: int, p: int, reg, flag, carries, controls=()):
    """reg <- reg + a mod p. For QADD ``reg`` is already in Fourier space."""
    top = reg[-1]
    add_const(em, adder, a, reg, carries, controls, +1)
    add_const(em, adder, p, reg, carries, (), -1)
    if adder is Adder.QADD:
        iqft(em, reg)
    em.x(flag, (top,))
    if adder is Adder.QADD:
        qft(em, reg)
    add_const(em, adder, p, reg, carries, (flag,), +1)
    add_const(em, adder, a, reg, carries, controls, -1)
    if adder is Adder.QADD:
        iqft(em, reg)
    em.x(top)
    em.x(flag, (top,))
    em.x(top)
    if adder is Adder.QADD:
        qft(em, reg)
    add_const(em, adder, a, reg, carries, controls, +1)


def mod_ps(em: Emitter, adder: Adder, d: int, p: int, y, t, flag, carries, controls=()):
    """t <- t + d*y mod p, one doubly controlled Mod-ADD per bit of y."""
    if adder is Adder.QADD:
        qft(em, t)
    for k, yk in enumerate(y):
        dk = d * (1 << k) % p
        mod_add(em, adder, dk, p, t, flag, carries, tuple(controls) + (yk,))
    if adder is Adder.QADD:
        iqft(em, t)


def mod_mul(em: Emitter, adder: Adder, d: int, p: int, y, t, flag, carries, controls=()):
    """y <- d*y mod p (t returns to 0)."""
    if d % p == 0:
        raise ValueError("multiplier has no inverse mod p")
    d %= p
    controls = tuple(controls)
    mod_ps(em, adder, d, p, y, t, flag, carries, controls)
    for yi, ti in zip(y, t):
        em.x(yi, (ti,))
        em.x(ti, controls + (yi,))
        em.x(yi, (ti,))
    inv = Emitter(em.n_qubits, em.clean, em.dirty)
    mod_ps(inv, adder, pow(d, -1, p), p, y, t, flag, carries, controls)
    em.native_mcx += inv.native_mcx
    em.ops.extend(g.inverse() for g in reversed(inv.ops))


# fragment builders --------------------------------------------------------------

def _check_controls(controls: int, allowed):
    if controls not in allowed:
        raise ValueError(f"controls must be one of {allowed}")


def build_add_const(d: int, width: int, adder, controls: int = 0) -> Fragment:
    """|y> -> |y + d> on a (width+1)-qubit value register."""
    adder = Adder.parse(adder)
    _check_controls(controls, (0, 1, 2))
    if not 0 <= d < 1 << width:
        raise ValueError("d out of range")
    ctrl = list(range(controls))
    value = list(range(controls, controls + width + 1))
    carries = list(range(value[-1] + 1, value[-1] + 1 + width)) if adder is Adder.RADD else []
    n = controls + width + 1 + len(carries)
    em = Emitter(n)
    if adder is Adder.QADD:
        qft(em, value)
    add_const(em, adder, d, value, carries, ctrl)
    if adder is Adder.QADD:
        iqft(em, value)
    return Fragment(Circuit(n, 0, em.ops), {"controls": ctrl, "value": value, "carries": carries},
                    em.toffoli_count())


def _mod_registers(p: int, adder: Adder, controls: int, with_y: bool):
    w = width_of(p)
    pos = 0
    regs = {}

    def take(name, k):
        nonlocal pos
        regs[name] = list(range(pos, pos + k))
        pos += k

    take("controls", controls)
    if with_y:
        take("y", w)
    take("t" if with_y else "value", w + 1)
    take("flag", 1)
    take("carries", w if adder is Adder.RADD else 0)
    return regs, pos


def build_mod_add(d: int, p: int, adder, controls: int = 0) -> Fragment:
    """|y> -> |y + d mod p> for y < p; flag and carries restored."""
    adder = Adder.parse(adder)
    _check_controls(controls, (0, 1, 2))
    if not 0 <= d < p:
        raise ValueError("d must satisfy 0 <= d < p")
    regs, n = _mod_registers(p, adder, controls, with_y=False)
    em = Emitter(n)
    value = regs["value"]
    if adder is Adder.QADD:
        qft(em, value)
    mod_add(em, adder, d, p, value, regs["flag"][0], regs["carries"], regs["controls"])
    if adder is Adder.QADD:
        iqft(em, value)
    return Fragment(Circuit(n, 0, em.ops), regs, em.toffoli_count())


def build_mod_ps(d: int, p: int, adder, controls: int = 0) -> Fragment:
    """|y>|t> -> |y>|t + d*y mod p>."""
    adder = Adder.parse(adder)
    _check_controls(controls, (0, 1))
    if not 0 <= d < p:
        raise ValueError("d must satisfy 0 <= d < p")
    regs, n = _mod_registers(p, adder, controls, with_y=True)
    em = Emitter(n, dirty=list(regs["y"]))
    mod_ps(em, adder, d, p, regs["y"], regs["t"], regs["flag"][0], regs["carries"], regs["controls"])
    return Fragment(Circuit(n, 0, em.ops), regs, em.toffoli_count())


def build_mod_mul(d: int, p: int, adder, controls: int = 1) -> Fragment:
    """Controlled in-place |y> -> |d*y mod p>."""
    adder = Adder.parse(adder)
    _check_controls(controls, (0, 1))
    if d % p == 0:
        raise ValueError("multiplier has no inverse mod p")
    regs, n = _mod_registers(p, adder, controls, with_y=True)
    em = Emitter(n, dirty=list(regs["y"]))
    mod_mul(em, adder, d, p, regs["y"], regs["t"], regs["flag"][0], regs["carries"], regs["controls"])
    return Fragment(Circuit(n, 0, em.ops), regs, em.toffoli_count())


def mod_exp_bases(g: int, h: int, p: int, v1: int, v2: int) -> list[int]:
    """h^(2^j) for j = v1-1..0, then g^(2^j) for j = v2-1..0."""
    return [pow(h, 1 << j, p) for j in range(v1 - 1, -1, -1)] + \
           [pow(g, 1 << j, p) for j in range(v2 - 1, -1, -1)]


def build_mod_exp(bases, p: int, adder, control_register=None, idle_clean: bool = False) -> Fragment:
    """|x>|1> -> |x>|prod bases^bits mod p> as a chain of controlled Mod-MULs.

    ``control_register`` is either the number of control qubits (default
    ``len(bases)``) or a ``(v1, v2)`` split into two registers. Base ``i``
    is controlled by the ``i``-th control in most-significant-first order:
    x1 bit v1-1 .. 0, then x2 bit v2-1 .. 0.

    With ``idle_clean`` the control qubits are assumed to start in |0> and
    are prepared with a Hadamard just before their multiplication; qubits
    not yet prepared serve as clean ancillas meanwhile.
    """
    adder = Adder.parse(adder)
    bases = [int(b) % p for b in bases]
    if control_register is None:
        control_register = len(bases)
    split = (control_register,) if isinstance(control_register, int) else tuple(control_register)
    if sum(split) != len(bases):
        raise ValueError("control register size must match the number of bases")
    w = width_of(p)
    regs = {}
    pos = 0
    names = ["x"] if len(split) == 1 else [f"x{i + 1}" for i in range(len(split))]
    for name, k in zip(names, split):
        regs[name] = list(range(pos, pos + k))
        pos += k
    for name, k in (("work", w), ("acc", w + 1), ("flag", 1),
                    ("carries", w if adder is Adder.RADD else 0)):
        regs[name] = list(range(pos, pos + k))
        pos += k
    order = []
    for name in names:
        order.extend(reversed(regs[name]))
    em = Emitter(pos)
    emit_mod_exp(em, adder, bases, p, order, regs["work"], regs["acc"], regs["flag"][0],
                 regs["carries"], prepare=idle_clean)
    return Fragment(Circuit(pos, 0, em.ops), regs, em.toffoli_count())


def emit_mod_exp(em: Emitter, adder: Adder, bases, p, controls, work, acc, flag, carries,
                 prepare: bool = False, clean_idle: bool | None = None):
    """Controlled Mod-MUL chain; ``controls[i]`` drives ``bases[i]``.

    ``prepare`` puts a Hadamard on each control right before its first use;
    then still-unprepared controls are |0> and, unless ``clean_idle`` is
    False, are handed to the emitter as clean ancillas.
    """
    if clean_idle is None:
        clean_idle = prepare
    for i, (d, c) in enumerate(zip(bases, controls)):
        if prepare:
            em.ops.append(H(c))
        em.clean = list(controls[i + 1:]) if (prepare and clean_idle) else []
        em.dirty = list(work) + list(controls[:i])
        mod_mul(em, adder, d, p, work, acc, flag, carries, (c,))
    em.clean = []
