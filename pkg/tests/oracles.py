"""Reference implementations that share no code with the package.

Everything here is deliberately naive: explicit loops, dense matrices,
trial division. Slow but easy to audit.
"""

import cmath
import math

import numpy as np


def naive_is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def naive_pairs(budget, per_w):
    """All (p, q) with q | p-1 fitting 2v + per_w*w + 2 (+w for RADD) qubits."""
    out = []
    p = 3
    while True:
        w = math.ceil(math.log2(p))
        if per_w * w + 2 + 4 > budget:  # smallest possible v is 2 (q = 2)
            break
        if naive_is_prime(p):
            for q in range(2, p):
                if (p - 1) % q == 0 and naive_is_prime(q):
                    v = q.bit_length()
                    if 2 * v + per_w * w + 2 <= budget:
                        out.append((p, q))
        p += 1
    return sorted(out)


# gate semantics -------------------------------------------------------------------

def _bit(x, q):
    return (x >> q) & 1


def gate_unitary(gate, n):
    """Dense 2^n x 2^n matrix of one gate, built column by column."""
    dim = 1 << n
    U = np.zeros((dim, dim), dtype=complex)
    ctrl_ok = lambda x: all(_bit(x, c) for c in gate.controls)
    for x in range(dim):
        if not ctrl_ok(x):
            U[x, x] = 1
            continue
        if gate.kind == "X":
            U[x ^ (1 << gate.targets[0]), x] = 1
        elif gate.kind == "SWAP":
            a, b = gate.targets
            y = x
            if _bit(x, a) != _bit(x, b):
                y = x ^ (1 << a) ^ (1 << b)
            U[y, x] = 1
        elif gate.kind == "PHASE":
            t = gate.targets[0]
            U[x, x] = cmath.exp(-2j * math.pi * gate.num / 2 ** gate.j) if _bit(x, t) else 1
        elif gate.kind == "H":
            t = gate.targets[0]
            s = 1 / math.sqrt(2)
            U[x & ~(1 << t), x] += s
            U[x | (1 << t), x] += -s if _bit(x, t) else s
        elif gate.kind == "FUSED" and gate.matrix is None:
            return circuit_unitary(gate.parts, n)
        elif gate.kind == "FUSED":
            qs = gate.targets
            m = np.asarray(gate.matrix)
            col = sum(_bit(x, q) << i for i, q in enumerate(qs))
            rest = x & ~sum(1 << q for q in qs)
            for row in range(1 << len(qs)):
                y = rest | sum(((row >> i) & 1) << q for i, q in enumerate(qs))
                U[y, x] += m[row, col]
        else:
            raise ValueError(gate.kind)
    return U


def circuit_unitary(gates, n):
    U = np.eye(1 << n, dtype=complex)
    for g in gates:
        U = gate_unitary(g, n) @ U
    return U


def classical_eval(gates, x):
    """Run X/MCX/SWAP gates on a basis integer."""
    for g in gates:
        if not all(_bit(x, c) for c in g.controls):
            continue
        if g.kind == "X":
            x ^= 1 << g.targets[0]
        elif g.kind == "SWAP":
            a, b = g.targets
            if _bit(x, a) != _bit(x, b):
                x ^= (1 << a) | (1 << b)
        else:
            raise ValueError(f"{g.kind} is not classical")
    return x


def marginal(state, qubits):
    probs = np.abs(state) ** 2
    out = np.zeros(1 << len(qubits))
    for x, pr in enumerate(probs):
        out[sum(_bit(x, q) << i for i, q in enumerate(qubits))] += pr
    return out


# success probability by direct summation ------------------------------------------

def success_probability_loops(q, s, v1=None, v2=None):
    """Sum |amplitude|^2 over outcomes whose rounded estimates give s.

    The amplitude of (m1, m2) in branch e is
    2^-(v1+v2) * sum over x1, x2 with s*x1 + x2 = e (mod q) of
    exp(-2 pi i (x1 m1 / 2^v1 + x2 m2 / 2^v2)).
    """
    v1 = v1 or q.bit_length()
    v2 = v2 or q.bit_length()
    N1, N2 = 1 << v1, 1 << v2
    total = 0.0
    for m1 in range(N1):
        for m2 in range(N2):
            l = math.floor(m2 * q / N2 + 0.5) % q
            if l == 0:
                continue
            beta = math.floor(m1 * q / N1 + 0.5) % q
            if beta * pow(l, -1, q) % q != s:
                continue
            amps = [0j] * q
            for x1 in range(N1):
                for x2 in range(N2):
                    amps[(s * x1 + x2) % q] += cmath.exp(-2j * math.pi * (x1 * m1 / N1 + x2 * m2 / N2))
            total += sum(abs(a) ** 2 for a in amps) / (N1 * N2) ** 2
    return total
