"""Primes, subgroup generators, DLP instances and (p, q) pair enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .rng import stream


class Adder(str, Enum):
    QADD = "qadd"
    RADD = "radd"

    @classmethod
    def parse(cls, value) -> "Adder":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


# Deterministic for every n < 2**64 (Sinclair's seven bases).
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 0 or n >= 1 << 64:
        raise ValueError("is_prime is exact only for 0 <= n < 2**64")
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n % sp == 0:
            return n == sp
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit (sieve)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def qubit_count(p: int, q: int, adder) -> int:
    """Total qubits of the standard circuit: two v-bit control registers, w work bits, ancillas."""
    adder = Adder.parse(adder)
    v = q.bit_length()
    w = (p - 1).bit_length()  # ceil(log2 p)
    anc = w + 2 if adder is Adder.QADD else 2 * w + 2
    return 2 * v + w + anc


def enumerate_pairs(qubit_budget: int, adder) -> list[tuple[int, int]]:
    """All prime pairs (p, q) with q | p-1 that fit in ``qubit_budget`` qubits."""
    adder = Adder.parse(adder)
    if qubit_budget < 10:
        raise ValueError("qubit_budget must be >= 10")
    # with the smallest q=2 (v=2) the budget bounds w, hence p
    per_w = 3 if adder is Adder.RADD else 2
    w_max = (qubit_budget - 6) // per_w
    primes = primes_upto(1 << w_max)
    prime_set = set(int(x) for x in primes)
    out = []
    for p in primes.tolist():
        if p < 3:
            continue
        m = p - 1
        # prime factors of p-1 by trial division
        fac = []
        d = 2
        while d * d <= m:
            if m % d == 0:
                fac.append(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            fac.append(m)
        for q in fac:
            if q in prime_set or is_prime(q):
                if qubit_count(p, q, adder) <= qubit_budget:
                    out.append((p, q))
    out.sort()
    return out


@dataclass(frozen=True)
class PairClass:
    safe_prime: bool
    bits_p: int
    bits_q: int


def classify_pair(p: int, q: int) -> PairClass:
    return PairClass(
        safe_prime=(2 * q + 1 == p and is_prime(p) and is_prime(q)),
        bits_p=p.bit_length(),
        bits_q=q.bit_length(),
    )


@dataclass(frozen=True)
class DlpInstance:
    p: int
    q: int
    g: int
    h: int
    s: int

    def __post_init__(self):
        p, q, g, h, s = self.p, self.q, self.g, self.h, self.s
        if not (is_prime(p) and is_prime(q) and (p - 1) % q == 0):
            raise ValueError(f"invalid pair ({p}, {q})")
        if g % p == 1 or pow(g, q, p) != 1:
            raise ValueError(f"g={g} does not generate the order-{q} subgroup")
        if not 0 <= s < q or pow(g, s, p) != h % p:
            raise ValueError("h must equal g^s mod p with 0 <= s < q")


def _check_pair(p: int, q: int):
    if not (is_prime(p) and is_prime(q) and p >= 3 and (p - 1) % q == 0):
        raise ValueError(f"invalid pair ({p}, {q})")


def find_subgroup_generator(p: int, q: int, seed: int = 0) -> int:
    _check_pair(p, q)
    rng = stream(seed, p, q, "generator")
    e = (p - 1) // q
    while True:
        r = int(rng.integers(2, p))
        g = pow(r, e, p)
        if g != 1:
            return g


def make_instance(p: int, q: int, seed: int = 0) -> DlpInstance:
    g = find_subgroup_generator(p, q, seed)
    s = int(stream(seed, p, q, "secret").integers(0, q))
    return DlpInstance(p, q, g, pow(g, s, p), s)


# (alpha, beta, m, n): qubits = alpha*x + beta*y + 4, time ~ x^m y^n
_SAME_QUBITS = {Adder.RADD: (3, 2, 2, 1), Adder.QADD: (2, 2, 3, 1)}


def same_qubits_target(qubit_budget: int, adder) -> tuple[float, float]:
    """(bits_p, bits_q) maximising x^m y^n under alpha*x + beta*y = budget - 4."""
    alpha, beta, m, n = _SAME_QUBITS[Adder.parse(adder)]
    gamma = qubit_budget - 4
    if gamma <= 0:
        raise ValueError("qubit budget must exceed 4")
    return gamma * m / (alpha * (m + n)), gamma * n / (beta * (m + n))
