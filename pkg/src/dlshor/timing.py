"""Makespan of the Mod-MUL chain under control-qubit recycling.

L multiplications of duration U share one work register, so they never
overlap. Each control qubit must be measured (plus classical feedforward,
one atomic step of duration M) before it can be reused. Measurements
are serialized because each correction needs the previous outcome.

Times are computed exactly when U and M are ints or Fractions; floats are
converted through their decimal string, so 0.1 means 1/10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

SEMICLASSICAL = "SEMICLASSICAL"
HSQFT = "HSQFT"
GRID_COLUMNS = ("L", "U", "M", "k", "scheme", "closed_form", "simulated")


def _exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class TimingModel:
    L: int
    U: Fraction
    M: Fraction
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "U", _exact(self.U))
        object.__setattr__(self, "M", _exact(self.M))
        if self.L < 1 or self.k < 1 or self.U <= 0 or self.M <= 0:
            raise ValueError("need L >= 1, k >= 1, U > 0, M > 0")

    @property
    def rho(self) -> Fraction:
        return self.U / self.M

    def with_k(self, k: int) -> "TimingModel":
        return TimingModel(self.L, self.U, self.M, k)


def makespan_closed_form(model: TimingModel, scheme: str) -> Fraction:
    L, U, M, k = model.L, model.U, model.M, model.k
    if scheme == SEMICLASSICAL:
        if k == 1:
            return L * (U + M)
        return L * U + M if U >= M else U + L * M
    if scheme == HSQFT:
        if k > L:
            raise ValueError("HSQFT closed form needs k <= L")
        return L * (U + M / k)
    raise ValueError(f"unknown scheme {scheme!r}")


def schedule_simulate(model: TimingModel, scheme: str, partial_block: str = "proportional") -> Fraction:
    """Exact event-driven makespan.

    SEMICLASSICAL: multiplication j waits for the work register and for its
    control qubit (slot j mod k) to be released by measurement j-k;
    measurement j waits for multiplication j and measurement j-1.

    HSQFT: bits go in blocks of k on the same k qubits. A block's
    multiplications wait for the previous block's measurement; the block
    is then measured at once. A full block's measurement takes M. A short
    final block of r < k bits is charged r*M/k under
    ``partial_block="proportional"`` (the abstraction behind the closed
    form) or a full M under ``"whole"``.
    """
    L, U, M, k = model.L, model.U, model.M, model.k
    if scheme == SEMICLASSICAL:
        mul_end = [Fraction(0)] * L
        meas_end = [Fraction(0)] * L
        for j in range(L):
            start = mul_end[j - 1] if j else Fraction(0)
            if j >= k:
                start = max(start, meas_end[j - k])
            mul_end[j] = start + U
            ready = max(mul_end[j], meas_end[j - 1]) if j else mul_end[j]
            meas_end[j] = ready + M
        return meas_end[-1]
    if scheme == HSQFT:
        if partial_block not in ("proportional", "whole"):
            raise ValueError("partial_block must be 'proportional' or 'whole'")
        t = Fraction(0)
        done = 0
        while done < L:
            r = min(k, L - done)
            t += r * U  # qubits were freed by the previous block's measurement
            t += M if (r == k or partial_block == "whole") else M * r / k
            done += r
        return t
    raise ValueError(f"unknown scheme {scheme!r}")


def min_k_hsqft(L: int, rho) -> int:
    """Smallest k with L/(L + rho - L*rho) < k (HSQFT beats recycling, U < M)."""
    rho = _exact(rho)
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if L < 2:
        raise ValueError("L must be >= 2")
    denom = L + rho - L * rho
    if denom <= 0:
        raise ValueError("L + rho - L*rho must be positive")
    return math.floor(Fraction(L) / denom) + 1


def simulated_min_k(L: int, rho, partial_block: str = "proportional", k_max: int | None = None) -> int | None:
    """Smallest k whose simulated HSQFT time beats k>=2 recycling (M = 1)."""
    rho = _exact(rho)
    base = TimingModel(L, rho, 1, 2)
    ref = schedule_simulate(base, SEMICLASSICAL)
    for k in range(1, (k_max or 2 * L + 2) + 1):
        if schedule_simulate(base.with_k(k), HSQFT, partial_block) < ref:
            return k
    return None


RHO_GRID = tuple(Fraction(i, 10) for i in range(1, 10)) + (Fraction(3, 2), Fraction(2))


def grid_report(L_range=range(1, 51), rhos=RHO_GRID, ks=range(1, 9)) -> list[dict]:
    """Closed form vs simulation over a parameter grid (M = 1)."""
    rows = []
    for L in L_range:
        for rho in rhos:
            for k in ks:
                model = TimingModel(L, rho, 1, k)
                for scheme in (SEMICLASSICAL, HSQFT):
                    if scheme == HSQFT and k > L:
                        continue
                    rows.append({"L": L, "U": model.U, "M": model.M, "k": k, "scheme": scheme,
                                 "closed_form": makespan_closed_form(model, scheme),
                                 "simulated": schedule_simulate(model, scheme)})
    return rows
