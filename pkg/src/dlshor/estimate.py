"""Resource dataset, six-parameter fit, cross-validation and extrapolation.

Model: f(x, y) = a x^2 y + b x^2 + c x y + d x + e y + f with x, y the bit
lengths of p and q. It is linear in the coefficients, so fitting is an
ordinary least-squares problem.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np
from scipy.optimize import bisect

from .circuit import metrics, optimize
from .numtheory import Adder, enumerate_pairs, make_instance
from .rng import stream
from .shor import STANDARD, build_dlp_circuit, layout

METRICS = ("gates_before", "gates_after", "depth_before", "depth_after",
           "nonclifford_before", "nonclifford_after")
ROW_COLUMNS = ("p", "q", "bits_p", "bits_q", "qubits") + METRICS


@dataclass(frozen=True)
class ResourceRow:
    p: int
    q: int
    bits_p: int
    bits_q: int
    qubits: int
    gates_before: int
    gates_after: int
    depth_before: int
    depth_after: int
    nonclifford_before: int
    nonclifford_after: int


@dataclass(frozen=True)
class FitParams:
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    basis = ("x^2*y", "x^2", "x*y", "x", "y", "1")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitParams":
        return cls(*(float(d[k]) for k in "abcdef"))

    def __call__(self, x, y):
        return extrapolate(self, x, y)


# dataset -------------------------------------------------------------------------

def dataset_cells(qubits: int, pairs=None) -> dict:
    """Pairs whose R-ADD circuit uses exactly ``qubits`` qubits.

    Keys are (ceil(log2 p), floor(log2 q)) as cells are usually labelled.
    """
    if pairs is None:
        pairs = enumerate_pairs(max(qubits, 10), Adder.RADD)
    cells: dict = {}
    for p, q in pairs:
        lay = layout(p, q, Adder.RADD)
        if lay.total == qubits:
            cells.setdefault((lay.w, lay.v1 - 1), []).append((p, q))
    return dict(sorted(cells.items()))


def resource_row(p: int, q: int, seed: int = 0) -> ResourceRow:
    inst = make_instance(p, q, seed)
    circ = build_dlp_circuit(inst, Adder.RADD, STANDARD)
    before = metrics(circ)
    after = metrics(optimize(circ))
    return ResourceRow(p, q, p.bit_length(), q.bit_length(), circ.n_qubits,
                       before.gate_count, after.gate_count, before.depth, after.depth,
                       before.non_clifford_count, after.non_clifford_count)


def select_pairs(qubit_range=(12, 45), per_cell: int = 5, seed: int = 0) -> list[tuple[int, int]]:
    lo, hi = qubit_range
    if lo < 12 or hi > 90 or lo > hi:
        raise ValueError("qubit range must lie within [12, 90]")
    pairs = enumerate_pairs(max(hi, 10), Adder.RADD)
    chosen = []
    for n in range(lo, hi + 1):
        for (cw, cv), members in dataset_cells(n, pairs).items():
            if len(members) <= per_cell:
                chosen.extend(members)
            else:
                rng = stream(seed, n, cw, cv, "cell")
                pick = rng.choice(len(members), size=per_cell, replace=False)
                chosen.extend(members[i] for i in sorted(pick))
    return sorted(chosen)


def _row_job(args):
    return resource_row(*args)


def generate_dataset(qubit_range=(12, 45), per_cell: int = 5, seed: int = 0,
                     jobs: int = 1) -> list[ResourceRow]:
    tasks = [(p, q, seed) for p, q in select_pairs(qubit_range, per_cell, seed)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_job, tasks, chunksize=4))
    else:
        rows = [_row_job(t) for t in tasks]
    return sorted(rows, key=lambda r: (r.p, r.q))


def write_rows(rows, fh):
    fh.write(",".join(ROW_COLUMNS) + "\n")
    for r in rows:
        fh.write(",".join(str(getattr(r, c)) for c in ROW_COLUMNS) + "\n")


def read_rows(fh) -> list[ResourceRow]:
    lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        vals = dict(zip(header, ln.split(",")))
        out.append(ResourceRow(*(int(vals[c]) for c in ROW_COLUMNS)))
    return out


# fitting ---------------------------------------------------------------------------

def _design(u, v):
    return np.column_stack([u * u * v, u * u, u * v, u, v, np.ones_like(u)])


def fit(rows, metric: str) -> FitParams:
    """Least-squares coefficients in the raw (bits_p, bits_q) basis.

    The fit runs on centred and scaled variables for conditioning; the
    model space is closed under affine changes of x and y separately, so the
    coefficients map back exactly.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    x = np.array([r.bits_p for r in rows], dtype=float)
    y = np.array([r.bits_q for r in rows], dtype=float)
    z = np.array([getattr(r, metric) for r in rows], dtype=float)
    return fit_xyz(x, y, z)


def fit_xyz(x, y, z) -> FitParams:
    x, y, z = (np.asarray(t, dtype=float) for t in (x, y, z))
    if len(x) < 6:
        raise ValueError("need at least 6 rows")
    mx, sx = x.mean(), x.std() or 1.0
    my, sy = y.mean(), y.std() or 1.0
    mz, sz = z.mean(), z.std() or 1.0
    A = _design((x - mx) / sx, (y - my) / sy)
    coef, _, rank, _ = np.linalg.lstsq(A, (z - mz) / sz, rcond=None)
    if rank < 6:
        raise ValueError("rank-deficient design matrix")
    coef = coef * sz
    coef[5] += mz
    # C[i][j] multiplies u^i v^j
    C = np.zeros((3, 2))
    C[2, 1], C[2, 0], C[1, 1], C[1, 0], C[0, 1], C[0, 0] = coef
    Ax = np.array([[1, 0, 0], [-mx / sx, 1 / sx, 0], [mx * mx / sx**2, -2 * mx / sx**2, 1 / sx**2]])
    Ay = np.array([[1, 0], [-my / sy, 1 / sy]])
    D = Ax.T @ C @ Ay  # D[k][l] multiplies x^k y^l
    return FitParams(D[2, 1], D[2, 0], D[1, 1], D[1, 0], D[0, 1], D[0, 0])


def extrapolate(params: FitParams, bits_p, bits_q):
    x, y = bits_p, bits_q
    return (params.a * x * x * y + params.b * x * x + params.c * x * y
            + params.d * x + params.e * y + params.f)


@dataclass(frozen=True)
class CVResult:
    mean: float
    rmse: float
    fold_means: tuple
    fold_rmse: tuple

    def __iter__(self):
        return iter((self.mean, self.rmse))


def cross_validate(rows, metric: str, folds: int = 10, seed: int = 0) -> CVResult:
    """Seeded k-fold CV; unpacks as (mean of test means, mean RMSE)."""
    rows = list(rows)
    if len(rows) < folds or folds < 2:
        raise ValueError("need at least as many rows as folds (and >= 2 folds)")
    perm = stream(seed, "cv", len(rows)).permutation(len(rows))
    means, errs = [], []
    for test_idx in np.array_split(perm, folds):
        test = set(test_idx.tolist())
        train = [r for i, r in enumerate(rows) if i not in test]
        params = fit(train, metric)
        actual = np.array([getattr(rows[i], metric) for i in test_idx], dtype=float)
        pred = np.array([extrapolate(params, rows[i].bits_p, rows[i].bits_q) for i in test_idx])
        means.append(float(actual.mean()))
        errs.append(float(np.sqrt(np.mean((pred - actual) ** 2))))
    return CVResult(float(np.mean(means)), float(np.mean(errs)), tuple(means), tuple(errs))


# equivalences -----------------------------------------------------------------------

def safe_prime_equivalent_bits(params: FitParams, target_value: float,
                               bracket=(8.0, 8192.0)) -> float:
    """Bit length x of a safe-prime group (y = x - 1) costing ``target_value``."""
    a, b, c, d, e, f = params.a, params.b, params.c, params.d, params.e, params.f
    coeffs = (a, -a + b + c, -c + d + e, -e + f - target_value)

    def g(x):
        return ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3]

    lo, hi = bracket
    if np.sign(g(lo)) == np.sign(g(hi)):
        raise ValueError("no sign change in the search bracket")
    return float(bisect(g, lo, hi, xtol=1e-7, rtol=1e-12, maxiter=200))


def schnorr_ratio(chi: float) -> float:
    """Safe-prime to Schnorr bit-length ratio when the gate ratio is chi."""
    if not 0 < chi <= 1:
        raise ValueError("chi must lie in (0, 1]")
    return chi ** (1.0 / 3.0)


SCHNORR_POINTS = {"2048/256": (2048, 256), "2048/224": (2048, 224), "3072/256": (3072, 256)}


def load_params(path=None) -> dict:
    """Metric -> FitParams from a JSON file (default: the bundled published set)."""
    if path is None:
        text = resources.files("dlshor").joinpath("data/published_params.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    if "params" in raw and "metric" in raw:  # a single fit result
        return {raw["metric"]: FitParams.from_dict(raw["params"])}
    raw = raw.get("params", raw)
    return {m: FitParams.from_dict(v) for m, v in raw.items()}
