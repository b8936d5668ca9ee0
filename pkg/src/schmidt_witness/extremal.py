"""Classical and quantum maxima of the witness, and checks of known configurations.

Scenario A values are reported scaled by 4^n (so the absolute bound is 1);
scenario B values are raw determinants.

Classical model: p = M diag(rho) M^T where M stacks an all-ones row on top of
a binary n x d matrix. By Cauchy-Binet det p is a sum over (n+1)-column
subsets of det(M_S)^2 prod(rho_S), so log det p is concave in rho (a
D-optimal design problem) and the only combinatorial part is the choice of
distinct columns. Complementing a row only flips the sign of det p, so one
column can be taken to be all zeros without loss of generality.

Quantum model: pure state sum_k psi_k |kk>, rank-one projectors A_i = |v_i><v_i|
and B_i = A_i^*, giving p_ij = |sum_k psi_k v_ik conj(v_jk)|^2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg import determinant, exact_determinant
from .qsim import PAULIS, I2, tetrahedron_vectors

MODELS = ("classical", "real", "complex")

# printed classical maxima of 4^n W (blank cells saturate at 1 and are omitted)
TABLE_I = {
    (1, 2): 1.0,
    (2, 2): 0.0, (2, 3): 0.59, (2, 4): 1.0,
    (3, 2): 0.0, (3, 3): 0.0, (3, 4): 1.0,
    (4, 2): 0.0, (4, 3): 0.0, (4, 4): 0.0, (4, 5): 0.74, (4, 6): 0.76, (4, 7): 0.79, (4, 8): 1.0,
    (5, 2): 0.0, (5, 3): 0.0, (5, 4): 0.0, (5, 5): 0.0, (5, 6): 0.55, (5, 7): 0.59, (5, 8): 1.0,
}

TABLE_I_EXACT = {
    (2, 3): 4**2 / 27,
    (4, 5): 4**4 * 9 / 5**5,
    (5, 6): 4**5 * 25 / 6**6,
    (5, 7): 4**5 / 12**3,
}

_T2_ROWS = {
    1: (1, 1, 1, 1),
    2: (1, 1, 1, 1),
    3: (0, 1, 0.85, 1),
    4: (0, 0, 0.55, 0.78),
    5: (0, 0, 0.38, 0.69),
    6: (0, 0, 0, 0.54),
    7: (0, 0, 0, 0.35),
    8: (0, 0, 0, 0.25),
}
_T2_COLS = ((2, "real"), (2, "complex"), (3, "real"), (3, "complex"))

# printed quantum maxima of 4^n W for scenario A, keyed by (n, d, field)
TABLE_II = {(n, d, f): float(v) for n, row in _T2_ROWS.items() for (d, f), v in zip(_T2_COLS, row)}

TABLE_II_EXACT = {
    (3, 3, "real"): 4**3 * 0.013208219549514474,
    (4, 3, "real"): 4**4 * 27 / 12500,
    (5, 3, "real"): 4**5 * (2437 + 340 * math.sqrt(10)) / (2 * 3**14),
    (4, 3, "complex"): 4**4 * 0.003065301182016068,
    (5, 3, "complex"): 4**5 * 0.000674047929103352,
    (6, 3, "complex"): 4**6 * 4 * 27 / 7**7,
    (7, 3, "complex"): 4**7 * 0.0000215113826,
    (8, 3, "complex"): 4**8 * 5**10 / 3**26,
}

B_REAL_43 = 1.6875e-5
B_COMPLEX_43 = 1.874577768244e-5
B_COMPLEX_43_ROOT = 2.98813453198126056781


@dataclass(frozen=True)
class ExtremalProblem:
    n: int
    d: int
    model: str
    kind: str = "A"

    def __post_init__(self):
        if not 1 <= self.n <= 8:
            raise ValueError(f"n must be in 1..8, got {self.n}")
        if not 2 <= self.d <= 8:
            raise ValueError(f"d must be in 2..8, got {self.d}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.kind not in ("A", "B"):
            raise ValueError(f"kind must be A or B, got {self.kind!r}")

    @property
    def scale(self) -> float:
        return 4.0**self.n if self.kind == "A" else 1.0


@dataclass(frozen=True)
class ExtremalResult:
    problem: ExtremalProblem
    value: float
    parameters: dict = field(default_factory=dict)
    reference: float | None = None
    restarts: int = 0
    method: str = ""

    @property
    def witness(self) -> float:
        return self.value / self.problem.scale

    def reevaluate(self) -> float:
        """Recompute the scaled value from the stored parameters."""
        prm = self.parameters
        if "rank_forced" in prm:
            return 0.0
        if "binary" in prm:
            w = classical_witness(prm["binary"], prm["rho"])
        elif "psi" in prm:
            w = quantum_witness_a(prm["psi"], prm["vectors"])
        elif "vectors" in prm:
            w = frame_witness_b(prm["vectors"])
        else:
            raise ValueError("result carries no evaluable parameters")
        return abs(w) * self.problem.scale

    @property
    def deviation(self) -> float | None:
        return None if self.reference is None else abs(self.value - self.reference)


# --- matrix builders ----------------------------------------------------------------


def classical_matrix(binary, rho) -> np.ndarray:
    """p = M diag(rho) M^T with M = [1; binary] (implicit all-ones row 0)."""
    a = np.asarray(binary, dtype=float)
    if a.ndim != 2:
        raise ValueError("binary matrix must be 2-dimensional")
    m = np.vstack([np.ones(a.shape[1]), a])
    r = np.asarray(rho, dtype=float)
    return (m * r) @ m.T


def classical_witness(binary, rho) -> float:
    return determinant(classical_matrix(binary, rho))


def exact_classical_witness(binary, rho: Sequence) -> Fraction:
    a = [[Fraction(1)] * len(rho)] + [[Fraction(int(x)) for x in row] for row in binary]
    r = [Fraction(x) for x in rho]
    k = len(a)
    p = [[sum(a[i][c] * r[c] * a[j][c] for c in range(len(r))) for j in range(k)] for i in range(k)]
    return exact_determinant(p)


def quantum_matrix_a(psi, vectors) -> np.ndarray:
    """Schmidt-form state with A_i = |v_i><v_i| and B_i = A_i^* (fast path)."""
    v = np.asarray(vectors)
    s = np.asarray(psi, dtype=float)
    n = v.shape[0]
    p = np.empty((n + 1, n + 1))
    p[0, 0] = 1.0
    p[1:, 1:] = np.abs((v * s) @ v.conj().T) ** 2
    m = (np.abs(v) ** 2) @ (s**2)
    p[0, 1:] = m
    p[1:, 0] = m
    return p


def quantum_witness_a(psi, vectors) -> float:
    return determinant(quantum_matrix_a(psi, vectors))


def bipartite_matrix(coeffs, effects_a, effects_b, kind: str = "A") -> np.ndarray:
    """p_ij = <psi|A_i x B_j|psi> for |psi> = sum C_kl |k>|l>.

    For kind A the identity is prepended to both effect lists so that row and
    column 0 hold the marginals.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    ea = [np.asarray(e, dtype=complex) for e in effects_a]
    eb = [np.asarray(e, dtype=complex) for e in effects_b]
    if kind == "A":
        ea = [np.eye(c.shape[0])] + ea
        eb = [np.eye(c.shape[1])] + eb
    # <psi|A x B|psi> = Tr(C^dag A C B^T)
    left = np.array([c.conj().T @ a @ c for a in ea])
    return np.real(np.einsum("ikl,jkl->ij", left, np.array(eb)))


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def frame_witness_b(vectors) -> float:
    """det(G / sum G) with G_ij = |<v_i|v_j>|^2 for unnormalised effect vectors."""
    v = np.asarray(vectors)
    g = np.abs(v.conj() @ v.T) ** 2
    return determinant(g / g.sum())


# --- rank-forced zeros ------------------------------------------------------------------


def rank_forced_zero(n: int, d: int, model: str) -> bool:
    """True when the operators span too small a space for n+1 independent rows."""
    if model == "classical":
        return d <= n
    if model == "real":
        return d * (d + 1) // 2 <= n
    return d * d <= n


# --- classical search ---------------------------------------------------------------


def _column_matrix(n: int, cols: Sequence[int]) -> np.ndarray:
    """M = [1; binary] for integer-coded columns (bit i of the code -> row i+1)."""
    bits = np.array([[(c >> i) & 1 for c in cols] for i in range(n)], dtype=float)
    return np.vstack([np.ones(len(cols)), bits])


def _design_weights(ms: np.ndarray, iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched multiplicative D-optimal updates; ms has shape (B, n+1, k)."""
    b, q, k = ms.shape
    rho = np.full((b, k), 1.0 / k)
    for _ in range(iters):
        p = np.einsum("bik,bk,bjk->bij", ms, rho, ms)
        inv = np.linalg.inv(p)
        lev = np.einsum("bik,bij,bjk->bk", ms, inv, ms)
        rho = rho * lev / q
        rho /= rho.sum(axis=1, keepdims=True)
    p = np.einsum("bik,bk,bjk->bij", ms, rho, ms)
    return rho, np.linalg.det(p)


def _full_rank(ms: np.ndarray) -> np.ndarray:
    q = ms.shape[1]
    return np.linalg.matrix_rank(ms) == q


def _score_subsets(n: int, subsets: np.ndarray, iters: int) -> tuple[np.ndarray, np.ndarray]:
    subsets = np.asarray(subsets)
    ms = np.stack([_column_matrix(n, s) for s in subsets]) if len(subsets) else np.empty((0, n + 1, 0))
    vals = np.zeros(len(subsets))
    rhos = np.zeros((len(subsets), subsets.shape[1] if len(subsets) else 0))
    if len(subsets) == 0:
        return rhos, vals
    ok = _full_rank(ms)
    if ok.any():
        r, v = _design_weights(ms[ok], iters)
        rhos[ok] = r
        vals[ok] = v
    return rhos, vals


def polish_weights(m: np.ndarray, rho: np.ndarray, tol: float = 1e-14, max_sweeps: int = 2000) -> np.ndarray:
    """Pairwise exact line search on det(M diag(rho) M^T) over the simplex.

    Moving weight t from column b to column a changes p by a rank-two term, so
    the determinant is a quadratic in t and its maximum on the feasible
    interval is found in closed form.
    """
    rho = np.array(rho, dtype=float)
    k = len(rho)

    def f(r):
        return np.linalg.det((m * r) @ m.T)

    cur = f(rho)
    for _ in range(max_sweeps):
        start = cur
        for a, b in itertools.combinations(range(k), 2):
            lo, hi = -rho[a], rho[b]
            if hi - lo <= 0:
                continue
            e = np.zeros(k)
            e[a], e[b] = 1.0, -1.0
            f_lo, f_hi = f(rho + lo * e), f(rho + hi * e)
            cands = {lo: f_lo, hi: f_hi}
            if lo < 0.0 < hi:
                # det is quadratic along e; interpolate through lo, 0, hi
                s_lo, s_hi = (f_lo - cur) / lo, (f_hi - cur) / hi
                c2 = (s_hi - s_lo) / (hi - lo)
                c1 = s_lo - c2 * lo
                if c2 < 0:
                    t = float(np.clip(-c1 / (2 * c2), lo, hi))
                    cands[t] = cur + c1 * t + c2 * t * t
            best_t = max(cands, key=cands.get)
            trial = np.clip(rho + best_t * e, 0.0, None)
            trial /= trial.sum()
            ft = f(trial)
            if ft > cur:
                rho, cur = trial, ft
        if cur - start <= tol * max(1.0, abs(cur)):
            break
    return rho


def _polish_top(n, subsets, rhos, vals, top) -> tuple[np.ndarray, np.ndarray, float]:
    order = np.argsort(-vals)[:top]
    best = (None, None, -np.inf)
    for idx in order:
        if vals[idx] <= 0:
            continue
        m = _column_matrix(n, subsets[idx])
        r = polish_weights(m, rhos[idx])
        v = float(np.linalg.det((m * r) @ m.T))
        if v > best[2]:
            best = (np.asarray(subsets[idx]), r, v)
    return best


def _to_binary(n: int, cols) -> np.ndarray:
    return _column_matrix(n, cols)[1:].astype(int)


def _exhaustive_subsets(n: int, k: int) -> np.ndarray:
    pool = range(1, 2**n)
    return np.array([(0,) + c for c in itertools.combinations(pool, k - 1)])


def _local_search(n, k, rng, iters, max_steps=200):
    """Best-improvement search over column replacements from a random start."""
    pool = 2**n
    cols = [0] + list(rng.choice(np.arange(1, pool), size=k - 1, replace=False))
    _, cur = _score_subsets(n, np.array([cols]), iters)
    cur = cur[0]
    for _ in range(max_steps):
        neigh = []
        members = set(cols)
        for pos in range(1, k):
            for c in range(1, pool):
                if c not in members:
                    trial = list(cols)
                    trial[pos] = c
                    neigh.append(sorted(trial))
        neigh = np.unique(np.array(neigh), axis=0)
        _, vals = _score_subsets(n, neigh, iters)
        j = int(np.argmax(vals))
        if vals[j] <= cur * (1 + 1e-12) + 1e-300:
            break
        cols, cur = list(neigh[j]), vals[j]
    return sorted(cols)


def classical_max_a(
    n: int,
    d: int,
    restarts: int = 200,
    seed: int = 0,
    exhaustive: bool | None = None,
    iters: int = 300,
) -> ExtremalResult:
    """Maximise 4^n det p over binary measurements and diagonal rho."""
    prob = ExtremalProblem(n, d, "classical", "A")
    if n > 5:
        raise ValueError("classical search supports n <= 5")
    ref = TABLE_I_EXACT.get((n, d), TABLE_I.get((n, d)))
    if rank_forced_zero(n, d, "classical"):
        return ExtremalResult(prob, 0.0, {"rank_forced": True}, ref, 0, "rank")
    k = min(d, 2**n)
    # subset enumeration is small for every n <= 4
    if exhaustive is None:
        exhaustive = n * d <= 20 or n <= 4
    if exhaustive:
        subsets = _exhaustive_subsets(n, k)
        method = "exhaustive"
        used = 0
    else:
        ss = np.random.SeedSequence(seed).spawn(restarts)
        found = {tuple(_local_search(n, k, np.random.default_rng(s), iters // 2)) for s in ss}
        subsets = np.array(sorted(found))
        method = "local-search"
        used = restarts
    rhos, vals = _score_subsets(n, subsets, iters)
    cols, rho, val = _polish_top(n, subsets, rhos, vals, top=10)
    binary = _to_binary(n, cols)
    return ExtremalResult(
        prob, float(val) * prob.scale, {"binary": binary, "rho": rho}, ref, used, method
    )


# --- quantum search -------------------------------------------------------------------


def _unpack_quantum(t: np.ndarray, n: int, d: int, cplx: bool):
    psi = np.abs(t[:d])
    psi = psi / np.linalg.norm(psi)
    re = t[d : d + n * d].reshape(n, d)
    if cplx:
        im = np.zeros((n, d))
        im[:, 1:] = t[d + n * d :].reshape(n, d - 1)
        v = re + 1j * im
    else:
        v = re
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    return psi, v


def _multistart(
    objective: Callable[[np.ndarray], float],
    npar: int,
    restarts: int,
    seed: int,
    polish: int = 3,
    coarse_fev: int = 4000,
) -> tuple[np.ndarray, float]:
    """Cheap Powell runs from every start, then a tight polish of the best few."""
    ss = np.random.SeedSequence(seed).spawn(restarts)
    runs = []
    for s in ss:
        x0 = np.random.default_rng(s).normal(size=npar)
        r = minimize(objective, x0, method="Powell", options={"xtol": 1e-6, "ftol": 1e-12, "maxfev": coarse_fev})
        runs.append((r.fun, r.x))
    runs.sort(key=lambda t: t[0])
    best_x, best_f = runs[0][1], runs[0][0]
    for f0, x0 in runs[:polish]:
        x = x0
        for _ in range(4):
            r = minimize(objective, x, method="Powell", options={"xtol": 1e-10, "ftol": 1e-16, "maxfev": 200000})
            x = r.x
        if r.fun < best_f:
            best_x, best_f = r.x, r.fun
    return best_x, best_f


def quantum_max_a(
    n: int,
    d: int,
    field: str = "complex",
    restarts: int = 200,
    seed: int = 0,
    skip_rank_forced: bool = True,
) -> ExtremalResult:
    """Maximise 4^n det p over Schmidt coefficients and rank-one projectors."""
    if field not in ("real", "complex"):
        raise ValueError(f"field must be real or complex, got {field!r}")
    prob = ExtremalProblem(n, d, field, "A")
    if d > 3:
        raise ValueError("quantum search supports d <= 3")
    ref = TABLE_II_EXACT.get((n, d, field), TABLE_II.get((n, d, field)))
    if skip_rank_forced and rank_forced_zero(n, d, field):
        return ExtremalResult(prob, 0.0, {"rank_forced": True}, ref, 0, "rank")
    cplx = field == "complex"
    npar = d + n * d + (n * (d - 1) if cplx else 0)

    def objective(t):
        return -abs(quantum_witness_a(*_unpack_quantum(t, n, d, cplx)))

    x, fval = _multistart(objective, npar, restarts, seed)
    psi, v = _unpack_quantum(x, n, d, cplx)
    return ExtremalResult(
        prob, -fval * prob.scale, {"psi": psi, "vectors": v}, ref, restarts, "multistart-powell"
    )


# --- scenario B ---------------------------------------------------------------------------


def etf_value(n: int, d: int) -> float:
    """[(d-1)/n]^n / (n+1)^(n+1), reached by an equiangular tight frame of n+1 vectors."""
    return ((d - 1) / n) ** n / (n + 1) ** (n + 1)


def simplex_frame(d: int) -> np.ndarray:
    """d+1 unit vectors in R^d with pairwise overlaps -1/d."""
    e = np.eye(d + 1) - 1.0 / (d + 1)
    q, _ = np.linalg.qr(e[:, :d])
    v = e @ q
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sic_frame_qubit() -> np.ndarray:
    out = []
    for m in tetrahedron_vectors():
        w, u = np.linalg.eigh((I2 + sum(c * s for c, s in zip(m, PAULIS))) / 2)
        out.append(u[:, np.argmax(w)])
    return np.array(out)


def icosahedral_frame() -> np.ndarray:
    g = (1 + math.sqrt(5)) / 2
    v = np.array([[0, 1, g], [0, -1, g], [1, g, 0], [-1, g, 0], [g, 0, 1], [g, 0, -1]])
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def known_etf(n: int, d: int, field: str) -> np.ndarray | None:
    """An equiangular tight frame of n+1 vectors in dimension d, if one is tabulated here."""
    if d == n:
        return simplex_frame(d)
    if (n, d) == (3, 2) and field == "complex":
        return sic_frame_qubit()
    if (n, d) == (5, 3):
        return icosahedral_frame()
    return None


def real_frame_43() -> np.ndarray:
    """x|1> +- y|2>, a|1> +- b|3>, z|2> at the optimum of that family.

    The optimum has a^4 = 1/160, y^4 = 1/120, x^2 = 3a^2, b^2 = 3y^2 and
    z^2 = 4y^2 (the overall scale is irrelevant).
    """
    a = (1 / 160) ** 0.25
    y = (1 / 120) ** 0.25
    x, b, z = math.sqrt(3) * a, math.sqrt(3) * y, 2 * y
    return np.array([[x, y, 0], [x, -y, 0], [a, 0, b], [a, 0, -b], [0, z, 0]])


def complex_43_closed_form(x: float) -> float:
    return x**2 * (1 + x) ** 6 * (1 + 2 * x) ** 6 / (27 * (x**2 * (1 + x) ** 2 + 2 * (2 + 3 * x) ** 2) ** 5)


def complex_43_quartic(x: float) -> float:
    return x**4 + 2 * x**3 - 11 * x**2 - 11 * x - 2


def complex_43_root() -> float:
    return float(max(np.roots([1, 2, -11, -11, -2]).real))


def complex_frame_43(x: float | None = None) -> np.ndarray:
    x = complex_43_root() if x is None else x
    q, r = 1.0, math.sqrt(x)
    a = math.sqrt(3 * q**2 * (q**2 + 2 * r**2) / (q**2 + r**2))
    w = np.exp(2j * np.pi / 3)
    rows = [[a, 0, 0], [0, a, 0]]
    rows += [[q * w**j, q * w ** (2 * j), r] for j in (3, 4, 5)]
    return np.array(rows, dtype=complex)


def max_b(
    n: int,
    d: int,
    field: str = "complex",
    restarts: int = 60,
    seed: int = 0,
) -> ExtremalResult:
    """Maximum of det p for one (n+1)-outcome measurement per party."""
    prob = ExtremalProblem(n, d, field, "B")
    if n > 5:
        raise ValueError("scenario B maxima support n <= 5")
    if d > n:
        # n+1 orthogonal levels with uniform weight and projective readout, evaluated exactly
        rho = [Fraction(1, n + 1)] * (n + 1)
        exact = exact_determinant([[rho[i] if i == j else 0 for j in range(n + 1)] for i in range(n + 1)])
        return ExtremalResult(
            prob, float(exact), {"rho": np.array(rho, dtype=float), "effects": "identity", "exact": exact},
            float(n + 1) ** (-n - 1), 0, "uniform",
        )
    if rank_forced_zero(n, d, field):
        return ExtremalResult(prob, 0.0, {"rank_forced": True}, 0.0, 0, "rank")
    frame = None if field == "classical" else known_etf(n, d, field)
    if frame is not None:
        return ExtremalResult(prob, frame_witness_b(frame), {"vectors": frame}, etf_value(n, d), 0, "etf")
    ref = {(4, 3, "real"): B_REAL_43, (4, 3, "complex"): B_COMPLEX_43}.get((n, d, field))
    cplx = field == "complex"
    npar = (n + 1) * d * (2 if cplx else 1)

    def unpack(t):
        v = t[: (n + 1) * d].reshape(n + 1, d)
        if cplx:
            v = v + 1j * t[(n + 1) * d :].reshape(n + 1, d)
        return v

    def objective(t):
        return -frame_witness_b(unpack(t))

    x, fval = _multistart(objective, npar, restarts, seed)
    return ExtremalResult(prob, -fval, {"vectors": unpack(x)}, ref, restarts, "multistart-powell")


# --- printed configurations -------------------------------------------------------------


@dataclass(frozen=True)
class ConfigCheck:
    name: str
    value: float
    published: float
    tolerance: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.published)

    @property
    def ok(self) -> bool:
        return self.deviation <= self.tolerance


def _bits(rows: str) -> list[list[int]]:
    return [[int(c) for c in r.split()] for r in rows.strip().splitlines()]


CLASSICAL_CONFIGS = {
    "classical n=1 d=2": (_bits("1 0"), [Fraction(1, 2)] * 2, Fraction(1, 4)),
    "classical n=2 d=3": (_bits("1 0 0\n0 1 0"), [Fraction(1, 3)] * 3, Fraction(1, 27)),
    "classical n=2 d=4": (_bits("1 1 0 0\n1 0 1 0"), [Fraction(1, 4)] * 4, Fraction(1, 16)),
    "classical n=3 d=4": (_bits("1 1 0 0\n1 0 1 0\n1 0 0 1"), [Fraction(1, 4)] * 4, Fraction(1, 64)),
    "classical n=4 d=5": (
        _bits("1 1 0 0 0\n1 0 1 0 0\n1 0 0 1 0\n1 0 0 0 1"),
        [Fraction(1, 5)] * 5,
        Fraction(9, 5**5),
    ),
    "classical n=4 d=8": (
        _bits("0 1 0 1 1 0 0 1\n0 0 0 1 0 1 1 1\n0 1 1 0 0 0 1 1\n0 0 1 0 1 1 0 1"),
        [Fraction(1, 8)] * 8,
        Fraction(1, 4**4),
    ),
    "classical n=5 d=6": (
        _bits("1 0 1 0 0 0\n0 1 1 1 0 1\n1 1 0 0 0 1\n1 0 0 1 0 1\n0 0 1 0 1 1"),
        [Fraction(1, 6)] * 6,
        Fraction(25, 6**6),
    ),
    "classical n=5 d=7": (
        _bits("0 1 0 0 0 1 1\n0 1 0 1 1 0 0\n0 0 1 1 0 1 0\n0 0 1 0 1 0 1\n0 1 1 0 0 0 0"),
        [Fraction(1, 6)] * 3 + [Fraction(1, 8)] * 4,
        Fraction(1, 12**3),
    ),
    "classical n=5 d=8": (
        _bits("0 0 0 0 1 1 1 1\n0 0 1 1 0 1 1 0\n0 1 1 0 1 0 1 0\n1 0 1 0 0 0 1 1\n1 0 1 0 1 1 0 0"),
        [Fraction(1, 8)] * 8,
        Fraction(1, 4**5),
    ),
}

A_N4_D6 = _bits("1 1 0 0 0 1\n1 0 1 0 0 1\n0 0 0 0 1 1\n0 1 1 0 0 1")
A_N4_D7 = _bits("0 0 0 0 0 1 1\n0 0 0 1 1 1 0\n0 0 1 1 0 0 1\n0 1 0 0 1 0 1")


def _classical_float_configs() -> list[ConfigCheck]:
    x, y = 0.19585843826556898, 0.18219100818175962
    rho6 = [x, x, x, 1 - 3 * x - 2 * y, y, y]
    x7, y7, z7 = 0.06135153414853146, 0.1710023907787869, 0.19069830365543322
    rho7 = [1 - 2 * (x7 + y7 + z7), x7, x7, y7, y7, z7, z7]
    return [
        ConfigCheck("classical n=4 d=6", classical_witness(A_N4_D6, rho6), 0.002954143422708182, 1e-12),
        ConfigCheck("classical n=4 d=7", classical_witness(A_N4_D7, rho7), 0.0030764392399879, 1e-12),
    ]


def _schmidt(psi) -> np.ndarray:
    return np.diag(np.asarray(psi, dtype=complex))


def _quantum_check(name, coeffs, vectors, published, tol, conj_b=True) -> ConfigCheck:
    # printed digits are plugged in as they stand, without renormalising
    pa = [np.outer(v, np.conj(v)) for v in np.asarray(vectors, dtype=complex)]
    pb = [a.conj() for a in pa] if conj_b else pa
    w = determinant(bipartite_matrix(coeffs, pa, pb))
    return ConfigCheck(name, abs(w), published, tol)


OMEGA = np.exp(2j * np.pi / 3)


def n7_ansatz_vectors(params) -> np.ndarray:
    """v_{j+3m} = x_m|1> + y_m|2> + z_m w^j|3>, v_7 = |1>; params = (x0, y0, z0, x1, y1, z1)."""
    p = np.asarray(params, dtype=float).reshape(2, 3)
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    rows = [[x, y, z * OMEGA**j] for x, y, z in p for j in (1, 2, 3)]
    rows.append([1, 0, 0])
    return np.array(rows, dtype=complex)


N7_PSI = np.array([math.sqrt(5), math.sqrt(5), math.sqrt(6)]) / 4


def optimize_n7_ansatz(restarts: int = 40, seed: int = 0) -> tuple[np.ndarray, float]:
    def objective(t):
        return -abs(quantum_witness_a(N7_PSI, n7_ansatz_vectors(t)))

    x, f = _multistart(objective, 6, restarts, seed, polish=5)
    return x, -f


def quantum_configs(n7_restarts: int = 40) -> list[ConfigCheck]:
    checks = []
    r2 = 1 / math.sqrt(2)
    singlet = np.array([[0, 1], [-1, 0]]) * r2
    checks.append(
        _quantum_check("quantum n=2 d=2 real", singlet, [[1, 0], [r2, r2]], 1 / 16, 1e-12, conj_b=False)
    )
    checks.append(
        _quantum_check(
            "quantum n=3 d=2 complex", singlet, [[1, 0], [r2, r2], [r2, 1j * r2]], 1 / 64, 1e-12, conj_b=False
        )
    )

    # the printed s is the squared coefficient; s = sqrt(0.72361...) reproduces W
    q = 0.5080857929626221
    s = math.sqrt(0.7236153449503123)
    w = math.sqrt(1 - s * s)
    vs = [[s, w * math.cos(2 * j * math.pi / 3), w * math.sin(2 * j * math.pi / 3)] for j in (1, 2, 3)]
    checks.append(
        _quantum_check("quantum n=3 d=3 real", _schmidt([math.sqrt(1 - 2 * q * q), q, q]), vs, 0.013208219549514474, 1e-12)
    )

    r17 = math.sqrt(17)
    s1, s2 = math.sqrt((9 + r17) / 16), math.sqrt((9 - r17) / 16)
    # normalisation requires w1^2 = 1 - s1^2, i.e. (7 - sqrt17)/16 for the first pair
    w1, w2 = math.sqrt((7 - r17) / 16), math.sqrt((7 + r17) / 16)
    vs = [[s1, w1, 0], [s1, -w1, 0], [s2, 0, w2], [s2, 0, -w2]]
    psi = np.array([2, math.sqrt(3), math.sqrt(3)]) / math.sqrt(10)
    checks.append(_quantum_check("quantum n=4 d=3 real", _schmidt(psi), vs, 27 / 12500, 1e-12))

    x, y, b, c = -0.20660676061609246, 0.8141407994847997, 0.5366502440643837, 0.8438048656782298
    q, r = 0.45755959305674204, 0.6898510489488422
    a, p = math.sqrt(1 - x * x - y * y), math.sqrt(1 - q * q - r * r)
    vs = [[a, x * OMEGA**j, y * OMEGA**j] for j in (1, 2, 3)] + [[0, b, c]]
    checks.append(_quantum_check("quantum n=4 d=3 complex", _schmidt([p, q, r]), vs, 0.003065301182016068, 1e-12))

    a2 = (10 + math.sqrt(10)) / 15
    a, bb = math.sqrt(a2), math.sqrt(1 - a2)
    vs = [[a * math.cos(2 * math.pi * j / 5), a * math.sin(2 * math.pi * j / 5), bb] for j in range(1, 6)]
    checks.append(
        _quantum_check(
            "quantum n=5 d=3 real",
            _schmidt(np.ones(3) / math.sqrt(3)),
            vs,
            (2437 + 340 * math.sqrt(10)) / (2 * 3**14),
            1e-12,
        )
    )

    zeta = np.exp(2j * np.pi / 5)
    x, z, p, r = 0.7998181925131095, -0.4434461617437569, 0.6838826680323404, 0.5298910387696789
    y, q = math.sqrt(1 - x * x - z * z), math.sqrt(1 - p * p - r * r)
    vs = [[x * zeta**j, y, z * zeta ** (-j)] for j in range(1, 6)]
    checks.append(_quantum_check("quantum n=5 d=3 complex", _schmidt([p, q, r]), vs, 0.000674047929103352, 1e-12))

    psi = [math.sqrt(2 / 7), math.sqrt(2 / 7), math.sqrt(3 / 7)]
    vs = [np.array([1, 0, OMEGA**j]) / math.sqrt(2) for j in (1, 2, 3)]
    vs += [np.array([0, 1, math.sqrt(2) * OMEGA**j]) / math.sqrt(3) for j in (1, 2, 3)]
    checks.append(_quantum_check("quantum n=6 d=3 complex", _schmidt(psi), vs, 4 * 27 / 7**7, 1e-12))

    params, _ = optimize_n7_ansatz(n7_restarts)
    checks.append(
        _quantum_check("quantum n=7 d=3 complex", _schmidt(N7_PSI), n7_ansatz_vectors(params), 0.0000215113826, 1e-9)
    )

    vs = [
        [math.sqrt(10) / 6, sg * 1j / math.sqrt(6), math.sqrt(5) * OMEGA**j / 3] for sg in (1, -1) for j in (1, 2, 3)
    ]
    vs += [[math.sqrt(5 / 6), sg / math.sqrt(6), 0] for sg in (1, -1)]
    checks.append(_quantum_check("quantum n=8 d=3 complex", _schmidt(np.ones(3) / math.sqrt(3)), vs, 5**10 / 3**26, 1e-12))
    return checks


def scenario_b_configs() -> list[ConfigCheck]:
    x = complex_43_root()
    return [
        ConfigCheck("case b n=4 d=3 real", frame_witness_b(real_frame_43()), B_REAL_43, 1e-12),
        ConfigCheck("case b n=4 d=3 complex closed form", complex_43_closed_form(B_COMPLEX_43_ROOT), B_COMPLEX_43, 1e-11),
        ConfigCheck("case b n=4 d=3 complex vectors", frame_witness_b(complex_frame_43(x)), B_COMPLEX_43, 1e-11),
        ConfigCheck("case b n=4 d=3 quartic residual", complex_43_quartic(B_COMPLEX_43_ROOT), 0.0, 1e-12),
        ConfigCheck("case b n=4 d=3 root", x, B_COMPLEX_43_ROOT, 1e-12),
    ]


def verify_appendix_configs(n7_restarts: int = 40) -> list[ConfigCheck]:
    out = []
    for name, (binary, rho, published) in CLASSICAL_CONFIGS.items():
        w = exact_classical_witness(binary, rho)
        out.append(ConfigCheck(name, float(w), float(published), 0.0 if w == published else 1e-12))
    out += _classical_float_configs()
    out += quantum_configs(n7_restarts)
    out += scenario_b_configs()
    return out


# --- absolute bounds ------------------------------------------------------------------


def hadamard_columns(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Binary matrix from rows of a Sylvester Hadamard matrix, with uniform rho."""
    k = max(1, math.ceil(math.log2(n + 1)))
    h = np.array([[1]])
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    binary = ((1 + h[1 : n + 1]) // 2).astype(int)
    return binary, np.full(2**k, 1.0 / 2**k)


def ququart_effects(n: int, field: str = "complex") -> list[np.ndarray]:
    """(1 + sigma_s x sigma_t)/2 for n Pauli pairs; real field avoids odd powers of sigma_y."""
    paulis = (I2,) + PAULIS
    pairs = [(s, t) for s in range(4) for t in range(4) if (s, t) != (0, 0)]
    if field == "real":
        pairs = [(s, t) for s, t in pairs if (s == 2) == (t == 2)]
    if n > len(pairs):
        raise ValueError(f"only {len(pairs)} {field} ququart effects available")
    return [(np.eye(4) + np.kron(paulis[s], paulis[t])) / 2 for s, t in pairs[:n]]


def ququart_witness(n: int, field: str = "complex") -> float:
    effects = ququart_effects(n, field)
    return determinant(bipartite_matrix(np.eye(4) / 2, effects, [e.conj() for e in effects]))


def _random_effect(rng, d) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    u, _ = np.linalg.qr(z)
    return (u * rng.uniform(0, 1, d)) @ u.conj().T


def _random_povm(rng, d, k) -> list[np.ndarray]:
    gs = []
    for _ in range(k):
        z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        gs.append(z @ z.conj().T)
    w, u = np.linalg.eigh(sum(gs))
    inv_sqrt = (u / np.sqrt(w)) @ u.conj().T
    return [inv_sqrt @ g @ inv_sqrt for g in gs]


@dataclass(frozen=True)
class BoundCheck:
    n: int
    kind: str
    bound: float
    max_random: float
    construction: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.max_random <= self.bound + 1e-10 and abs(self.construction - self.bound) <= 1e-12


def verify_absolute_bound(n: int, kind: str = "A", samples: int = 1000, seed: int = 0, d: int = 3) -> BoundCheck:
    """Random classical and quantum configurations never beat the bound; the construction meets it."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    scale = 4.0**n if kind == "A" else float(n + 1) ** (n + 1)
    best = 0.0
    for s in range(samples):
        if s % 2 == 0:
            r = rng.dirichlet(np.ones(d * d)).reshape(d, d)
            if kind == "A":
                a = np.vstack([np.ones(d), rng.uniform(0, 1, (n, d))])
                b = np.vstack([np.ones(d), rng.uniform(0, 1, (n, d))])
            else:
                a = rng.dirichlet(np.ones(n + 1), size=d).T
                b = rng.dirichlet(np.ones(n + 1), size=d).T
            p = a @ r @ b.T
        else:
            z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            if kind == "A":
                ea = [_random_effect(rng, d) for _ in range(n)]
                eb = [_random_effect(rng, d) for _ in range(n)]
            else:
                ea, eb = _random_povm(rng, d, n + 1), _random_povm(rng, d, n + 1)
            p = bipartite_matrix(z, ea, eb, kind)
        best = max(best, abs(determinant(p)) * scale)
    if kind == "A":
        binary, rho = hadamard_columns(n)
        construction = classical_witness(binary, rho) * scale
    else:
        construction = determinant(np.eye(n + 1) / (n + 1)) * scale
    return BoundCheck(n, kind, 1.0, best, construction, samples)
