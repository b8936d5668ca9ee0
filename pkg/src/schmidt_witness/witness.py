"""Probability matrices, the determinant witness and its statistical error.

Two layouts are supported:

* kind ``"A"`` -- n binary measurements per party. Row/column 0 hold the
  single-party marginals and the corner is 1.
* kind ``"B"`` -- one (n+1)-outcome measurement per party; the matrix is a
  joint distribution and sums to 1.

Rows are indexed by party A outcomes and columns by party B outcomes, in the
order fixed by the scenario builders. The witness is the signed determinant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import DimensionError, adjugate, determinant

KINDS = ("A", "B")

ENTRY_TOL = 1e-12


class UnreliableErrorWarning(RuntimeWarning):
    """The adjugate vanishes, so the first-order error estimate is meaningless."""


@dataclass(frozen=True)
class ProbabilityMatrix:
    entries: np.ndarray
    kind: str

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"probability matrix must be square, got {a.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def violations(self, tol: float = ENTRY_TOL) -> list[str]:
        """Human-readable list of broken invariants (empty when valid)."""
        a = self.entries
        out = []
        if np.any(a < -tol) or np.any(a > 1 + tol):
            out.append("entries outside [0, 1]")
        if self.kind == "A":
            if abs(a[0, 0] - 1.0) > tol:
                out.append(f"corner entry is {float(a[0, 0])!r}, expected 1")
        elif abs(a.sum() - 1.0) > tol:
            out.append(f"entries sum to {float(a.sum())!r}, expected 1")
        return out

    def validate(self, tol: float = ENTRY_TOL) -> "ProbabilityMatrix":
        bad = self.violations(tol)
        if bad:
            raise ValueError("invalid probability matrix: " + "; ".join(bad))
        return self

    def transposed(self) -> "ProbabilityMatrix":
        """Same data with the roles of the two parties exchanged."""
        return ProbabilityMatrix(self.entries.T.copy(), self.kind)


def witness(p: ProbabilityMatrix) -> float:
    return determinant(p.entries)


def adjugate_is_zero(p: ProbabilityMatrix, rtol: float = 1e-9) -> bool:
    adj = adjugate(p.entries)
    # an n x n minor scales like (largest entry)^n
    scale = float(np.max(np.abs(p.entries))) ** p.n
    return bool(np.max(np.abs(adj)) <= rtol * scale)


def witness_variance_terms(p: ProbabilityMatrix) -> float:
    """N * Delta W^2 for a single trial (N = 1)."""
    adj = adjugate(p.entries)
    q = p.entries
    # adj[j, k] pairs with q[k, j]
    at = adj.T
    if p.kind == "A":
        return float(np.sum(at**2 * q * (1.0 - q)))
    return float(np.sum(at**2 * q) - np.sum(at * q) ** 2)


def witness_error(p: ProbabilityMatrix, n_shots: int) -> float:
    """One-standard-deviation error of the witness after ``n_shots`` trials.

    For kind A ``n_shots`` counts trials per measurement setting and the
    marginals are treated as independent measurements, which overestimates
    the error when they are pooled over settings. For kind B it is the total
    number of trials. Emits :class:`UnreliableErrorWarning` when the adjugate
    vanishes identically.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be a positive integer")
    if adjugate_is_zero(p):
        warnings.warn(
            "adjugate of the probability matrix vanishes; the error estimate "
            "needs second-order minors and is not reliable",
            UnreliableErrorWarning,
            stacklevel=2,
        )
    v = witness_variance_terms(p)
    return math.sqrt(max(v, 0.0) / n_shots)


def first_order_shift(p: ProbabilityMatrix, delta_p) -> float:
    """Linear response Tr(Adj(p) . delta_p) of the witness."""
    d = np.asarray(delta_p, dtype=float)
    if d.shape != p.entries.shape:
        raise DimensionError(f"perturbation shape {d.shape} != {p.entries.shape}")
    return float(np.trace(adjugate(p.entries) @ d))


@dataclass(frozen=True)
class WitnessReport:
    """Witness from pooled counts (W) and job-averaged (W') with their errors."""

    W: float
    deltaW: float
    Wprime: float
    deltaWprime: float
    nShots: int
    jobCount: int
    reliable: bool = True
    label: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def zScore(self) -> float:
        return self.W / self.deltaW if self.deltaW > 0 else math.nan

    @property
    def zScorePrime(self) -> float:
        return self.Wprime / self.deltaWprime if self.deltaWprime > 0 else math.nan

    @property
    def absW(self) -> float:
        return abs(self.W)
