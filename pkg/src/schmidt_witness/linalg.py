"""Determinants and adjugates, in floating point and over exact rationals.

The witness lives on matrices of size at most 9x9, so the adjugate is built
straight from cofactors. That keeps it well defined when the determinant is
zero, which is exactly the regime the null test operates in.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised for non-square or mismatched matrix shapes."""


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def determinant(m) -> float:
    """Determinant by LU factorisation with partial pivoting."""
    a = _as_square(m)
    if a.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(a))


def adjugate(m) -> np.ndarray:
    """Transpose of the cofactor matrix, entry (i, j) = (-1)^(i+j) M_ji."""
    a = _as_square(m)
    k = a.shape[0]
    if k == 1:
        return np.ones((1, 1))
    out = np.empty_like(a)
    idx = np.arange(k)
    for i in range(k):
        rows = idx != i
        for j in range(k):
            minor = a[np.ix_(idx != j, rows)]
            out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def _as_fraction_rows(m) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in row] for row in m]
    if any(len(r) != len(rows) for r in rows):
        raise DimensionError("expected a square matrix")
    return rows


def exact_determinant(m: Sequence[Sequence]) -> Fraction:
    """Determinant over the rationals by fraction-exact Gaussian elimination.

    Entries may be ints, Fractions, or decimal strings such as ``"1/2"``.
    Floats are converted exactly (binary expansion), so pass strings or
    Fractions when the intended value is a decimal fraction.
    """
    a = _as_fraction_rows(m)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        pv = a[col][col]
        det *= pv
        for r in range(col + 1, n):
            f = a[r][col] / pv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def exact_adjugate(m: Sequence[Sequence]) -> list[list[Fraction]]:
    a = _as_fraction_rows(m)
    n = len(a)
    if n == 1:
        return [[Fraction(1)]]
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for r, row in enumerate(a) if r != j]
            out[i][j] = (-1) ** (i + j) * exact_determinant(minor)
    return out
