"""Dense phase-one simplex for ``{x >= 0 : A x = b}``.

Works on float64 arrays or on object arrays of Fractions (exact pivoting).
Bland's rule picks both the entering and the leaving column, so the exact
path cannot cycle. On infeasibility the simplex multipliers give a Farkas
vector ``y`` with ``y @ A <= 0`` columnwise and ``y @ b > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_PIVOT_EPS = 1e-11


@dataclass
class FeasibilityResult:
    feasible: bool
    x: np.ndarray | None
    y: np.ndarray | None
    residual: float | Fraction
    pivots: int


def _pivot(T, z, r, j):
    row = T[r] / T[r, j]
    T -= np.outer(T[:, j], row)
    T[r] = row
    z -= z[j] * row


def find_feasible(A, b, tol=None, max_pivots: int | None = None) -> FeasibilityResult:
    A = np.asarray(A)
    b = np.asarray(b)
    exact = A.dtype == object
    m, n = A.shape
    if tol is None:
        tol = 0 if exact else 1e-9
    eps = 0 if exact else FLOAT_PIVOT_EPS
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    sign = np.array([-1 if v < 0 else 1 for v in b])
    dtype = object if exact else np.float64
    T = np.empty((m, n + m + 1), dtype=dtype)
    T[:, :n] = A * sign[:, None]
    T[:, n:n + m] = zero
    for i in range(m):
        T[i, n + i] = one
    T[:, -1] = b * sign
    basis = list(range(n, n + m))

    # reduced costs of the artificial-sum objective; z[-1] holds -objective
    z = np.empty(n + m + 1, dtype=dtype)
    z[:] = zero
    z[:n] = -T[:, :n].sum(axis=0)
    z[-1] = -T[:, -1].sum()

    limit = max_pivots or 50 * (m + n) + 100
    pivots = 0
    while True:
        entering = next((j for j in range(n + m) if z[j] < -eps), None)
        if entering is None:
            break
        best, leave = None, None
        for i in range(m):
            if T[i, entering] > eps:
                ratio = T[i, -1] / T[i, entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unreachable: phase-one objective is bounded below
            break
        _pivot(T, z, leave, entering)
        basis[leave] = entering
        pivots += 1
        if pivots >= limit:
            raise RuntimeError("simplex pivot limit reached")

    residual = -z[-1]
    x = np.empty(n, dtype=dtype)
    x[:] = zero
    for i, var in enumerate(basis):
        if var < n:
            x[var] = T[i, -1]
    if not exact:
        x = np.clip(x, 0.0, None)
    feasible = residual == 0 if exact else residual <= tol
    y = (one - z[n:n + m]) * sign
    return FeasibilityResult(bool(feasible), x, y, residual, pivots)
