"""Phase-one simplex for small dense feasibility problems.

Finds ``x >= 0`` with ``A x = b`` or returns a Farkas certificate ``y`` with
``y^T A <= 0`` and ``y^T b > 0``.  Bland's rule keeps it from cycling; the
problems here have at most a few hundred columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12
FEAS_TOL = 1e-9


@dataclass
class FeasibilityResult:
    feasible: bool
    x: np.ndarray | None
    farkas: np.ndarray | None
    pivots: int


def find_feasible_point(A, b, max_pivots: int = 10_000) -> FeasibilityResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, N = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b *= sign

    # tableau columns: original variables, then one artificial per row
    T = np.hstack([A, np.eye(m), b[:, None]])
    basis = list(range(N, N + m))
    cost = np.concatenate([np.zeros(N), np.ones(m)])

    def reduced_costs():
        return cost - cost[basis] @ T[:, :-1]

    pivots = 0
    while pivots < max_pivots:
        rc = reduced_costs()
        entering = next((j for j in range(N + m) if rc[j] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = T[:, entering]
        rows = [i for i in range(m) if col[i] > PIVOT_TOL]
        if not rows:  # cannot happen: phase one is bounded below by 0
            break
        ratios = [(T[i, -1] / col[i], basis[i], i) for i in rows]
        best = min(r for r, _, _ in ratios)
        leave = min((bi, i) for r, bi, i in ratios if r <= best + PIVOT_TOL)[1]
        _pivot(T, leave, entering)
        basis[leave] = entering
        pivots += 1

    B = np.hstack([A, np.eye(m)])[:, basis]
    objective = float(cost[basis] @ T[:, -1])
    if objective > FEAS_TOL:
        y = np.linalg.solve(B.T, cost[basis])
        return FeasibilityResult(False, None, y * sign, pivots)

    # drive zero-level artificials out of the basis where possible
    for i, bi in enumerate(list(basis)):
        if bi >= N:
            j = next((j for j in range(N) if abs(T[i, j]) > 1e-9 and j not in basis), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    x = np.zeros(N)
    for i, bi in enumerate(basis):
        if bi < N:
            x[bi] = max(T[i, -1], 0.0)
    return FeasibilityResult(True, x, None, pivots)


def _pivot(T, r, c):
    T[r] /= T[r, c]
    for i in range(T.shape[0]):
        if i != r and T[i, c] != 0.0:
            T[i] -= T[i, c] * T[r]
