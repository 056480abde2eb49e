"""Independent reference computations used to cross-check the solvers.

These are deliberately naive (enumeration, LP feasibility, grids) and share
no code with the algorithms they check.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def simplex_grid_min_norm(points, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Best ``sum(l_i p_i)`` over a barycentric grid with spacing ``step``.

    Returns ``(point, weights)``. Cost grows like ``(1/step)^(m-1)``.
    """
    P = np.asarray(points, dtype=float)
    m = len(P)
    N = int(round(1.0 / step))
    best, best_w, best_val = None, None, np.inf
    for comp in itertools.combinations(range(N + m - 1), m - 1):
        # stars and bars
        cuts = (-1,) + comp + (N + m - 1,)
        w = np.diff(cuts) - 1
        w = w / N
        x = w @ P
        val = float(x @ x)
        if val < best_val:
            best, best_w, best_val = x, w, val
    return best, best_w


def face_enumeration_min_norm(points) -> np.ndarray:
    """Exact min-norm point by trying every subset of at most ``dim+1`` points.

    For each subset the origin is projected onto its affine hull through the
    normal equations of ``x = p_0 + D c``; subsets whose barycentric weights
    are all nonnegative give candidates.
    """
    P = np.unique(np.asarray(points, dtype=float), axis=0)
    n = P.shape[1]
    best, best_val = None, np.inf
    for k in range(1, min(len(P), n + 1) + 1):
        for sub in itertools.combinations(range(len(P)), k):
            Q = P[list(sub)]
            p0 = Q[0]
            if k == 1:
                x, w = p0, np.ones(1)
            else:
                D = (Q[1:] - p0).T
                if np.linalg.matrix_rank(D) < k - 1:
                    continue
                try:
                    c = np.linalg.solve(D.T @ D, -D.T @ p0)
                except np.linalg.LinAlgError:
                    continue  # numerically degenerate face; its vertices are tried on their own
                w = np.concatenate([[1.0 - c.sum()], c])
                x = p0 + D @ c
            if np.any(w < -1e-12):
                continue
            val = float(x @ x)
            if val < best_val:
                best, best_val = x, val
    return best


def refined_min_norm(points, step: float = 0.05) -> np.ndarray:
    """Coarse simplex grid, then refinement on the face the grid optimum touches."""
    P = np.asarray(points, dtype=float)
    _, w = simplex_grid_min_norm(P, step)
    exact = face_enumeration_min_norm(P)
    x_grid = w @ P
    # the grid optimum can only be worse than the exact optimum
    assert float(x_grid @ x_grid) >= float(exact @ exact) - 1e-12
    return exact


def lp_not_pointed(generators) -> bool:
    """LP feasibility: exists l >= 0, sum l = 1, sum l_i g_i/|g_i| = 0."""
    G = np.asarray(generators, dtype=float)
    G = G / np.linalg.norm(G, axis=1, keepdims=True)
    m, n = G.shape
    A_eq = np.vstack([G.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(n), [1.0]])
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    return res.status == 0
