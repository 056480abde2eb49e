"""Projections onto epigraphs and proximal-normal accessibility traces.

For a base point ``(xb, f(xb))``, a normal ``v`` and an escape direction ``w``
(both in R^{n+1}), the trace follows ``y(t) = base + t (v + t w)``. It
projects ``y(t)`` onto ``epi f`` and records how far the proximal normal
``(y(t) - x(t)) / t`` is from ``v``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functions import ExtendedFunction, lookup
from .geometry import as_vector

DEFAULT_GRID = 401
REFINE_STEPS = 30


def default_schedule(t0: float = 0.1, ratio: float = 0.5, steps: int = 8) -> list[float]:
    return [t0 * ratio**i for i in range(steps)]


def _epi_sqdist(f: ExtendedFunction, X: np.ndarray, y_x: np.ndarray, y_r: float) -> tuple[np.ndarray, np.ndarray]:
    fx = f.values(X)
    r = np.maximum(fx, y_r)
    d = np.sum((X - y_x) ** 2, axis=-1) + (r - y_r) ** 2
    return np.where(np.isfinite(fx), d, np.inf), r


def project_epigraph(f: ExtendedFunction, y, search_box: float, grid: int = DEFAULT_GRID) -> tuple[np.ndarray, float]:
    """Approximate nearest point of ``epi f`` to ``y = (y_x, y_r)``.

    A grid of ``grid`` points per axis over the box of half-width
    ``search_box`` centred at ``y_x`` is searched. For each spatial point the
    best height is ``max(f(x), y_r)``. The grid winner is then refined by
    coordinate pattern search with a halving step.
    """
    y_x, y_r = y
    y_x = as_vector(y_x, f.dim)
    y_r = float(y_r)
    if not search_box > 0:
        raise ValueError("search_box must be positive")
    axes = [np.linspace(c - search_box, c + search_box, grid) for c in y_x]
    # keep the centre exact so symmetric cases are hit on the nose
    for ax, c in zip(axes, y_x):
        ax[grid // 2] = c
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.dim)
    d, _ = _epi_sqdist(f, mesh, y_x, y_r)
    k = int(np.argmin(d))
    if not math.isfinite(d[k]):
        raise ValueError("no epigraph points in box")
    best_x, best_d = mesh[k].copy(), float(d[k])
    step = 2.0 * search_box / max(grid - 1, 1)
    eye = np.eye(f.dim)
    for _ in range(REFINE_STEPS):
        step *= 0.5
        for j in range(f.dim):
            cand = np.stack([best_x - step * eye[j], best_x + step * eye[j]])
            cd, _ = _epi_sqdist(f, cand, y_x, y_r)
            i = int(np.argmin(cd))
            if cd[i] < best_d:
                best_x, best_d = cand[i], float(cd[i])
    best_r = max(float(f.values(best_x[None, :])[0]), y_r)
    return best_x, best_r


@dataclass
class TraceRecord:
    t: float
    y: np.ndarray
    x: np.ndarray
    proximal_normal: np.ndarray
    residual: float
    distance_to_base: float


@dataclass
class AccessibilityTrace:
    base: tuple
    direction_v: np.ndarray
    direction_w: np.ndarray
    t_schedule: list
    records: list = field(default_factory=list)

    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    def loglog_slope(self) -> float:
        """Least-squares slope of log(residual) against log(t); nan if any residual is 0."""
        res = self.residuals()
        if len(res) < 2 or np.any(res <= 0):
            return math.nan
        t = np.array(self.t_schedule)
        return float(np.polyfit(np.log(t), np.log(res), 1)[0])


def run_accessibility(
    f: ExtendedFunction,
    base_x,
    v,
    w,
    t_schedule=None,
    grid: int = DEFAULT_GRID,
    search_box: float | None = None,
) -> AccessibilityTrace:
    base_x = as_vector(base_x, f.dim)
    base_r = f(base_x)
    if not math.isfinite(base_r):
        raise ValueError("base point outside domain")
    v = as_vector(v, f.dim + 1)
    w = as_vector(w, f.dim + 1)
    ts = list(default_schedule() if t_schedule is None else t_schedule)
    if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_schedule must be positive and strictly decreasing")
    base = np.append(base_x, base_r)

    def one(t):
        y = base + t * (v + t * w)
        box = search_box if search_box is not None else 4.0 * t * (np.linalg.norm(v) + np.linalg.norm(w))
        px, pr = project_epigraph(f, (y[:-1], y[-1]), box, grid)
        xt = np.append(px, pr)
        pn = (y - xt) / t
        return TraceRecord(t, y, xt, pn, float(np.linalg.norm(pn - v)), float(np.linalg.norm(xt - base)))

    workers = max(1, min(int(os.environ.get("CLARKE_KIT_THREADS", "1") or 1), len(ts)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, ts))
    else:
        records = [one(t) for t in ts]
    return AccessibilityTrace((base_x, base_r), v, w, ts, records)


def scenarios() -> dict:
    """The shipped accessibility runs: name -> (function, base_x, v, w, grid)."""
    s2 = 1.0 / math.sqrt(2.0)
    return {
        # boundary ray (1,-1)/sqrt2 of the normal cone of epi|x| at the apex
        "abs": (lookup("abs")[0], [0.0], [s2, -s2], [1.0, 0.0], DEFAULT_GRID),
        # half-space: tangential escape, proximal normals are exact
        "halfspace": (lookup("zero")[0], [0.0], [0.0, -1.0], [1.0, 0.0], DEFAULT_GRID),
        # horizontal normal of the quartic root at the origin
        "quartic_root": (lookup("quartic_root")[0], [0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], 801),
    }


def run_scenario(name: str, t_schedule=None) -> AccessibilityTrace:
    try:
        f, bx, v, w, grid = scenarios()[name]
    except KeyError:
        raise ValueError(f"unknown accessibility scenario: {name}") from None
    return run_accessibility(f, bx, v, w, t_schedule, grid)
