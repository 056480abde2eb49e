"""Monte-Carlo estimates of the volume fraction of a set in shrinking balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .functions import cusp_domain
from .geometry import as_vector


@dataclass
class DensityCurve:
    center: np.ndarray
    radii: list
    ratios: list
    samples_per_radius: int
    seed: int

    def std_errors(self) -> list:
        n = self.samples_per_radius
        return [math.sqrt(max(p * (1 - p), 0.0) / n) for p in self.ratios]

    def loglog_slope(self) -> float:
        r = np.array(self.radii)
        p = np.array(self.ratios)
        if len(p) < 2 or np.any(p <= 0):
            return math.nan
        return float(np.polyfit(np.log(r), np.log(p), 1)[0])


def _membership(domain: Callable, X: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        return np.asarray(domain(X), dtype=bool)
    return np.array([bool(domain(x)) for x in X])


def density_curve(domain: Callable, center, radii, samples: int, seed: int = 0, vectorized: bool = True) -> DensityCurve:
    """In-domain fraction of ``samples`` uniform ball points, per radius.

    Radius ``i`` uses counter stream ``i``, so each ratio is reproducible on
    its own and the sample set for ``n`` points is a prefix of the one for
    ``2n``.
    """
    center = as_vector(center)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if samples < 1000:
        raise ValueError("need at least 1000 samples per radius")
    idx = np.arange(samples, dtype=np.uint64)
    ratios = []
    for i, r in enumerate(radii):
        X = rng.ball_points(center, r, idx, seed, stream=i + 1)
        ratios.append(float(np.mean(_membership(domain, X, vectorized))))
    return DensityCurve(center, radii, ratios, samples, seed)


def _half_plane(X):
    return np.asarray(X)[..., 0] >= 0


def _quadrant(X):
    X = np.asarray(X)
    return (X[..., 0] >= 0) & (X[..., 1] >= 0)


def _epi_abs(X):
    X = np.asarray(X)
    return X[..., 1] >= np.abs(X[..., 0])


def _full_plane(X):
    return np.ones(np.asarray(X).shape[:-1], dtype=bool)


SCENARIOS: dict[str, tuple[Callable, bool]] = {
    # name: (domain predicate, epi-Lipschitzian at the origin)
    "half_plane": (_half_plane, True),
    "quadrant": (_quadrant, True),
    "epi_abs": (_epi_abs, True),
    "full_plane": (_full_plane, True),
    "cusp": (cusp_domain, False),
}


def cusp_ratio(delta: float) -> float:
    """Exact fraction of ``B_delta(0)`` covered by ``{|y| <= x^2, x >= 0}``.

    The boundary curves meet the circle at ``x_c`` with ``x_c^2 + x_c^4 = delta^2``.
    Area = 2 * (int_0^{x_c} x^2 dx + int_{x_c}^{delta} sqrt(delta^2 - x^2) dx).
    """
    xc = math.sqrt((-1.0 + math.sqrt(1.0 + 4.0 * delta**2)) / 2.0)
    inner = xc**3 / 3.0

    def circ(x):
        return 0.5 * (x * math.sqrt(max(delta**2 - x**2, 0.0)) + delta**2 * math.asin(min(x / delta, 1.0)))

    cap = circ(delta) - circ(xc)
    return 2.0 * (inner + cap) / (math.pi * delta**2)
