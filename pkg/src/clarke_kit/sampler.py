"""Gradient sampling estimate of the Clarke subdifferential.

Gradients are sampled uniformly in a ball around the base point. Bounded
ones form the convex hull part of the estimate. Very large ones are kept
only through their direction, as horizon directions. The domain's normal
cone at the base point is added as a conical part.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import rng
from .functions import ExtendedFunction, NonDifferentiableError, ReferenceSubdifferential, StencilOutsideDomainError, fd_gradient
from .geometry import (
    FiniteCone,
    MinkowskiSet,
    Polytope,
    as_vector,
    direction_grid,
    distance_to_minkowski,
    extreme_rays,
    support_value,
)

THREADS_ENV = "CLARKE_KIT_THREADS"
_CHUNK = 256


@dataclass(frozen=True)
class SamplingConfig:
    radius: float = 0.01
    max_samples: int = 1000
    seed: int = 0
    horizon_threshold: float = 1e3
    fd_step: float = 1e-6
    tol: float = 0.05

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.max_samples < 1:
            raise ValueError("max_samples must be at least 1")
        if not self.horizon_threshold > 1:
            raise ValueError("horizon_threshold must exceed 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass
class GradientCloud:
    base_point: np.ndarray
    kept_gradients: np.ndarray
    horizon_directions: np.ndarray
    rejected_outside_domain: int
    rejected_nondifferentiable: int
    config: SamplingConfig
    # sample indices behind each entry, so prefixes of the draw can be recovered
    kept_index: np.ndarray = field(default=None)  # type: ignore[assignment]
    horizon_index: np.ndarray = field(default=None)  # type: ignore[assignment]
    outside_index: np.ndarray = field(default=None)  # type: ignore[assignment]

    @property
    def dim(self) -> int:
        return self.base_point.size

    @property
    def total_draws(self) -> int:
        return len(self.kept_gradients) + len(self.horizon_directions) + self.rejected_outside_domain + self.rejected_nondifferentiable

    def prefix(self, k: int) -> "GradientCloud":
        """The cloud that ``max_samples = k`` with the same seed would have produced."""
        if not 1 <= k <= self.config.max_samples:
            raise ValueError("prefix length out of range")
        keep = self.kept_index < k
        hor = self.horizon_index < k
        if not (np.any(keep) or np.any(hor)):
            raise ValueError("no usable samples")
        outside = int(np.sum(self.outside_index < k))
        used = int(np.sum(keep) + np.sum(hor))
        return GradientCloud(
            self.base_point,
            self.kept_gradients[keep],
            self.horizon_directions[hor],
            outside,
            k - used - outside,
            replace(self.config, max_samples=k),
            self.kept_index[keep],
            self.horizon_index[hor],
            self.outside_index[self.outside_index < k],
        )


@dataclass
class SubdifferentialEstimate:
    set: MinkowskiSet
    cloud: GradientCloud
    lifted_generators: np.ndarray


@dataclass
class StationarityReport:
    distance_to_zero: float
    is_stationary: bool
    witness: np.ndarray
    draws_used: int


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def sample_ball(center, radius: float, count: int, seed: int, stream: int = 0, start: int = 0) -> np.ndarray:
    """``count`` uniform points in the open ball; sample ``i`` depends only on ``(seed, i)``."""
    center = as_vector(center)
    if not radius > 0:
        raise ValueError("radius must be positive")
    if count < 1:
        raise ValueError("count must be at least 1")
    idx = np.arange(start, start + count, dtype=np.uint64)
    return rng.ball_points(center, radius, idx, seed, stream)


def _gradient_at(f: ExtendedFunction, x: np.ndarray, h: float):
    """(gradient or None, reason) where reason is 'ok', 'outside' or 'nondiff'."""
    if not f.in_domain(x):
        return None, "outside"
    if f.gradient is not None:
        g = f.gradient(x)
        if g is None:
            return None, "nondiff"
        g = np.asarray(g, dtype=float)
        if not np.all(np.isfinite(g)):
            return None, "nondiff"
        return g, "ok"
    try:
        return fd_gradient(f, x, h), "ok"
    except (NonDifferentiableError, StencilOutsideDomainError):
        return None, "nondiff"


def build_cloud(f: ExtendedFunction, config: SamplingConfig, center) -> GradientCloud:
    center = as_vector(center, f.dim)
    if not f.in_domain(center):
        raise ValueError("center outside domain")
    pts = sample_ball(center, config.radius, config.max_samples, config.seed)

    def work(lo):
        return [_gradient_at(f, x, config.fd_step) for x in pts[lo:lo + _CHUNK]]

    starts = list(range(0, len(pts), _CHUNK))
    workers = min(_workers(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(work, starts))  # map preserves index order
    else:
        chunks = [work(lo) for lo in starts]
    results = [r for chunk in chunks for r in chunk]

    kept, kept_idx, hor, hor_idx, out_idx = [], [], [], [], []
    nondiff = 0
    for i, (g, why) in enumerate(results):
        if why == "outside":
            out_idx.append(i)
        elif why == "nondiff":
            nondiff += 1
        else:
            nrm = float(np.linalg.norm(g))
            if nrm > config.horizon_threshold:
                hor.append(g / nrm)
                hor_idx.append(i)
            else:
                kept.append(g)
                kept_idx.append(i)
    if not kept and not hor:
        raise ValueError("no usable samples")
    n = f.dim
    return GradientCloud(
        center,
        np.array(kept).reshape(-1, n),
        np.array(hor).reshape(-1, n),
        len(out_idx),
        nondiff,
        config,
        np.array(kept_idx, dtype=int),
        np.array(hor_idx, dtype=int),
        np.array(out_idx, dtype=int),
    )


def _hull_vertices(P: np.ndarray) -> np.ndarray:
    """Extreme points of conv(P), sorted lexicographically for order independence."""
    if len(P) == 0:
        return P
    P = np.unique(P, axis=0)  # sorted, deduplicated
    if len(P) <= P.shape[1] + 1:
        return P
    if P.shape[1] == 1:
        return np.array([P.min(axis=0), P.max(axis=0)])
    try:
        hull = ConvexHull(P)
    except QhullError:
        return P
    return P[np.sort(hull.vertices)]


def assemble_estimate(cloud: GradientCloud, normals: FiniteCone | None = None) -> SubdifferentialEstimate:
    n = cloud.dim
    if normals is None:
        normals = FiniteCone.empty(n)
    if normals.dim != n:
        raise ValueError("normal cone dimension differs from the cloud")
    hull = Polytope(_hull_vertices(cloud.kept_gradients), n)

    gens = np.vstack([cloud.horizon_directions, normals.generators]) if len(normals.generators) else cloud.horizon_directions
    if len(gens):
        gens = np.unique(gens / np.linalg.norm(gens, axis=1, keepdims=True), axis=0)
        gens = extreme_rays(FiniteCone(gens, n))
        gens = np.unique(gens, axis=0)
    cone = FiniteCone(gens.reshape(-1, n), n)

    K = cloud.kept_gradients
    lifted_hull = np.hstack([K, -np.ones((len(K), 1))]) / np.sqrt(1.0 + np.einsum("ij,ij->i", K, K))[:, None]
    horizon = np.hstack([cloud.horizon_directions, np.zeros((len(cloud.horizon_directions), 1))])
    nrm = normals.generators
    if len(nrm):
        nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
    lifted_normals = np.hstack([nrm.reshape(-1, n), np.zeros((len(nrm), 1))])
    lifted = np.vstack([lifted_hull, horizon, lifted_normals])
    return SubdifferentialEstimate(MinkowskiSet(hull, cone), cloud, lifted)


def estimate(f: ExtendedFunction, config: SamplingConfig, center, normals: FiniteCone | None = None) -> SubdifferentialEstimate:
    """build_cloud followed by assemble_estimate, using the catalog normals by default."""
    cloud = build_cloud(f, config, center)
    if normals is None:
        normals = f.normals_at(cloud.base_point)
    return assemble_estimate(cloud, normals)


def lifted_slice(est: SubdifferentialEstimate | np.ndarray) -> MinkowskiSet:
    """``{v : (v, -1) in cone(lifted generators)}`` as a Minkowski set."""
    L = est.lifted_generators if isinstance(est, SubdifferentialEstimate) else np.asarray(est, dtype=float)
    if L.ndim != 2 or len(L) == 0:
        raise ValueError("empty slice")
    n = L.shape[1] - 1
    last = L[:, -1]
    scale = np.linalg.norm(L, axis=1)
    flat = np.abs(last) <= 1e-12 * scale
    down = (last < 0) & ~flat
    if not np.any(down):
        raise ValueError("empty slice")
    hull = L[down, :n] / (-last[down])[:, None]
    cone = L[flat, :n]
    return MinkowskiSet(Polytope(hull, n), FiniteCone(cone, n))


def test_stationarity(est: SubdifferentialEstimate, tol: float) -> StationarityReport:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    dist, witness = distance_to_minkowski(np.zeros(est.set.dim), est.set)
    return StationarityReport(dist, dist <= tol, witness, est.cloud.total_draws)


test_stationarity.__test__ = False  # not a pytest test


def estimate_distance(est: SubdifferentialEstimate, v) -> float:
    return distance_to_minkowski(v, est.set)[0]


def _support_gap(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return abs(a - b)


def hausdorff_vs_reference(est: SubdifferentialEstimate | MinkowskiSet, ref: ReferenceSubdifferential | MinkowskiSet, probe_dirs: int = 64) -> float:
    """Largest support-function gap over a fixed direction grid."""
    S = est.set if isinstance(est, SubdifferentialEstimate) else est
    R = ref.set if isinstance(ref, ReferenceSubdifferential) else ref
    if R is None:
        raise ValueError("reference has no polyhedral set")
    if isinstance(est, SubdifferentialEstimate) and isinstance(ref, ReferenceSubdifferential):
        if not np.array_equal(est.cloud.base_point, ref.base_point):
            raise ValueError("reference and estimate have different base points")
    if S.dim != R.dim:
        raise ValueError("dimension mismatch")
    gap = 0.0
    for d in direction_grid(S.dim, probe_dirs):
        gap = max(gap, _support_gap(support_value(S, d), support_value(R, d)))
    return gap
