"""Convex geometry over finitely generated sets.

Sets here are V-represented: ``conv(vertices) + cone(generators)``.
Everything is plain double precision; no H-representation is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

TOL_OPT = 1e-9
TOL_POINTED = 1e-7

_PG_MAX_ITER = 10_000
_PG_TOL = 1e-10


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a finite 1-D float array, optionally checking its length."""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("vector must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr


def _as_rows(points, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, dim if dim is not None else 0))
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError("expected a list of vectors")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector coordinates must be finite")
    return arr


def _unique_rows(arr: np.ndarray) -> np.ndarray:
    # exact-equality dedup, first occurrence order kept
    if len(arr) < 2:
        return arr
    _, idx = np.unique(arr, axis=0, return_index=True)
    return arr[np.sort(idx)]


@dataclass(frozen=True)
class Polytope:
    """conv(vertices). An empty vertex list stands for ``{0}``."""

    vertices: np.ndarray
    dim: int

    def __init__(self, vertices, dim: int | None = None):
        if dim is None:
            arr = np.asarray(vertices, dtype=float)
            if arr.size == 0:
                raise ValueError("dim is required for an empty polytope")
            dim = 1 if arr.ndim == 1 else arr.shape[1]
        object.__setattr__(self, "vertices", _as_rows(vertices, dim))
        object.__setattr__(self, "dim", int(dim))

    def points(self) -> np.ndarray:
        """Vertices, with the empty convention expanded to the origin."""
        if len(self.vertices) == 0:
            return np.zeros((1, self.dim))
        return self.vertices


@dataclass(frozen=True)
class FiniteCone:
    """cone(generators); the empty list is ``{0}``."""

    generators: np.ndarray
    dim: int

    def __init__(self, generators, dim: int | None = None):
        if dim is None:
            arr = np.asarray(generators, dtype=float)
            if arr.size == 0:
                raise ValueError("dim is required for an empty cone")
            dim = 1 if arr.ndim == 1 else arr.shape[1]
        gens = _as_rows(generators, dim)
        if len(gens) and np.any(np.linalg.norm(gens, axis=1) == 0.0):
            raise ValueError("cone generators must be nonzero")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dim", int(dim))

    @classmethod
    def empty(cls, dim: int) -> "FiniteCone":
        return cls(np.zeros((0, dim)), dim)


@dataclass(frozen=True)
class MinkowskiSet:
    """conv(hull.vertices) + cone(cone.generators)."""

    hull: Polytope
    cone: FiniteCone = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.cone is None:
            object.__setattr__(self, "cone", FiniteCone.empty(self.hull.dim))
        if self.hull.dim != self.cone.dim:
            raise ValueError("hull and cone dimensions differ")

    @property
    def dim(self) -> int:
        return self.hull.dim

    @classmethod
    def build(cls, vertices, generators=(), dim: int | None = None) -> "MinkowskiSet":
        if dim is None:
            arr = np.asarray(vertices, dtype=float)
            if arr.size == 0:
                arr = np.asarray(generators, dtype=float)
            dim = 1 if arr.ndim == 1 else arr.shape[1]
        return cls(Polytope(vertices, dim), FiniteCone(np.asarray(generators, dtype=float).reshape(-1, dim), dim))


# ---------------------------------------------------------------------------
# Wolfe's min-norm point


def _affine_minimizer(P: np.ndarray) -> np.ndarray:
    """Weights w (sum 1) minimising |w @ P| over the affine hull of the rows of P."""
    k = len(P)
    if k == 1:
        return np.ones(1)
    G = P @ P.T
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def _wolfe(P: np.ndarray, max_iter: int = 1000) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run Wolfe's algorithm on the rows of ``P``.

    Returns ``(x, support, weights)`` where ``support`` indexes an affinely
    independent corral of rows and ``x = weights @ P[support]``.
    """
    scale = max(1.0, float(np.max(np.einsum("ij,ij->i", P, P))))
    eps = 1e-12 * scale
    norms = np.einsum("ij,ij->i", P, P)
    j0 = int(np.argmin(norms))  # argmin: lowest index wins ties
    S = [j0]
    lam = np.ones(1)
    x = P[j0].copy()

    for _ in range(max_iter):
        # major cycle
        ip = P @ x
        j = int(np.argmin(ip))
        xx = float(x @ x)
        if xx - ip[j] <= eps or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)

        # minor cycles
        while True:
            w = _affine_minimizer(P[S])
            if np.all(w > 1e-14):
                lam = w
                break
            mask = w <= 1e-14
            theta = float(np.min(lam[mask] / (lam[mask] - w[mask])))
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (w - lam)
            keep = lam > 1e-14
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            if len(S) == 1:
                lam = np.ones(1)
                break
        x = lam @ P[S]

    return x, np.asarray(S, dtype=int), lam


def min_norm_point(points) -> np.ndarray:
    """Point of ``conv(points)`` nearest the origin."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        raise ValueError("empty point set")
    P = _unique_rows(_as_rows(arr))
    x, _, _ = _wolfe(P)
    return x


# ---------------------------------------------------------------------------
# Distance to conv(E) + cone(G)


def _project_simplex(y: np.ndarray) -> np.ndarray:
    if len(y) == 1:
        return np.ones(1)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(y) + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


def _polish(A: np.ndarray, B: np.ndarray, lam: np.ndarray, mu: np.ndarray):
    """Exact least-squares solve on the current support; None if infeasible."""
    sa = np.nonzero(lam > 1e-13)[0]
    sb = np.nonzero(mu > 1e-13)[0]
    M = np.vstack([A[sa], B[sb]])
    k, ka = len(M), len(sa)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = M @ M.T
    K[:ka, k] = 1.0
    K[k, :ka] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
    if np.any(sol < 0.0):
        return None
    new_lam = np.zeros_like(lam)
    new_mu = np.zeros_like(mu)
    new_lam[sa] = sol[:ka]
    new_mu[sb] = sol[ka:]
    s = new_lam.sum()
    if s <= 0:
        return None
    new_lam /= s
    return new_lam, new_mu


def _pg_solve(A: np.ndarray, B: np.ndarray, lam: np.ndarray, mu: np.ndarray):
    """Accelerated projected gradient on ``0.5*|A'lam + B'mu|^2``.

    Backtracking (Armijo-type sufficient decrease on the quadratic upper
    model), Nesterov momentum with function-value restart. Stops when the
    projected-gradient norm drops below ``_PG_TOL`` or the residual vanishes.
    """

    def resid(l, m):
        return l @ A + m @ B

    def pg_norm(l, m, r):
        gl, gm = A @ r, B @ r
        dl = l - _project_simplex(l - gl)
        dm = m - np.maximum(m - gm, 0.0)
        return math.sqrt(float(dl @ dl + dm @ dm))

    M = np.vstack([A, B])
    scale = max(1.0, float(np.max(np.abs(M))))
    zero_tol = 1e-13 * scale
    L = max(float(np.linalg.norm(M, 2)) ** 2, 1e-300)
    step = 1.0 / L
    r = resid(lam, mu)
    phi = 0.5 * float(r @ r)
    yl, ym, t = lam.copy(), mu.copy(), 1.0
    for it in range(_PG_MAX_ITER):
        if math.sqrt(2 * phi) <= zero_tol or pg_norm(lam, mu, r) < _PG_TOL:
            break
        if it % 10 == 0:
            pol = _polish(A, B, lam, mu)
            if pol is not None:
                r2 = resid(*pol)
                if 0.5 * float(r2 @ r2) <= phi + 1e-15 and pg_norm(pol[0], pol[1], r2) < _PG_TOL:
                    lam, mu, r = pol[0], pol[1], r2
                    break
        ry = resid(yl, ym)
        phy = 0.5 * float(ry @ ry)
        gl, gm = A @ ry, B @ ry
        while True:
            nl = _project_simplex(yl - step * gl)
            nm = np.maximum(ym - step * gm, 0.0)
            dl, dm = nl - yl, nm - ym
            nr = resid(nl, nm)
            nphi = 0.5 * float(nr @ nr)
            if nphi <= phy + float(gl @ dl + gm @ dm) + (dl @ dl + dm @ dm) / (2 * step) + 1e-18 or step < 1e-30:
                break
            step *= 0.5
        if nphi > phi:
            # restart momentum from the last iterate
            yl, ym, t = lam.copy(), mu.copy(), 1.0
            continue
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_next
        yl = nl + beta * (nl - lam)
        ym = nm + beta * (nm - mu)
        # keep the extrapolated point feasible
        yl = _project_simplex(yl)
        ym = np.maximum(ym, 0.0)
        lam, mu, r, phi, t = nl, nm, nr, nphi, t_next
    return lam, mu, r


def _corral_minimizer(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimise ``|l @ A + m @ B|`` subject only to ``sum(l) = 1``.

    Eliminating ``l_0 = 1 - sum(l_1..)`` leaves a plain least-squares problem
    in the original columns, which avoids squaring the condition number.
    """
    a0 = A[0]
    C = np.vstack([A[1:] - a0, B]).T
    if C.shape[1] == 0:
        return np.ones(1), np.zeros(0)
    z = np.linalg.lstsq(C, -a0, rcond=None)[0]
    ka = len(A)
    lam = np.concatenate([[1.0 - z[: ka - 1].sum()], z[: ka - 1]])
    return lam, z[ka - 1:]


def _active_set_min_norm(A: np.ndarray, B: np.ndarray, max_iter: int = 10_000):
    """Min-norm point of ``conv(rows of A) + cone(rows of B)``.

    Wolfe's major/minor cycles with cone generators carried alongside the
    corral: a major cycle adds the most violated column, minor cycles step
    towards the unconstrained corral minimiser and drop columns whose weight
    reaches zero. Returns ``(x, support_a, lam, support_b, mu)``.
    """
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B))) if len(B) else 1.0)
    eps = 1e-13 * scale * scale
    Bn = B / np.linalg.norm(B, axis=1, keepdims=True) if len(B) else B
    j0 = int(np.argmin(np.einsum("ij,ij->i", A, A)))
    Sa, Sb = [j0], []
    lam, mu = np.ones(1), np.zeros(0)
    x = A[j0].copy()
    for _ in range(max_iter):
        xx = float(x @ x)
        if math.sqrt(xx) <= 1e-15 * scale:
            break
        ga = A @ x - xx
        gb = Bn @ x if len(B) else np.zeros(0)
        ga[Sa] = 0.0
        if len(gb):
            gb[Sb] = 0.0
        ja = int(np.argmin(ga))
        jb = int(np.argmin(gb)) if len(gb) else -1
        va = ga[ja]
        vb = gb[jb] if jb >= 0 else 0.0
        if min(va, vb) >= -eps:
            break
        # lowest index wins: hull columns before cone columns on exact ties
        if va <= vb:
            Sa.append(ja)
            lam = np.append(lam, 0.0)
        else:
            Sb.append(jb)
            mu = np.append(mu, 0.0)
        while True:
            wl, wm = _corral_minimizer(A[Sa], B[Sb] if Sb else np.zeros((0, A.shape[1])))
            if np.all(wl > 1e-15) and np.all(wm > 1e-15):
                lam, mu = wl, wm
                break
            cur = np.concatenate([lam, mu])
            new = np.concatenate([wl, wm])
            mask = new <= 1e-15
            theta = float(np.min(cur[mask] / (cur[mask] - new[mask])))
            theta = min(max(theta, 0.0), 1.0)
            cur = cur + theta * (new - cur)
            ka = len(Sa)
            lam, mu = cur[:ka], cur[ka:]
            keep_a = lam > 1e-15
            if not np.any(keep_a):
                keep_a[int(np.argmax(lam))] = True
            keep_b = mu > 1e-15
            Sa = [s for s, k in zip(Sa, keep_a) if k]
            Sb = [s for s, k in zip(Sb, keep_b) if k]
            lam, mu = lam[keep_a], mu[keep_b]
            lam = lam / lam.sum()
            if len(Sa) == 1 and not Sb:
                lam = np.ones(1)
                break
        x_new = lam @ A[Sa] + (mu @ B[Sb] if Sb else 0.0)
        if float(x_new @ x_new) >= xx - eps * 1e-3:
            # no progress: numerical stall
            x = x_new
            break
        x = x_new
    return x, np.array(Sa, dtype=int), lam, np.array(Sb, dtype=int), mu


def distance_to_minkowski(v, mset: MinkowskiSet) -> tuple[float, np.ndarray]:
    """Euclidean distance from ``v`` to ``mset`` and the nearest point."""
    v = as_vector(v, mset.dim)
    A = mset.hull.points() - v
    B = mset.cone.generators
    x, *_ = _active_set_min_norm(A, B)
    return float(np.linalg.norm(x)), x + v


def distance_to_minkowski_pg(v, mset: MinkowskiSet) -> tuple[float, np.ndarray]:
    """Same quantity by accelerated projected gradient over all columns at once.

    Slower and less accurate on degenerate clouds; kept as a second route.
    """
    v = as_vector(v, mset.dim)
    A = mset.hull.points() - v
    B = mset.cone.generators if len(mset.cone.generators) else np.zeros((0, mset.dim))
    lam = np.full(len(A), 1.0 / len(A))
    mu = np.zeros(len(B))
    lam, mu, r = _pg_solve(A, B, lam, mu)
    return float(np.linalg.norm(r)), r + v


def contains(v, mset: MinkowskiSet, tol: float = TOL_OPT) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return distance_to_minkowski(v, mset)[0] <= tol


# ---------------------------------------------------------------------------
# Cones


def _normalized(G: np.ndarray) -> np.ndarray:
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def cone_is_pointed(cone: FiniteCone) -> bool:
    """True iff cone(generators) contains no line.

    Equivalent to the origin lying outside the convex hull of the
    unit-normalised generators.
    """
    if len(cone.generators) == 0:
        return True
    p = min_norm_point(_normalized(cone.generators))
    return float(np.linalg.norm(p)) > TOL_POINTED


def extreme_rays(cone: FiniteCone) -> np.ndarray:
    """Unit extreme rays of a pointed cone, or all distinct unit generators otherwise."""
    G = _unique_rows(_normalized(cone.generators)) if len(cone.generators) else cone.generators
    if len(G) <= 1:
        return G
    if not cone_is_pointed(cone):
        return G
    idx = _cross_section(G)[0]
    return G[idx]


def _cross_section(G: np.ndarray):
    """Extreme-ray indices and facet data of a pointed cone given unit generators.

    Returns ``(extreme_idx, facets, normals)``: ``facets`` lists index tuples of
    the generators spanning each facet, ``normals`` the outward ambient facet
    normals (``<normal, g> <= 0`` for every generator ``g``). Facet data is
    ``None`` when the cone is not full-dimensional.
    """
    n = G.shape[1]
    a = min_norm_point(G)
    a = a / np.linalg.norm(a)
    if n == 1:
        return np.array([0]), None, None
    # orthonormal basis of a-perp
    Q, _ = np.linalg.qr(np.column_stack([a, np.eye(n)]))
    basis = Q[:, 1:n]
    Z = (G @ basis) / (G @ a)[:, None]
    if n == 2:
        z = Z[:, 0]
        lo, hi = int(np.argmin(z)), int(np.argmax(z))
        if lo == hi:
            return np.array([lo]), None, None
        facets = [(lo,), (hi,)]
        normals = []
        for idx, sgn in ((lo, -1.0), (hi, 1.0)):
            # cross-section facet: sgn*z - sgn*z_idx <= 0
            eta, off = sgn, -sgn * z[idx]
            normals.append(basis[:, 0] * eta + off * a)
        return np.array(sorted({lo, hi})), facets, np.array(normals)
    try:
        hull = ConvexHull(Z)
    except QhullError:
        # lower-dimensional cross-section: keep generators that are not
        # strict convex combinations of the others
        keep = [i for i in range(len(G)) if not _in_cone(G[i], np.delete(G, i, axis=0))]
        return np.array(keep), None, None
    normals = hull.equations[:, :-1] @ basis.T + hull.equations[:, -1:] * a
    return np.array(sorted(hull.vertices)), [tuple(s) for s in hull.simplices], normals


def _in_cone(g: np.ndarray, G: np.ndarray, tol: float = 1e-10) -> bool:
    if len(G) == 0:
        return False
    d, _ = distance_to_minkowski(g, MinkowskiSet(Polytope(np.zeros((0, len(g))), len(g)), FiniteCone(G, len(g))))
    return d <= tol


def support_value(mset: MinkowskiSet, direction) -> float:
    """sup of <d, direction> over the set; ``math.inf`` along recession directions."""
    d = as_vector(direction, mset.dim)
    dn = float(np.linalg.norm(d))
    if dn == 0.0:
        raise ValueError("direction must be nonzero")
    G = mset.cone.generators
    if len(G):
        ip = (G @ d) / np.linalg.norm(G, axis=1)
        if np.any(ip > 1e-12 * dn):
            return math.inf
    return float(np.max(mset.hull.points() @ d))


def caratheodory_reduce(v, points, tol: float = TOL_OPT) -> list[tuple[float, np.ndarray]]:
    """Write ``v`` as a convex combination of at most ``dim + 1`` of ``points``."""
    P = _as_rows(points)
    if len(P) == 0:
        raise ValueError("empty point set")
    v = as_vector(v, P.shape[1])
    P = _unique_rows(P)
    x, S, w = _wolfe(P - v)
    if float(np.linalg.norm(x)) > tol:
        raise ValueError("not in hull")
    # the corral is affinely independent; re-solve barycentric weights exactly
    sub = P[S]
    if len(S) > 1:
        K = np.vstack([sub.T, np.ones(len(S))])
        rhs = np.append(v, 1.0)
        w2 = np.linalg.lstsq(K, rhs, rcond=None)[0]
        if np.all(w2 >= -1e-14) and np.linalg.norm(w2 @ sub - v) <= np.linalg.norm(w @ sub - v):
            w = np.clip(w2, 0.0, None)
            w = w / w.sum()
    out = [(float(wi), sub[i].copy()) for i, wi in enumerate(w) if wi > 0]
    return out


def direction_grid(dim: int, count: int) -> np.ndarray:
    """Deterministic unit directions: ±1 in 1-D, equal angles in 2-D, a Fibonacci lattice beyond."""
    if dim == 1:
        return np.array([[1.0], [-1.0]] * max(1, count // 2))[: max(2, count)]
    if dim == 2:
        ang = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    # generalised spiral: Fibonacci sphere in 3-D, Gaussian-quantile lattice otherwise
    if dim == 3:
        i = np.arange(count) + 0.5
        phi = np.arccos(1.0 - 2.0 * i / count)
        theta = math.pi * (1.0 + 5.0**0.5) * i
        return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
    from scipy.stats import norm as _norm
    from scipy.stats import qmc

    pts = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    Z = _norm.ppf(pts)
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def boundary_generates_cone_check(cone: FiniteCone, n_dirs: int = 16, seed: int = 0, tol: float = 1e-7) -> bool:
    """Check numerically that a cone is the conical hull of its boundary rays.

    Boundary rays are the extreme rays plus points obtained by sliding an
    extreme ray towards a neighbour along a shared facet. Each sampled ray is
    verified to lie on a supporting hyperplane before use.
    """
    G = cone.generators
    n = cone.dim
    if len(G) == 0 or not cone_is_pointed(cone):
        raise ValueError("has lineality")
    if n < 2 or np.linalg.matrix_rank(G) < n:
        raise ValueError("cone is not full-dimensional")
    U = _unique_rows(_normalized(G))
    ext, facets, normals = _cross_section(U)
    if facets is None:
        raise ValueError("cone is not full-dimensional")
    E = U[ext]

    from .rng import uniforms

    rays = [e for e in E]
    usable = [f for f in facets if len(f) >= 2]
    k = 0
    while len(rays) < max(n_dirs, len(E)) and usable:
        f = usable[k % len(usable)]
        w = uniforms(seed, 7, np.array([k]), len(f))[0]
        w = w / w.sum()
        rays.append(w @ U[list(f)])
        k += 1
    R = np.array(rays)
    R = R / np.linalg.norm(R, axis=1, keepdims=True)

    # every ray must sit on some facet: <normal, r> = 0 with the cone on one side
    Nn = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    on_face = np.min(np.abs(R @ Nn.T), axis=1)
    if np.any(on_face > 1e-9):
        return False

    bd_cone = FiniteCone(R, n)
    dirs = direction_grid(n, 64)
    apex = MinkowskiSet(Polytope(np.zeros((0, n)), n), cone)
    rebuilt = MinkowskiSet(Polytope(np.zeros((0, n)), n), bd_cone)
    for d in dirs:
        a, b = support_value(apex, d), support_value(rebuilt, d)
        if math.isinf(a) != math.isinf(b) or (not math.isinf(a) and abs(a - b) > tol):
            return False
    return all(_in_cone(g, R, tol) for g in U)

