"""Extended-real-valued function oracles and the catalog of worked examples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .geometry import FiniteCone, MinkowskiSet, Polytope, as_vector

FD_STEP = 1e-6
FD_CONSISTENCY_TOL = 1e-3


class StencilOutsideDomainError(ValueError):
    pass


class NonDifferentiableError(ValueError):
    pass


@dataclass
class ExtendedFunction:
    """Oracle bundle for ``f: R^n -> R u {+inf}``.

    ``value`` and ``domain`` take a point of shape ``(dim,)``. When
    ``vectorized`` is set they also accept a batch ``(..., dim)`` and return
    ``(...)``. ``gradient`` returns ``None`` where ``f`` is not differentiable.
    ``metadata`` records documented claims only; no algorithm reads it.
    """

    name: str
    dim: int
    value: Callable
    domain: Callable
    gradient: Optional[Callable] = None
    normal_cone: Optional[Callable] = None
    metadata: dict = field(default_factory=dict)
    vectorized: bool = False

    def __call__(self, x) -> float:
        x = as_vector(x, self.dim)
        if not self.domain(x):
            return math.inf
        return float(self.value(x))

    def in_domain(self, x) -> bool:
        return bool(self.domain(as_vector(x, self.dim)))

    def values(self, X: np.ndarray) -> np.ndarray:
        """Batch evaluation, ``+inf`` outside the domain."""
        X = np.asarray(X, dtype=float)
        if self.vectorized:
            inside = np.asarray(self.domain(X), dtype=bool)
            with np.errstate(all="ignore"):
                vals = np.asarray(self.value(X), dtype=float)
            return np.where(inside, vals, np.inf)
        flat = X.reshape(-1, self.dim)
        out = np.array([self(x) for x in flat])
        return out.reshape(X.shape[:-1])

    def domain_mask(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.vectorized:
            return np.asarray(self.domain(X), dtype=bool)
        flat = X.reshape(-1, self.dim)
        return np.array([bool(self.domain(x)) for x in flat]).reshape(X.shape[:-1])

    def normals_at(self, x) -> FiniteCone:
        if self.normal_cone is None:
            return FiniteCone.empty(self.dim)
        return self.normal_cone(as_vector(x, self.dim))


@dataclass
class ReferenceSubdifferential:
    """Known Clarke subdifferential at ``base_point``.

    Either ``set`` (polyhedral case) or ``membership`` (a predicate on
    vectors) is given.
    """

    base_point: np.ndarray
    source: str
    set: Optional[MinkowskiSet] = None
    membership: Optional[Callable] = None

    def __post_init__(self):
        self.base_point = as_vector(self.base_point)
        if self.set is not None and self.set.dim != self.base_point.size:
            raise ValueError("reference set and base point dimensions differ")


def fd_gradient(f: ExtendedFunction, x, h: float = FD_STEP, consistency_tol: float = FD_CONSISTENCY_TOL) -> np.ndarray:
    """Central-difference gradient with a non-differentiability check.

    The point is flagged when central differences at ``h`` and ``h/2``
    disagree, or when forward and backward differences at ``h`` disagree,
    by more than ``consistency_tol * (1 + |g|)``.
    """
    x = as_vector(x, f.dim)
    if not f.in_domain(x):
        raise StencilOutsideDomainError("stencil outside domain")
    fx = f(x)
    g = np.empty(f.dim)
    g_half = np.empty(f.dim)
    fwd = np.empty(f.dim)
    bwd = np.empty(f.dim)
    for j in range(f.dim):
        e = np.zeros(f.dim)
        e[j] = 1.0
        vals = [f(x + s * e) for s in (h, -h, h / 2, -h / 2)]
        if not all(math.isfinite(v) for v in vals):
            raise StencilOutsideDomainError("stencil outside domain")
        g[j] = (vals[0] - vals[1]) / (2 * h)
        g_half[j] = (vals[2] - vals[3]) / h
        fwd[j] = (vals[0] - fx) / h
        bwd[j] = (fx - vals[1]) / h
    bound = consistency_tol * (1.0 + float(np.linalg.norm(g)))
    if np.linalg.norm(g - g_half) > bound or np.linalg.norm(fwd - bwd) > bound:
        raise NonDifferentiableError("nondifferentiable point")
    return g


def cantor_value(x: float, depth: int = 60) -> float:
    """Ternary Cantor function, truncated after ``depth`` base-3 digits.

    Digits are extracted in exact rational arithmetic from the binary value
    of ``x``, so two inputs in the same removed interval map to the same
    float. Truncation error is at most ``2**-depth``.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("cantor_value needs 0 <= x <= 1")
    if x == 1.0:
        return 1.0
    q = Fraction(x)
    num, den = q.numerator, q.denominator
    total, scale = 0.0, 0.5
    for _ in range(depth):
        num *= 3
        d, num = divmod(num, den)
        if d == 1:
            return total + scale
        total += scale * (d // 2)
        scale *= 0.5
    return total


# ---------------------------------------------------------------------------
# catalog


def _first(X):
    return np.asarray(X, dtype=float)[..., 0]


def _second(X):
    return np.asarray(X, dtype=float)[..., 1]


def _everywhere(X):
    X = np.asarray(X, dtype=float)
    return np.ones(X.shape[:-1], dtype=bool) if X.ndim > 1 else True


def _no_normals(dim):
    return lambda x: FiniteCone.empty(dim)


def _abs():
    def grad(x):
        return None if x[0] == 0.0 else np.array([math.copysign(1.0, x[0])])

    f = ExtendedFunction(
        "abs", 1, lambda X: np.abs(_first(X)), _everywhere, grad, _no_normals(1),
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential(
        [0.0], "Lipschitz case: conv of limiting gradients +-1", MinkowskiSet(Polytope([[-1.0], [1.0]], 1))
    )
    return f, [ref]


def _linear():
    f = ExtendedFunction(
        "linear", 1, _first, _everywhere, lambda x: np.array([1.0]), _no_normals(1),
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential([0.0], "smooth: gradient 1", MinkowskiSet(Polytope([[1.0]], 1)))
    return f, [ref]


def _zero():
    f = ExtendedFunction(
        "zero", 1, lambda X: np.zeros_like(_first(X)), _everywhere, lambda x: np.zeros(1), _no_normals(1),
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential([0.0], "smooth: gradient 0", MinkowskiSet(Polytope([[0.0]], 1)))
    return f, [ref]


def quartic_root_gradient(x) -> Optional[np.ndarray]:
    a, b = float(x[0]), float(x[1])
    s = a**4 + b**2
    if s == 0.0:
        return None
    d = s**0.75
    return np.array([a**3 / d, 0.5 * b / d])


def _quartic_root():
    f = ExtendedFunction(
        "quartic_root", 2,
        lambda X: (_first(X) ** 4 + _second(X) ** 2) ** 0.25,
        _everywhere, quartic_root_gradient, _no_normals(2),
        {"directionally_lipschitzian": False, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True,
         "isolated_singularity": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential(
        [0.0, 0.0],
        "isolated singularity example: [-1,1] x R",
        MinkowskiSet.build([[-1.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [0.0, -1.0]]),
    )
    return f, [ref]


def _parabola_fraction():
    def value(X):
        x, y = _first(X), _second(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(x > 0, y**2 / (2 * np.where(x > 0, x, 1.0)), 0.0)
        return v

    def domain(X):
        x, y = _first(X), _second(X)
        return (x > 0) | ((x == 0) & (y == 0))

    def grad(p):
        x, y = float(p[0]), float(p[1])
        if x <= 0:
            return None
        return np.array([-(y**2) / (2 * x**2), y / x])

    def normals(p):
        if p[0] == 0.0:
            return FiniteCone([[-1.0, 0.0]], 2)
        return FiniteCone.empty(2)

    f = ExtendedFunction(
        "parabola_fraction", 2, value, domain, grad, normals,
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": False, "stratifiable": True, "convex": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential(
        [0.0, 0.0],
        "convex example discontinuous at the origin: {v1 <= -v2^2/2}",
        membership=lambda v: float(v[0]) <= -float(v[1]) ** 2 / 2,
    )
    return f, [ref]


def _cantor():
    def value(X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return cantor_value(float(X[0])) if 0.0 <= X[0] <= 1.0 else math.inf
        flat = X.reshape(-1)
        out = np.array([cantor_value(t) if 0.0 <= t <= 1.0 else math.inf for t in flat])
        return out.reshape(X.shape[:-1])

    def normals(p):
        if p[0] == 0.0:
            return FiniteCone([[-1.0]], 1)
        if p[0] == 1.0:
            return FiniteCone([[1.0]], 1)
        return FiniteCone.empty(1)

    f = ExtendedFunction(
        "cantor", 1, value, lambda X: (_first(X) >= 0.0) & (_first(X) <= 1.0), None, normals,
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": False,
         "negative_case": "gradients vanish wherever defined, yet the Clarke set is not {0}"},
        vectorized=True,
    )
    return f, []


def _step_jump():
    f = ExtendedFunction(
        "step_jump", 1,
        lambda X: np.where(_first(X) > 0, _first(X) + 1.0, _first(X)),
        _everywhere,
        lambda x: None if x[0] == 0.0 else np.array([1.0]),
        _no_normals(1),
        {"directionally_lipschitzian": True, "vertically_continuous": False,
         "continuous_on_domain": False, "stratifiable": True,
         "negative_case": "same gradients as f(x)=x but a different Clarke set at 0"},
        vectorized=True,
    )
    return f, []


def cusp_domain(X):
    x, y = _first(X), _second(X)
    return (x >= 0) & (np.abs(y) <= x**2)


def _cusp_indicator():
    def normals(p):
        if p[0] == 0.0 and p[1] == 0.0:
            return FiniteCone([[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]], 2)
        return FiniteCone.empty(2)

    f = ExtendedFunction(
        "cusp_indicator", 2, lambda X: np.zeros_like(_first(X)), cusp_domain,
        lambda x: np.zeros(2), normals,
        {"directionally_lipschitzian": False, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True,
         "negative_case": "domain has zero lower density at the origin"},
        vectorized=True,
    )
    return f, []


def _halfplane_smooth():
    def normals(p):
        if p[0] == 0.0:
            return FiniteCone([[-1.0, 0.0]], 2)
        return FiniteCone.empty(2)

    f = ExtendedFunction(
        "halfplane_smooth", 2,
        lambda X: np.sin(_first(X)) + _second(X) ** 2,
        lambda X: _first(X) >= 0.0,
        lambda p: np.array([math.cos(p[0]), 2.0 * p[1]]),
        normals,
        {"directionally_lipschitzian": True, "vertically_continuous": True,
         "continuous_on_domain": True, "stratifiable": True},
        vectorized=True,
    )
    ref = ReferenceSubdifferential(
        [0.0, 0.0], "smooth part plus half-plane normal cone", MinkowskiSet.build([[1.0, 0.0]], [[-1.0, 0.0]])
    )
    return f, [ref]


_BUILDERS = {
    "abs": _abs,
    "quartic_root": _quartic_root,
    "parabola_fraction": _parabola_fraction,
    "cantor": _cantor,
    "step_jump": _step_jump,
    "cusp_indicator": _cusp_indicator,
    "halfplane_smooth": _halfplane_smooth,
    "linear": _linear,
    "zero": _zero,
}


def catalog() -> list[tuple[str, ExtendedFunction, list[ReferenceSubdifferential]]]:
    return [(name, *build()) for name, build in _BUILDERS.items()]


def lookup(name: str) -> tuple[ExtendedFunction, list[ReferenceSubdifferential]]:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown function: {name}") from None


def reference_at(refs: list[ReferenceSubdifferential], point) -> Optional[ReferenceSubdifferential]:
    p = as_vector(point)
    for ref in refs:
        if ref.base_point.size == p.size and np.array_equal(ref.base_point, p):
            return ref
    return None
