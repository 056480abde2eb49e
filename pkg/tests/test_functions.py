import math
from fractions import Fraction

import numpy as np
import pytest

from clarke_kit import rng
from clarke_kit.functions import (
    ExtendedFunction,
    NonDifferentiableError,
    StencilOutsideDomainError,
    cantor_value,
    catalog,
    fd_gradient,
    lookup,
    quartic_root_gradient,
)


def _smooth(fn, dim=1):
    return ExtendedFunction("t", dim, fn, lambda X: np.ones(np.shape(X)[:-1], bool), vectorized=True)


def test_fd_quadratic():
    f = _smooth(lambda X: np.asarray(X)[..., 0] ** 2)
    assert fd_gradient(f, [3.0], 1e-5)[0] == pytest.approx(6.0, abs=1e-9)


def test_fd_flags_kink():
    f, _ = lookup("abs")
    with pytest.raises(NonDifferentiableError, match="nondifferentiable point"):
        fd_gradient(f, [0.0], 1e-5)


def test_fd_quartic_root():
    f, _ = lookup("quartic_root")
    assert np.allclose(fd_gradient(f, [1.0, 0.0], 1e-6), [1.0, 0.0], atol=1e-6)


def test_fd_stencil_outside_domain():
    f, _ = lookup("halfplane_smooth")
    with pytest.raises(StencilOutsideDomainError, match="stencil outside domain"):
        fd_gradient(f, [1e-8, 0.3], 1e-6)


def test_catalog_lookups():
    f, _ = lookup("abs")
    assert f.dim == 1
    assert f.gradient(np.array([0.3]))[0] == 1.0
    assert f.gradient(np.array([-0.3]))[0] == -1.0
    q, _ = lookup("quartic_root")
    assert np.allclose(q.gradient(np.array([0.0, 1.0])), [0.0, 0.5])
    c, _ = lookup("cantor")
    assert c(np.array([1.0 / 3.0])) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="unknown function"):
        lookup("nope")


def test_catalog_has_required_entries():
    names = {n for n, _, _ in catalog()}
    assert {"abs", "quartic_root", "parabola_fraction", "cantor", "step_jump", "cusp_indicator", "halfplane_smooth"} <= names


def test_reference_dimensions():
    for _, f, refs in catalog():
        for r in refs:
            assert r.base_point.size == f.dim
            if r.set is not None:
                assert r.set.dim == f.dim


def _cantor_digits(x: Fraction, depth: int) -> Fraction:
    # independent digit oracle: exact ternary expansion, binary reading
    out, scale = Fraction(0), Fraction(1, 2)
    for _ in range(depth):
        x *= 3
        d = int(x)
        x -= d
        if d == 1:
            return out + scale
        out += scale * (d // 2)
        scale /= 2
    return out


def test_cantor_values():
    assert cantor_value(0.0) == 0.0
    assert cantor_value(1.0) == 1.0
    assert cantor_value(0.25, depth=40) == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("num,den", [(1, 3), (2, 3), (1, 9), (7, 10), (5, 13), (1, 7)])
def test_cantor_matches_digit_oracle(num, den):
    x = num / den
    assert cantor_value(x, 40) == pytest.approx(float(_cantor_digits(Fraction(x), 40)), abs=2.0**-39)


def test_cantor_monotone():
    xs = np.linspace(0, 1, 500)
    v = [cantor_value(x) for x in xs]
    assert all(b >= a for a, b in zip(v, v[1:]))


def _random_domain_points(f, n, seed):
    X = 2.0 * rng.uniforms(seed, 50, np.arange(n * 4), f.dim) - 1.0
    return X[f.domain_mask(X)][:n]


@pytest.mark.parametrize("name", ["abs", "quartic_root", "parabola_fraction", "halfplane_smooth", "step_jump", "linear"])
def test_analytic_gradient_matches_fd(name):
    f, _ = lookup(name)
    checked = 0
    for x in _random_domain_points(f, 100, 1):
        g = f.gradient(x)
        if g is None:
            continue
        try:
            fd = fd_gradient(f, x, 1e-6)
        except (NonDifferentiableError, StencilOutsideDomainError):
            continue
        assert np.linalg.norm(np.asarray(g) - fd) <= 1e-4 * (1 + np.linalg.norm(g))
        checked += 1
    assert checked >= 50


def test_quartic_first_coordinate_bounded():
    X = 2.0 * rng.uniforms(3, 51, np.arange(10_000), 2) - 1.0
    for x in X:
        g = quartic_root_gradient(x)
        if g is not None:
            assert abs(g[0]) <= 1.0 + 1e-12


@pytest.mark.parametrize("name,_f,_r", catalog())
def test_value_finite_iff_in_domain(name, _f, _r):
    X = 4.0 * rng.uniforms(5, 52, np.arange(1000), _f.dim) - 2.0
    vals = _f.values(X)
    assert np.array_equal(np.isfinite(vals), _f.domain_mask(X))


def test_parabola_membership_matches_subgradient_inequality():
    f, refs = lookup("parabola_fraction")
    member = refs[0].membership
    g = np.linspace(-3, 3, 100)
    xs, ys = np.meshgrid(np.linspace(1e-3, 3, 100), g)
    P = np.column_stack([xs.ravel(), ys.ravel()])
    fv = f.values(P)
    probes = np.linspace(-3, 3, 15)
    count = 0
    for a in probes:
        for b in probes[:14]:
            # keep probes off the boundary where the finite grid cannot decide
            if abs(a + b * b / 2) < 0.05:
                continue
            brute = bool(np.all(fv >= P @ np.array([a, b]) - 1e-9))
            assert brute == member(np.array([a, b]))
            count += 1
    assert count >= 200


def test_step_jump_has_no_reference():
    _, refs = lookup("step_jump")
    assert refs == []


def test_cusp_normals_at_origin():
    f, _ = lookup("cusp_indicator")
    assert len(f.normals_at([0.0, 0.0]).generators) == 3
    assert f(np.array([0.5, 0.5])) == math.inf
