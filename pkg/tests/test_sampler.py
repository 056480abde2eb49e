import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clarke_kit import rng, sampler
from clarke_kit.functions import lookup
from clarke_kit.geometry import MinkowskiSet, direction_grid, support_value
from clarke_kit.sampler import SamplingConfig, assemble_estimate, build_cloud, lifted_slice


def _est(name, center, radius=0.01, k=500, seed=0, normals=None):
    f, _ = lookup(name)
    return sampler.estimate(f, SamplingConfig(radius=radius, max_samples=k, seed=seed), center, normals)


def test_uniforms_open_interval_and_deterministic():
    u = rng.uniforms(1, 2, np.arange(10_000), 3)
    assert np.all((u > 0) & (u < 1))
    assert np.array_equal(u, rng.uniforms(1, 2, np.arange(10_000), 3))
    assert abs(u.mean() - 0.5) < 0.01


def test_rng_index_independent():
    full = rng.normals(9, 0, np.arange(100), 2)
    part = rng.normals(9, 0, np.arange(40, 60), 2)
    assert np.array_equal(full[40:60], part)


def test_sample_ball_examples():
    P = sampler.sample_ball([0.0, 0.0], 1.0, 1000, seed=3)
    assert np.all(np.linalg.norm(P, axis=1) < 1.0)
    assert np.array_equal(P, sampler.sample_ball([0.0, 0.0], 1.0, 1000, seed=3))
    big = sampler.sample_ball([0.0, 0.0], 1.0, 100_000, seed=4)
    assert np.all(np.abs(big.mean(axis=0)) <= 0.02)


def test_sample_ball_uniform_radius():
    # P(|x| <= r) = r^2 in 2-D
    P = sampler.sample_ball([0.0, 0.0], 1.0, 50_000, seed=5)
    assert np.mean(np.linalg.norm(P, axis=1) <= 0.5) == pytest.approx(0.25, abs=0.01)


def test_config_validation():
    with pytest.raises(ValueError):
        SamplingConfig(radius=0)
    with pytest.raises(ValueError):
        SamplingConfig(horizon_threshold=1.0)


def test_abs_cloud():
    f, _ = lookup("abs")
    cloud = build_cloud(f, SamplingConfig(radius=0.1, max_samples=500), [0.0])
    vals = set(cloud.kept_gradients.ravel().tolist())
    assert vals == {-1.0, 1.0}
    assert len(cloud.horizon_directions) == 0


def test_cloud_counts_sum_to_draws():
    f, _ = lookup("halfplane_smooth")
    cloud = build_cloud(f, SamplingConfig(radius=0.01, max_samples=10_000), [0.0, 0.0])
    assert cloud.total_draws == 10_000
    assert cloud.rejected_outside_domain / 10_000 == pytest.approx(0.5, abs=0.03)
    assert np.all(np.linalg.norm(cloud.kept_gradients, axis=1) <= cloud.config.horizon_threshold)


def test_quartic_cloud_horizon_counts():
    # at T = 1e3 the sampled gradients in a 0.01 ball stay below the threshold
    f, _ = lookup("quartic_root")
    cloud = build_cloud(f, SamplingConfig(radius=0.01, max_samples=4000), [0.0, 0.0])
    assert np.all(np.linalg.norm(cloud.kept_gradients, axis=1) <= 1e3)
    low = build_cloud(f, SamplingConfig(radius=0.01, max_samples=4000, horizon_threshold=50.0), [0.0, 0.0])
    assert len(low.horizon_directions) > 0
    assert np.allclose(np.linalg.norm(low.horizon_directions, axis=1), 1.0)
    assert np.min(np.linalg.norm(low.horizon_directions - [0, 1], axis=1)) <= 0.05
    assert np.min(np.linalg.norm(low.horizon_directions - [0, -1], axis=1)) <= 0.05


def test_errors():
    f, _ = lookup("halfplane_smooth")
    with pytest.raises(ValueError, match="center outside domain"):
        build_cloud(f, SamplingConfig(), [-1.0, 0.0])
    c, _ = lookup("cusp_indicator")
    with pytest.raises(ValueError, match="no usable samples"):
        build_cloud(c, SamplingConfig(radius=1e-3, max_samples=50), [0.0, 0.0])


def test_thread_count_does_not_change_cloud(monkeypatch):
    f, _ = lookup("parabola_fraction")
    cfg = SamplingConfig(radius=0.01, max_samples=2000, seed=2)
    monkeypatch.setenv("CLARKE_KIT_THREADS", "1")
    a = build_cloud(f, cfg, [0.0, 0.0])
    monkeypatch.setenv("CLARKE_KIT_THREADS", "4")
    b = build_cloud(f, cfg, [0.0, 0.0])
    assert np.array_equal(a.kept_gradients, b.kept_gradients)
    assert np.array_equal(a.horizon_directions, b.horizon_directions)
    assert a.rejected_outside_domain == b.rejected_outside_domain


def test_assemble_examples():
    est = _est("abs", [0.0])
    assert support_value(est.set, [1.0]) == pytest.approx(1.0)
    assert support_value(est.set, [-1.0]) == pytest.approx(1.0)
    assert len(est.set.cone.generators) == 0
    hp = _est("halfplane_smooth", [0.0, 0.0], k=1000)
    assert np.allclose(hp.set.cone.generators, [[-1.0, 0.0]])
    assert np.all(hp.lifted_generators[:, -1] <= 0) and np.all(hp.lifted_generators[:, -1] >= -1)


def test_stationarity_examples():
    assert sampler.test_stationarity(_est("abs", [0.0]), 0.05).is_stationary
    lin = sampler.test_stationarity(_est("linear", [0.0], radius=0.1), 0.05)
    assert not lin.is_stationary
    assert lin.distance_to_zero == pytest.approx(1.0, abs=1e-12)
    hp = sampler.test_stationarity(_est("halfplane_smooth", [0.0, 0.0], k=1000), 0.05)
    assert hp.is_stationary
    assert hp.draws_used == 1000


def test_estimate_distance_examples():
    est = _est("abs", [0.0])
    assert sampler.estimate_distance(est, [3.0]) == pytest.approx(2.0, abs=0.05)
    assert sampler.estimate_distance(est, est.cloud.kept_gradients[0]) <= 1e-12


def test_lifted_slice_examples():
    s = lifted_slice(_est("abs", [0.0]))
    assert support_value(s, [1.0]) == pytest.approx(1.0)
    assert support_value(s, [-1.0]) == pytest.approx(1.0)
    single = lifted_slice(np.array([[0.0, -1.0]]))
    assert np.allclose(single.hull.points(), [[0.0]])
    ray = lifted_slice(np.array([[1 / math.sqrt(2), -1 / math.sqrt(2)], [1.0, 0.0]]))
    assert support_value(ray, [-1.0]) == pytest.approx(-1.0)
    assert math.isinf(support_value(ray, [1.0]))
    with pytest.raises(ValueError, match="empty slice"):
        lifted_slice(np.array([[1.0, 0.0]]))


@pytest.mark.parametrize("name,center", [("abs", [0.0]), ("halfplane_smooth", [0.0, 0.0]), ("quartic_root", [0.0, 0.0])])
def test_lifted_equals_plain_without_horizon(name, center):
    est = _est(name, center, k=2000)
    assert len(est.cloud.horizon_directions) == 0
    s = lifted_slice(est)
    for d in direction_grid(len(center), 64):
        a, b = support_value(s, d), support_value(est.set, d)
        assert (math.isinf(a) and math.isinf(b)) or abs(a - b) <= 1e-7


def test_prefix_monotone_distance():
    f, _ = lookup("parabola_fraction")
    cloud = build_cloud(f, SamplingConfig(radius=0.01, max_samples=4000, seed=1), [0.0, 0.0])
    normals = f.normals_at([0.0, 0.0])
    probes = np.array([[1.0, 1.0], [2.0, -1.0], [-0.5, 1.5], [0.3, 0.0]])
    prev = None
    for k in (250, 1000, 4000):
        est = assemble_estimate(cloud.prefix(k), normals)
        d = np.array([sampler.estimate_distance(est, v) for v in probes])
        if prev is not None:
            assert np.all(d <= prev + 1e-12)
        prev = d


def test_prefix_matches_fresh_draw():
    f, _ = lookup("halfplane_smooth")
    big = build_cloud(f, SamplingConfig(radius=0.01, max_samples=1000, seed=4), [0.0, 0.0])
    small = build_cloud(f, SamplingConfig(radius=0.01, max_samples=300, seed=4), [0.0, 0.0])
    p = big.prefix(300)
    assert np.array_equal(p.kept_gradients, small.kept_gradients)
    assert p.rejected_outside_domain == small.rejected_outside_domain


@pytest.mark.parametrize("name", ["abs", "halfplane_smooth", "linear"])
def test_outer_approximation(name):
    f, refs = lookup(name)
    ref = refs[0]
    for seed in range(10):
        est = sampler.estimate(f, SamplingConfig(radius=0.01, max_samples=4000, seed=seed), ref.base_point)
        for v in ref.set.hull.points():
            assert sampler.estimate_distance(est, v) <= 0.05


def test_no_false_positive_minimum():
    f, _ = lookup("linear")
    d = [sampler.test_stationarity(sampler.estimate(f, SamplingConfig(radius=0.1, max_samples=200, seed=s), [0.0]), 0.05).distance_to_zero
         for s in range(10)]
    assert min(d) >= 0.9


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_permutation_invariance(rnd):
    f, _ = lookup("parabola_fraction")
    cloud = build_cloud(f, SamplingConfig(radius=0.01, max_samples=500, seed=7), [0.0, 0.0])
    perm = list(range(len(cloud.kept_gradients)))
    rnd.shuffle(perm)
    shuffled = sampler.GradientCloud(cloud.base_point, cloud.kept_gradients[perm], cloud.horizon_directions,
                                     cloud.rejected_outside_domain, cloud.rejected_nondifferentiable, cloud.config)
    a = assemble_estimate(cloud, f.normals_at([0.0, 0.0]))
    b = assemble_estimate(shuffled, f.normals_at([0.0, 0.0]))
    for d in direction_grid(2, 32):
        sa, sb = support_value(a.set, d), support_value(b.set, d)
        assert sa == sb or abs(sa - sb) <= 1e-12


def test_hausdorff_examples():
    ref = MinkowskiSet.build([[-1.0], [1.0]])
    assert sampler.hausdorff_vs_reference(ref, ref) == 0.0
    est = MinkowskiSet.build([[-0.99], [0.99]])
    assert sampler.hausdorff_vs_reference(est, ref) == pytest.approx(0.01)
    ray = MinkowskiSet.build([[0.0]], [[1.0]])
    assert math.isinf(sampler.hausdorff_vs_reference(ray, ref))


def test_quartic_unbounded_direction_with_low_threshold():
    # with a lower threshold the estimate is vertically unbounded, as the reference is
    f, refs = lookup("quartic_root")
    est = sampler.estimate(f, SamplingConfig(radius=0.01, max_samples=4000, horizon_threshold=50.0), [0.0, 0.0])
    assert math.isinf(support_value(est.set, [0.0, 1.0]))
    assert sampler.estimate_distance(est, [0.0, 100.0]) <= 0.05
