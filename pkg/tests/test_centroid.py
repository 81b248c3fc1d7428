import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial import ConvexHull

from hobody.bodies import ball, lift, random_polytope, simplex, unit_cube
from hobody.centroid import (CentroidBody, ball_centroid_constant, busemann_petty_functional, centroid_support,
                             dual_mixed_vol_neg1, duality_check, minkowski_average_area, moment_support,
                             random_simplex_expectation, random_simplex_functional)
from hobody.errors import DegenerateBodyError, InvalidArgumentError
from hobody.projection import polar_oracle
from hobody.quadrature import StarBody, ball_oracle, sample_star_body, sphere_sample, star_body_volume

COUNT = 40_000


def within(est, ref, k=3.0):
    return abs(est.value - ref) <= k * est.std_error + 1e-12


def test_interval_centroid_support():
    assert within(centroid_support(ball_oracle(1), [1.0], COUNT, 1), 0.25)


@pytest.mark.parametrize("theta", [[1.0, 0.0], [0.6, -0.8], [-0.3, 0.2]])
def test_polar_projection_ball_centroid_is_ball(theta):
    L = polar_oracle(ball(2), 1)
    ref = ball_centroid_constant(2, 1) * np.linalg.norm(theta)
    assert_allclose(ball_centroid_constant(2, 1), 1 / (3 * math.pi))
    assert within(centroid_support(L, theta, COUNT, 2), ref)


def test_centroid_support_scales_with_body():
    L = polar_oracle(unit_cube(2), 2)
    a = centroid_support(L, [0.6, 0.8], 5_000, 3)
    b = centroid_support(L.scaled(2.5), [0.6, 0.8], 5_000, 3)
    assert_allclose(b.value, 2.5 * a.value, rtol=1e-12)


def test_centroid_of_symmetric_disk_is_half_classical():
    # one-sided support of the unit disk: (1/pi) * integral of x_- = 2/(3 pi); the two-sided value is 4/(3 pi)
    assert within(centroid_support(ball_oracle(2), [1.0, 0.0], COUNT, 4), 2 / (3 * math.pi))


def test_centroid_rejects_bad_direction():
    with pytest.raises(InvalidArgumentError):
        centroid_support(ball_oracle(2), [0.0, 0.0], 10, 1)
    with pytest.raises(InvalidArgumentError):
        centroid_support(ball_oracle(3), [1.0, 0.0], 10, 1)


def test_centroid_support_is_sublinear():
    G = CentroidBody(polar_oracle(random_polytope(2, 1), 2), 2, 20_000, 5)
    u = sphere_sample(2, 200, 6)
    v = sphere_sample(2, 200, 7)
    assert np.all(G.support(u + v) <= G.support(u) + G.support(v) + 1e-12)
    assert np.all(G.support(u) > 0)


def test_centroid_equivariance():
    T = np.array([[1.2, 0.3], [-0.4, 0.8]])
    L = polar_oracle(unit_cube(2), 2)
    th = np.array([0.6, 0.8])
    a = centroid_support(L.linear_image(lift(T, 2)), th, COUNT, 8)
    b = centroid_support(L, T.T @ th, COUNT, 9)
    assert abs(a.value - b.value) <= 3 * a.combined_error(b)


def test_centroid_equivariance_on_coupled_samples():
    # the same sample mapped by the lifted T gives the identity exactly
    T = np.array([[1.2, 0.3], [-0.4, 0.8]])
    G = CentroidBody(polar_oracle(unit_cube(2), 2), 2, 5_000, 10)
    u = sphere_sample(2, 20, 11)
    mapped = CentroidBody(G.L, 2, 5_000, 10)
    mapped.__dict__["samples"] = G.samples @ T.T
    assert_allclose(mapped.support(u), G.support(u @ T), rtol=1e-12)


def test_moment_support_examples():
    assert within(moment_support(ball_oracle(1), [1.0], COUNT, 1), 0.5)
    assert within(moment_support(polar_oracle(ball(2), 1), [0.0, 1.0], COUNT, 2), 1 / 12)


def test_moment_support_scaling():
    L = polar_oracle(random_polytope(2, 2), 1)
    a = moment_support(L, [1.0, 0.0], 5_000, 3)
    b = moment_support(L.scaled(2.0), [1.0, 0.0], 5_000, 3)
    assert_allclose(b.value, 2.0**3 * a.value, rtol=1e-9)


def test_dual_mixed_volume_examples():
    B = ball_oracle(2)
    assert_allclose(dual_mixed_vol_neg1(B, B, 1000, 1).value, math.pi, rtol=1e-12)
    assert_allclose(dual_mixed_vol_neg1(B, B.scaled(2.0), 1000, 1).value, math.pi / 2, rtol=1e-12)


@pytest.mark.parametrize("pair", [(0, 1), (1, 2), (0, 2)])
def test_dual_minkowski_inequality(pair):
    bodies = [ball_oracle(2), polar_oracle(unit_cube(2), 1), polar_oracle(simplex(2), 1)]
    L, M = bodies[pair[0]], bodies[pair[1]]
    d = 2
    vl = star_body_volume(L, COUNT, 3).value
    vm = star_body_volume(M, COUNT, 4).value
    est = dual_mixed_vol_neg1(L, M, COUNT, 5)
    assert vl ** (d + 1) / vm <= est.value**d + 3 * d * est.value ** (d - 1) * est.std_error + 0.01 * vl ** (d + 1) / vm


def test_dual_mixed_volume_degenerate_radial():
    flat = StarBody(2, lambda u: np.zeros(u.shape[0]), 1.0)
    with pytest.raises(DegenerateBodyError):
        dual_mixed_vol_neg1(ball_oracle(2), flat, 100, 1)


@pytest.mark.parametrize("K,L,m", [
    (ball(2), ball_oracle(2), 1),
    (simplex(2), polar_oracle(simplex(2), 1), 1),
    (unit_cube(2), ball_oracle(4), 2),
], ids=["ball-ball", "triangle-polar", "square-ball4"])
def test_duality_identity(K, L, m):
    chk = duality_check(K, L, m, COUNT, 6)
    assert chk.discrepancy <= 3 * chk.combined_error


def test_random_segment_in_disk():
    assert within(random_simplex_expectation(ball(2), ball_oracle(2), 1, COUNT, 7), 2 / 3)


def test_reflection_identity_for_symmetric_body():
    K = simplex(2)
    a = random_simplex_expectation(K, ball_oracle(4), 2, COUNT, 8)
    b = random_simplex_expectation(K, ball_oracle(4), 2, COUNT, 9, reflect=True)
    assert abs(a.value - b.value) <= 3 * a.combined_error(b)


def test_reflected_expectation_is_centroid_mixed_volume():
    K = simplex(2)
    a = random_simplex_expectation(K, ball_oracle(4), 2, COUNT, 10, reflect=True)
    b = CentroidBody(ball_oracle(4), 2, COUNT, 11).mixed_volume(K)
    assert abs(a.value - b.value) <= 3 * a.combined_error(b)


def test_minkowski_average_area_matches_brute_force():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((3, 3, 2))
    hulls = [np.vstack([np.zeros(2), -x]) for x in X]
    sums = (hulls[0][:, None, None, :] + hulls[1][None, :, None, :] + hulls[2][None, None, :, :]).reshape(-1, 2)
    assert_allclose(minkowski_average_area(X), ConvexHull(sums / 3).volume, rtol=1e-12)


def test_planar_centroid_volume_is_exact_area_of_sample():
    G = CentroidBody(ball_oracle(2), 1, 2_000, 12)
    cv = G.volume()
    assert cv.approx_bound == 0.0
    ref = (2 / (3 * math.pi)) ** 2 * math.pi
    assert within(cv.estimate, ref, k=4.0)


def test_three_dim_centroid_volume_sandwich():
    G = CentroidBody(ball_oracle(3), 1, 20_000, 13)
    cv = G.volume()
    ref = 4 / 3 * math.pi * (3 / 16) ** 3
    assert abs(cv.estimate.value - ref) <= 3 * cv.estimate.std_error + cv.approx_bound


def test_busemann_petty_ball_is_minimal():
    best, _ = busemann_petty_functional(polar_oracle(ball(2), 2), 2, COUNT, 14)
    for L in [ball_oracle(4), polar_oracle(unit_cube(2), 2)]:
        est, bound = busemann_petty_functional(L, 2, COUNT, 15)
        assert est.value >= best.value - 3 * est.combined_error(best) - bound


def test_random_simplex_functional_minimal_at_ball_pair():
    best = random_simplex_functional(ball(2), polar_oracle(ball(2), 2), 2, COUNT, 16)
    for K, L in [(simplex(2), polar_oracle(simplex(2), 2)), (unit_cube(2), ball_oracle(4)), (ball(2), ball_oracle(4))]:
        est = random_simplex_functional(K, L, 2, COUNT, 17)
        assert est.value >= best.value - 3 * est.combined_error(best)


def test_sampled_points_lie_in_body():
    L = polar_oracle(unit_cube(2), 2)
    X = sample_star_body(L, 2_000, 18)
    r = np.linalg.norm(X, axis=1)
    assert np.all(r <= L.radial(X / r[:, None]) * (1 + 1e-12))
