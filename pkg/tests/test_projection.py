import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from hobody.bodies import (Ellipsoid, Polytope, SegmentHull, apply_linear, ball, mean_width, mixed_volume_first,
                           random_polytope, regular_polygon, simplex, unit_cube)
from hobody.errors import DegenerateBodyError
from hobody.projection import (ball_petty_closed_form, isoperimetric_lower_bound, petty_isoperimetric,
                               petty_product, polar_oracle, polar_proj_oracle, polar_proj_volume, proj_support,
                               proj_support_ball, rogers_shephard_constant, zhang_constant)
from hobody.quadrature import sphere_sample

SQRT2 = math.sqrt(2.0)
COUNT = 40_000


def within(est, ref, k=3.0):
    return abs(est.value - ref) <= k * est.std_error + 1e-12


def test_square_support_examples():
    sq = unit_cube(2)
    assert proj_support(sq, [[1.0, 0.0]]) == 1.0
    assert proj_support(sq, [[1.0, 0.0], [0.0, 1.0]]) == 2.0


def test_triangle_support_matches_mixed_volume():
    T = simplex(2)
    assert_allclose(proj_support(T, [[1.0, 0.0]]), 1.0)
    assert_allclose(2 * mixed_volume_first(T, SegmentHull(np.array([[-1.0, 0.0]]))), 1.0)


def test_ball_support_examples():
    assert_allclose(proj_support_ball(1.0, 2, [[1.0, 0.0], [0.0, 1.0]]), 2 + SQRT2)
    assert_allclose(proj_support_ball(1.0, 2, [[1.0, 0.0]]), 2.0)
    assert_allclose(proj_support_ball(1.0, 3, [[1.0, 0.0, 0.0]]), math.pi)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), R=st.floats(0.2, 5.0))
def test_planar_ball_two_tuple_closed_form(seed, R):
    t1, t2 = np.random.default_rng(seed).standard_normal((2, 2))
    ref = R * (np.linalg.norm(t1) + np.linalg.norm(t2) + np.linalg.norm(t1 - t2))
    assert_allclose(proj_support_ball(R, 2, [t1, t2]), ref, rtol=1e-12)


def test_ball_support_three_dims_against_mean_width():
    th = np.array([[0.3, -0.2, 0.5], [-0.4, 0.1, 0.2], [0.1, 0.6, -0.3]])
    est = mean_width(SegmentHull(th), 400_000, 5)
    # kappa_2 * V_1, with V_1 = 4 * (sphere average of h) in R^3
    ref = math.pi * 4 * est.value
    assert abs(proj_support_ball(1.0, 3, th) - ref) <= 3 * math.pi * 4 * est.std_error


def test_ellipse_projection_body_is_rotated_width():
    E = Ellipsoid(np.zeros(2), np.array([[2.0, 0.5], [0.0, 0.7]]))
    u = sphere_sample(2, 50, 1)
    perp = u @ np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert_allclose(proj_support(E, u[:, None, :]), 2 * E.support(perp), rtol=1e-12)


def test_polygon_approximates_ball():
    P = regular_polygon(512)
    th = np.array([[0.6, 0.8], [-1.0, 0.2]])
    assert_allclose(proj_support(P, th), proj_support_ball(1.0, 2, th), rtol=1e-4)


BODIES = [unit_cube(2), simplex(2), random_polytope(2, 3), random_polytope(3, 1), Ellipsoid(
    np.zeros(3), np.array([[1.0, 0.2, 0.0], [0.0, 0.8, 0.1], [0.0, 0.0, 1.3]]))]


@pytest.mark.parametrize("K", BODIES, ids=lambda K: K.name or type(K).__name__)
def test_higher_support_dominates_each_block(K):
    n = K.dim
    th = sphere_sample(3 * n, 100, 2).reshape(100, 3, n)
    h = proj_support(K, th)
    blocks = np.stack([proj_support(K, th[:, i : i + 1, :]) for i in range(3)], axis=1)
    assert np.all(h >= blocks.max(axis=1) - 1e-12)


@pytest.mark.parametrize("K", BODIES, ids=lambda K: K.name or type(K).__name__)
def test_block_embedded_direction(K):
    n = K.dim
    u = sphere_sample(n, 20, 3)
    for j in range(3):
        th = np.zeros((20, 3, n))
        th[:, j, :] = u
        assert_allclose(proj_support(K, th), proj_support(K, u[:, None, :]), rtol=1e-12)


@pytest.mark.parametrize("K", BODIES[:4], ids=lambda K: K.name)
def test_translation_reflection_permutation(K):
    n = K.dim
    th = sphere_sample(2 * n, 50, 4).reshape(50, 2, n)
    h = proj_support(K, th)
    assert_array_equal(proj_support(K.translate(np.full(n, 0.37)), th), h)
    assert_allclose(proj_support(K.reflect(), -th), h, rtol=1e-12)
    assert_array_equal(proj_support(K, th[:, ::-1, :]), h)


@pytest.mark.parametrize("K", BODIES, ids=lambda K: K.name or type(K).__name__)
def test_linear_covariance(K):
    n = K.dim
    rng = np.random.default_rng(5)
    for _ in range(20):
        T = rng.standard_normal((n, n))
        T *= rng.uniform(0.5, 2.0) ** (1 / n) / abs(np.linalg.det(T)) ** (1 / n)
        th = sphere_sample(2 * n, 5, int(rng.integers(1 << 30))).reshape(5, 2, n)
        lhs = proj_support(apply_linear(K, T), th)
        rhs = abs(np.linalg.det(T)) * proj_support(K, th @ np.linalg.inv(T).T)
        assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_support_is_homogeneous():
    K = random_polytope(3, 2)
    th = sphere_sample(6, 10, 6).reshape(10, 2, 3)
    assert_allclose(proj_support(K, 2.5 * th), 2.5 * proj_support(K, th), rtol=1e-12)


def test_polar_of_disk_is_half_disk():
    L = polar_oracle(ball(2), 1)
    assert_allclose(L.radial(sphere_sample(2, 30, 1)), 0.5, rtol=1e-12)
    assert_allclose(polar_proj_volume(ball(2), 1, 1000, 1).value, math.pi / 4, rtol=1e-12)


def test_polar_of_square_is_cross_polytope():
    L = polar_proj_oracle(unit_cube(2), 1)
    u = sphere_sample(2, 30, 1)
    assert_allclose(L.radial(u), 1 / np.abs(u).sum(axis=1), rtol=1e-12)
    assert within(polar_proj_volume(unit_cube(2), 1, COUNT, 1), 2.0)


def test_polar_radial_homogeneity():
    K = random_polytope(2, 4)
    u = sphere_sample(4, 30, 2)
    assert_allclose(polar_proj_oracle(K.scale(2.0), 2).radial(u), 0.5 * polar_proj_oracle(K, 2).radial(u), rtol=1e-12)


def test_polar_of_flat_body_is_degenerate():
    # a doubly covered segment: surface measure only on +-e2, so h vanishes at e1
    flat = Polytope(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 1.0], [0.0, -1.0]]), np.zeros(2),
                    np.array([2.0, 2.0]), "flat")
    with pytest.raises(DegenerateBodyError):
        polar_proj_oracle(flat, 1)


@pytest.mark.parametrize("K,ref", [(simplex(2), 1.5), (ball(2), math.pi**2 / 4), (unit_cube(2), 2.0)],
                         ids=["triangle", "ball", "square"])
def test_petty_product_examples(K, ref):
    est = petty_product(K, 1, COUNT, 1)
    assert within(est, ref)
    assert abs(est.value - ref) <= 0.01 * ref


def test_ball_petty_closed_form():
    assert_allclose(ball_petty_closed_form(2), math.pi**2 / 4)
    assert_allclose(ball_petty_closed_form(3), (4 / 3) ** 3)


@pytest.mark.parametrize("K,ref", [(ball(2), math.pi**3), (unit_cube(2), 32.0), (simplex(2), 3 * (2 + SQRT2) ** 2)],
                         ids=["ball", "square", "triangle"])
def test_petty_isoperimetric_examples(K, ref):
    est = petty_isoperimetric(K, 1, COUNT, 2)
    assert within(est, ref)
    assert est.value >= math.pi**3 - 3 * est.std_error


def test_isoperimetric_lower_bound_matches_ball_for_m1():
    est = isoperimetric_lower_bound(2, 1, 1000, 1)
    assert_allclose(est.value, math.pi**3, rtol=1e-12)


@pytest.mark.parametrize("K", [random_polytope(2, 1), regular_polygon(5)], ids=lambda K: K.name)
def test_petty_product_affine_invariance(K):
    T = np.array([[1.3, 0.4], [-0.2, 0.9]])
    a = petty_product(K, 2, COUNT, 3)
    b = petty_product(apply_linear(K, T).translate(np.array([0.5, -1.0])), 2, COUNT, 4)
    assert abs(a.value - b.value) <= 3 * a.combined_error(b)


@pytest.mark.parametrize("K", [random_polytope(2, 1), regular_polygon(5), unit_cube(2)], ids=lambda K: K.name)
def test_petty_product_between_zhang_and_ball(K):
    est = petty_product(K, 2, COUNT, 5)
    ball_est = petty_product(ball(2), 2, COUNT, 6)
    assert est.value >= zhang_constant(2, 2) - 3 * est.std_error
    assert est.value <= ball_est.value + 3 * est.combined_error(ball_est)


def test_simplex_attains_zhang_bound_for_m2():
    est = petty_product(simplex(2), 2, COUNT, 7)
    assert within(est, zhang_constant(2, 2))


def test_constants():
    assert rogers_shephard_constant(2, 2) == 15
    assert_allclose(zhang_constant(2, 1), 1.5)
    assert_allclose(zhang_constant(3, 1), 20 / 27)
