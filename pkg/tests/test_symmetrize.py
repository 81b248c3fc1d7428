import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.linalg import block_diag

from hobody.bodies import (apply_linear, hull_from_vertices, lift, random_polytope, regular_polygon, simplex,
                           smoothed_polygon, symmetric_cube)
from hobody.covariogram import DifferenceBody
from hobody.errors import InvalidArgumentError
from hobody.quadrature import sphere_sample, uniform_stream
from hobody.symmetrize import (HigherSymmetral, SteinerSymmetral, chord, chord_lp, higher_steiner_membership,
                               higher_steiner_volume, petty_step, steiner, steiner_inclusion_check)

COUNT = 40_000
E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def rotation(a):
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def box_points(P, count, seed, pad=0.2):
    lo, hi = P.vertices.min(axis=0) - pad, P.vertices.max(axis=0) + pad
    return lo + uniform_stream(P.dim, count, seed) * (hi - lo)


@pytest.mark.parametrize("xi", [E1, np.array([0.6, 0.8]), np.array([-0.3, 1.0])])
def test_polygon_symmetral_volume_and_symmetry(xi):
    P = regular_polygon(64)
    S = SteinerSymmetral(P, xi)
    assert_allclose(steiner(P, xi).volume, P.volume, rtol=1e-12)
    z = box_points(P, 1000, 1)
    u = xi / np.linalg.norm(xi)
    mirrored = z - 2 * (z @ u)[:, None] * u
    assert_array_equal(S.contains(z), S.contains(mirrored))


def test_symmetric_square_is_unchanged():
    P = symmetric_cube(2)
    g = np.linspace(-1.3, 1.3, 32)
    z = np.array(np.meshgrid(g, g)).reshape(2, -1).T
    assert_array_equal(SteinerSymmetral(P, E1).contains(z), P.contains(z, tol=1e-9))


def test_triangle_symmetral():
    S = SteinerSymmetral(simplex(2), E2)
    z = box_points(simplex(2), 1000, 2)
    x, t = z[:, 0], z[:, 1]
    ref = (x >= 0) & (x <= 1) & (np.abs(t) <= (1 - x) / 2)
    assert_array_equal(S.contains(z, tol=0.0), ref)
    assert_allclose(steiner(simplex(2), E2).volume, 0.5, rtol=1e-12)


def test_chord_matches_lp():
    P = random_polytope(3, 3)
    xi = np.array([0.2, -0.5, 0.8])
    for x in box_points(P, 50, 3):
        lo, hi = chord(P, x, xi)
        lo2, hi2 = chord_lp(P, x, xi)
        if hi[0] >= lo[0]:
            assert_allclose([lo[0], hi[0]], [lo2, hi2], atol=1e-9)
        else:
            assert hi2 < lo2


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_three_dim_symmetral_is_exact(seed):
    P = random_polytope(3, seed)
    xi = sphere_sample(3, 1, seed)[0]
    S = steiner(P, xi)
    assert_allclose(S.volume, P.volume, rtol=1e-9)
    z = box_points(P, 2000, seed)
    oracle = SteinerSymmetral(P, xi)
    # the polytope and the chord oracle agree away from the boundary
    inner = oracle.contains(z, tol=-1e-6)
    outer = oracle.contains(z, tol=1e-6)
    poly = S.contains(z, tol=1e-9)
    assert np.all(poly[inner]) and not np.any(poly[~outer])


def test_zero_direction_rejected():
    with pytest.raises(InvalidArgumentError):
        steiner(simplex(2), [0.0, 0.0])


@pytest.mark.parametrize("xi", [E1, E2])
def test_cube_is_fibre_symmetric(xi):
    L = symmetric_cube(4)
    z = -1.5 + 3 * uniform_stream(4, 2000, 4)
    assert_array_equal(HigherSymmetral(L, xi, 2).contains(z), L.contains(z, tol=1e-9))


def test_oblique_direction_changes_square():
    # the square is not symmetric about an oblique line, so its symmetral differs
    P = symmetric_cube(2)
    z = -1.5 + 3 * uniform_stream(2, 2000, 4)
    assert np.any(SteinerSymmetral(P, np.array([0.6, 0.8])).contains(z) != P.contains(z, tol=1e-9))


def test_m1_agrees_with_classical():
    for seed in range(10):
        P = random_polytope(2, seed)
        xi = sphere_sample(2, 1, seed + 100)[0]
        z = box_points(P, 100, seed)
        assert_array_equal(higher_steiner_membership(P, xi, z, m=1), SteinerSymmetral(P, xi).contains(z))


def test_zeroed_fibres_are_members():
    L = hull_from_vertices(DifferenceBody(simplex(2), 2).points)
    H = HigherSymmetral(L, E2, 2)
    z = L.vertices * 0.99
    xbar, _ = H.decompose(z)
    assert np.all(H.contains(xbar))


def test_higher_membership_is_midpoint_convex():
    L = hull_from_vertices(DifferenceBody(simplex(2), 2).points)
    H = HigherSymmetral(L, np.array([0.6, 0.8]), 2)
    lo, hi = H.bounding_box
    z = lo + uniform_stream(4, 2000, 5) * (hi - lo)
    members = z[H.contains(z)]
    a, b = members[: len(members) // 2], members[len(members) // 2 : 2 * (len(members) // 2)]
    assert np.all(H.contains(0.5 * (a + b)))


def test_rotation_equivariance():
    L = apply_linear(symmetric_cube(4), block_diag(np.array([[1.0, 0.4], [0.1, 0.9]]), np.eye(2)))
    xi = np.array([0.6, 0.8])
    T = rotation(0.9)
    TL = apply_linear(L, lift(T, 2))
    H, HT = HigherSymmetral(L, xi, 2), HigherSymmetral(TL, T @ xi, 2)
    lo, hi = H.bounding_box
    z = lo + uniform_stream(4, 2000, 6) * (hi - lo)
    a = H.contains(z, tol=-1e-9)
    b = HT.contains(z @ lift(T, 2).T)
    assert np.all(b[a])
    assert np.all(H.contains(z)[b])


def test_cube_volume_is_preserved():
    est = higher_steiner_volume(symmetric_cube(4), np.array([0.6, 0.8]), COUNT, 7)
    assert abs(est.value - 16.0) <= 3 * est.std_error


def test_sheared_cube_volume_does_not_drop():
    T = block_diag(np.array([[1.0, 0.7], [0.0, 1.0]]), np.eye(2))
    L = apply_linear(symmetric_cube(4), T)
    est = higher_steiner_volume(L, E1, COUNT, 8)
    assert est.value >= 16.0 - 3 * est.std_error


@pytest.mark.parametrize("seed", [1, 2])
def test_m1_volume_is_preserved(seed):
    P = random_polytope(2, seed)
    est = higher_steiner_volume(P, np.array([0.3, -0.7]), COUNT, seed)
    assert abs(est.value - P.volume) <= 3 * est.std_error


def test_inclusion_for_polygon_ball():
    dirs = sphere_sample(4, 50, 9)
    rows = steiner_inclusion_check(regular_polygon(64), np.array([0.6, 0.8]), dirs, 2)
    assert min(r.margin for r in rows) >= -0.01


def test_inclusion_for_smoothed_triangle():
    K = smoothed_polygon(simplex(2).vertices, eps=0.05, k=16)
    rows = steiner_inclusion_check(K, E2, sphere_sample(4, 50, 10), 2)
    assert min(r.margin for r in rows) >= -0.01


def test_inclusion_m1_reduction():
    K = smoothed_polygon(simplex(2).vertices, eps=0.05, k=16)
    rows = steiner_inclusion_check(K, E2, sphere_sample(2, 50, 11), 1)
    assert min(r.margin for r in rows) >= -0.01


@pytest.mark.parametrize("K", [simplex(2), random_polytope(2, 3)], ids=lambda K: K.name)
def test_petty_step_does_not_decrease(K):
    step = petty_step(K, np.array([0.6, 0.8]), 2, COUNT, 12)
    assert step.increase.value >= -3 * step.increase.std_error
    assert_allclose(step.after.value - step.before.value, step.increase.value, rtol=1e-9, atol=1e-12)
