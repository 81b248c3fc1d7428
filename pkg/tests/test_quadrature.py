import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from hobody.bodies import random_polytope, simplex, symmetric_cube
from hobody.errors import InvalidArgumentError, InvalidBodyError, NonFiniteIntegrandError
from hobody.quadrature import (MCEstimate, StarBody, ball_oracle, ball_volume, mc_sphere_integral,
                               sample_star_body, sphere_measure, sphere_sample, star_body_volume)


def within(est: MCEstimate, ref: float, k: float = 3.0) -> bool:
    return abs(est.value - ref) <= k * est.std_error + 1e-12


def test_s0_samples_are_signs():
    u = sphere_sample(1, 4, 7)
    assert u.shape == (4, 1)
    assert set(np.abs(u[:, 0]).tolist()) == {1.0}


def test_sphere_samples_are_unit():
    u = sphere_sample(3, 10_000, 1)
    assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-12)


def test_half_circle_fraction():
    u = sphere_sample(2, 100_000, 1)
    assert abs(np.mean(u[:, 0] > 0) - 0.5) <= 0.01


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_isotropy_smoke(d):
    n = 20_000
    u = sphere_sample(d, n, 3)
    assert np.linalg.norm(u.mean(axis=0)) <= 4 / math.sqrt(n)


def test_sphere_sample_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        sphere_sample(0, 10, 1)
    with pytest.raises(InvalidArgumentError):
        sphere_sample(2, 0, 1)


def test_sphere_stream_is_partition_independent():
    full = sphere_sample(4, 10_000, 11)
    parts = np.vstack([sphere_sample(4, 3_000, 11, start=0), sphere_sample(4, 7_000, 11, start=3_000)])
    assert_array_equal(full, parts)


@pytest.mark.parametrize("d,ref", [(2, 2 * math.pi), (3, 4 * math.pi)])
def test_constant_integrand_gives_sphere_measure(d, ref):
    est = mc_sphere_integral(lambda u: np.ones(u.shape[0]), d, 10_000, 1)
    assert_allclose(est.value, ref, rtol=1e-12)
    assert est.std_error == 0.0
    assert_allclose(sphere_measure(d), ref)


def test_cos_squared_on_circle():
    est = mc_sphere_integral(lambda u: u[:, 0] ** 2, 2, 100_000, 1)
    assert within(est, math.pi)


def test_non_finite_integrand_names_direction():
    with pytest.raises(NonFiniteIntegrandError) as info:
        mc_sphere_integral(lambda u: np.where(u[:, 0] > 0.9, np.inf, 1.0), 2, 1_000, 1)
    assert info.value.direction is not None
    assert info.value.direction[0] > 0.9


def test_workers_do_not_change_estimate():
    f = lambda u: np.exp(u[:, 0]) + u[:, 1] ** 2  # noqa: E731
    a = mc_sphere_integral(f, 3, 200_000, 5, workers=1)
    b = mc_sphere_integral(f, 3, 200_000, 5, workers=4)
    assert a == b


def test_estimates_are_bit_reproducible():
    a = star_body_volume(symmetric_cube(3).as_star(), 50_000, 9)
    b = star_body_volume(symmetric_cube(3).as_star(), 50_000, 9)
    assert a.value == b.value and a.std_error == b.std_error


def test_uniform_interval_mean_abs():
    x = sample_star_body(ball_oracle(1), 100_000, 2)
    assert abs(np.abs(x).mean() - 0.5) <= 0.01


def test_disk_inner_fraction():
    x = sample_star_body(ball_oracle(2), 100_000, 2)
    assert abs(np.mean(np.linalg.norm(x, axis=1) <= 0.5) - 0.25) <= 0.01


def test_samples_stay_inside_body():
    L = symmetric_cube(3).as_star()
    x = sample_star_body(L, 20_000, 4)
    r = np.linalg.norm(x, axis=1)
    assert np.all(r <= L.radial(x / r[:, None]) + 1e-12)


def test_sampler_rejects_non_positive_radial():
    bad = StarBody(2, lambda u: u[:, 0], 1.0)
    with pytest.raises(InvalidBodyError):
        sample_star_body(bad, 100, 1)


def test_sampler_recovers_from_low_bounding_radius():
    L = StarBody(2, lambda u: np.full(u.shape[0], 2.0), 1.0)
    x = sample_star_body(L, 5_000, 1)
    assert np.linalg.norm(x, axis=1).max() > 1.5


def test_disk_volume():
    est = star_body_volume(ball_oracle(2), 10_000, 1)
    assert_allclose(est.value, math.pi, rtol=1e-12)


def test_square_volume_from_radial_oracle():
    est = star_body_volume(symmetric_cube(2).as_star(), 100_000, 1)
    assert within(est, 4.0, k=2.0)
    assert est.std_error > 0


def test_four_ball_volume():
    est = star_body_volume(ball_oracle(4), 1_000, 1)
    assert_allclose(est.value, math.pi**2 / 2, rtol=1e-12)
    assert_allclose(ball_volume(4), math.pi**2 / 2)


def test_std_error_halves_when_samples_quadruple():
    L = symmetric_cube(3).as_star()
    ratios = []
    for seed in range(10):
        a = star_body_volume(L, 4_000, seed).std_error
        b = star_body_volume(L, 16_000, seed).std_error
        ratios.append(a / b)
    # ideal ratio is 2; allow a factor-2 slack either way
    assert 1.0 <= np.mean(ratios) <= 4.0


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_volume_scales_with_dilation(c):
    L = symmetric_cube(3).as_star()
    a = star_body_volume(L, 50_000, 1)
    b = star_body_volume(L.scaled(c), 50_000, 2)
    scaled = a.scaled(c**3)
    assert abs(b.value - scaled.value) <= 3 * b.combined_error(scaled)


def test_linear_image_volume():
    T = np.array([[2.0, 0.3], [0.0, 0.5]])
    est = star_body_volume(ball_oracle(2).linear_image(T), 100_000, 3)
    assert within(est, math.pi * abs(np.linalg.det(T)))


def test_mc_estimate_helpers():
    e = MCEstimate(4.0, 0.2, 100, 1)
    assert_allclose(e.power(0.5).value, 2.0)
    assert_allclose(e.power(0.5).std_error, 0.05)
    assert_allclose(e.scaled(-2).std_error, 0.4)
    assert_allclose(e.combined_error(MCEstimate(1.0, 0.15, 10, 2)), 0.25)
    assert float(e) == 4.0


@settings(max_examples=25, deadline=None)
@given(d=st.integers(1, 12), count=st.integers(1, 300), seed=st.integers(0, 2**64 - 1))
def test_sphere_sample_properties(d, count, seed):
    u = sphere_sample(d, count, seed)
    assert u.shape == (count, d)
    assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-12)
    assert_array_equal(u, sphere_sample(d, count, seed))


def test_polytope_sampler_matches_moments():
    X = sample_star_body(symmetric_cube(3).as_star(), 50_000, 3)
    assert np.all(np.abs(X) <= 1.0)
    assert np.all(np.abs(X.mean(axis=0)) <= 4 * math.sqrt(1 / 3 / 50_000))
    assert np.all(np.abs((X**2).mean(axis=0) - 1 / 3) <= 4 * math.sqrt(4 / 45 / 50_000))
    # centroid of the standard triangle is (1/3, 1/3)
    Y = sample_star_body(simplex(2).centered().as_star(), 50_000, 4) + simplex(2).vertices.mean(axis=0)
    assert_allclose(Y.mean(axis=0), [1 / 3, 1 / 3], atol=4 * math.sqrt(1 / 18 / 50_000))


def test_polytope_sampler_is_deterministic_and_mapped():
    L = random_polytope(3, 1).centered().as_star()
    assert_array_equal(sample_star_body(L, 100, 5), sample_star_body(L, 100, 5))
    T = np.array([[1.0, 0.2, 0.0], [0.0, 2.0, 0.1], [0.0, 0.0, 0.5]])
    assert_allclose(sample_star_body(L.linear_image(T), 100, 5), sample_star_body(L, 100, 5) @ T.T)
    assert_allclose(sample_star_body(L.scaled(2.0), 100, 5), 2 * sample_star_body(L, 100, 5))
