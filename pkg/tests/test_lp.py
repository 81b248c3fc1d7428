import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from hobody.errors import InfeasibleError, InvalidArgumentError, UnboundedError
from hobody.hrep import HalfspaceFamily
from hobody.lp import chebyshev_center, linprog_max, linprog_min, require_optimal


def test_small_maximization():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6 -> (8/5, 6/5), value 14/5
    res = linprog_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.ok
    assert_allclose(res.x, [1.6, 1.2], atol=1e-12)
    assert_allclose(res.value, 2.8, atol=1e-12)


def test_equality_and_free_variables():
    # min x s.t. x + y = 1, y <= 3, x free -> x = -2
    res = linprog_min([1, 0], A_ub=[[0, 1]], b_ub=[3], A_eq=[[1, 1]], b_eq=[1], free=[0])
    assert_allclose(res.value, -2.0, atol=1e-12)


def test_infeasible_and_unbounded():
    inf = linprog_min([1.0], A_ub=[[1.0], [-1.0]], b_ub=[-1.0, -1.0])
    assert inf.status == "infeasible"
    with pytest.raises(InfeasibleError):
        require_optimal(inf)
    unb = linprog_max([1.0, 0.0], [[0.0, 1.0]], [1.0])
    assert unb.status == "unbounded"
    with pytest.raises(UnboundedError):
        require_optimal(unb)


def test_degenerate_vertex_terminates():
    # many constraints through the optimum; Bland's rule must not cycle
    A = np.array([[1, 0], [0, 1], [1, 1], [2, 1], [1, 2]], dtype=float)
    b = np.array([1, 1, 2, 3, 3], dtype=float)
    res = linprog_max([1, 1], A, b)
    assert_allclose(res.value, 2.0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(1, 5), k=st.integers(2, 25))
def test_matches_scipy_on_random_bounded_programs(seed, n, k):
    rng = np.random.default_rng(seed)
    A = np.vstack([rng.standard_normal((k, n)), np.eye(n)])
    b = np.concatenate([rng.uniform(0.1, 2.0, k), np.ones(n)])
    c = rng.standard_normal(n)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    res = linprog_max(c, A, b, free=list(range(n)))
    if ref.status == 3:
        assert res.status == "unbounded"
        return
    assert res.ok
    assert_allclose(res.value, -ref.fun, atol=1e-9, rtol=1e-9)
    assert np.all(A @ res.x <= b + 1e-9)


def test_chebyshev_center_of_box():
    A = np.vstack([np.eye(2), -np.eye(2)])
    z, r = chebyshev_center(A, np.array([3.0, 1.0, 1.0, 1.0]))
    assert_allclose(r, 1.0, atol=1e-12)
    assert_allclose(z[1], 0.0, atol=1e-12)


def test_chebyshev_center_of_empty_set():
    _, r = chebyshev_center(np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]))
    assert r < 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_family_volumes_match_qhull(n):
    rng = np.random.default_rng(n)
    A = rng.standard_normal((3 * n + 2, n))
    A /= np.linalg.norm(A, axis=1)[:, None]
    if n == 1:  # parallel normals must be distinct
        A = np.array([[1.0], [-1.0]])
    fam = HalfspaceFamily(A)
    bs = rng.uniform(0.5, 1.5, (6, A.shape[0]))
    got = fam.volumes(bs)
    for b, v in zip(bs, got):
        V = fam.vertices(b)
        ref = V.max() - V.min() if n == 1 else ConvexHull(V).volume
        assert_allclose(v, ref, rtol=1e-9)


def test_family_rejects_repeated_normals():
    with pytest.raises(InvalidArgumentError):
        HalfspaceFamily(np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]))


def test_family_empty_and_unit_box():
    fam = HalfspaceFamily(np.vstack([np.eye(3), -np.eye(3)]))
    assert_allclose(fam.volume(np.ones(6)), 8.0)
    assert fam.volume(np.array([1, 1, 1, -2, 1, 1.0])) == 0.0
