"""Higher-order projection bodies and their polars.

For a polytope K the support function of Pi^m K is the facet sum

    h(theta) = sum_F a_F * max_i <theta_i, u_F>_-,

which is n V(K[n-1], C_{-theta}) with C the segment hull of the tuple.  For
the Euclidean ball the same mixed volume equals kappa_{n-1} times the first
intrinsic volume of the segment hull, computed exactly in
:func:`hobody.bodies.segment_hull_v1`.  Ellipsoids reduce to the ball through
h_{Pi^m TK}(theta) = |det T| h_{Pi^m K}(T^{-1} theta) blockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bodies import Ellipsoid, Polytope, SegmentHull, segment_hull_v1
from .covariogram import as_tuples
from .errors import DegenerateBodyError, InvalidArgumentError
from .quadrature import MCEstimate, StarBody, ball_volume, mc_sphere_integral, sphere_sample, star_body_volume


def _tuples(theta, m: int | None, n: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if m is None:
        if theta.ndim == 1:
            theta = theta[None, :]
        if theta.shape[-1] != n:
            raise InvalidArgumentError(f"tuple components must lie in R^{n}")
        return theta
    return as_tuples(theta, m, n)


def proj_support(K, theta, m: int | None = None) -> np.ndarray | float:
    """h_{Pi^m K}(theta) for theta of shape (m, n) or (..., m, n)."""
    n = K.dim
    th = _tuples(theta, m, n)
    if isinstance(K, Polytope):
        dots = np.einsum("...in,fn->...if", th, K.normals)
        vals = np.maximum(0.0, (-dots).max(axis=-2)) @ K.areas
    elif isinstance(K, Ellipsoid):
        T = K.factor
        w = th @ np.linalg.inv(T).T
        vals = abs(np.linalg.det(T)) * proj_support_ball(1.0, n, w)
    else:
        raise InvalidArgumentError(f"unsupported body {type(K).__name__}")
    return float(vals) if np.ndim(vals) == 0 else vals


def proj_support_ball(R: float, n: int, theta, count: int = 100_000, seed: int = 0):
    """h_{Pi^m (R B^n)}(theta) = R^{n-1} n kappa_n w_n(C_theta).

    Exact through the first intrinsic volume for m <= 3; Monte Carlo mean
    width for larger m.
    """
    th = np.asarray(theta, dtype=float)
    if th.ndim == 1:
        th = th[None, :]
    flat = th.reshape((-1,) + th.shape[-2:])
    m = flat.shape[1]
    if m <= 3:
        vals = ball_volume(n - 1) * segment_hull_v1(flat)
    else:
        vals = np.array([
            mc_sphere_integral(lambda u, t=t: SegmentHull(t).support(u), n, count, seed).value for t in flat])
    vals = R ** (n - 1) * vals.reshape(th.shape[:-2])
    return float(vals) if vals.ndim == 0 else vals


@dataclass(frozen=True)
class HigherProjBody:
    K: object
    m: int

    @property
    def dim(self) -> int:
        return self.K.dim * self.m

    def support(self, theta) -> np.ndarray:
        return proj_support(self.K, theta, self.m)

    def support_flat(self, u: np.ndarray) -> np.ndarray:
        """Support at flat unit vectors of shape (N, nm)."""
        return np.asarray(proj_support(self.K, as_tuples(u, self.m, self.K.dim)), dtype=float).reshape(-1)


def _min_support(H: HigherProjBody, scan: int, seed: int) -> float:
    d = H.dim
    u = sphere_sample(d, scan, seed)
    h = H.support_flat(u)
    best = float(h.min())
    for i in np.argsort(h)[:5]:
        def f(x):
            nx = np.linalg.norm(x)
            return float(H.support_flat((x / nx)[None])[0]) if nx > 0 else np.inf
        res = minimize(f, u[i], method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400 * d})
        best = min(best, float(res.fun))
    return best


def polar_proj_oracle(K, m: int, scan: int = 10_000, seed: int = 0) -> StarBody:
    """Radial oracle of the polar body of Pi^m K: rho = 1/h."""
    H = HigherProjBody(K, m)
    hmin = _min_support(H, scan, seed)
    if hmin <= 1e-12:
        raise DegenerateBodyError("projection body support vanishes; body is lower-dimensional")

    def radial(u):
        h = H.support_flat(u)
        if np.any(h <= 1e-12):
            raise DegenerateBodyError("projection body support vanishes")
        return 1.0 / h

    return StarBody(H.dim, radial, 1.1 / hmin, f"polar Pi^{m}({getattr(K, 'name', '')})")


def ball_polar_oracle(n: int, m: int, radius: float = 1.0) -> StarBody:
    """Polar projection body of radius*B^n with exact support."""
    K = Ellipsoid(np.zeros(n), radius * np.eye(n), f"ball{n}")
    H = HigherProjBody(K, m)
    # h >= max_i kappa_{n-1}|theta_i| R^{n-1} >= kappa_{n-1} R^{n-1}/sqrt(m) on the sphere
    hmin = ball_volume(n - 1) * radius ** (n - 1) / math.sqrt(m)
    return StarBody(n * m, lambda u: 1.0 / H.support_flat(u), 1.0 / hmin, f"polar Pi^{m}(ball{n})")


def polar_oracle(K, m: int, seed: int = 0) -> StarBody:
    if isinstance(K, Ellipsoid) and K.is_ball:
        R = math.sqrt(float((K.factor.T @ K.factor)[0, 0]))
        return ball_polar_oracle(K.dim, m, R)
    if isinstance(K, Ellipsoid):
        T = K.factor
        base = ball_polar_oracle(K.dim, m)
        # polar of Pi^m(TB) = |det T|^{-1} T-bar (polar of Pi^m B)
        from .bodies import lift
        return base.linear_image(lift(T, m) / abs(np.linalg.det(T)))
    return polar_proj_oracle(K, m, seed=seed)


def polar_proj_volume(K, m: int, count: int, seed: int) -> MCEstimate:
    return star_body_volume(polar_oracle(K, m), count, seed)


def petty_product(K, m: int, count: int, seed: int) -> MCEstimate:
    """Vol(K)^{nm-m} * Vol(polar Pi^m K)."""
    n = K.dim
    return polar_proj_volume(K, m, count, seed).scaled(K.volume ** (n * m - m))


def petty_isoperimetric(K, m: int, count: int, seed: int) -> MCEstimate:
    """Vol(polar Pi^m K) * S(K)^{nm}."""
    n = K.dim
    return polar_proj_volume(K, m, count, seed).scaled(K.surface_area ** (n * m))


def zhang_constant(n: int, m: int) -> float:
    """Lower bound of the Petty product, attained by simplices."""
    return math.comb(n * m + n, n) / n ** (n * m)


def rogers_shephard_constant(n: int, m: int) -> int:
    return math.comb(n * m + n, n)


def ball_petty_closed_form(n: int) -> float:
    """Petty product of the ball for m = 1: (kappa_n / kappa_{n-1})^n."""
    return (ball_volume(n) / ball_volume(n - 1)) ** n


def ball_mean_width_proj(n: int, m: int, count: int, seed: int) -> MCEstimate:
    """w_{nm}(Pi^m B^n) = (1/(nm kappa_nm)) * integral of h over S^{nm-1}."""
    d = n * m
    est = mc_sphere_integral(lambda u: proj_support_ball(1.0, n, as_tuples(u, m, n)), d, count, seed)
    return est.scaled(1.0 / (d * ball_volume(d)))


def isoperimetric_lower_bound(n: int, m: int, count: int, seed: int) -> MCEstimate:
    """kappa_nm * (n kappa_n / w_nm(Pi^m B))^{nm}."""
    d = n * m
    w = ball_mean_width_proj(n, m, count, seed)
    c = ball_volume(d) * (n * ball_volume(n)) ** d
    return w.power(-d).scaled(c)
