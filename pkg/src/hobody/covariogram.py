"""The m-covariogram, the higher-order difference body and the slope check.

For a polytope K = {A y <= b} and shifts x_1..x_m,

    K cap (x_1 + K) cap ... cap (x_m + K) = {A y <= b + min(0, min_i A x_i)},

so every covariogram value is the volume of a polytope with K's normals and a
shifted right-hand side.  Along a ray x_i = r theta_i the shift is linear:
the right-hand side is ``b - r c(theta)`` with ``c_F = max_i <theta_i, u_F>_-``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull

from .bodies import Polytope
from .errors import InvalidArgumentError, InvalidBodyError, StepOutOfRangeError
from .hrep import HalfspaceFamily
from .lp import linprog_max
from .quadrature import MCEstimate, StarBody, star_body_volume

_FAMILIES: dict[bytes, HalfspaceFamily] = {}


def family(P: Polytope) -> HalfspaceFamily:
    """Batched-volume kernel for P's normal matrix, cached by the matrix bytes."""
    key = P.normals.tobytes() + bytes(str(P.normals.shape), "ascii")
    fam = _FAMILIES.get(key)
    if fam is None:
        if len(_FAMILIES) > 256:
            _FAMILIES.clear()
        fam = HalfspaceFamily(P.normals)
        _FAMILIES[key] = fam
    return fam


def as_tuples(x, m: int, n: int) -> np.ndarray:
    """Reshape flat (..., nm) or tuple (..., m, n) input to (..., m, n)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-2:] == (m, n):
        return x
    if x.shape[-1] == m * n:
        return x.reshape(x.shape[:-1] + (m, n))
    raise InvalidArgumentError(f"expected tuples of {m} vectors in R^{n}, got shape {x.shape}")


def ray_rates(P: Polytope, thetas: np.ndarray) -> np.ndarray:
    """c_F(theta) = max_i <theta_i, u_F>_- for tuples of shape (..., m, n)."""
    dots = np.einsum("...in,fn->...if", np.asarray(thetas, dtype=float), P.normals)
    return np.maximum(0.0, (-dots).max(axis=-2))


def shifted_offsets(P: Polytope, xbar: np.ndarray) -> np.ndarray:
    dots = np.einsum("...in,fn->...if", np.asarray(xbar, dtype=float), P.normals)
    return P.offsets + np.minimum(0.0, dots.min(axis=-2))


def m_covariogram(P: Polytope, xbar) -> float:
    """Vol(P cap (x_1 + P) cap ... cap (x_m + P)); 0 when empty."""
    xbar = np.atleast_2d(np.asarray(xbar, dtype=float))
    if xbar.shape[-1] != P.dim:
        raise InvalidArgumentError("shift vectors must live in the body's dimension")
    return float(family(P).volume(shifted_offsets(P, xbar)))


def m_covariogram_batch(P: Polytope, xbars: np.ndarray) -> np.ndarray:
    """Covariogram values for a batch of shift tuples, shape (N, m, n)."""
    return family(P).volumes(shifted_offsets(P, xbars))


def covariogram_on_ray(P: Polytope, theta, r) -> np.ndarray:
    """g(r theta) for a scalar tuple theta (m, n) and an array of radii r."""
    c = ray_rates(P, np.asarray(theta, dtype=float))
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return family(P).volumes(P.offsets[None, :] - r[:, None] * c[None, :])


_CIRCUITS: dict[bytes, np.ndarray] = {}


def normal_circuits(P: Polytope) -> np.ndarray:
    """Minimal positive dependencies of P's facet normals, one per row (R, F).

    These are the extreme rays of {lam >= 0 : A^T lam = 0}, i.e. the vertices
    of the dual of the radial LP below, so for every direction tuple

        rho_{D^m(P)}(theta) = min over rows lam with c.lam > 0 of (b.lam) / (c.lam).
    """
    key = P.normals.tobytes() + bytes(str(P.normals.shape), "ascii")
    out = _CIRCUITS.get(key)
    if out is not None:
        return out
    A = P.normals
    F, n = A.shape
    rows = []
    for k in range(2, n + 2):
        idx = np.array(list(itertools.combinations(range(F), k)), dtype=int)
        if idx.size == 0:
            continue
        for s in range(0, idx.shape[0], 20000):
            sub = idx[s : s + 20000]
            M = np.transpose(A[sub], (0, 2, 1))  # (S, n, k)
            _, sv, vt = np.linalg.svd(M, full_matrices=True)
            # a one-dimensional null space needs rank k - 1
            rank_ok = np.sum(sv > 1e-9 * max(1.0, float(sv.max(initial=0.0))), axis=1) == k - 1
            v = vt[:, -1, :]
            v = v * np.sign(v[:, :1] + (v[:, :1] == 0))
            ok = rank_ok & np.all(v > 1e-9, axis=1)
            lam = np.zeros((int(ok.sum()), F))
            np.put_along_axis(lam, sub[ok], v[ok], axis=1)
            rows.append(lam)
    out = np.vstack(rows) if rows else np.zeros((0, F))
    if out.shape[0] == 0:
        raise InvalidBodyError("facet normals do not positively span the space")
    if len(_CIRCUITS) > 256:
        _CIRCUITS.clear()
    _CIRCUITS[key] = out
    return out


def diff_body_radial_batch(P: Polytope, thetas: np.ndarray, chunk: int = 512) -> np.ndarray:
    """rho_{D^m(P)} for direction tuples of shape (N, m, n), via the normal circuits."""
    lam = normal_circuits(P)
    # b.lam > 0 for every circuit (P has interior), so the min of (b.lam)/(c.lam) over c.lam > 0
    # is the reciprocal of the largest (c.lam)/(b.lam)
    scaled = (lam / (lam @ P.offsets)[:, None]).T  # (F, R)
    c = ray_rates(P, np.asarray(thetas, dtype=float))
    best = np.empty(c.shape[0])
    for s in range(0, c.shape[0], chunk):
        best[s : s + chunk] = (c[s : s + chunk] @ scaled).max(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(best > 0, 1.0 / best, np.inf)


def diff_body_radial(P: Polytope, theta) -> float:
    """rho_{D^m(P)}(theta) by linear programming.

    maximize r subject to A y <= b and A(y - r theta_i) <= b, i = 1..m.
    """
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    if not np.any(th):
        raise InvalidArgumentError("direction tuple must be nonzero")
    A, b = P.normals, P.offsets
    z = P.interior_point
    b0 = b - A @ z  # work with the interior point at the origin
    n = P.dim
    rows = [np.hstack([A, np.zeros((A.shape[0], 1))])]
    rhs = [b0]
    for t in th:
        rows.append(np.hstack([A, -(A @ t)[:, None]]))
        rhs.append(b0)
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = linprog_max(c, np.vstack(rows), np.concatenate(rhs), free=list(range(n)))
    if res.status == "unbounded":
        raise InvalidBodyError("difference body radial LP is unbounded")
    if not res.ok:
        raise InvalidBodyError(f"difference body radial LP failed: {res.status}")
    return float(res.x[-1])


class DifferenceBody:
    """D^m(P) in R^{nm} with a vectorized radial function.

    D^m(P) is the image of P^{m+1} under (y, z_1..z_m) -> (y - z_i)_i, hence
    the convex hull of finitely many vertex combinations; the hull is only
    built for the exact volume.  The radial function uses the normal circuits,
    and ``diff_body_radial`` is the primal LP route to the same numbers.
    """

    def __init__(self, P: Polytope, m: int):
        if m < 1:
            raise InvalidArgumentError("m must be >= 1")
        self.P, self.m = P, m
        self.n = P.dim

    @cached_property
    def points(self) -> np.ndarray:
        V = self.P.vertices
        combos = []
        for idx in itertools.product(range(V.shape[0]), repeat=self.m + 1):
            y = V[idx[0]]
            combos.append(np.concatenate([y - V[j] for j in idx[1:]]))
        pts = np.unique(np.round(np.array(combos), 12), axis=0)
        return pts

    @cached_property
    def _hull(self) -> ConvexHull:
        return ConvexHull(self.points)

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        if self.dim == 1:
            return np.array([[1.0], [-1.0]]), np.array([self.points.max(), -self.points.min()])
        eq = np.unique(np.round(self._hull.equations, 11), axis=0)
        A = eq[:, :-1]
        norms = np.linalg.norm(A, axis=1)
        return A / norms[:, None], -eq[:, -1] / norms

    @property
    def dim(self) -> int:
        return self.n * self.m

    def radial(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1, self.m, self.n)
        return diff_body_radial_batch(self.P, flat).reshape(u.shape[:-1])

    @cached_property
    def bounding_radius(self) -> float:
        # every point is y - z_i with y, z_i in P, so |x| <= sqrt(m) diam(P)
        V = self.P.vertices
        diam = float(np.max(np.linalg.norm(V[:, None, :] - V[None, :, :], axis=-1)))
        return math.sqrt(self.m) * diam

    def oracle(self) -> StarBody:
        return StarBody(self.dim, self.radial, self.bounding_radius, f"D^{self.m}({self.P.name})")

    def exact_volume(self) -> float:
        if self.dim == 1:
            return float(self.points.max() - self.points.min())
        return float(self._hull.volume)


def diff_body_volume(P: Polytope, m: int, count: int, seed: int) -> MCEstimate:
    """Vol_{nm}(D^m(P)) by the polar formula."""
    return star_body_volume(DifferenceBody(P, m).oracle(), count, seed)


@dataclass(frozen=True)
class DerivativeCheck:
    slope: float
    reference: float
    discrepancy: float


def richardson_zero(steps, values) -> float:
    """Polynomial extrapolation of values(h) to h = 0 (Neville)."""
    h = list(map(float, steps))
    p = list(map(float, values))
    k = len(h)
    for j in range(1, k):
        for i in range(k - 1, j - 1, -1):
            p[i] = (h[i - j] * p[i] - h[i] * p[i - 1]) / (h[i - j] - h[i])
    return p[-1]


def covariogram_derivative_check(P: Polytope, theta, steps=(1e-2, 5e-3, 2.5e-3)) -> DerivativeCheck:
    """One-sided slope of r -> g(r theta) at 0+ against -h_{Pi^m P}(theta)."""
    from .projection import proj_support

    th = np.atleast_2d(np.asarray(theta, dtype=float))
    steps = np.asarray(steps, dtype=float)
    if np.any(steps <= 0):
        raise InvalidArgumentError("steps must be positive")
    rho = diff_body_radial(P, th)
    if np.any(steps > rho):
        raise StepOutOfRangeError(f"step {steps.max()} exceeds the difference-body radius {rho}")
    g = covariogram_on_ray(P, th, np.concatenate([[0.0], steps]))
    quotients = (g[1:] - g[0]) / steps
    slope = richardson_zero(steps, quotients)
    ref = -float(proj_support(P, th))
    return DerivativeCheck(slope, ref, abs(slope - ref))


def is_simple_section_homothety(P: Polytope, theta, samples: int = 9) -> float:
    """Max deviation of g(r theta)^{1/n} from affine along the whole chord."""
    rho = diff_body_radial(P, theta)
    # g(rho theta) = 0 by continuity; evaluating it at the rounded rho would return
    # a ~1e-18 sliver whose n-th root dominates the check
    r = np.linspace(0.0, rho, samples)[:-1]
    g = covariogram_on_ray(P, theta, r) ** (1.0 / P.dim)
    line = g[0] * (1.0 - r / rho)
    return float(np.max(np.abs(g - line)))
