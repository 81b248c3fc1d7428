"""Polytopes, ellipsoids and segment hulls.

A :class:`Polytope` keeps its vertex list together with facet data derived
once at construction: unit outward normals ``u_F``, offsets ``b_F`` (the facet
lies on ``<x, u_F> = b_F``) and facet measures ``a_F``.  The facet data is the
discrete surface area measure, which is what mixed volumes and projection
bodies consume.

Ellipsoids are stored as ``E = T B + c``.  Segment hulls
``C = conv{o, theta_1, ..., theta_m}`` are never materialized; they carry a
closed-form support function and an exact first intrinsic volume.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, HalfspaceIntersection, QhullError

from .errors import DegenerateBodyError, InvalidArgumentError, InvalidBodyError, SingularMapError
from .quadrature import MCEstimate, StarBody, ball_volume, mc_sphere_integral, sample_simplices

ABS_TOL = 1e-9


def affine_rank(points: np.ndarray, tol: float = ABS_TOL) -> int:
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    scale = max(1.0, float(np.abs(pts).max()))
    return int(np.sum(s > tol * scale))


def _simplex_measure(pts: np.ndarray) -> float:
    """(k)-volume of a k-simplex given by k+1 points in R^n."""
    E = pts[1:] - pts[0]
    k = E.shape[0]
    g = np.linalg.det(E @ E.T)
    return math.sqrt(max(g, 0.0)) / math.factorial(k)


def _cluster_facets(eq: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Label hull simplices that lie on a common hyperplane."""
    labels = -np.ones(eq.shape[0], dtype=int)
    reps: list[np.ndarray] = []
    for i, e in enumerate(eq):
        for j, r in enumerate(reps):
            if np.max(np.abs(e - r)) < tol:
                labels[i] = j
                break
        else:
            labels[i] = len(reps)
            reps.append(e)
    return labels


@dataclass(frozen=True, eq=False)
class Polytope:
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    areas: np.ndarray
    name: str = field(default="", compare=False)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    @cached_property
    def volume(self) -> float:
        z = self.vertices.mean(axis=0)
        return float(np.dot(self.offsets - self.normals @ z, self.areas) / self.dim)

    @property
    def surface_area(self) -> float:
        return float(self.areas.sum())

    @cached_property
    def interior_point(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def support(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.max(u @ self.vertices.T, axis=-1)

    def contains(self, x: np.ndarray, tol: float = ABS_TOL) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.normals.T <= self.offsets + tol, axis=-1)

    def radial(self, u: np.ndarray) -> np.ndarray:
        """Radial function about the origin, which must be interior."""
        if np.any(self.offsets <= ABS_TOL):
            raise InvalidBodyError("radial function needs the origin in the interior")
        u = np.asarray(u, dtype=float)
        dots = u @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(dots > 0, self.offsets / dots, np.inf)
        return np.min(r, axis=-1)

    def as_star(self) -> StarBody:
        R = float(np.max(np.linalg.norm(self.vertices, axis=1)))
        sampler = None
        if self.dim >= 2:
            simplices = self.vertices[Delaunay(self.vertices).simplices]
            sampler = lambda count, seed: sample_simplices(simplices, count, seed)  # noqa: E731
        return StarBody(self.dim, self.radial, R, self.name, sampler)

    def translate(self, x: np.ndarray) -> "Polytope":
        x = np.asarray(x, dtype=float)
        return Polytope(self.vertices + x, self.normals, self.offsets + self.normals @ x, self.areas, self.name)

    def scale(self, c: float) -> "Polytope":
        if c <= 0:
            raise InvalidArgumentError("scale factor must be positive")
        return Polytope(self.vertices * c, self.normals, self.offsets * c, self.areas * c ** (self.dim - 1),
                        self.name)

    def reflect(self) -> "Polytope":
        return Polytope(-self.vertices, -self.normals, self.offsets, self.areas, f"-{self.name}")

    def centered(self) -> "Polytope":
        """Translate so the vertex mean sits at the origin."""
        return self.translate(-self.interior_point)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Vertex index pairs spanning edges (pairs sharing n-1 independent facets)."""
        n = self.dim
        if n == 1:
            return [(0, 1)]
        on = np.abs(self.vertices @ self.normals.T - self.offsets) <= 1e-7 * max(1.0, np.abs(self.offsets).max())
        out = []
        for i, j in itertools.combinations(range(self.vertices.shape[0]), 2):
            common = np.flatnonzero(on[i] & on[j])
            if common.size >= n - 1 and np.linalg.matrix_rank(self.normals[common], tol=1e-9) == n - 1:
                out.append((i, j))
        return out


def hull_from_vertices(points, name: str = "") -> Polytope:
    """Convex hull with facet normals, offsets and measures."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidArgumentError("points must be a non-empty (k, n) array")
    n = pts.shape[1]
    rank = affine_rank(pts)
    if rank < n:
        raise DegenerateBodyError(f"points span an affine subspace of dimension {rank} < {n}", achieved_dim=rank)
    if n == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return Polytope(np.array([[lo], [hi]]), np.array([[-1.0], [1.0]]), np.array([-lo, hi]),
                        np.array([1.0, 1.0]), name)
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:  # pragma: no cover - rank test above catches the usual cases
        raise DegenerateBodyError(str(exc), achieved_dim=rank) from exc
    eq = hull.equations
    labels = _cluster_facets(eq)
    k = labels.max() + 1
    normals = np.zeros((k, n))
    offsets = np.zeros(k)
    areas = np.zeros(k)
    for lab in range(k):
        rows = np.flatnonzero(labels == lab)
        e = eq[rows].mean(axis=0)
        nn = np.linalg.norm(e[:n])
        normals[lab] = e[:n] / nn
        offsets[lab] = -e[n] / nn
        areas[lab] = sum(_simplex_measure(pts[hull.simplices[r]]) for r in rows)
    verts = pts[np.sort(hull.vertices)]
    P = Polytope(verts, normals, offsets, areas, name)
    scale = max(1.0, float(areas.sum()))
    if np.linalg.norm(areas @ normals) > 1e-7 * scale:
        raise InvalidBodyError("facet data failed the closedness check")
    return P


def polytope_from_halfspaces(A, b, interior=None, name: str = "") -> Polytope:
    """Bounded polytope {x : A x <= b}; ``interior`` must be strictly inside."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    if n == 1:
        a = A[:, 0]
        hi = np.min(b[a > 0] / a[a > 0])
        lo = np.max(b[a < 0] / a[a < 0])
        return hull_from_vertices([[lo], [hi]], name)
    if interior is None:
        from .lp import chebyshev_center
        interior, radius = chebyshev_center(A, b)
        if radius <= ABS_TOL:
            raise DegenerateBodyError("halfspace system has empty interior", achieved_dim=None)
    hs = np.hstack([A, -b[:, None]])
    verts = HalfspaceIntersection(hs, np.asarray(interior, dtype=float)).intersections
    return hull_from_vertices(verts, name)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """E = T B + c."""

    center: np.ndarray
    factor: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.factor, dtype=float))
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if T.shape != (c.size, c.size):
            raise InvalidArgumentError("factor must be square and match the center")
        if abs(np.linalg.det(T)) < 1e-12:
            raise SingularMapError("ellipsoid factor is singular")
        object.__setattr__(self, "factor", T)
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def volume(self) -> float:
        return abs(float(np.linalg.det(self.factor))) * ball_volume(self.dim)

    @cached_property
    def is_ball(self) -> bool:
        G = self.factor.T @ self.factor
        return bool(np.allclose(G, G[0, 0] * np.eye(self.dim), rtol=1e-12, atol=1e-14))

    @cached_property
    def surface_area(self) -> float:
        n = self.dim
        if n == 1:
            return 2.0
        if self.is_ball:
            R = math.sqrt(float((self.factor.T @ self.factor)[0, 0]))
            return n * ball_volume(n) * R ** (n - 1)
        s = np.linalg.svd(self.factor, compute_uv=False)
        if n == 2:
            from scipy.special import ellipe
            a, b = float(s[0]), float(s[1])
            return 4 * a * float(ellipe(1 - (b / a) ** 2))
        # S(TB) = |det T| * integral over the sphere of |T^{-t} v|; depends on singular values only
        from scipy import integrate
        if n == 3:
            a, b, c = (float(x) for x in s)

            def f(phi, t):  # t = cos(polar angle)
                st = math.sqrt(max(1 - t * t, 0.0))
                v = np.array([st * math.cos(phi) / a, st * math.sin(phi) / b, t / c])
                return float(np.linalg.norm(v))

            val, _ = integrate.dblquad(f, -1, 1, 0, 2 * math.pi, epsabs=1e-12, epsrel=1e-11)
            return a * b * c * val
        raise NotImplementedError("surface area of a non-spherical ellipsoid needs n <= 3")

    def support(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return u @ self.center + np.linalg.norm(u @ self.factor, axis=-1)

    def radial(self, u: np.ndarray) -> np.ndarray:
        """Radial function about the origin (must be interior)."""
        Tinv = np.linalg.inv(self.factor)
        u = np.asarray(u, dtype=float)
        w = u @ Tinv.T
        c = Tinv @ self.center
        # solve |lam w - c| = 1 for the positive root
        a = np.sum(w * w, axis=-1)
        bb = -2 * (w @ c)
        cc = float(c @ c) - 1.0
        if cc >= 0:
            raise InvalidBodyError("radial function needs the origin in the interior")
        return (-bb + np.sqrt(bb * bb - 4 * a * cc)) / (2 * a)

    def as_star(self) -> StarBody:
        R = float(np.linalg.norm(self.center) + np.linalg.svd(self.factor, compute_uv=False)[0])
        return StarBody(self.dim, self.radial, R, self.name)

    def translate(self, x) -> "Ellipsoid":
        return Ellipsoid(self.center + np.asarray(x, dtype=float), self.factor, self.name)


def segment_hull_support(thetas: np.ndarray, u: np.ndarray) -> np.ndarray:
    """h_C(u) = max(0, max_i <theta_i, u>) for C = conv{o, theta_i}.

    ``thetas`` has shape (..., m, n) and ``u`` broadcasts against (..., n).
    """
    thetas = np.asarray(thetas, dtype=float)
    u = np.asarray(u, dtype=float)
    dots = np.einsum("...in,...n->...i", thetas, u)
    return np.maximum(0.0, dots.max(axis=-1))


@dataclass(frozen=True)
class SegmentHull:
    """C = conv{o, theta_1, ..., theta_m}; possibly lower-dimensional."""

    thetas: np.ndarray

    def support(self, u: np.ndarray) -> np.ndarray:
        return segment_hull_support(self.thetas, u)

    @property
    def dim(self) -> int:
        return np.asarray(self.thetas).shape[-1]

    def first_intrinsic_volume(self) -> float:
        return float(segment_hull_v1(np.asarray(self.thetas)[None])[0])

    def mean_width(self) -> float:
        return float(v1_to_mean_width(self.first_intrinsic_volume(), self.dim))


def v1_to_mean_width(v1, n: int):
    """Mean width normalized so that w(B^n) = 1, from the first intrinsic volume."""
    return v1 * ball_volume(n - 1) / (n * ball_volume(n))


def _planar_hull_perimeter(pts: np.ndarray) -> float:
    """Perimeter of the convex hull of a few coplanar points (counted twice if collinear)."""
    c = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(c, full_matrices=False)
    scale = max(float(s[0]), 1e-300)
    if s.size < 2 or s[1] <= 1e-12 * scale:
        proj = c @ vt[0]
        return 2.0 * float(proj.max() - proj.min())
    q = c @ vt[:2].T
    hull = ConvexHull(q)
    return float(hull.area)  # in 2-D ``area`` is the perimeter


def segment_hull_v1(thetas: np.ndarray) -> np.ndarray:
    """First intrinsic volume of conv{o, theta_1, ..., theta_m}, batched.

    ``thetas`` has shape (N, m, n).  The value does not depend on the ambient
    dimension, which is what makes the ball's higher-order projection body
    computable in closed form.  Exact for m <= 3; larger m raises.
    """
    th = np.asarray(thetas, dtype=float)
    N, m, n = th.shape
    if m == 1:
        return np.linalg.norm(th[:, 0], axis=1)
    if m == 2:
        a, b = th[:, 0], th[:, 1]
        return 0.5 * (np.linalg.norm(a, axis=1) + np.linalg.norm(b, axis=1) + np.linalg.norm(a - b, axis=1))
    if m != 3:
        raise InvalidArgumentError("exact first intrinsic volume is implemented for m <= 3")
    out = np.empty(N)
    P = np.concatenate([np.zeros((N, 1, n)), th], axis=1)  # (N, 4, n)
    if n >= 3:
        G = np.einsum("kin,kjn->kij", th, th)
        vol6 = np.sqrt(np.clip(np.linalg.det(G), 0.0, None))
        scale = np.max(np.linalg.norm(th, axis=2), axis=1)
        solid = vol6 > 1e-10 * np.maximum(scale, 1e-300) ** 3
    else:
        solid = np.zeros(N, dtype=bool)
    if solid.any():
        Q = P[solid]
        tot = np.zeros(Q.shape[0])
        for a, b in itertools.combinations(range(4), 2):
            c, d = (k for k in range(4) if k not in (a, b))
            e = Q[:, b] - Q[:, a]
            le = np.linalg.norm(e, axis=1)
            eh = e / le[:, None]
            w1 = Q[:, c] - Q[:, a]
            w2 = Q[:, d] - Q[:, a]
            w1 = w1 - np.sum(w1 * eh, axis=1)[:, None] * eh
            w2 = w2 - np.sum(w2 * eh, axis=1)[:, None] * eh
            cosang = np.sum(w1 * w2, axis=1) / (np.linalg.norm(w1, axis=1) * np.linalg.norm(w2, axis=1))
            alpha = np.arccos(np.clip(cosang, -1.0, 1.0))
            tot += le * (math.pi - alpha)
        out[solid] = tot / (2 * math.pi)
    for k in np.flatnonzero(~solid):
        out[k] = 0.5 * _planar_hull_perimeter(P[k])
    return out


Body = Union[Polytope, Ellipsoid]


def support(body, u) -> np.ndarray:
    if isinstance(body, SegmentHull):
        return body.support(u)
    return body.support(u)


def radial_polytope(P: Polytope, u) -> np.ndarray:
    return P.radial(u)


def volume(body) -> float:
    return float(body.volume)


def surface_area(body) -> float:
    return float(body.surface_area)


def mixed_volume_first(P: Polytope, L) -> float:
    """V(P[n-1], L) = (1/n) * sum_F h_L(u_F) a_F."""
    h = np.asarray(L.support(P.normals) if not callable(L) else L(P.normals), dtype=float)
    return float(np.dot(h, P.areas) / P.dim)


def mean_width(body, count: int, seed: int) -> MCEstimate:
    """MC estimate of (1/(n kappa_n)) * integral of h over S^{n-1}."""
    n = body.dim
    est = mc_sphere_integral(lambda u: body.support(u), n, count, seed)
    return est.scaled(1.0 / (n * ball_volume(n)))


def lift(T, m: int) -> np.ndarray:
    """Block-diagonal map acting as T on each of the m blocks of R^{nm}."""
    return np.kron(np.eye(m), np.asarray(T, dtype=float))


def apply_linear(body, T):
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if abs(np.linalg.det(T)) < 1e-12:
        raise SingularMapError("linear map is singular")
    if isinstance(body, Polytope):
        return hull_from_vertices(body.vertices @ T.T, body.name)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(T @ body.center, T @ body.factor, body.name)
    if isinstance(body, SegmentHull):
        return SegmentHull(np.asarray(body.thetas) @ T.T)
    if isinstance(body, StarBody):
        return body.linear_image(T)
    raise InvalidArgumentError(f"cannot apply a linear map to {type(body).__name__}")


# ---- constructors -----------------------------------------------------------

def unit_cube(n: int) -> Polytope:
    return hull_from_vertices(np.array(list(itertools.product([0.0, 1.0], repeat=n))), f"cube{n}")


def symmetric_cube(n: int, half: float = 1.0) -> Polytope:
    return hull_from_vertices(half * np.array(list(itertools.product([-1.0, 1.0], repeat=n))), f"box{n}")


def simplex(n: int) -> Polytope:
    return hull_from_vertices(np.vstack([np.zeros(n), np.eye(n)]), f"simplex{n}")


def cross_polytope(n: int) -> Polytope:
    return hull_from_vertices(np.vstack([np.eye(n), -np.eye(n)]), f"cross{n}")


def regular_polygon(k: int, radius: float = 1.0) -> Polytope:
    phi = 2 * np.pi * np.arange(k) / k
    return hull_from_vertices(radius * np.column_stack([np.cos(phi), np.sin(phi)]), f"{k}-gon")


def random_polytope(n: int, seed: int, count: int | None = None) -> Polytope:
    """Hull of random points on a sphere, rejected until every edge is >= 0.3 long."""
    rng = np.random.default_rng(seed)
    count = count or {1: 2, 2: 7, 3: 9, 4: 10}.get(n, 2 * n + 2)
    while True:
        g = rng.standard_normal((count, n))
        pts = g / np.linalg.norm(g, axis=1)[:, None]
        try:
            P = hull_from_vertices(pts, f"random{n}-{seed}")
        except DegenerateBodyError:
            continue
        if all(np.linalg.norm(P.vertices[i] - P.vertices[j]) >= 0.3 for i, j in P.edges):
            return P


def smoothed_polygon(vertices, eps: float = 0.05, k: int = 16) -> Polytope:
    """Polygon approximating (vertex hull) + eps * disk."""
    v = np.asarray(vertices, dtype=float)
    phi = 2 * np.pi * np.arange(k) / k
    disk = eps * np.column_stack([np.cos(phi), np.sin(phi)])
    return hull_from_vertices((v[:, None, :] + disk[None]).reshape(-1, 2), "smoothed")


def ball(n: int, radius: float = 1.0) -> Ellipsoid:
    return Ellipsoid(np.zeros(n), radius * np.eye(n), f"ball{n}")
