"""Classical and higher-order Steiner symmetrization.

Classical: S P = {x + t xi : x in xi-perp, |t| <= len(x)/2} where len(x) is the
length of the chord of P through x parallel to xi.

Higher order, for L in R^{nm} and z = (x_i + r_i xi)_i with x_i in xi-perp:
z is a member when there are t, s in R^m with (x_i + t_i xi)_i in L,
(x_i + s_i xi)_i in L and t - s = 2r.  For L = {A z <= q} this is the
feasibility of the m-variable system

    M t <= q - A x - 2 (M r)_-,      M = A Xi,

where Xi places xi in each block.  Geometrically, z = (p + R q') / 2 for
p, q' in L and R the blockwise reflection in xi-perp, so the symmetral lies
in (L + R L) / 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bodies import ABS_TOL, Polytope, hull_from_vertices
from .errors import InvalidArgumentError, PrecisionFailure
from .lp import linprog_max, linprog_min
from .projection import HigherProjBody, polar_oracle
from .quadrature import MCEstimate, mc_sphere_integral, uniform_stream

MEMBER_TOL = 1e-9


def _unit(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(-1)
    nx = np.linalg.norm(xi)
    if nx == 0:
        raise InvalidArgumentError("symmetrization direction must be nonzero")
    return xi / nx


def perp_basis(xi: np.ndarray) -> np.ndarray:
    """Orthonormal basis of xi-perp as the columns of an (n, n-1) matrix."""
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(xi.size)]))
    return q[:, 1 : xi.size]


# ---- classical ---------------------------------------------------------------

def chord(P: Polytope, x, xi) -> tuple[np.ndarray, np.ndarray]:
    """Parameter range [lo, hi] of P cap (x + R xi) for points x (N, n); lo > hi when empty."""
    xi = _unit(xi)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    a = P.normals @ xi
    slack = P.offsets - x @ P.normals.T
    pos, neg = a > ABS_TOL, a < -ABS_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = np.where(pos, slack / np.where(pos, a, 1.0), np.inf).min(axis=1)
        lo = np.where(neg, slack / np.where(neg, a, 1.0), -np.inf).max(axis=1)
    flat = ~(pos | neg)
    if flat.any():
        out = (slack[:, flat] < -MEMBER_TOL).any(axis=1)
        lo = np.where(out, np.inf, lo)
        hi = np.where(out, -np.inf, hi)
    return lo, hi


def chord_lp(P: Polytope, x, xi) -> tuple[float, float]:
    """Same chord from two linear programs over t."""
    xi = _unit(xi)
    x = np.asarray(x, dtype=float)
    A = (P.normals @ xi)[:, None]
    b = P.offsets - P.normals @ x
    hi = linprog_max([1.0], A, b, free=[0])
    lo = linprog_min([1.0], A, b, free=[0])
    if not (hi.ok and lo.ok):
        return math.inf, -math.inf
    return lo.value, hi.value


@dataclass(frozen=True)
class SteinerSymmetral:
    P: Polytope
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", _unit(self.xi))

    @property
    def dim(self) -> int:
        return self.P.dim

    @property
    def volume(self) -> float:
        # chords keep their lengths, so Fubini gives the volume of P
        return self.P.volume

    def chord_length(self, x) -> np.ndarray:
        lo, hi = chord(self.P, x, self.xi)
        return np.maximum(hi - lo, 0.0)

    def contains(self, z, tol: float = MEMBER_TOL) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        t = z @ self.xi
        x = z - t[:, None] * self.xi
        lo, hi = chord(self.P, x, self.xi)
        return (hi >= lo - tol) & (2 * np.abs(t) <= hi - lo + tol)

    @cached_property
    def polytope(self) -> Polytope:
        return steiner(self.P, self.xi)


def _segment_crossings(S: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Intersection points of planar segments S[i] -> E[i]."""
    d = E - S
    i, j = np.triu_indices(S.shape[0], 1)
    den = d[i, 0] * d[j, 1] - d[i, 1] * d[j, 0]
    ok = np.abs(den) > 1e-14
    i, j, den = i[ok], j[ok], den[ok]
    w = S[j] - S[i]
    s = (w[:, 0] * d[j, 1] - w[:, 1] * d[j, 0]) / den
    u = (w[:, 0] * d[i, 1] - w[:, 1] * d[i, 0]) / den
    hit = (s > 0) & (s < 1) & (u > 0) & (u < 1)
    return S[i[hit]] + s[hit, None] * d[i[hit]]


def _dedupe(pts: np.ndarray, tol: float) -> np.ndarray:
    keep: list[np.ndarray] = []
    for p in pts:
        if not any(np.max(np.abs(p - q)) <= tol for q in keep):
            keep.append(p)
    return np.array(keep)


def steiner(P: Polytope, xi) -> Polytope:
    """S_xi P as a polytope.

    The chord length is concave and affine on each cell of the overlay of the
    projected upper and lower boundaries, so S_xi P is the hull of
    (x, +-len(x)/2) over the cell vertices: projected vertices and crossings
    of projected edges.  Exact for n <= 3; for n = 4 edge midpoints are added
    and the result is an inner approximation.
    """
    xi = _unit(xi)
    n = P.dim
    if n == 1:
        w = float(P.vertices.max() - P.vertices.min())
        return hull_from_vertices([[-w / 2], [w / 2]], f"S({P.name})")
    B = perp_basis(xi)
    Y = P.vertices @ B
    base = [Y]
    if n == 3:
        e = np.array(P.edges)
        base.append(_segment_crossings(Y[e[:, 0]], Y[e[:, 1]]))
    elif n >= 4:
        e = np.array(P.edges)
        base.append(0.5 * (Y[e[:, 0]] + Y[e[:, 1]]))
    Y = _dedupe(np.vstack(base), 1e-9 * max(1.0, float(np.abs(Y).max())))
    X = Y @ B.T
    lo, hi = chord(P, X, xi)
    half = 0.5 * np.maximum(hi - lo, 0.0)
    pts = np.vstack([X + half[:, None] * xi, X - half[:, None] * xi])
    return hull_from_vertices(pts, f"S({P.name})")


# ---- higher order --------------------------------------------------------------

def _block_xi(xi: np.ndarray, m: int) -> np.ndarray:
    n = xi.size
    Xi = np.zeros((n * m, m))
    for i in range(m):
        Xi[i * n : (i + 1) * n, i] = xi
    return Xi


class HigherSymmetral:
    """Membership oracle for the higher-order symmetral of a polytope L in R^{nm}."""

    ENUM_LIMIT = 20_000

    def __init__(self, L: Polytope, xi, m: int):
        xi = _unit(xi)
        if L.dim != xi.size * m:
            raise InvalidArgumentError(f"L must live in R^{xi.size * m}")
        self.L, self.xi, self.m, self.n = L, xi, m, xi.size
        self.Xi = _block_xi(xi, m)
        self.M = L.normals @ self.Xi  # (F, m)

    @cached_property
    def _subsets(self):
        F, m = self.M.shape
        subs, invs = [], []
        for S in itertools.combinations(range(F), m):
            MS = self.M[list(S)]
            if abs(np.linalg.det(MS)) > 1e-10:
                subs.append(S)
                invs.append(np.linalg.inv(MS))
        return np.array(subs, dtype=int).reshape(-1, m), np.array(invs).reshape(-1, m, m)

    def decompose(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """z = xbar + Xi r with every block of xbar orthogonal to xi."""
        r = z.reshape(z.shape[0], self.m, self.n) @ self.xi
        return z - r @ self.Xi.T, r

    def rhs(self, z: np.ndarray) -> np.ndarray:
        xbar, r = self.decompose(z)
        Mr = r @ self.M.T
        return self.L.offsets - xbar @ self.L.normals.T - 2 * np.maximum(0.0, -Mr)

    def contains(self, z, tol: float = MEMBER_TOL, chunk: int = 2048) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        c = self.rhs(z)
        if self.m == 1:
            a = self.M[:, 0]
            pos, neg = a > ABS_TOL, a < -ABS_TOL
            hi = np.where(pos, c / np.where(pos, a, 1.0), np.inf).min(axis=1)
            lo = np.where(neg, c / np.where(neg, a, 1.0), -np.inf).max(axis=1)
            flat_ok = np.all(c[:, ~(pos | neg)] >= -tol, axis=1)
            return flat_ok & (lo <= hi + tol)
        subs, invs = self._subsets
        if subs.shape[0] <= self.ENUM_LIMIT:
            out = np.zeros(z.shape[0], dtype=bool)
            step = max(1, chunk * 64 // max(1, subs.shape[0]))
            for s in range(0, z.shape[0], step):
                cs = c[s : s + step]
                T = np.einsum("kij,Nkj->Nki", invs, cs[:, subs])  # (N, S, m)
                viol = T @ self.M.T - cs[:, None, :]
                out[s : s + step] = np.any(np.all(viol <= tol, axis=2), axis=1)
            return out
        return np.array([self._feasible_lp(ci) for ci in c])

    def _feasible_lp(self, c: np.ndarray) -> bool:
        res = linprog_min(np.zeros(self.m), self.M, c, free=list(range(self.m)))
        if res.status == "iteration-limit":
            raise PrecisionFailure("membership LP did not converge")
        return res.ok

    @cached_property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Box around (L + R L) / 2, which contains the symmetral."""
        V = self.L.vertices
        R = np.eye(self.L.dim) - 2 * self.Xi @ self.Xi.T
        RV = V @ R.T
        return 0.5 * (V.min(axis=0) + RV.min(axis=0)), 0.5 * (V.max(axis=0) + RV.max(axis=0))


def higher_steiner_membership(L: Polytope, xi, z, m: int | None = None) -> np.ndarray | bool:
    xi = _unit(xi)
    m = m or L.dim // xi.size
    res = HigherSymmetral(L, xi, m).contains(z)
    return bool(res[0]) if np.ndim(z) == 1 else res


def box_volume(contains, lo: np.ndarray, hi: np.ndarray, count: int, seed: int) -> MCEstimate:
    """Hit-or-miss volume inside the box [lo, hi]."""
    U = uniform_stream(lo.size, count, seed)
    hits = contains(lo + U * (hi - lo)).astype(float)
    box = float(np.prod(hi - lo))
    p = float(hits.mean())
    return MCEstimate(box * p, box * math.sqrt(p * (1 - p) / count), count, seed)


def higher_steiner_volume(L: Polytope, xi, count: int, seed: int, m: int | None = None) -> MCEstimate:
    xi = _unit(xi)
    m = m or L.dim // xi.size
    S = HigherSymmetral(L, xi, m)
    lo, hi = S.bounding_box
    return box_volume(S.contains, lo, hi, count, seed)


# ---- inclusion check and Petty step -----------------------------------------

def symmetral_polar_radial(K: Polytope, xi, theta, m: int) -> float:
    """Radial function of the higher-order symmetral of polar Pi^m K at theta.

    One LP in (lam, t, w, w'): both fibre points lam*y + Xi t and
    lam*y + Xi (t - 2 lam r) must satisfy h_{Pi^m K} <= 1, written with
    w_F >= <p_i, u_F>_- and sum a_F w_F <= 1.
    """
    xi = _unit(xi)
    n = K.dim
    th = np.asarray(theta, dtype=float).reshape(m, n)
    r = th @ xi
    y = th - r[:, None] * xi
    U, a = K.normals, K.areas
    F = U.shape[0]
    yu = y @ U.T  # (m, F)
    xu = U @ xi  # (F,)
    nv = 1 + m + 2 * F
    rows, rhs = [], []
    for i in range(m):
        for f in range(F):
            row = np.zeros(nv)  # -<lam y_i + t_i xi, u_f> - w_f <= 0
            row[0] = -yu[i, f]
            row[1 + i] = -xu[f]
            row[1 + m + f] = -1.0
            rows.append(row)
            rhs.append(0.0)
            row = np.zeros(nv)  # second point: t_i replaced by t_i - 2 lam r_i
            row[0] = -yu[i, f] + 2 * r[i] * xu[f]
            row[1 + i] = -xu[f]
            row[1 + m + F + f] = -1.0
            rows.append(row)
            rhs.append(0.0)
    for off in (1 + m, 1 + m + F):
        row = np.zeros(nv)
        row[off : off + F] = a
        rows.append(row)
        rhs.append(1.0)
    c = np.zeros(nv)
    c[0] = 1.0
    res = linprog_max(c, np.array(rows), np.array(rhs), free=list(range(1, 1 + m)))
    if not res.ok:
        raise PrecisionFailure(f"symmetral radial LP ended with status {res.status}")
    return float(res.x[0])


@dataclass(frozen=True)
class InclusionRow:
    theta: np.ndarray
    left: float
    right: float

    @property
    def margin(self) -> float:
        """Relative slack (right - left) / right; negative means a violation."""
        return (self.right - self.left) / self.right


def steiner_inclusion_check(K: Polytope, xi, directions, m: int) -> list[InclusionRow]:
    """Compare the symmetral of polar Pi^m K with polar Pi^m of S_xi K along directions."""
    xi = _unit(xi)
    SK = steiner(K, xi)
    H = HigherProjBody(SK, m)
    out = []
    for th in np.atleast_2d(np.asarray(directions, dtype=float)):
        left = symmetral_polar_radial(K, xi, th, m)
        right = 1.0 / float(H.support_flat(th[None])[0])
        out.append(InclusionRow(th, left, right))
    return out


@dataclass(frozen=True)
class PettyStep:
    before: MCEstimate
    after: MCEstimate
    increase: MCEstimate  # paired estimate of after - before


def petty_step(K: Polytope, xi, m: int, count: int, seed: int) -> PettyStep:
    """Petty product of K and of S_xi K on common sphere samples."""
    n = K.dim
    d = n * m
    SK = steiner(K, xi)
    A, B = polar_oracle(K, m, seed), polar_oracle(SK, m, seed)
    scale = K.volume ** (d - m)
    before = mc_sphere_integral(lambda u: A.radial_checked(u) ** d / d, d, count, seed).scaled(scale)
    after = mc_sphere_integral(lambda u: B.radial_checked(u) ** d / d, d, count, seed).scaled(SK.volume ** (d - m))
    diff = mc_sphere_integral(
        lambda u: (SK.volume ** (d - m) * B.radial_checked(u) ** d - scale * A.radial_checked(u) ** d) / d,
        d, count, seed)
    return PettyStep(before, after, diff)
