"""Higher-order centroid bodies, dual mixed volumes and random-simplex expectations.

For a star body L in R^{nm} the centroid body has support

    h(theta) = mean over x uniform in L of max_i <x_i, theta>_-

which is the support function of C_{-x} = conv{o, -x_1, ..., -x_m} averaged
over L.  With a fixed sample the estimate is therefore itself the support
function of a convex body: the Minkowski average of the sampled C_{-x}.  Two
consequences are used throughout:

* V(K[n-1], C_{-x}) = h_{Pi^m K}(x) / n, so mixed volumes against the
  centroid body are sample means of projection-body supports.
* In the plane the Minkowski average is a polygon whose area is computed
  exactly from its sorted edge vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .errors import DegenerateBodyError, InvalidArgumentError
from .projection import polar_oracle, proj_support
from .quadrature import MCEstimate, StarBody, ball_volume, mc_sphere_integral, sample_star_body, sphere_sample, star_body_volume

BATCHES = 8


def _split(L: StarBody, theta) -> tuple[np.ndarray, int, int]:
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    n = th.shape[-1]
    if L.dim % n:
        raise InvalidArgumentError(f"body dimension {L.dim} is not a multiple of {n}")
    if np.any(np.linalg.norm(th, axis=-1) == 0):
        raise InvalidArgumentError("direction must be nonzero")
    return th, n, L.dim // n


def _mean_se(vals: np.ndarray) -> tuple[float, float]:
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def one_sided_max(X: np.ndarray, thetas: np.ndarray, chunk: int = 64) -> np.ndarray:
    """max_i <x_i, theta>_- for samples X (N, m, n) and directions (k, n) -> (N, k)."""
    N, m, n = X.shape
    flat = X.reshape(N * m, n)
    out = np.empty((N, thetas.shape[0]))
    for s in range(0, thetas.shape[0], chunk):
        dots = (flat @ thetas[s : s + chunk].T).reshape(N, m, -1)
        out[:, s : s + chunk] = np.maximum(0.0, -dots.min(axis=1))
    return out


def centroid_support(L: StarBody, theta, count: int, seed: int) -> MCEstimate:
    """h_{Gamma^m L}(theta) for a single direction theta in R^n."""
    th, n, m = _split(L, theta)
    X = sample_star_body(L, count, seed).reshape(count, m, n)
    mean, se = _mean_se(one_sided_max(X, th[:1])[:, 0])
    return MCEstimate(mean, se, count, seed)


def moment_support(L: StarBody, theta, count: int, seed: int) -> MCEstimate:
    """h_{M^m L}(theta) = Vol(L) h_{Gamma^m L}(theta)."""
    h = centroid_support(L, theta, count, seed)
    vol = star_body_volume(L, count, seed)
    value = vol.value * h.value
    se = math.hypot(vol.value * h.std_error, h.value * vol.std_error)
    return MCEstimate(value, se, count, seed)


@dataclass(frozen=True)
class CentroidVolume:
    estimate: MCEstimate
    approx_bound: float  # half-width of the polytopal sandwich (0 when exact)


class CentroidBody:
    """Gamma^m L from one fixed sample of L; every query reuses the sample."""

    def __init__(self, L: StarBody, m: int, count: int, seed: int):
        if L.dim % m:
            raise InvalidArgumentError(f"body dimension {L.dim} is not a multiple of m={m}")
        self.L, self.m, self.n = L, m, L.dim // m
        self.count, self.seed = int(count), int(seed)

    @cached_property
    def samples(self) -> np.ndarray:
        return sample_star_body(self.L, self.count, self.seed).reshape(self.count, self.m, self.n)

    def support(self, thetas) -> np.ndarray:
        th = np.atleast_2d(np.asarray(thetas, dtype=float))
        return one_sided_max(self.samples, th).mean(axis=0)

    def support_estimates(self, thetas) -> list[MCEstimate]:
        th = np.atleast_2d(np.asarray(thetas, dtype=float))
        vals = one_sided_max(self.samples, th)
        se = vals.std(axis=0, ddof=1) / math.sqrt(self.count)
        return [MCEstimate(float(v), float(s), self.count, self.seed) for v, s in zip(vals.mean(axis=0), se)]

    def mixed_volume(self, K) -> MCEstimate:
        """V(K[n-1], Gamma^m L) = E h_{Pi^m K}(x) / n."""
        if K.dim != self.n:
            raise InvalidArgumentError("K must live in R^n")
        mean, se = _mean_se(np.asarray(proj_support(K, self.samples), dtype=float) / self.n)
        return MCEstimate(mean, se, self.count, self.seed)

    def volume(self, directions: int = 1000) -> CentroidVolume:
        """Vol_n(Gamma^m L) with a batch-replicate standard error."""
        X = self.samples
        bounds = np.linspace(0, X.shape[0], BATCHES + 1).astype(int)
        if self.n <= 2:
            full, approx = _average_body_volume(X, directions, self.seed)
            parts = [_average_body_volume(X[a:b], directions, self.seed)[0] for a, b in zip(bounds, bounds[1:])]
        else:
            # one pass gives support data for every batch; the full sample is their weighted mean
            U = sphere_sample(self.n, directions, self.seed)
            H, PTS = _batch_support_data(X, U, bounds)
            sizes = np.diff(bounds).astype(float)
            w = sizes / sizes.sum()
            full, approx = _sandwich_volume(U, np.tensordot(w, H, 1), np.tensordot(w, PTS, 1))
            parts = [_sandwich_volume(U, h, pts)[0] for h, pts in zip(H, PTS)]
        se = float(np.std(parts, ddof=1) / math.sqrt(BATCHES))
        return CentroidVolume(MCEstimate(full, se, self.count, self.seed), approx)


# ---- volume of a Minkowski average of segment hulls ---------------------------

def _planar_edges(X: np.ndarray) -> np.ndarray:
    """Counter-clockwise edge vectors of conv{o, -x_1, ..., -x_m}, stacked."""
    N, m, _ = X.shape
    Q = np.concatenate([np.zeros((N, 1, 2)), -X], axis=1)  # (N, m+1, 2)
    k = m + 1
    if k >= 4:
        # a point inside the triangle of three others is not a hull vertex
        for j in range(k):
            others = [i for i in range(k) if i != j]
            for tri in _triples(others):
                a, b, c = (Q[:, t] for t in tri)
                p = Q[:, j]
                s1, s2, s3 = _cross(b - a, p - a), _cross(c - b, p - b), _cross(a - c, p - c)
                inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
                Q[inside, j] = np.nan
    c = np.nanmean(Q, axis=1)
    ang = np.arctan2(Q[..., 1] - c[:, None, 1], Q[..., 0] - c[:, None, 0])
    ang = np.where(np.isnan(ang), np.inf, ang)
    order = np.argsort(ang, axis=1)
    S = np.take_along_axis(Q, order[..., None], axis=1)
    # fill removed points with the last valid one so their edges vanish
    for j in range(1, k):
        bad = np.isnan(S[:, j, 0])
        S[bad, j] = S[bad, j - 1]
    E = np.roll(S, -1, axis=1) - S
    return E.reshape(-1, 2)


def _triples(idx):
    import itertools
    return itertools.combinations(idx, 3)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]


def minkowski_average_area(X: np.ndarray) -> float:
    """Exact area of (1/N) sum_k conv{o, -x_k1, ..., -x_km} in the plane."""
    E = _planar_edges(X) / X.shape[0]
    E = E[np.any(E != 0, axis=1)]
    E = E[np.argsort(np.arctan2(E[:, 1], E[:, 0]), kind="stable")]
    V = np.cumsum(E, axis=0)
    W = np.roll(V, -1, axis=0)
    return 0.5 * float(np.sum(V[:, 0] * W[:, 1] - V[:, 1] * W[:, 0]))


def _average_body_volume(X: np.ndarray, directions: int, seed: int) -> tuple[float, float]:
    """(volume, approximation half-width) of the Minkowski average of C_{-x}."""
    N, m, n = X.shape
    if n == 1:
        v = X[:, :, 0]
        return float(np.maximum(0, -v.min(axis=1)).mean() + np.maximum(0, v.max(axis=1)).mean()), 0.0
    if n == 2:
        return minkowski_average_area(X), 0.0
    U = sphere_sample(n, directions, seed)
    H, PTS = _batch_support_data(X, U, np.array([0, N]))
    return _sandwich_volume(U, H[0], PTS[0])


def _batch_support_data(X: np.ndarray, U: np.ndarray, bounds: np.ndarray,
                        chunk: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Per contiguous batch X[bounds[b]:bounds[b+1]]: mean support values (B, k) of the
    Minkowski average of C_{-x} at U, and mean support points (B, k, n)."""
    N, m, n = X.shape
    B, k = len(bounds) - 1, U.shape[0]
    H = np.zeros((B, k))
    PTS = np.zeros((B, k, n))
    flat = X.reshape(N * m, n)
    for s in range(0, k, chunk):
        dots = -(flat @ U[s : s + chunk].T).reshape(N, m, -1)  # <-x_i, u>
        best = dots.argmax(axis=1)
        val = np.take_along_axis(dots, best[:, None, :], axis=1)[:, 0, :]
        pos = val > 0
        val = np.where(pos, val, 0.0)
        # maximizing vertex of each C_{-x}: -x_best when positive, the origin otherwise
        masks = [(pos & (best == i)).astype(float) for i in range(m)]
        for b, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
            size = max(hi - lo, 1)
            H[b, s : s + chunk] = val[lo:hi].sum(axis=0) / size
            for i in range(m):
                PTS[b, s : s + chunk] -= masks[i][lo:hi].T @ X[lo:hi, i, :] / size
    if np.any(H <= 0):
        raise DegenerateBodyError("centroid body support vanishes", achieved_dim=None)
    return H, PTS


def _sandwich_volume(U: np.ndarray, h: np.ndarray, pts: np.ndarray) -> tuple[float, float]:
    """Midpoint and half-width between the hull of support points and the circumscribed polytope."""
    inner = ConvexHull(pts).volume
    hs = np.hstack([U, -h[:, None]])
    outer = ConvexHull(HalfspaceIntersection(hs, np.zeros(U.shape[1])).intersections).volume
    return 0.5 * (inner + outer), 0.5 * (outer - inner)


# ---- dual mixed volume and the duality identity ------------------------------

def dual_mixed_vol_neg1(L: StarBody, M: StarBody, count: int, seed: int) -> MCEstimate:
    """V~_{-1}(L[d+1], M) = (1/d) * integral of rho_L^{d+1} / rho_M over the sphere."""
    if L.dim != M.dim:
        raise InvalidArgumentError("both star bodies must live in the same dimension")
    d = L.dim

    def f(u):
        rm = np.asarray(M.radial(u), dtype=float)
        if np.any(rm < 1e-12):
            raise DegenerateBodyError("radial function of M vanishes", achieved_dim=None)
        return L.radial_checked(u) ** (d + 1) / rm / d

    return mc_sphere_integral(f, d, count, seed)


@dataclass(frozen=True)
class DualityCheck:
    lhs: MCEstimate
    rhs: MCEstimate
    discrepancy: float

    @property
    def combined_error(self) -> float:
        return self.lhs.combined_error(self.rhs)


def duality_check(K, L: StarBody, m: int, count: int, seed: int) -> DualityCheck:
    """V~_{-1}(L[nm+1], polar Pi^m K) against Vol(L) ((nm+1)/m) V(K[n-1], Gamma^m L)."""
    if L.dim != K.dim * m:
        raise InvalidArgumentError("L must live in R^{nm}")
    d = L.dim
    lhs = dual_mixed_vol_neg1(L, polar_oracle(K, m), count, seed)
    vol = star_body_volume(L, count, seed + 1)
    mv = CentroidBody(L, m, count, seed + 2).mixed_volume(K)
    c = (d + 1) / m
    value = c * vol.value * mv.value
    se = c * math.hypot(vol.value * mv.std_error, mv.value * vol.std_error)
    rhs = MCEstimate(value, se, count, seed)
    return DualityCheck(lhs, rhs, abs(lhs.value - rhs.value))


# ---- random simplices ---------------------------------------------------------

def random_simplex_expectation(K, L: StarBody, m: int, count: int, seed: int, reflect: bool = False) -> MCEstimate:
    """E over X uniform in L of V(K[n-1], C_X), or of C_{-X} when ``reflect``.

    V(K[n-1], C_{-x}) = h_{Pi^m K}(x) / n exactly, for polytopes and ellipsoids.
    """
    n = K.dim
    if L.dim != n * m:
        raise InvalidArgumentError("L must live in R^{nm}")
    X = sample_star_body(L, count, seed).reshape(count, m, n)
    vals = np.asarray(proj_support(K, X if reflect else -X), dtype=float) / n
    mean, se = _mean_se(vals)
    return MCEstimate(mean, se, count, seed)


def mixed_volume_ball_segment_hull(X: np.ndarray) -> np.ndarray:
    """V(B^n[n-1], C_x) = kappa_{n-1} V_1(C_x) / n for tuples X (N, m, n)."""
    from .bodies import segment_hull_v1
    n = X.shape[-1]
    return ball_volume(n - 1) * segment_hull_v1(X) / n


# ---- affine functionals ----------------------------------------------------------

def ball_centroid_constant(n: int, m: int) -> float:
    """Support value of the centroid body of polar Pi^m B^n (a ball)."""
    return m / ((n * m + 1) * ball_volume(n))


def busemann_petty_functional(L: StarBody, m: int, count: int, seed: int) -> tuple[MCEstimate, float]:
    """Vol_n(Gamma^m L) / Vol_{nm}(L)^{1/m}, with the polytopal approximation bound."""
    cv = CentroidBody(L, m, count, seed).volume()
    vol = star_body_volume(L, count, seed + 1)
    q = vol.value ** (-1.0 / m)
    value = cv.estimate.value * q
    rel = math.hypot(cv.estimate.std_error / cv.estimate.value, vol.std_error / (m * vol.value))
    return MCEstimate(value, abs(value) * rel, count, seed), cv.approx_bound * q


def random_simplex_functional(K, L: StarBody, m: int, count: int, seed: int) -> MCEstimate:
    """Vol(L)^{-1/(nm)} Vol(K)^{-(n-1)/n} E_L V(K[n-1], C_X): affine-invariant, minimal at
    (ellipsoid, polar projection body of an ellipsoid)."""
    n = K.dim
    e = random_simplex_expectation(K, L, m, count, seed)
    vol = star_body_volume(L, count, seed + 1)
    c = K.volume ** (-(n - 1) / n)
    value = c * e.value * vol.value ** (-1.0 / (n * m))
    rel = math.hypot(e.std_error / e.value, vol.std_error / (n * m * vol.value))
    return MCEstimate(value, abs(value) * rel, count, seed)
