"""Monte Carlo integration over spheres and star bodies.

Random numbers come from Philox streams.  Sample ``i`` of a stream lives in
block ``i // BLOCK`` and every block is generated from its own Philox counter,
so the value of sample ``i`` depends only on ``(seed, stream, i)``.  Splitting
an index range across workers therefore reproduces the serial result bit for
bit.

Sphere integrals use the unnormalized surface measure, whose total mass on
``S^{d-1}`` is ``d * kappa_d``.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, InvalidBodyError, NonFiniteIntegrandError

BLOCK = 4096
MASK64 = (1 << 64) - 1

# stream tags keep independent uses of one seed apart
STREAM_SPHERE = 0
STREAM_ACCEPT = 1
STREAM_RADIUS = 2
STREAM_BOX = 3
STREAM_AUX = 4


def ball_volume(d: int) -> float:
    """Volume kappa_d of the d-dimensional Euclidean unit ball."""
    if d < 0:
        raise InvalidArgumentError(f"dimension must be >= 0, got {d}")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_measure(d: int) -> float:
    """Surface measure d * kappa_d of S^{d-1}."""
    return d * ball_volume(d)


def default_samples(d: int) -> int:
    if d <= 4:
        return 200_000
    if d <= 8:
        return 1_000_000
    return 4_000_000


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def combined_error(self, *others: "MCEstimate") -> float:
        return math.sqrt(self.std_error**2 + sum(o.std_error**2 for o in others))

    def scaled(self, c: float) -> "MCEstimate":
        return MCEstimate(self.value * c, self.std_error * abs(c), self.samples, self.seed)

    def power(self, q: float) -> "MCEstimate":
        """Delta-method propagation for value**q."""
        v = self.value**q
        return MCEstimate(v, abs(q * self.value ** (q - 1)) * self.std_error, self.samples, self.seed)

    def __float__(self) -> float:
        return float(self.value)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed > MASK64:
        raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    key = seed | (int(stream) << 64)
    counter = np.array([0, 0, block & MASK64, block >> 64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _blocks(kind: str, width: int, start: int, count: int, seed: int, stream: int) -> np.ndarray:
    """Rows ``start .. start+count`` of a (virtually infinite) stream."""
    out = np.empty((count, width))
    first, last = start // BLOCK, (start + count - 1) // BLOCK
    pos = 0
    for b in range(first, last + 1):
        gen = _block_generator(seed, stream, b)
        if kind == "normal":
            rows = gen.standard_normal((BLOCK, width))
        else:
            rows = gen.random((BLOCK, width))
        lo = max(start - b * BLOCK, 0)
        hi = min(start + count - b * BLOCK, BLOCK)
        out[pos : pos + hi - lo] = rows[lo:hi]
        pos += hi - lo
    return out


def uniform_stream(width: int, count: int, seed: int, stream: int = STREAM_AUX, start: int = 0) -> np.ndarray:
    """Uniform (0,1) draws, shape (count, width), indexed like sphere samples."""
    u = _blocks("uniform", width, start, count, _check_seed(seed), stream)
    # Generator.random is on [0, 1); keep away from 0 for U**(1/d) and logs
    return np.where(u == 0.0, np.finfo(float).tiny, u)


def sphere_sample(d: int, count: int, seed: int, start: int = 0, stream: int = STREAM_SPHERE) -> np.ndarray:
    """``count`` uniform points on S^{d-1} as an array of shape (count, d)."""
    if d < 1 or count < 1:
        raise InvalidArgumentError(f"need d >= 1 and count >= 1, got d={d}, count={count}")
    g = _blocks("normal", d, int(start), int(count), _check_seed(seed), stream)
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0.0
    if bad.any():
        g[bad, 0], norms[bad] = 1.0, 1.0
    return g / norms[:, None]


def _evaluate(f: Callable[[np.ndarray], np.ndarray], d: int, count: int, seed: int,
              workers: int, chunk: int) -> np.ndarray:
    starts = list(range(0, count, chunk))

    def run(s: int) -> np.ndarray:
        u = sphere_sample(d, min(chunk, count - s), seed, start=s)
        vals = np.asarray(f(u), dtype=float).reshape(-1)
        if vals.shape[0] != u.shape[0]:
            raise InvalidArgumentError("integrand must return one value per direction")
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            raise NonFiniteIntegrandError(
                f"integrand is {vals[i]} at direction {u[i].tolist()}", direction=u[i].copy())
        return vals

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts)


def mc_sphere_integral(f: Callable[[np.ndarray], np.ndarray], d: int, count: int, seed: int,
                       workers: int = 1, chunk: int = 16 * BLOCK) -> MCEstimate:
    """Estimate the integral of ``f`` over S^{d-1}.

    ``f`` receives an (N, d) array of unit vectors and returns N values.
    """
    vals = _evaluate(f, d, int(count), seed, workers, chunk)
    mass = sphere_measure(d)
    sd = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
    return MCEstimate(mass * float(np.mean(vals)), mass * sd / math.sqrt(vals.size), int(count), int(seed))


@dataclass(frozen=True)
class StarBody:
    """Star body about the origin given by a vectorized radial function.

    ``radial`` maps an (N, dim) array of unit vectors to N positive radii;
    ``bounding_radius`` must dominate every radius.  ``sampler(count, seed)``,
    when given, draws uniform points directly and replaces rejection sampling.
    """

    dim: int
    radial: Callable[[np.ndarray], np.ndarray]
    bounding_radius: float
    name: str = ""
    sampler: Callable[[int, int], np.ndarray] | None = None

    def radial_checked(self, u: np.ndarray) -> np.ndarray:
        rho = np.asarray(self.radial(u), dtype=float).reshape(-1)
        bad = ~(np.isfinite(rho) & (rho > 0))
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidBodyError(f"radial function is {rho[i]} at direction {u[i].tolist()}")
        return rho

    def scaled(self, c: float) -> "StarBody":
        sampler = None if self.sampler is None else (lambda k, seed: c * self.sampler(k, seed))
        return StarBody(self.dim, lambda u: c * np.asarray(self.radial(u)), c * self.bounding_radius,
                        f"{c}*{self.name}", sampler)

    def linear_image(self, T: np.ndarray) -> "StarBody":
        """The star body T L for nonsingular T."""
        T = np.asarray(T, dtype=float)
        Tinv = np.linalg.inv(T)
        smax = float(np.linalg.svd(T, compute_uv=False)[0])

        def radial(u):
            w = u @ Tinv.T
            nw = np.linalg.norm(w, axis=1)
            return np.asarray(self.radial(w / nw[:, None])) / nw

        sampler = None if self.sampler is None else (lambda k, seed: self.sampler(k, seed) @ T.T)
        return StarBody(self.dim, radial, smax * self.bounding_radius, f"T({self.name})", sampler)


def ball_oracle(d: int, radius: float = 1.0) -> StarBody:
    return StarBody(d, lambda u: np.full(u.shape[0], float(radius)), float(radius), f"{radius}B^{d}")


def sample_simplices(simplices: np.ndarray, count: int, seed: int) -> np.ndarray:
    """Uniform points in a union of interior-disjoint simplices of shape (T, d+1, d).

    A simplex is picked with probability proportional to its volume and the
    barycentric weights are spacings of sorted uniforms.
    """
    T, k, d = simplices.shape
    vol = np.abs(np.linalg.det(simplices[:, 1:] - simplices[:, :1]))
    cum = np.cumsum(vol) / vol.sum()
    pick = np.minimum(np.searchsorted(cum, uniform_stream(1, count, seed, STREAM_BOX)[:, 0]), T - 1)
    cuts = np.sort(uniform_stream(d, count, seed, STREAM_RADIUS), axis=1)
    w = np.diff(cuts, axis=1, prepend=0.0, append=1.0)  # (count, d+1)
    return np.einsum("Nk,Nkd->Nd", w, simplices[pick])


def star_body_volume(L: StarBody, count: int, seed: int, workers: int = 1) -> MCEstimate:
    """Vol_d(L) = (1/d) * integral of rho_L^d over the sphere."""
    d = L.dim
    return mc_sphere_integral(lambda u: L.radial_checked(u) ** d / d, d, count, seed, workers=workers)


_SAMPLE_CACHE: OrderedDict = OrderedDict()
SAMPLE_CACHE_SIZE = 8


def sample_star_body(L: StarBody, count: int, seed: int, max_rounds: int = 8) -> np.ndarray:
    """``count`` points distributed uniformly in L, shape (count, dim).

    Bodies with a direct ``sampler`` use it.  Otherwise a direction theta is kept with probability (rho(theta)/R)^d, which makes
    the kept directions follow the cone-volume distribution; the radius is
    then rho(theta) * U^{1/d}.  If a candidate radius exceeds R the whole draw
    restarts with a larger R, so the output stays a pure function of the
    arguments.
    """
    if count < 1:
        raise InvalidArgumentError("count must be >= 1")
    # draws are a pure function of (body, count, seed), so repeated requests reuse them;
    # the body is kept in the entry so its id cannot be recycled while cached
    key = (id(L), int(count), int(seed))
    hit = _SAMPLE_CACHE.get(key)
    if hit is not None and hit[0] is L:
        _SAMPLE_CACHE.move_to_end(key)
        return hit[1].copy()
    X = L.sampler(count, seed) if L.sampler is not None else _rejection_sample(L, count, seed, max_rounds)
    _SAMPLE_CACHE[key] = (L, X)
    if len(_SAMPLE_CACHE) > SAMPLE_CACHE_SIZE:
        _SAMPLE_CACHE.popitem(last=False)
    return X.copy()


def _rejection_sample(L: StarBody, count: int, seed: int, max_rounds: int) -> np.ndarray:
    d = L.dim
    R = float(L.bounding_radius)
    if not (math.isfinite(R) and R > 0):
        raise InvalidBodyError(f"bounding radius must be finite and positive, got {R}")
    for _ in range(max_rounds):
        pts, start, restart = [], 0, False
        have = 0
        while have < count:
            batch = max(2 * (count - have), BLOCK)
            u = sphere_sample(d, batch, seed, start=start)
            rho = L.radial_checked(u)
            if rho.max() > R * (1 + 1e-12):
                R = 1.25 * float(rho.max())
                restart = True
                break
            acc = uniform_stream(1, batch, seed, STREAM_ACCEPT, start)[:, 0]
            keep = acc < (rho / R) ** d
            rad = uniform_stream(1, batch, seed, STREAM_RADIUS, start)[:, 0] ** (1.0 / d)
            x = u[keep] * (rho[keep] * rad[keep])[:, None]
            pts.append(x)
            have += x.shape[0]
            start += batch
        if not restart:
            return np.concatenate(pts)[:count]
    raise InvalidBodyError("could not find a valid bounding radius for rejection sampling")
