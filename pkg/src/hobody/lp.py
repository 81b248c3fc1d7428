"""Dense two-phase simplex method with Bland's anti-cycling rule.

Problems here are tiny (a handful of variables, at most a few hundred rows),
so a full tableau is simpler and faster than anything sparse.  After the
pivoting finishes, the basic solution is recomputed from the original data
with a direct solve, which removes the rounding accumulated by the pivots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, UnboundedError

TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _run(T: np.ndarray, basis: list[int], ncols: int, tol: float, max_iter: int) -> tuple[str, int]:
    """Minimize with objective row T[-1]; columns >= ncols are never entered."""
    it = 0
    m = T.shape[0] - 1
    while it < max_iter:
        red = T[-1, :ncols]
        cand = np.flatnonzero(red < -tol)
        if cand.size == 0:
            return "optimal", it
        col = int(cand[0])
        a = T[:m, col]
        pos = np.flatnonzero(a > tol)
        if pos.size == 0:
            return "unbounded", it
        ratios = T[pos, -1] / a[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        it += 1
    return "iteration-limit", it


def linprog_min(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None,
                tol: float = TOL, max_iter: int = 20000) -> LPResult:
    """Minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq.

    Variables are nonnegative unless listed in ``free``.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    free = sorted(set(free or []))

    # split free variables into differences of nonnegative ones
    split = np.eye(nv)
    if free:
        split = np.hstack([split, -np.eye(nv)[:, free]])
    Cx = c @ split
    Aub = A_ub @ split
    Aeq = A_eq @ split
    nx = Cx.size
    mu, me = Aub.shape[0], Aeq.shape[0]
    m = mu + me

    # columns: x | slacks | artificials
    A = np.zeros((m, nx + mu))
    A[:mu, :nx] = Aub
    A[:mu, nx:] = np.eye(mu)
    A[mu:, :nx] = Aeq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)

    need_art = [i for i in range(m) if i >= mu or neg[i]]
    na = len(need_art)
    ncol = nx + mu + na
    T = np.zeros((m + 1, ncol + 1))
    T[:m, : nx + mu] = A
    T[:m, -1] = b
    basis = [nx + i for i in range(mu)] + [0] * me
    for k, i in enumerate(need_art):
        T[i, nx + mu + k] = 1.0
        basis[i] = nx + mu + k

    iters = 0
    scale = max(1.0, float(np.abs(b).max()) if m else 1.0)
    if na:
        T[-1, nx + mu:ncol] = 1.0
        for i in need_art:
            T[-1] -= T[i]
        status, it = _run(T, basis, ncol, tol, max_iter)
        iters += it
        if -T[-1, -1] > 1e-7 * scale:
            return LPResult("infeasible", None, float("nan"), iters)
        # drive artificial variables out of the basis
        keep = []
        for r in range(m):
            if basis[r] >= nx + mu:
                nz = np.flatnonzero(np.abs(T[r, : nx + mu]) > tol)
                if nz.size:
                    _pivot(T, r, int(nz[0]))
                    basis[r] = int(nz[0])
                    keep.append(r)
            else:
                keep.append(r)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[r] for r in keep]
        T = np.delete(T, np.s_[nx + mu:ncol], axis=1)
        A = A[keep]
        b = b[keep]
        m = len(keep)
    cost = np.concatenate([Cx, np.zeros(mu)])
    T[-1, :] = 0.0
    T[-1, : nx + mu] = cost
    for r, j in enumerate(basis):
        T[-1] -= cost[j] * T[r]
    status, it = _run(T, basis, nx + mu, tol, max_iter)
    iters += it
    if status == "unbounded":
        return LPResult("unbounded", None, float("-inf"), iters)
    if status != "optimal":
        return LPResult(status, None, float("nan"), iters)

    xs = np.zeros(nx + mu)
    B = A[:, basis]
    try:
        xs[basis] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        xs[basis] = T[:m, -1]
    x = split @ xs[:nx]
    return LPResult("optimal", x, float(c @ x), iters)


def linprog_max(c, *args, **kwargs) -> LPResult:
    res = linprog_min(-np.asarray(c, dtype=float), *args, **kwargs)
    if res.status == "unbounded":
        return LPResult("unbounded", None, float("inf"), res.iterations)
    return LPResult(res.status, res.x, -res.value if res.ok else res.value, res.iterations)


def require_optimal(res: LPResult) -> LPResult:
    if res.status == "infeasible":
        raise InfeasibleError("linear program is infeasible")
    if res.status == "unbounded":
        raise UnboundedError("linear program is unbounded")
    if not res.ok:
        raise InfeasibleError(f"linear program stopped with status {res.status}")
    return res


def chebyshev_center(A, b) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside {x : A x <= b}."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    Aub = np.hstack([A, norms[:, None]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = linprog_max(c, Aub, b, free=list(range(n)))
    if res.status == "unbounded":
        raise UnboundedError("halfspace system is unbounded")
    if not res.ok:
        return np.full(n, np.nan), -1.0
    return res.x[:n], float(res.x[n])
