"""Batched exact volumes of polytopes {x : A x <= b} with a shared normal matrix.

Covariogram work evaluates volumes of ``{A x <= b - r c}`` for thousands of
right-hand sides with the same ``A``, so everything that depends only on
``A`` is precomputed: the nonsingular n-subsets of rows (vertex candidates),
the lines cut out by (n-1)-subsets, and the face lattice bookkeeping for
Lasserre's recursion

    mu_k(face) = (1/k) * sum_g dist(z_face, H_g within face) * mu_{k-1}(face & H_g)

where z_face is the least-norm point of the face's affine hull.  Only edge
lengths need vertices; they come from a masked max - min of candidate
vertices projected on the edge direction.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import InvalidArgumentError

DET_TOL = 1e-10


class HalfspaceFamily:
    def __init__(self, A: np.ndarray, feas_tol: float = 1e-9):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise InvalidArgumentError("zero normal vector")
        self.row_norms = norms
        self.A = A / norms[:, None]
        self.F, self.n = self.A.shape
        G = self.A @ self.A.T - np.eye(self.F)
        if np.any(G > 1 - 1e-12):
            raise InvalidArgumentError("rows with identical normal directions must be merged")
        self.feas_tol = feas_tol
        if self.n > 1:
            self._build()

    # ---- precomputation ------------------------------------------------------
    def _build(self) -> None:
        A, n, F = self.A, self.n, self.F
        subsets, inverses = [], []
        for S in itertools.combinations(range(F), n):
            M = A[list(S)]
            if abs(np.linalg.det(M)) > DET_TOL:
                subsets.append(S)
                inverses.append(np.linalg.inv(M))
        self.subsets = np.array(subsets, dtype=int).reshape(-1, n)
        self.inverses = np.array(inverses).reshape(-1, n, n)
        sub_index = {S: i for i, S in enumerate(subsets)}

        # edges: independent (n-1)-subsets
        edges, dirs, copies = [], [], []
        for J in itertools.combinations(range(F), n - 1):
            M = A[list(J)]
            if np.linalg.matrix_rank(M, tol=1e-9) < n - 1:
                continue
            _, _, vt = np.linalg.svd(M)
            cp = [sub_index[tuple(sorted(J + (g,)))] for g in range(F)
                  if g not in J and tuple(sorted(J + (g,))) in sub_index]
            if not cp:
                continue
            edges.append(J)
            dirs.append(vt[-1])
            copies.append(cp)
        width = max((len(c) for c in copies), default=1)
        self.edge_sets = edges
        self.edge_dirs = np.array(dirs).reshape(-1, n)
        self.edge_copies = np.zeros((len(edges), width), dtype=int)
        self.edge_valid = np.zeros((len(edges), width), dtype=bool)
        for i, c in enumerate(copies):
            self.edge_copies[i, : len(c)] = c
            self.edge_valid[i, : len(c)] = True

        # higher faces: level k has active sets of size n - k (k = 2 .. n-1)
        faces = {1: {J: i for i, J in enumerate(edges)}}
        self.levels = []
        for k in range(2, n):
            size = n - k
            table = {}
            entries = []  # (face index, child index, coefficient row over b, dedupe key)
            for J in itertools.combinations(range(F), size):
                UJ = A[list(J)]
                if np.linalg.matrix_rank(UJ, tol=1e-9) < size:
                    continue
                G = UJ @ UJ.T
                W = UJ.T @ np.linalg.inv(G)  # z_J = W b_J
                kids = []
                for g in range(F):
                    if g in J:
                        continue
                    child = tuple(sorted(J + (g,)))
                    if child not in faces[k - 1]:
                        continue
                    alpha = np.linalg.solve(G, UJ @ A[g])
                    nu = A[g] - alpha @ UJ
                    s = np.linalg.norm(nu)
                    if s < 1e-9:
                        continue
                    coef = np.zeros(F)
                    coef[g] += 1.0
                    coef[list(J)] -= A[g] @ W  # b_g - u_g . z_J
                    off = np.zeros(F)  # in-face offset of H_g: (b_g - alpha . b_J) / s
                    off[g] += 1.0
                    off[list(J)] -= alpha
                    kids.append((faces[k - 1][child], coef / s, off / s, nu / s))
                if not kids:
                    continue
                fi = len(table)
                table[J] = fi
                for ci, coef, off, nu in kids:
                    entries.append((fi, ci, coef, off, nu))
            faces[k] = table
            fidx = np.array([e[0] for e in entries], dtype=int)
            cidx = np.array([e[1] for e in entries], dtype=int)
            coefs = np.array([e[2] for e in entries]).reshape(-1, F)
            offs = np.array([e[3] for e in entries]).reshape(-1, F)
            # children of one face whose in-face normals coincide can describe the same sub-face
            dup = []
            for a in range(len(entries)):
                for b2 in range(a + 1, len(entries)):
                    if fidx[a] == fidx[b2] and np.linalg.norm(entries[a][4] - entries[b2][4]) < 1e-9:
                        dup.append((a, b2))
            self.levels.append((k, len(table), fidx, cidx, coefs, offs, np.array(dup, dtype=int).reshape(-1, 2)))
        top = faces[n - 1]
        self.top_faces = np.array([J[0] for J in top], dtype=int)
        self.top_index = np.array([top[J] for J in top], dtype=int)

    # ---- evaluation ----------------------------------------------------------
    def _prep(self, b: np.ndarray) -> np.ndarray:
        b = np.atleast_2d(np.asarray(b, dtype=float))
        if b.shape[1] != self.F:
            raise InvalidArgumentError(f"right-hand sides need {self.F} entries")
        return b / self.row_norms

    def vertex_candidates(self, b: np.ndarray):
        """Candidate vertices (N, S, n) and feasibility mask (N, S)."""
        b = self._prep(b)
        bs = b[:, self.subsets]  # (N, S, n)
        V = np.einsum("sij,nsj->nsi", self.inverses, bs)
        slack = b[:, None, :] - V @ self.A.T
        tol = self.feas_tol * (1.0 + np.abs(b).max(axis=1))
        feas = np.all(slack >= -tol[:, None, None], axis=2)
        return V, feas

    def volumes(self, b: np.ndarray, chunk: int | None = None) -> np.ndarray:
        b = np.atleast_2d(np.asarray(b, dtype=float))
        if self.n == 1:
            return self._volumes_1d(self._prep(b))
        N = b.shape[0]
        if chunk is None:
            per = max(1, self.subsets.shape[0] * (self.F + self.n))
            chunk = max(1, int(4e6 // per))
        out = np.empty(N)
        for s in range(0, N, chunk):
            out[s : s + chunk] = self._volumes_chunk(b[s : s + chunk])
        return out

    def _volumes_1d(self, b: np.ndarray) -> np.ndarray:
        a = self.A[:, 0]
        hi = np.min(np.where(a > 0, b / np.where(a > 0, a, 1), np.inf), axis=1)
        lo = np.max(np.where(a < 0, b / np.where(a < 0, a, 1), -np.inf), axis=1)
        return np.maximum(hi - lo, 0.0)

    def _volumes_chunk(self, b_raw: np.ndarray) -> np.ndarray:
        V, feas = self.vertex_candidates(b_raw)
        b = self._prep(b_raw)
        N = b.shape[0]
        if self.edge_copies.shape[0] == 0:
            return np.zeros(N)
        # edge lengths
        Vc = V[:, self.edge_copies, :]  # (N, E, W, n)
        t = np.einsum("newi,ei->new", Vc, self.edge_dirs)
        ok = feas[:, self.edge_copies] & self.edge_valid[None]
        tmax = np.where(ok, t, -np.inf).max(axis=2)
        tmin = np.where(ok, t, np.inf).min(axis=2)
        mu = np.where(np.isfinite(tmax), tmax - tmin, 0.0)  # (N, E)
        scale = 1.0 + np.abs(b).max(axis=1)
        for k, nfaces, fidx, cidx, coefs, offs, dup in self.levels:
            contrib = (b @ coefs.T) * mu[:, cidx]  # (N, entries)
            if dup.size:
                off = b @ offs.T
                same = np.abs(off[:, dup[:, 0]] - off[:, dup[:, 1]]) <= 1e-9 * scale[:, None]
                drop = np.zeros_like(contrib, dtype=bool)
                for col in np.unique(dup[:, 1]):
                    rows = dup[:, 1] == col
                    drop[:, col] = np.any(same[:, rows], axis=1)
                contrib = np.where(drop, 0.0, contrib)
            nxt = np.zeros((N, nfaces))
            np.add.at(nxt.T, fidx, contrib.T)
            mu = nxt / k
        vol = np.einsum("nf,nf->n", b[:, self.top_faces], mu[:, self.top_index]) / self.n
        return np.maximum(vol, 0.0)

    def volume(self, b: np.ndarray) -> float:
        return float(self.volumes(np.asarray(b, dtype=float)[None])[0])

    def vertices(self, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Distinct feasible vertices of a single polytope."""
        b = np.asarray(b, dtype=float)
        if self.n == 1:
            a = self.A[:, 0]
            bb = b / self.row_norms
            hi = np.min(bb[a > 0] / a[a > 0])
            lo = np.max(bb[a < 0] / a[a < 0])
            return np.array([[lo], [hi]]) if hi >= lo else np.zeros((0, 1))
        V, feas = self.vertex_candidates(b[None])
        pts = V[0][feas[0]]
        if pts.shape[0] == 0:
            return pts
        keep = []
        for p in pts:
            if not any(np.max(np.abs(p - q)) <= tol for q in keep):
                keep.append(p)
        return np.array(keep)
