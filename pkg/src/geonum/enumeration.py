"""LLL reduction and Fincke-Pohst short-vector enumeration on real bases.

Enumeration is breadth-first over the Gram-Schmidt levels and vectorized with
numpy, falling back to depth-first recursion on chunks when a frontier grows
past ``CHUNK`` nodes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EnumerationTooLarge

DEFAULT_CAP = 10**8
CHUNK = 1 << 20


def gram_schmidt(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(mu, bstar_sq)`` for the rows of B."""
    n = B.shape[0]
    Bs = np.array(B, dtype=float)
    mu = np.eye(n)
    bsq = np.zeros(n)
    for i in range(n):
        for j in range(i):
            mu[i, j] = (B[i] @ Bs[j]) / bsq[j]
            Bs[i] -= mu[i, j] * Bs[j]
        bsq[i] = Bs[i] @ Bs[i]
    return mu, bsq


def lll(B: np.ndarray, delta: float = 0.99) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the rows of B. Returns ``(R, U)`` with ``R = U @ B`` and U unimodular."""
    B = np.array(B, dtype=float)
    n = B.shape[0]
    U = np.eye(n, dtype=np.int64)
    if n <= 1:
        return B, U
    mu, bsq = gram_schmidt(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[k] -= q * B[j]
                U[k] -= q * U[j]
                mu[k, : j + 1] -= q * mu[j, : j + 1]
        if bsq[k] >= (delta - mu[k, k - 1] ** 2) * bsq[k - 1]:
            k += 1
        else:
            B[[k - 1, k]] = B[[k, k - 1]]
            U[[k - 1, k]] = U[[k, k - 1]]
            mu, bsq = gram_schmidt(B)
            k = max(k - 1, 1)
    return B, U


def _unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def predicted_count(bsq: np.ndarray, bound: float) -> float:
    """Gaussian-heuristic estimate of the number of lattice points with Q <= bound."""
    n = len(bsq)
    covol = math.sqrt(float(np.prod(bsq)))
    return _unit_ball_volume(n) * bound ** (n / 2) / covol + 1.0


class ReducedBasis:
    """A reduced basis plus its Gram-Schmidt data, reusable across enumerations."""

    def __init__(self, B: np.ndarray, delta: float = 0.99):
        self.original = np.asarray(B, dtype=float)
        self.R, self.U = lll(self.original, delta)
        self.mu, self.bsq = gram_schmidt(self.R)
        self.N = self.R.shape[0]

    def enumerate(self, bound: float, cap: float = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
        """All nonzero x with Q(x) <= bound, one per +-pair.

        Returns ``(coords, q)``: integer coordinates in the ORIGINAL basis
        (first nonzero entry positive) sorted lexicographically, and the
        matching values of the counting form.
        """
        if bound <= 0:
            return np.zeros((0, self.N), dtype=np.int64), np.zeros(0)
        if predicted_count(self.bsq, bound) > cap:
            raise EnumerationTooLarge(
                f"about {predicted_count(self.bsq, bound):.3g} vectors predicted above cap {cap:.3g}"
            )
        slack = bound * (1 + 1e-12) + 1e-300
        found = []
        Y0 = np.zeros((1, self.N), dtype=np.int64)
        self._expand(self.N - 1, Y0, np.zeros(1), slack, found)
        Y = np.concatenate(found) if found else np.zeros((0, self.N), dtype=np.int64)
        # drop zero and keep one representative per +-pair (in reduced coordinates)
        nz = Y != 0
        has = nz.any(axis=1)
        Y = Y[has]
        first = nz[has].argmax(axis=1)
        Y = Y[Y[np.arange(len(Y)), first] > 0]
        X = Y @ self.U
        # canonical sign in original coordinates
        nzx = X != 0
        firstx = nzx.argmax(axis=1)
        sign = np.sign(X[np.arange(len(X)), firstx])
        X = X * sign[:, None]
        V = Y.astype(float) @ self.R
        q = np.einsum("ij,ij->i", V, V)
        keep = q <= bound * (1 + 1e-12)
        X, q = X[keep], q[keep]
        order = np.lexsort(X.T[::-1])
        return X[order], q[order]

    def _expand(self, level: int, Y: np.ndarray, P: np.ndarray, bound: float, out: list) -> None:
        if level < 0:
            out.append(Y)
            return
        if level + 1 < self.N:
            c = -(Y[:, level + 1 :].astype(float) @ self.mu[level + 1 :, level])
        else:
            c = np.zeros(len(Y))
        r = np.sqrt(np.maximum(bound - P, 0.0) / self.bsq[level])
        lo = np.ceil(c - r).astype(np.int64)
        hi = np.floor(c + r).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return
        if total > CHUNK and len(Y) > 1:
            half = len(Y) // 2
            self._expand(level, Y[:half], P[:half], bound, out)
            self._expand(level, Y[half:], P[half:], bound, out)
            return
        parent = np.repeat(np.arange(len(Y)), cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        vals = lo[parent] + offs
        Yc = Y[parent].copy()
        Yc[:, level] = vals
        Pc = P[parent] + self.bsq[level] * (vals - c[parent]) ** 2
        ok = Pc <= bound
        self._expand(level - 1, Yc[ok], Pc[ok], bound, out)
