"""Brute-force reference computations for small lattices over Q.

These share no search logic with the stability module: short vectors come from
a plain coordinate box around the ellipsoid, sublattices from every k-subset,
and the polygon from the upper concave hull of the best (rank, degree) pairs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .lattice import MetrizedLattice, degree

# gamma_k^(k/2), k = 1..4
_HERMITE_POW = {1: 1.0, 2: 2 / math.sqrt(3), 3: math.sqrt(2.0), 4: 2.0}


def box_vectors(G: np.ndarray, bound: float) -> np.ndarray:
    """Integer vectors x != 0 (one per +-pair) with ``x G x^T <= bound``, by scanning a box."""
    N = G.shape[0]
    Gi = np.linalg.inv(G)
    r = np.floor(np.sqrt(bound * np.diag(Gi)) + 1e-9).astype(int)
    axes = [np.arange(-k, k + 1) for k in r]
    X = np.array(np.meshgrid(*axes, indexing="ij")).reshape(N, -1).T
    q = np.einsum("ij,jk,ik->i", X, G, X)
    X = X[(q <= bound * (1 + 1e-12)) & (q > 0)]
    first = (X != 0).argmax(axis=1)
    return X[X[np.arange(len(X)), first] > 0]


def _subset_degrees(vecs: np.ndarray, G: np.ndarray, k: int) -> np.ndarray:
    """Degree of the saturation of the span of every k-subset (-inf when dependent)."""
    N = G.shape[0]
    combos = np.array(list(itertools.combinations(range(len(vecs)), k)), dtype=np.int64)
    out = np.full(len(combos), -np.inf)
    for start in range(0, len(combos), 50000):
        c = combos[start : start + 50000]
        M = vecs[c]  # (m, k, N)
        gram = np.einsum("mia,ab,mjb->mij", M, G, M)
        det = np.linalg.det(gram)
        idx = np.zeros(len(c), dtype=np.int64)
        for cols in itertools.combinations(range(N), k):
            minor = np.rint(np.linalg.det(M[:, :, list(cols)].astype(float))).astype(np.int64)
            idx = np.gcd(idx, np.abs(minor))
        ok = (idx > 0) & (det > 0)
        out[start : start + 50000][ok] = -(0.5 * np.log(det[ok]) - np.log(idx[ok]))
    return out


def _greedy_covolume(G: np.ndarray, k: int) -> float:
    """Covolume of the span of k independent short vectors picked greedily from a box scan."""
    vecs = box_vectors(G, float(np.max(np.diag(G))))
    q = np.einsum("ij,jk,ik->i", vecs, G, vecs)
    chosen: list[np.ndarray] = []
    for i in np.argsort(q, kind="stable"):
        trial = chosen + [vecs[i]]
        if np.linalg.matrix_rank(np.array(trial, dtype=float)) == len(trial):
            chosen = trial
        if len(chosen) == k:
            break
    M = np.array(chosen)
    return math.sqrt(np.linalg.det(M @ G @ M.T))


def max_degrees(L: MetrizedLattice) -> dict[int, float]:
    """Largest degree of a rank-k sublattice of a lattice over Q, for each k."""
    if not L.field.is_rational:
        raise ValueError("the oracle works over Q only")
    N = L.N
    G = L.counting_form
    out = {0: 0.0, N: degree(L)}
    short = box_vectors(G, float(np.min(np.diag(G))))
    lam1 = math.sqrt(min(float(x @ G @ x) for x in short))
    for k in range(1, N):
        radius = _HERMITE_POW[k] * _greedy_covolume(G, k) / lam1 ** (k - 1)
        vecs = box_vectors(G, 4 * radius * radius)
        out[k] = float(_subset_degrees(vecs, G, k).max())
    return out


def upper_hull(points: list[tuple[int, float]]) -> list[tuple[int, float]]:
    pts = sorted(points)
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly above the chord
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1) + 1e-12:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def hn_polygon_oracle(L: MetrizedLattice) -> list[tuple[int, float]]:
    """HN polygon vertices as the upper concave hull of the maximal degrees per rank."""
    return upper_hull(list(max_degrees(L).items()))
