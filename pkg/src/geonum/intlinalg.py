"""Exact integer linear algebra on small matrices (Python ints throughout)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

IntMatrix = list[list[int]]


def _as_rows(A) -> IntMatrix:
    return [[int(x) for x in row] for row in np.asarray(A, dtype=object).tolist()]


def echelon_with_transform(A) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns ``(H, U)`` with ``H = U A`` and U unimodular.

    Pivots are positive and entries above each pivot are reduced into ``[0, pivot)``.
    Zero rows of H sit at the bottom.
    """
    H = _as_rows(A)
    m = len(H)
    ncols = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    row = 0
    pivots = []
    for col in range(ncols):
        if row >= m:
            break
        # Euclid on column entries below `row`
        while True:
            nz = [i for i in range(row, m) if H[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][col]))
            if piv != row:
                H[row], H[piv] = H[piv], H[row]
                U[row], U[piv] = U[piv], U[row]
            done = True
            for i in range(row + 1, m):
                if H[i][col]:
                    q = H[i][col] // H[row][col]
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[row])]
                    if H[i][col]:
                        done = False
            if done:
                break
        if row < m and H[row][col] != 0:
            if H[row][col] < 0:
                H[row] = [-a for a in H[row]]
                U[row] = [-a for a in U[row]]
            pivots.append((row, col))
            row += 1
    for r, c in pivots:
        p = H[r][c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
    return H, U


def hnf(A) -> IntMatrix:
    """Nonzero rows of the Hermite normal form of A (a canonical basis of its row lattice)."""
    H, _ = echelon_with_transform(A)
    return [r for r in H if any(r)]


def rank(A) -> int:
    return len(hnf(A)) if len(A) else 0


def integer_kernel(A, ncols: int | None = None) -> IntMatrix:
    """Z-basis (rows) of ``{y in Z^N : A y = 0}``."""
    rows = _as_rows(A) if len(A) else []
    if not rows:
        n = ncols if ncols is not None else 0
        return [[int(i == j) for j in range(n)] for i in range(n)]
    At = [list(col) for col in zip(*rows)]
    H, U = echelon_with_transform(At)
    return [U[i] for i in range(len(H)) if not any(H[i])]


def saturate(G, ncols: int) -> IntMatrix:
    """HNF basis of ``Z^N`` intersected with the rational row span of G."""
    K = integer_kernel(G, ncols)
    if not K:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    return hnf(integer_kernel(K, ncols))


def inverse_unimodular(U: Sequence[Sequence[int]]) -> IntMatrix:
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(U)
    M = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    out = []
    for row in M:
        vals = row[n:]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("matrix is not unimodular")
        out.append([int(v) for v in vals])
    return out


def complete_basis(G: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """Unimodular N x N matrix whose first k rows span the saturated row lattice of G."""
    S = saturate(G, ncols)
    k = len(S)
    # U S^T = [H; 0] with the top k x k block of H unimodular since S is saturated
    St = [list(col) for col in zip(*S)]
    H, U = echelon_with_transform(St)
    P = [list(r) for r in zip(*inverse_unimodular(U))]  # (U^{-1})^T
    # S = H^T P, so [S; P[k:]] is unimodular
    return [list(r) for r in S] + P[k:]
