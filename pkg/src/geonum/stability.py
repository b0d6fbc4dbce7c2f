"""Semi-stability, maximal destabilizing sublattices and Harder-Narasimhan polygons.

The maximal slope among O_F-sublattices of O_F-rank r is attained by a
saturated sublattice of minimal covolume V. Such a sublattice is the
saturation of the O_F-span of r vectors taken from its own successive minima
``u_1..u_k`` (``k = r*d``), and Minkowski's second theorem gives
``prod |u_i| <= gamma_k^(k/2) V`` with every ``|u_i| >= lambda_1(L)``. Any
candidate covolume therefore bounds the lengths that need enumerating, so the
search below is exhaustive for ``search_margin >= 1``. Ranks above n/2 are
searched in the dual, where a saturated W of rank n-r corresponds to
``L cap W^perp`` with covolume ``covol(L) * covol(W)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import intlinalg
from .enumeration import ReducedBasis
from .errors import EndpointMismatch, SearchTooLarge, ZeroRank
from .lattice import (
    MetrizedLattice,
    SublatticeHandle,
    _make,
    close_under_order,
    degree,
    dual_lattice,
    handle_from_saturated,
    restrict_scalars,
    sublattice_log_covolume,
)
from .field import NumberField

# gamma_k^(k/2) for the Hermite constants gamma_1..gamma_8
_HERMITE_POW = {
    1: 1.0,
    2: 2 / math.sqrt(3),
    3: math.sqrt(2.0),
    4: 2.0,
    5: math.sqrt(8.0),
    6: 8 / math.sqrt(3),
    7: 8.0,
    8: 16.0,
}
SLOPE_TIE = 1e-9
DEFAULT_MAX_RANK = 6


@dataclass(frozen=True)
class HNPolygon:
    vertices: tuple[tuple[int, float], ...]
    slopes: tuple[float, ...]
    base_field: NumberField = field(repr=False)
    filtration: tuple[tuple[tuple[int, ...], ...], ...] = field(default=(), repr=False, compare=False)

    @property
    def rank(self) -> int:
        return self.vertices[-1][0]

    @property
    def degree(self) -> float:
        return self.vertices[-1][1]

    def at(self, x: float) -> float:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return float(np.interp(x, xs, ys))

    def to_record(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "slopes": list(self.slopes), "base_field": self.base_field.name}


def slope(obj: SublatticeHandle | MetrizedLattice) -> float:
    """Degree divided by rank over the lattice's own base ring."""
    if isinstance(obj, SublatticeHandle):
        if obj.saturated_rank == 0:
            raise ZeroRank("sublattice has rank zero")
        return obj.slope
    if obj.n == 0:
        raise ZeroRank("lattice has rank zero")
    return degree(obj) / obj.n


def _minors_gcd(G: np.ndarray, k: int) -> int:
    """gcd of all k x k minors of the integer k x N matrix G (the saturation index)."""
    N = G.shape[1]
    cols = np.array(list(itertools.combinations(range(N), k)))
    sub = G[:, cols].transpose(1, 0, 2).astype(float)  # (m, k, k)
    dets = np.rint(np.linalg.det(sub)).astype(np.int64)
    return int(np.gcd.reduce(np.abs(dets)))


class _Searcher:
    """Minimal-covolume saturated O_F-sublattices of a fixed lattice."""

    def __init__(self, L: MetrizedLattice):
        self.L = L
        self.d = L.field.degree
        self.rb = ReducedBasis(L.basis)
        self.A = L.w_action
        X, q = self.rb.enumerate(float(self.rb.R[0] @ self.rb.R[0]))
        self.lam1 = math.sqrt(float(q.min()))

    def _close(self, rows: Sequence[np.ndarray]) -> np.ndarray:
        G = np.array(rows, dtype=np.int64)
        if self.A is None:
            return G
        return np.vstack([G, G @ self.A])

    def _initial(self, r: int) -> np.ndarray:
        gens: list[np.ndarray] = []
        cur = 0
        for row in self.rb.U:
            trial = gens + [row]
            rk = np.linalg.matrix_rank(self._close(trial).astype(float))
            if rk > cur:
                gens, cur = trial, rk
            if cur == r * self.d:
                break
        return self._close(gens)

    def search(self, r: int, margin: float) -> list[tuple[float, list[list[int]]]]:
        """All (log covolume, HNF basis) within the tie tolerance of the minimum."""
        k = r * self.d
        L = self.L
        N = L.N
        G0 = self._initial(r)
        S0 = intlinalg.saturate(G0.tolist(), N)
        best = sublattice_log_covolume(L, S0)
        ties: dict[tuple, float] = {tuple(map(tuple, S0)): best}
        log_lam1 = math.log(self.lam1)
        log_margin = math.log(margin)
        log_herm = math.log(_HERMITE_POW[k])

        def budget() -> float:
            # max log of the product of the r chosen lengths
            return log_herm + best + log_margin - (k - r) * log_lam1 + 1e-9

        max_len_log = budget() - (r - 1) * log_lam1
        X, q = self.rb.enumerate(math.exp(2 * max_len_log))
        order = np.argsort(q, kind="stable")
        X, logn = X[order], 0.5 * np.log(q[order])
        m = len(X)

        def visit(start: int, chosen: list[int], logp: float) -> None:
            nonlocal best
            j = len(chosen)
            for i in range(start, m):
                # remaining picks are at least as long as X[i]
                if logp + (r - j) * logn[i] > budget():
                    break
                trial = chosen + [i]
                G = self._close([X[t] for t in trial])
                if np.linalg.matrix_rank(G.astype(float)) < len(trial) * self.d:
                    continue
                if j + 1 < r:
                    visit(i + 1, trial, logp + logn[i])
                    continue
                logv = sublattice_log_covolume(L, G) - math.log(_minors_gcd(G, k))
                if logv <= best + SLOPE_TIE:
                    S = intlinalg.saturate(G.tolist(), N)
                    key = tuple(map(tuple, S))
                    if key not in ties:
                        ties[key] = logv
                    if logv < best:
                        best = logv
        visit(0, [], 0.0)
        return sorted((v, [list(s) for s in key]) for key, v in ties.items() if v <= best + SLOPE_TIE)


def _min_sublattices(L: MetrizedLattice, r: int, margin: float) -> list[tuple[float, list[list[int]]]]:
    n = L.n
    if 2 * r <= n:
        return _Searcher(L).search(r, margin)
    D = dual_lattice(L)
    out = []
    for logw, W in _Searcher(D).search(n - r, margin):
        S = intlinalg.hnf(intlinalg.integer_kernel(W, L.N))
        out.append((L.log_covolume + logw, S))
    return out


def _check_size(L: MetrizedLattice, max_rank: int) -> None:
    if L.N > max_rank or L.N > max(_HERMITE_POW):
        raise SearchTooLarge(f"destabilizer search capped at Z-rank {max_rank}, lattice has {L.N}")


def _best_by_rank(L: MetrizedLattice, margin: float) -> dict[int, tuple[float, list[list[int]]]]:
    best = {}
    for r in range(1, L.n):
        cands = _min_sublattices(L, r, margin)
        lo = min(v for v, _ in cands)
        # deterministic tie-break: lexicographically smallest HNF among ties
        S = min(S for v, S in cands if v <= lo + SLOPE_TIE)
        best[r] = (lo, S)
    return best


def max_slope_sublattice(L: MetrizedLattice, search_margin: float = 1.0, max_rank: int = DEFAULT_MAX_RANK) -> SublatticeHandle:
    """Saturated sublattice of maximal slope; among maximizers the one of highest rank."""
    if search_margin < 1:
        raise ValueError("search_margin must be at least 1")
    _check_size(L, max_rank)
    whole = [list(map(int, row)) for row in np.eye(L.N, dtype=np.int64)]
    top = handle_from_saturated(L, whole)
    if L.n == 1:
        return top
    choices = [(top.slope, L.n, whole)]
    logd = L.field.log_disc
    for r, (logv, S) in _best_by_rank(L, search_margin).items():
        choices.append(((-logv + 0.5 * r * logd) / r, r, S))
    smax = max(c[0] for c in choices)
    tied = [c for c in choices if c[0] >= smax - SLOPE_TIE * max(1.0, abs(smax))]
    _, r, S = max(tied, key=lambda c: c[1])
    return top if r == L.n else handle_from_saturated(L, S)


def is_semistable(L: MetrizedLattice, tol: float = 1e-9, search_margin: float = 1.0, max_rank: int = DEFAULT_MAX_RANK) -> bool:
    if not tol > 0:
        raise ValueError("tol must be positive")
    if L.n == 1:
        return True
    h = max_slope_sublattice(L, search_margin, max_rank)
    return h.slope <= slope(L) + tol


def _quotient(L: MetrizedLattice, U: np.ndarray, k: int, r: int) -> MetrizedLattice:
    """Metrized quotient by the span of the first k rows of ``U @ basis`` (orthogonal projection)."""
    S = U.astype(float) @ L.basis
    Qm, R = np.linalg.qr(S.T)
    newB = R.T[k:, k:]
    W = None
    if L.w_ambient is not None:
        W = (Qm.T @ L.w_ambient @ Qm)[k:, k:]
    return _make(L.field, L.n - r, newB, W, check=False)


def hn_filtration(L: MetrizedLattice, search_margin: float = 1.0, max_rank: int = DEFAULT_MAX_RANK) -> HNPolygon:
    """Peel maximal destabilizing sublattices off successive metrized quotients."""
    _check_size(L, max_rank)
    vertices = [(0, 0.0)]
    members: list[tuple[tuple[int, ...], ...]] = []
    lift = np.eye(L.N, dtype=np.int64)
    acc_rows: list[list[int]] = []
    cur = L
    while True:
        h = max_slope_sublattice(cur, search_margin, max_rank)
        r = h.of_rank
        rk, dg = vertices[-1]
        if r == cur.n:
            vertices.append((rk + r, degree(L)))
            members.append(tuple(map(tuple, np.eye(L.N, dtype=np.int64).tolist())))
            break
        vertices.append((rk + r, dg + h.degree))
        k = h.saturated_rank
        U = np.array(intlinalg.complete_basis([list(g) for g in h.generators], cur.N), dtype=np.int64)
        new_lift = U @ lift
        acc_rows += new_lift[:k].tolist()
        members.append(tuple(map(tuple, intlinalg.hnf(acc_rows))))
        cur = _quotient(cur, U, k, r)
        lift = new_lift[k:]
    return _merge(vertices, L.field, tuple(members))


def _merge(vertices, F, members) -> HNPolygon:
    vs = [vertices[0]]
    kept = []
    sl: list[float] = []
    for i, v in enumerate(vertices[1:]):
        s = (v[1] - vs[-1][1]) / (v[0] - vs[-1][0])
        if sl and abs(s - sl[-1]) <= SLOPE_TIE * max(1.0, abs(s)):
            vs[-1] = v
            kept[-1] = members[i]
            s = (v[1] - vs[-2][1]) / (v[0] - vs[-2][0])
            sl[-1] = s
        else:
            vs.append(v)
            kept.append(members[i])
            sl.append(s)
    return HNPolygon(tuple((int(a), float(b)) for a, b in vs), tuple(sl), F, tuple(kept))


def canonical_polygon_over_Q(L: MetrizedLattice, search_margin: float = 1.0, max_rank: int = DEFAULT_MAX_RANK) -> HNPolygon:
    return hn_filtration(restrict_scalars(L), search_margin, max_rank)


def polygon_leq(p: HNPolygon, g: HNPolygon, tol: float = 1e-9) -> bool:
    """True iff p lies on or below g at every integer rank."""
    if p.rank != g.rank or abs(p.degree - g.degree) > tol * max(1.0, abs(g.degree)):
        raise EndpointMismatch(f"endpoints differ: {p.vertices[-1]} vs {g.vertices[-1]}")
    return all(p.at(x) <= g.at(x) + tol for x in range(p.rank + 1))
