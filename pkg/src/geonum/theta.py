"""Certified Gaussian lattice sums: h^0, h^1 and the Riemann-Roch residual.

For a lattice with counting form Q the arithmetic count of H^0 is
``theta = sum_x exp(-pi Q(x))``. Vectors with ``Q(x) <= R^2`` are enumerated
exactly; the rest is bounded, after LLL reduction with Gram-Schmidt lengths
``b*_i``, by::

    exp(-pi R^2 / 2) * prod_i (1 + 2 * sum_{m>=1} exp(-(pi/2) m^2 |b*_i|^2))

which follows from ``exp(-pi Q) <= exp(-pi R^2/2) exp(-pi Q/2)`` on the tail
and the fact that a shifted one-dimensional Gaussian sum never exceeds the
centred one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .enumeration import DEFAULT_CAP, ReducedBasis, predicted_count
from .errors import InvalidScale
from .lattice import MetrizedLattice, degree, omega_twist

EPS = np.finfo(float).eps
# above this many predicted points the auto method sums on the dual side instead
AUTO_LIMIT = 2e5


@dataclass(frozen=True)
class ThetaValue:
    value: float
    excess: float  # value - 1, kept separately so tiny counts keep their precision
    radius: float  # cutoff on Q(x)
    enumerated: int  # vectors with Q(x) <= radius, zero included
    tail_bound: float
    round_bound: float
    h0: float
    h0_error: float
    method: str = "direct"

    @property
    def abs_error(self) -> float:
        return self.tail_bound + self.round_bound

    def to_record(self) -> dict:
        return {
            "value": self.value,
            "h0": self.h0,
            "h0_error": self.h0_error,
            "radius": self.radius,
            "enumerated": self.enumerated,
            "tail_bound": self.tail_bound,
            "round_bound": self.round_bound,
            "method": self.method,
        }


def _half_gaussian_sum_bound(a: float) -> float:
    """Upper bound on ``sum_{m>=1} exp(-a m^2)``."""
    if a <= 0:
        return math.inf
    integral = 0.5 * math.sqrt(math.pi / a)
    if a < 1e-3:
        return integral
    s = 0.0
    m = 1
    while True:
        t = math.exp(-a * m * m)
        s += t
        nxt = math.exp(-a * (m + 1) ** 2)
        if nxt < 1e-18 * max(s, 1e-300) or nxt == 0.0:
            # terms past m decay at least geometrically with ratio exp(-a(2m+3))
            return min(s + nxt / (1.0 - math.exp(-a * (2 * m + 3))), integral)
        m += 1


def tail_product(bsq: np.ndarray, t: float = 1.0) -> float:
    """``prod_i (1 + 2 sum_{m>=1} exp(-(pi/2) t m^2 b*_i^2))`` as a certified upper bound."""
    return float(np.prod([1.0 + 2.0 * _half_gaussian_sum_bound(0.5 * math.pi * t * b) for b in bsq]))


def auto_radius(bsq: np.ndarray, tol: float, t: float = 1.0) -> float:
    """Smallest Q-cutoff R^2 whose tail bound for ``exp(-pi t Q)`` is at most tol/2."""
    P = tail_product(bsq, t)
    return max(0.0, 2.0 / (math.pi * t) * math.log(2.0 * P / tol))


class ThetaEngine:
    """Reusable enumeration state for one lattice."""

    def __init__(self, L: MetrizedLattice, cap: float = DEFAULT_CAP):
        self.lattice = L
        self.rb = ReducedBasis(L.basis)
        self.cap = cap

    def short_vectors(self, bound: float) -> tuple[np.ndarray, np.ndarray]:
        return self.rb.enumerate(bound, self.cap)

    def evaluate(self, tol: float, radius: float | None = None) -> ThetaValue:
        if not tol > 0:
            raise ValueError(f"tolerance must be positive, got {tol}")
        R2 = auto_radius(self.rb.bsq, tol) if radius is None else float(radius)
        _, q = self.short_vectors(R2)
        terms = np.exp(-math.pi * q)
        excess = 2.0 * math.fsum(terms)
        tail = math.exp(-0.5 * math.pi * R2) * tail_product(self.rb.bsq)
        value = 1.0 + excess
        # Q(x) carries relative error ~N eps; propagate through exp(-pi Q)
        rnd = excess * (math.pi * R2 * (self.rb.N + 2) * EPS) + 4 * EPS * value
        h0 = math.log1p(excess)
        h0_err = (tail + rnd) / max(value - rnd, 1.0)
        return ThetaValue(value, excess, R2, 2 * len(q) + 1, float(tail), float(rnd), h0, float(h0_err))

    def profile(self, t: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
        """Excess ``sum_{x != 0} exp(-pi t Q(x))`` for every positive t, with tail bounds.

        One enumeration, sized for the smallest t, serves every t.
        """
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise InvalidScale("profile scales must be positive")
        tmin = float(t.min())
        R2 = auto_radius(self.rb.bsq, tol, tmin)
        _, q = self.short_vectors(R2)
        excess = 2.0 * np.exp(-math.pi * np.outer(t, q)).sum(axis=1)
        tails = np.array([math.exp(-0.5 * math.pi * ti * R2) * tail_product(self.rb.bsq, ti) for ti in t])
        return excess, tails


def short_vectors(L: MetrizedLattice, bound: float, cap: float = DEFAULT_CAP) -> Iterator[tuple[tuple[int, ...], float, int]]:
    """Yield ``(coords, Q, multiplicity)`` for nonzero x with ``Q(x) <= bound``.

    Each +-pair appears once (first nonzero coordinate positive) with
    multiplicity 2, in lexicographic order of coordinates.
    """
    if not bound > 0:
        raise ValueError(f"bound must be positive, got {bound}")
    X, q = ThetaEngine(L, cap).short_vectors(bound)
    for x, v in zip(X, q):
        yield tuple(int(c) for c in x), float(v), 2


def _via_dual(L: MetrizedLattice, tol: float, cap: float) -> ThetaValue:
    """h0 from the dual sum and Riemann-Roch: ``h0 = h0(dual) + deg - (n/2) log|disc|``."""
    t = ThetaEngine(omega_twist(L), cap).evaluate(tol)
    shift = degree(L) - 0.5 * L.n * L.field.log_disc
    h = t.h0 + shift
    err = float(t.h0_error + 16 * EPS * (abs(shift) + 1.0))
    value = math.exp(h)
    return ThetaValue(value, math.expm1(h), t.radius, t.enumerated, t.tail_bound * math.exp(shift),
                      t.round_bound * math.exp(shift), h, err, "dual")


def h0(L: MetrizedLattice, tol: float = 1e-12, radius: float | None = None, cap: float = DEFAULT_CAP,
       method: str = "auto") -> ThetaValue:
    """Certified ``log sum_{x in L} exp(-pi Q(x))``.

    ``method="direct"`` always sums over L. ``"dual"`` sums over the dual and
    applies Riemann-Roch. ``"auto"`` (default) sums directly unless that would
    enumerate more than ``AUTO_LIMIT`` points and the dual side is cheaper.
    """
    if method not in ("auto", "direct", "dual"):
        raise ValueError(f"unknown method {method!r}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    eng = ThetaEngine(L, cap)
    if radius is not None or method == "direct":
        return eng.evaluate(tol, radius)
    if method == "auto":
        cost = predicted_count(eng.rb.bsq, auto_radius(eng.rb.bsq, tol))
        if cost <= AUTO_LIMIT:
            return eng.evaluate(tol)
        dual = ReducedBasis(omega_twist(L).basis)
        if predicted_count(dual.bsq, auto_radius(dual.bsq, tol)) >= cost:
            return eng.evaluate(tol)
    return _via_dual(L, tol, cap)


def h1(L: MetrizedLattice, tol: float = 1e-12, cap: float = DEFAULT_CAP, method: str = "auto") -> ThetaValue:
    """h^1 through duality: ``h0(omega_F tensor dual L)``."""
    return h0(omega_twist(L), tol, cap=cap, method=method)


@dataclass(frozen=True)
class RRResidual:
    residual: float
    error: float
    h0: ThetaValue
    h1: ThetaValue
    degree: float


def rr_check(L: MetrizedLattice, tol: float = 1e-12) -> RRResidual:
    a, b = h0(L, tol, method="direct"), h1(L, tol, method="direct")
    deg = degree(L)
    res = a.h0 - b.h0 - deg + 0.5 * L.n * L.field.log_disc
    err = a.h0_error + b.h0_error + 64 * EPS * (abs(deg) + abs(a.h0) + abs(b.h0) + 1.0)
    return RRResidual(res, err, a, b, deg)


def rr_residual(L: MetrizedLattice, tol: float = 1e-12) -> float:
    """``h0 - h1 - deg + (n/2) log|disc|``; zero for every lattice up to certified error."""
    return rr_check(L, tol).residual


def effectivity_count(L: MetrizedLattice, tol: float = 1e-12) -> float:
    return h0(L, tol).value
