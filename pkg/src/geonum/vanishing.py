"""Effective vanishing bounds, positivity probes and sampled extrema of h^0.

The two explicit bounds control h^0 for very negative degree and h^1 for very
positive degree on semistable lattices. A positive rank-1 twist is realized as
scaling the metric by ``exp(-t/d)`` per step; its powers drive h^1 to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Sequence

import numpy as np

from .errors import HypothesisViolated, InvalidRank, SamplingStarved
from .field import NumberField, parse_field
from .lattice import MetrizedLattice, degree, omega_twist, random_lattice, scale
from .stability import DEFAULT_MAX_RANK, is_semistable
from .theta import h0 as theta_h0
from .theta import h1 as theta_h1

# 1 / (1 - log 3 / pi)
_C0 = 1.0 / (1.0 - math.log(3.0) / math.pi)
SAMPLING_SPREAD = 1.0
REJECTION_FACTOR = 1000


def _thresholds(L: MetrizedLattice) -> tuple[float, float]:
    n, d = L.n, L.field.degree
    base = 0.5 * d * n * math.log(n)
    return -base, base + n * L.field.log_disc


def _require_semistable(L: MetrizedLattice, assume_semistable: bool) -> None:
    if not assume_semistable and not is_semistable(L):
        raise HypothesisViolated("lattice is not semistable")


def effective_h0_bound(L: MetrizedLattice, assume_semistable: bool = False) -> float | None:
    """Upper bound on h^0 for semistable L of sufficiently negative degree; None if the degree is too large."""
    _require_semistable(L, assume_semistable)
    n, d = L.n, L.field.degree
    deg = degree(L)
    if deg > _thresholds(L)[0]:
        return None
    return 3.0 ** (n * d) * _C0 * math.exp(-math.pi * d * math.exp(-2 * deg / (n * d)))


def effective_h1_bound(L: MetrizedLattice, assume_semistable: bool = False) -> float | None:
    """Upper bound on h^1 for semistable L of sufficiently positive degree; None if the degree is too small."""
    _require_semistable(L, assume_semistable)
    n, d = L.n, L.field.degree
    deg = degree(L)
    if deg < _thresholds(L)[1]:
        return None
    disc_factor = L.field.abs_disc ** (-2.0 / d)
    return 3.0 ** (n * d) * _C0 * math.exp(-math.pi * d * disc_factor * math.exp(2 * deg / (n * d)))


@dataclass(frozen=True)
class DecayProbe:
    twist_degree: float
    steps: tuple[tuple[int, float, float], ...]
    bound_values: tuple[tuple[int, float], ...]
    tol: float
    reached: bool

    @property
    def final(self) -> float:
        return self.steps[-1][1]

    def eventually_decreasing(self) -> bool:
        """True if h^1 never rises (beyond certified error) after its peak, or after the bound applies."""
        vals = [s[1] for s in self.steps]
        errs = [s[2] for s in self.steps]
        start = int(np.argmax(vals))
        if self.bound_values:
            start = min(start, self.bound_values[0][0])
        return all(vals[i + 1] <= vals[i] + errs[i] + errs[i + 1] for i in range(start, len(vals) - 1))

    def to_record(self) -> dict:
        return {
            "twist_degree": self.twist_degree,
            "steps": [{"m": m, "h1": v, "h1_error": e} for m, v, e in self.steps],
            "bound_values": [{"m": m, "bound": b} for m, b in self.bound_values],
            "tol": self.tol,
            "reached": self.reached,
        }


def _twist(L: MetrizedLattice, twist_deg: float, m: int) -> MetrizedLattice:
    return scale(L, math.exp(-m * twist_deg / L.field.degree))


def scaling_decay_probe(L: MetrizedLattice, twist_deg: float, m_max: int = 30, tol: float = 1e-12,
                        assume_semistable: bool | None = None) -> DecayProbe:
    """h^1 of ``twist^m (x) L`` for m = 0, 1, ... until it drops below tol or m reaches m_max.

    The bound of the h^1 vanishing theorem is recorded for steps where it
    applies (only when L is semistable, which is scale invariant).
    """
    if not twist_deg > 0:
        raise ValueError(f"twist degree must be positive, got {twist_deg}")
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if assume_semistable is None:
        assume_semistable = L.N <= DEFAULT_MAX_RANK and is_semistable(L)
    steps, bounds = [], []
    reached = False
    for m in range(m_max + 1):
        Lm = _twist(L, twist_deg, m)
        t = theta_h1(Lm, tol=tol * 1e-3)
        steps.append((m, max(t.h0, 0.0), t.h0_error))
        if assume_semistable:
            b = effective_h1_bound(Lm, assume_semistable=True)
            if b is not None:
                bounds.append((m, b))
        if t.h0 + t.h0_error < tol:
            reached = True
            break
    return DecayProbe(float(twist_deg), tuple(steps), tuple(bounds), tol, reached)


def twist_sequence(L: MetrizedLattice, twist_deg: float, m_max: int, tol: float = 1e-12) -> list[tuple[int, float, float]]:
    """``(m, h0, h1)`` of ``twist^m (x) L`` for m = 0..m_max; any sign of twist_deg is allowed."""
    out = []
    for m in range(m_max + 1):
        Lm = _twist(L, twist_deg, m)
        out.append((m, theta_h0(Lm, tol).h0, theta_h1(Lm, tol).h0))
    return out


@dataclass(frozen=True)
class ExtremalEstimate:
    n: int
    d: float
    sample_count: int
    m_hat: float
    M_hat: float
    delta_hat: float
    field: NumberField = dc_field(repr=False)
    samples: tuple[MetrizedLattice, ...] = dc_field(default=(), repr=False)
    h0_values: tuple[float, ...] = dc_field(default=(), repr=False)
    # (sample_id, degree, h0, semistable) for every draw, accepted or not
    draws: tuple[tuple[int, float, float, bool], ...] = dc_field(default=(), repr=False)

    def to_record(self) -> dict:
        return {
            "field": self.field.name,
            "n": self.n,
            "d": self.d,
            "sample_count": self.sample_count,
            "m_hat": self.m_hat,
            "M_hat": self.M_hat,
            "delta_hat": self.delta_hat,
            "attempts": len(self.draws),
        }


def extremal_values_estimate(F, n: int, d: float, samples: int, seed: int, tol: float = 1e-12,
                             spread: float = SAMPLING_SPREAD) -> ExtremalEstimate:
    """Observed min and max of h^0 over randomly drawn semistable lattices of degree d.

    Draw i uses the seed pair ``(seed, i)``, so results do not depend on
    evaluation order. Gives up after ``1000 * samples`` draws.
    """
    F = parse_field(F) if not isinstance(F, NumberField) else F
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if n < 1:
        raise InvalidRank(f"rank must be positive, got {n}")
    kept, vals, draws = [], [], []
    i = 0
    limit = REJECTION_FACTOR * samples
    while len(kept) < samples:
        if i >= limit:
            raise SamplingStarved(f"only {len(kept)} semistable lattices in {limit} draws")
        L = random_lattice(F, n, d, spread, (seed, i))
        ok = n == 1 or is_semistable(L)
        h = theta_h0(L, tol).h0
        draws.append((i, degree(L), h, ok))
        if ok:
            kept.append(L)
            vals.append(h)
        i += 1
    lo, hi = min(vals), max(vals)
    return ExtremalEstimate(n, float(d), samples, lo, hi, hi - lo, F, tuple(kept), tuple(vals), tuple(draws))


def extremal_duality_residual(est: ExtremalEstimate, tol: float = 1e-12) -> tuple[float, float]:
    """Compare the extrema on the dual stratum with the shift predicted by duality.

    Each stored sample is mapped to omega_F (x) its dual, of degree
    ``n log|disc| - d``; returns the residuals for the max and the min.
    """
    if not est.samples:
        raise ValueError("estimate carries no stored samples")
    shift = 0.5 * est.n * est.field.log_disc - est.d
    dual_vals = [theta_h0(omega_twist(L), tol).h0 for L in est.samples]
    return abs(max(dual_vals) - est.M_hat - shift), abs(min(dual_vals) - est.m_hat - shift)


def samplewise_duality_residuals(lattices: Sequence[MetrizedLattice], tol: float = 1e-12) -> np.ndarray:
    """``h0(omega (x) dual L) - h0(L) + deg(L) - (n/2) log|disc|`` for each lattice, both sides summed directly."""
    out = []
    for L in lattices:
        a = theta_h0(L, tol, method="direct").h0
        b = theta_h0(omega_twist(L), tol, method="direct").h0
        out.append(b - a + degree(L) - 0.5 * L.n * L.field.log_disc)
    return np.array(out)
