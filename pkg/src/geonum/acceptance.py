"""Acceptance checks, shared by the test suite and the ``selftest`` command.

Each check returns a :class:`CriterionResult`; none of them raise on failure.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .field import make_field
from .lattice import (
    MetrizedLattice,
    dual_lattice,
    from_basis,
    random_lattice,
    scale,
    standard_lattice,
)
from .oracles import hn_polygon_oracle
from .stability import hn_filtration, is_semistable
from .theta import h0, h1, rr_check
from .vanishing import (
    effective_h0_bound,
    effective_h1_bound,
    extremal_duality_residual,
    extremal_values_estimate,
    samplewise_duality_residuals,
    scaling_decay_probe,
)
from .zeta import pole_check, rank1_zeta, rank2_zeta, rank2_zeta_direct, xi_reference

CORPUS_SEED = 20240611
FIELDS = (None, -1, 5)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    time_limit: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.time_limit:.0f}s)" if self.time_limit else ""
        return f"[{status}] {self.number:2d}. {self.title}: {self.seconds:.2f}s{limit}"


def random_corpus(count: int = 200, seed: int = CORPUS_SEED, max_N: int = 6) -> list[MetrizedLattice]:
    """Random lattices over Q, Q(i) and Q(sqrt 5) with Z-rank at most max_N and degree in [-2, 2]."""
    out = []
    for i in range(count):
        F = make_field(FIELDS[i % 3])
        nmax = max_N // F.degree
        n = 1 + (i // 3) % nmax
        rng = np.random.default_rng(np.random.SeedSequence([seed, i, 7]))
        deg = float(rng.uniform(-2.0, 2.0))
        out.append(random_lattice(F, n, deg, 0.6, (seed, i)))
    return out


def random_integer_lattices(count: int = 50, seed: int = CORPUS_SEED, max_N: int = 3) -> list[MetrizedLattice]:
    """Nonsingular integer bases with entries in [-3, 3] over Q."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 4]))
    Q = make_field(None)
    out = []
    while len(out) < count:
        N = int(rng.integers(1, max_N + 1))
        B = rng.integers(-3, 4, (N, N))
        if abs(round(np.linalg.det(B))) == 0:
            continue
        out.append(from_basis(Q, N, B))
    return out


def _timed(number: int, title: str, limit: float | None, fn: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        ok = False
        detail["timeout"] = True
    return CriterionResult(number, title, bool(ok), detail, dt, limit)


def criterion_1() -> CriterionResult:
    def run():
        worst = 0.0
        for L in random_corpus():
            worst = max(worst, abs(rr_check(L, 1e-12).residual))
        return worst < 1e-9, {"max_abs_residual": worst, "lattices": 200}

    return _timed(1, "Riemann-Roch residual below 1e-9", 60.0, run)


def criterion_2() -> CriterionResult:
    def run():
        worst = 0.0
        for L in random_corpus():
            a = h0(L, 1e-12, method="direct")
            b = h0(dual_lattice(L), 1e-12, method="direct")
            c = L.covolume
            allowed = c * a.abs_error + b.abs_error + 1e-13 * b.value
            worst = max(worst, abs(a.value * c - b.value) / allowed)
        return worst <= 1.0, {"max_ratio_to_allowed": worst}

    return _timed(2, "Poisson identity within tail bounds", None, run)


def criterion_3() -> CriterionResult:
    def run():
        Q = make_field(None)
        golden = math.log(math.pi**0.25 / math.gamma(0.75))
        # Poisson: theta((1/2)Z) = 2 theta(2Z); the short decimal 2.0000139 is this value truncated
        poisson = math.log(2.0 * (1.0 + 2.0 * sum(math.exp(-4 * math.pi * m * m) for m in range(1, 6))))
        a = h0(standard_lattice(Q, 1), 1e-14).h0
        b = h0(scale(standard_lattice(Q, 1), 0.5), 1e-14).h0
        ok = abs(a - golden) < 1e-10 and abs(b - poisson) < 1e-9 and abs(math.exp(b) - 2.0000139) < 1e-7
        return ok, {"h0_Z": a, "expected": golden, "h0_half_Z": b, "expected_half": poisson,
                    "gap_to_short_decimal": abs(b - math.log(2.0000139))}

    return _timed(3, "theta golden values", None, run)


def criterion_4() -> CriterionResult:
    def run():
        mismatches = 0
        for L in random_integer_lattices():
            p = hn_filtration(L).vertices
            p2 = hn_filtration(L, search_margin=2.0).vertices
            o = hn_polygon_oracle(L)
            same = len(p) == len(o) and all(a[0] == b[0] and abs(a[1] - b[1]) < 1e-9 for a, b in zip(p, o))
            if not same or p != p2:
                mismatches += 1
        return mismatches == 0, {"mismatches": mismatches, "lattices": 50}

    return _timed(4, "HN filtration matches exhaustive oracle", 300.0, run)


def criterion_5() -> CriterionResult:
    def run():
        Q = make_field(None)
        spot_h0 = h0(scale(standard_lattice(Q, 1), 2.0)).h0
        spot_bound = effective_h0_bound(scale(standard_lattice(Q, 1), 2.0))
        ok = spot_bound is not None and spot_h0 <= spot_bound and abs(spot_bound - 1.609e-5) < 1e-8
        checked0 = checked1 = violations = 0
        for i in range(60):
            F = make_field(FIELDS[i % 3])
            n = 1 + (i // 3) % (4 // F.degree)
            rng = np.random.default_rng(np.random.SeedSequence([CORPUS_SEED, i, 5]))
            deg = float(rng.uniform(-6.0, 8.0))
            L = random_lattice(F, n, deg, 0.4, (CORPUS_SEED, i, 5))
            if not is_semistable(L):
                continue
            b0 = effective_h0_bound(L, assume_semistable=True)
            if b0 is not None:
                t = h0(L)
                checked0 += 1
                violations += t.h0 - t.h0_error > b0
            b1 = effective_h1_bound(L, assume_semistable=True)
            if b1 is not None:
                t = h1(L)
                checked1 += 1
                violations += t.h0 - t.h0_error > b1
        ok = ok and violations == 0 and checked0 > 0 and checked1 > 0
        return ok, {"spot_h0": spot_h0, "spot_bound": spot_bound, "h0_checks": checked0, "h1_checks": checked1,
                    "violations": violations}

    return _timed(5, "effective vanishing inequalities", None, run)


def criterion_6() -> CriterionResult:
    def run():
        failures = 0
        worst_m = 0
        for L in random_corpus(20):
            for t in (0.5, 1.0, 2.0):
                p = scaling_decay_probe(L, t, 30, 1e-12)
                worst_m = max(worst_m, p.steps[-1][0])
                if not (p.reached and p.eventually_decreasing()):
                    failures += 1
        return failures == 0, {"failures": failures, "max_steps": worst_m}

    return _timed(6, "h1 of positive twists vanishes", None, run)


def strip_points() -> list[complex]:
    return [complex(x, y) for x in (0.1, 0.3, 0.5, 0.7, 0.9) for y in (1.0, 5.0, 14.134725, 25.0)]


def criterion_7() -> CriterionResult:
    def run():
        pts = strip_points() + [2.0, 3.0, 4.0]
        worst = max(abs(rank1_zeta(s).value - xi_reference(s)) for s in pts)
        r1 = pole_check(rank1_zeta, 1)
        r0 = pole_check(rank1_zeta, 0)
        ok = worst < 1e-8 and abs(r1 - 1) < 1e-6 and abs(r0 + 1) < 1e-6
        return ok, {"max_abs_diff": worst, "residue_1": r1, "residue_0": r0}

    return _timed(7, "rank-1 zeta equals completed Riemann zeta", 30.0, run)


def criterion_8() -> CriterionResult:
    def run():
        r = pole_check(rank2_zeta, 1, rtol=1e-6)
        target = math.pi / 3 - 1
        return abs(r - target) < 1e-3, {"residue": r, "expected": target}

    return _timed(8, "rank-2 residue at s=1", 600.0, run)


def criterion_9() -> CriterionResult:
    def run():
        detail = {}
        ok = True
        for s in (2.0, 3.0):
            a = rank2_zeta(s)
            d = rank2_zeta_direct(s)
            gap = abs(a.value - d.value)
            ok &= gap <= a.abs_error + d.abs_error
            detail[f"s={s:g}"] = {"assembled": a.value.real, "direct": d.value.real, "gap": gap,
                                  "allowed": a.abs_error + d.abs_error}
        return ok, detail

    return _timed(9, "rank-2 zeta path independence", None, run)


def criterion_10() -> CriterionResult:
    def run():
        worst = 0.0
        for F, n, d, k in ((None, 2, math.log(2), 100), (-1, 1, 0.0, 20), (None, 1, 0.0, 5)):
            est = extremal_values_estimate(make_field(F), n, d, k, seed=1)
            worst = max(worst, *extremal_duality_residual(est))
            worst = max(worst, float(np.max(np.abs(samplewise_duality_residuals(est.samples)))))
        high = extremal_values_estimate(make_field(None), 2, 10.0, 1000, seed=1)
        gap = high.M_hat - 10.0
        return worst < 1e-8 and gap < 1e-3, {"max_duality_residual": worst, "M_hat_minus_d": gap}

    return _timed(10, "extremal duality and uniform boundedness", None, run)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(which=None) -> list[CriterionResult]:
    keys = sorted(CRITERIA) if which is None else list(which)
    return [CRITERIA[k]() for k in keys]
