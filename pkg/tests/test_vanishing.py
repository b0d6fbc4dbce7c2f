import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import geonum.vanishing as vanishing
from geonum.errors import HypothesisViolated, InvalidRank, SamplingStarved
from geonum.lattice import degree, diagonal_lattice, random_lattice, scale, standard_lattice
from geonum.stability import is_semistable
from geonum.theta import h0, h1
from geonum.vanishing import (
    effective_h0_bound,
    effective_h1_bound,
    extremal_duality_residual,
    extremal_values_estimate,
    samplewise_duality_residuals,
    scaling_decay_probe,
    twist_sequence,
)

from conftest import ALL_FIELDS, QI, QQ

C0 = 1 / (1 - math.log(3) / math.pi)
H0_Z = math.log(1.08643481121330801457531612151)


def test_h0_bound_examples():
    two_Z = scale(standard_lattice(QQ, 1), 2)
    b = effective_h0_bound(two_Z)
    assert b == pytest.approx(3 * C0 * math.exp(-4 * math.pi), rel=1e-12)
    assert b == pytest.approx(1.609e-5, abs=1e-8)
    assert h0(two_Z).h0 == pytest.approx(6.97e-6, abs=1e-8) and h0(two_Z).h0 <= b
    bz = effective_h0_bound(standard_lattice(QQ, 1))
    assert bz == pytest.approx(0.1994, abs=1e-4) and H0_Z <= bz
    with pytest.raises(HypothesisViolated):
        effective_h0_bound(diagonal_lattice(QQ, [2, 0.5]))
    assert effective_h0_bound(diagonal_lattice(QQ, [2, 0.5]), assume_semistable=True) is None


def test_h1_bound_examples():
    half = scale(standard_lattice(QQ, 1), 0.5)
    b = effective_h1_bound(half)
    assert b == pytest.approx(1.609e-5, abs=1e-8) and h1(half).h0 <= b
    assert effective_h1_bound(standard_lattice(QQ, 1)) == pytest.approx(0.1994, abs=1e-4)
    assert effective_h1_bound(standard_lattice(QI, 1)) is None
    assert effective_h1_bound(scale(standard_lattice(QI, 1), 0.2)) is not None


def semistable_lattices():
    return st.builds(
        lambda F, n, deg, seed: random_lattice(F, 1 + n % (4 // F.degree), deg, 0.3, seed),
        st.sampled_from(ALL_FIELDS),
        st.integers(0, 3),
        st.floats(-6, 8),
        st.integers(0, 10**6),
    )


@given(semistable_lattices())
def test_bounds_hold(L):
    if not is_semistable(L):
        return
    b0 = effective_h0_bound(L, assume_semistable=True)
    if b0 is not None:
        t = h0(L)
        assert t.h0 - t.h0_error <= b0
    b1 = effective_h1_bound(L, assume_semistable=True)
    if b1 is not None:
        t = h1(L)
        assert t.h0 - t.h0_error <= b1


def test_probe_Z_log2():
    p = scaling_decay_probe(standard_lattice(QQ, 1), math.log(2), 10)
    assert p.reached and p.eventually_decreasing()
    m, v, _ = p.steps[1]
    # h1 at step 1 is h0(2Z)
    assert v == pytest.approx(math.log(1.00000697468471241799127935746), abs=1e-15)
    assert p.steps[-1][0] <= 2
    assert p.bound_values and p.bound_values[0][0] == 0


def test_probe_unstable():
    p = scaling_decay_probe(diagonal_lattice(QQ, [2, 0.5]), 1.0, 20)
    assert p.reached and p.final < 1e-12 and p.eventually_decreasing()
    vals = [s[1] for s in p.steps]
    assert all(a > b for a, b in zip(vals[1:], vals[2:]))
    assert p.bound_values == ()


def test_probe_reports_failure_instead_of_raising():
    p = scaling_decay_probe(scale(standard_lattice(QQ, 2), 4), 0.01, 3)
    assert not p.reached and len(p.steps) == 4
    rec = p.to_record()
    assert rec["reached"] is False and len(rec["steps"]) == 4


@pytest.mark.parametrize("t", [0, -1])
def test_probe_rejects_nonpositive_twist(t):
    with pytest.raises(ValueError):
        scaling_decay_probe(standard_lattice(QQ, 1), t)


@settings(max_examples=10)
@given(semistable_lattices(), st.sampled_from([0.5, 1.0, 2.0]))
def test_probes_converge(L, t):
    p = scaling_decay_probe(L, t, 30)
    assert p.reached and p.eventually_decreasing()


def test_negative_control():
    seq = twist_sequence(standard_lattice(QQ, 2), -0.5, 8)
    h0s = [s[1] for s in seq]
    h1s = [s[2] for s in seq]
    assert all(a >= b for a, b in zip(h0s, h0s[1:])) and h0s[-1] < 1e-6
    assert all(a < b for a, b in zip(h1s, h1s[1:]))
    # Riemann-Roch at each step
    for m, a, b in seq:
        assert a - b == pytest.approx(-m, abs=1e-9)


def test_extremal_rank_one_is_a_point():
    est = extremal_values_estimate(QQ, 1, 0.0, 5, seed=3)
    assert est.m_hat == est.M_hat == pytest.approx(H0_Z, abs=1e-13)
    assert est.m_hat == pytest.approx(0.0829015, abs=1e-7)
    assert est.delta_hat == 0
    assert max(extremal_duality_residual(est)) < 1e-10


def test_extremal_rank_two(hexagonal):
    est = extremal_values_estimate(QQ, 2, 0.0, 40, seed=1)
    assert 0 <= est.m_hat <= est.M_hat
    assert est.M_hat >= h0(hexagonal).h0
    assert all(is_semistable(L) for L in est.samples)
    assert all(abs(degree(L)) < 1e-9 for L in est.samples)
    again = extremal_values_estimate(QQ, 2, 0.0, 40, seed=1)
    assert again.h0_values == est.h0_values


def test_extremal_duality():
    est = extremal_values_estimate(QQ, 2, math.log(2), 30, seed=2)
    assert max(extremal_duality_residual(est)) < 1e-8
    est = extremal_values_estimate(QI, 1, 0.0, 5, seed=2)
    assert max(extremal_duality_residual(est)) < 1e-8
    assert np.max(np.abs(samplewise_duality_residuals(est.samples))) < 1e-8


def test_extremal_validation(monkeypatch):
    with pytest.raises(ValueError):
        extremal_values_estimate(QQ, 2, 0.0, 0, seed=0)
    with pytest.raises(InvalidRank):
        extremal_values_estimate(QQ, 0, 0.0, 3, seed=0)
    monkeypatch.setattr(vanishing, "is_semistable", lambda L: False)
    monkeypatch.setattr(vanishing, "REJECTION_FACTOR", 2)
    with pytest.raises(SamplingStarved):
        extremal_values_estimate(QQ, 2, 0.0, 3, seed=0)


def test_draw_log_covers_rejections():
    est = extremal_values_estimate(QQ, 2, 0.0, 10, seed=5)
    assert [d[0] for d in est.draws] == list(range(len(est.draws)))
    assert sum(d[3] for d in est.draws) == 10
    assert est.to_record()["attempts"] == len(est.draws)
