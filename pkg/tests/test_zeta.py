import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geonum.errors import PoleArgument
from geonum.stability import is_semistable
from geonum.zeta import (
    moduli_point,
    moduli_volume_rank2,
    pole_check,
    rank1_zeta,
    rank2_closed_form,
    rank2_zeta,
    rank2_zeta_direct,
    sample_semistable_points,
    xi_reference,
)

mpmath.mp.dps = 30


def xi_mp(s):
    s = mpmath.mpc(s)
    return complex(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))


def rank2_mp(s):
    """Rank-2 zeta over Q in closed form, from mpmath."""
    s = mpmath.mpc(s)
    return complex(2 * xi_mp(2 * s) / (s - 1) - 2 * xi_mp(2 * s - 1) / s)


STRIP = [complex(x, y) for x in (0.1, 0.3, 0.5, 0.7, 0.9) for y in (1.0, 5.0, 14.134725, 25.0)]


@pytest.mark.parametrize("s", STRIP + [2, 3, 4, -1.5, complex(2.5, -7)])
def test_xi_against_mpmath(s):
    ref = xi_mp(s)
    assert abs(xi_reference(s) - ref) <= 1e-12 * max(abs(ref), 1e-3)


def test_xi_examples():
    assert xi_reference(2) == pytest.approx(math.pi / 6, rel=1e-14)
    v = xi_reference(0.5)
    assert abs(v.imag) < 1e-15 and v.real == pytest.approx(xi_reference(0.5 + 0j).real)
    assert pole_check(xi_reference, 1) == pytest.approx(1, abs=1e-7)
    assert pole_check(xi_reference, 0) == pytest.approx(-1, abs=1e-7)
    with pytest.raises(PoleArgument):
        xi_reference(1)


@given(st.floats(-3, 4), st.floats(-20, 20))
def test_xi_functional_equation(x, y):
    s = complex(x, y)
    if abs(s) < 1e-3 or abs(s - 1) < 1e-3:
        return
    a, b = xi_reference(s), xi_reference(1 - s)
    assert abs(a - b) <= 1e-11 * max(1.0, abs(a))


@pytest.mark.parametrize("s", STRIP + [2, 3, 4])
def test_rank1_matches_xi(s):
    z = rank1_zeta(s)
    assert abs(z.value - xi_mp(s)) < 1e-10
    assert z.abs_error <= 1e-12
    assert z.value == z.I_s + z.I_1ms + z.polar


def test_rank1_near_zero_of_zeta():
    z = rank1_zeta(complex(0.5, 14.134725))
    assert abs(z.value) < 1e-5


def test_rank1_symmetry_and_record():
    s = complex(0.3, 5.0)
    a, b = rank1_zeta(s), rank1_zeta(1 - s)
    assert a.value == b.value
    rec = a.to_record()
    assert rec["error_kind"] == "certified" and rec["rank"] == 1


def test_rank1_truncation_doubling():
    s = complex(0.7, 25)
    a = rank1_zeta(s)
    b = rank1_zeta(s, T_max=2 * a.T_max)
    assert abs(a.value - b.value) <= a.abs_error + b.abs_error


def test_rank1_residues():
    assert pole_check(rank1_zeta, 1) == pytest.approx(1, abs=1e-6)
    assert pole_check(rank1_zeta, 0) == pytest.approx(-1, abs=1e-6)


@pytest.mark.parametrize("s", [0, 1])
def test_pole_arguments(s):
    with pytest.raises(PoleArgument):
        rank1_zeta(s)
    with pytest.raises(PoleArgument):
        rank2_zeta(s)


def test_moduli_volumes():
    v, e = moduli_volume_rank2(with_error=True)
    assert v == pytest.approx(math.pi / 3 - 1, abs=1e-13) and 0 <= e < 1e-8
    assert moduli_volume_rank2("cusp") == 1
    assert moduli_volume_rank2("full") == pytest.approx(math.pi / 3, abs=1e-13)
    with pytest.raises(ValueError):
        moduli_volume_rank2("other")


def test_moduli_points():
    pts = sample_semistable_points(1000, seed=0)
    assert all(p.semistable_region and abs(p.tau) >= 1 - 1e-12 for p in pts)
    assert all(is_semistable(p.lattice) for p in pts[:200])
    assert all(p.lattice.covolume == pytest.approx(1.0, abs=1e-12) for p in pts)
    p = moduli_point(complex(0.1, 2.0), T=3.0)
    assert p.lattice.covolume == pytest.approx(3.0, rel=1e-12)
    assert not p.semistable_region and not is_semistable(p.lattice)
    with pytest.raises(ValueError):
        moduli_point(complex(0.7, 1.0))
    with pytest.raises(ValueError):
        moduli_point(complex(0.0, 0.5))


@pytest.mark.parametrize("s", [2, 3, 0.45, complex(0.5, 3), complex(0.3, 10), 1.7, -0.4])
def test_rank2_against_closed_form(s):
    z = rank2_zeta(s)
    ref = rank2_mp(s)
    assert abs(z.value - ref) <= max(z.abs_error, 1e-9)
    assert z.value == z.I_s + z.I_1ms + z.polar
    assert abs(rank2_closed_form(s) - ref) < 1e-11 * max(1, abs(ref))


def test_rank2_residues():
    target = math.pi / 3 - 1
    assert pole_check(rank2_zeta, 1, rtol=1e-6) == pytest.approx(target, abs=1e-6)
    assert pole_check(rank2_zeta, 0, rtol=1e-6) == pytest.approx(-target, abs=1e-6)


@pytest.mark.parametrize("s", [2.0, 3.0])
def test_rank2_direct_path(s):
    a, d = rank2_zeta(s), rank2_zeta_direct(s)
    assert abs(a.value - d.value) <= a.abs_error + d.abs_error
    assert abs(d.value - rank2_mp(s)) <= d.abs_error
    with pytest.raises(ValueError):
        rank2_zeta_direct(0.5)


def test_rank2_monte_carlo():
    s = 2.0
    z = rank2_zeta(s, method="monte-carlo", samples=4000, seed=3)
    assert z.method == "monte-carlo" and z.sample_count == 4000
    assert abs(z.value - rank2_mp(s)) <= z.abs_error
    again = rank2_zeta(s, method="monte-carlo", samples=4000, seed=3)
    assert again.value == z.value
    with pytest.raises(ValueError):
        rank2_zeta(s, method="simpson")
