import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geonum.errors import EndpointMismatch, SearchTooLarge, ZeroRank
from geonum.lattice import degree, diagonal_lattice, dual_lattice, from_basis, random_lattice, scale, standard_lattice
from geonum.oracles import hn_polygon_oracle
from geonum.stability import (
    HNPolygon,
    canonical_polygon_over_Q,
    hn_filtration,
    is_semistable,
    max_slope_sublattice,
    polygon_leq,
    slope,
)

from conftest import ALL_FIELDS, QI, Q5, QQ

LOG2, LOG4 = math.log(2), math.log(4)


def close_vertices(p, expected, tol=1e-9):
    assert len(p.vertices) == len(expected)
    for (a, b), (c, d) in zip(p.vertices, expected):
        assert a == c and b == pytest.approx(d, abs=tol)


def test_two_step_polygon():
    p = hn_filtration(diagonal_lattice(QQ, [2, 0.5]))
    close_vertices(p, [(0, 0), (1, LOG2), (2, 0)])
    assert p.slopes == pytest.approx((LOG2, -LOG2))


def test_three_step_polygon():
    p = hn_filtration(diagonal_lattice(QQ, [0.25, 1, 4]))
    close_vertices(p, [(0, 0), (1, LOG4), (2, LOG4), (3, 0)])
    assert len(p.filtration) == 3


def test_rank_one_destabilizer():
    L = diagonal_lattice(QQ, [0.5, 1, 2])
    h = max_slope_sublattice(L)
    assert h.of_rank == 1 and h.slope == pytest.approx(LOG2)
    assert not is_semistable(L)


def test_highest_rank_wins_ties():
    h = max_slope_sublattice(diagonal_lattice(QQ, [0.5, 0.5, 2]))
    assert h.of_rank == 2 and h.slope == pytest.approx(LOG2)


def test_semistable_examples(hexagonal):
    assert is_semistable(hexagonal)
    assert is_semistable(standard_lattice(QQ, 3))
    assert is_semistable(standard_lattice(QI, 2))
    close_vertices(hn_filtration(hexagonal), [(0, 0), (2, 0)])


@pytest.mark.parametrize("F,end", [(QI, -LOG2), (Q5, -0.5 * math.log(5))])
def test_canonical_polygon_of_integers(F, end):
    p = canonical_polygon_over_Q(standard_lattice(F, 1))
    assert p.rank == 2 and p.degree == pytest.approx(end, abs=1e-12)
    assert p.base_field.is_rational


def test_polygon_leq_examples(hexagonal):
    flat = hn_filtration(standard_lattice(QQ, 2))
    bent = hn_filtration(diagonal_lattice(QQ, [2, 0.5]))
    assert polygon_leq(flat, bent)
    assert not polygon_leq(bent, flat)
    assert polygon_leq(hn_filtration(hexagonal), flat)
    with pytest.raises(EndpointMismatch):
        polygon_leq(flat, hn_filtration(standard_lattice(QQ, 3)))
    with pytest.raises(EndpointMismatch):
        polygon_leq(flat, hn_filtration(scale(standard_lattice(QQ, 2), 2)))


def test_slope_errors():
    Z = standard_lattice(QQ, 2)
    assert slope(Z) == 0
    assert slope(scale(Z, 0.5)) == pytest.approx(LOG2)


def test_search_cap():
    with pytest.raises(SearchTooLarge):
        hn_filtration(standard_lattice(QQ, 7))
    with pytest.raises(SearchTooLarge):
        max_slope_sublattice(standard_lattice(QQ, 4), max_rank=3)
    with pytest.raises(ValueError):
        max_slope_sublattice(standard_lattice(QQ, 2), search_margin=0.5)


def test_filtration_is_nested():
    p = hn_filtration(diagonal_lattice(QQ, [0.25, 1, 4]))
    sizes = [len(m) for m in p.filtration]
    assert sizes == sorted(sizes) and sizes[-1] == 3


def integer_lattice():
    def build(N, entries):
        B = np.array(entries[: N * N]).reshape(N, N)
        if round(np.linalg.det(B)) == 0:
            B = B + 7 * np.eye(N, dtype=int)
        return from_basis(QQ, N, B)

    return st.builds(build, st.integers(2, 3), st.lists(st.integers(-3, 3), min_size=9, max_size=9))


@given(integer_lattice())
def test_matches_oracle(L):
    p = hn_filtration(L)
    o = hn_polygon_oracle(L)
    assert [v[0] for v in p.vertices] == [v[0] for v in o]
    assert [v[1] for v in p.vertices] == pytest.approx([v[1] for v in o], abs=1e-9)


def lattices():
    return st.builds(
        lambda F, n, deg, seed: random_lattice(F, 1 + n % (4 // F.degree), deg, 0.8, seed),
        st.sampled_from(ALL_FIELDS),
        st.integers(0, 3),
        st.floats(-2, 2),
        st.integers(0, 10**6),
    )


@given(lattices())
def test_polygon_invariants(L):
    p = hn_filtration(L)
    assert p.vertices[0] == (0, 0.0) and p.rank == L.n
    assert p.degree == pytest.approx(degree(L), abs=1e-9)
    assert all(a > b for a, b in zip(p.slopes, p.slopes[1:]))
    wide = hn_filtration(L, search_margin=2.0)
    assert [v[0] for v in wide.vertices] == [v[0] for v in p.vertices]
    assert [v[1] for v in wide.vertices] == pytest.approx([v[1] for v in p.vertices], abs=1e-9)


@given(lattices(), st.floats(0.3, 3))
def test_twist_equivariance(L, c):
    p, q = hn_filtration(L), hn_filtration(scale(L, c))
    shift = L.field.degree * math.log(c)
    assert [v[0] for v in p.vertices] == [v[0] for v in q.vertices]
    assert q.slopes == pytest.approx([s - shift for s in p.slopes], abs=1e-8)


@given(lattices())
def test_duality_preserves_semistability(L):
    assert is_semistable(L) == is_semistable(dual_lattice(L))


@settings(max_examples=10)
@given(lattices())
def test_semistable_means_flat_polygon(L):
    p = hn_filtration(L)
    assert is_semistable(L) == (len(p.vertices) == 2)
