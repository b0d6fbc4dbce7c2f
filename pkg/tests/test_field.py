import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geonum.errors import DimensionMismatch, InvalidFieldSpec
from geonum.field import codifferent_lattice_data, make_field, minkowski_image, parse_field

from conftest import ALL_FIELDS, QI, Q5, QQ


def test_rational_field():
    assert (QQ.degree, QQ.signature, QQ.abs_disc) == (1, (1, 0), 1)
    assert QQ.is_rational and QQ.name == "Q"


@pytest.mark.parametrize("D,disc,sig", [(-1, 4, (0, 1)), (5, 5, (2, 0)), (-3, 3, (0, 1)), (2, 8, (2, 0)), (-5, 20, (0, 1))])
def test_quadratic_discriminants(D, disc, sig):
    F = make_field(D)
    assert (F.degree, F.abs_disc, F.signature) == (2, disc, sig)
    # the discriminant is the determinant of the exact trace form
    T = F.trace_form
    assert abs(T[0][0] * T[1][1] - T[0][1] * T[1][0]) == disc


def test_golden_ratio_basis():
    img = Q5.integral_basis_embedding
    phi = (1 + math.sqrt(5)) / 2
    assert sorted(img[1]) == pytest.approx(sorted([phi, 1 - phi]))


@pytest.mark.parametrize("F", ALL_FIELDS, ids=lambda F: F.name)
def test_embedding_covolume(F):
    det = abs(np.linalg.det(F.integral_basis_embedding))
    assert det == pytest.approx(math.sqrt(F.abs_disc), rel=1e-12)


@pytest.mark.parametrize("F", ALL_FIELDS, ids=lambda F: F.name)
def test_codifferent_is_trace_dual(F):
    T = F.trace_form
    C = codifferent_lattice_data(F)
    d = F.degree
    gram = [[sum(C[i][k] * T[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    assert gram == [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def test_codifferent_examples():
    assert codifferent_lattice_data(QQ) == ((Fraction(1),),)
    # Q(i): inverse different is (1/2) Z[i]
    assert codifferent_lattice_data(QI) == ((Fraction(1, 2), 0), (0, Fraction(-1, 2)))


def test_minkowski_images():
    assert minkowski_image(QQ, [3]).tolist() == [3.0]
    assert float(minkowski_image(QI, [1, 0]) @ minkowski_image(QI, [1, 0])) == pytest.approx(2.0)
    # sqrt 5 = 2w - 1
    v = minkowski_image(Q5, [-1, 2])
    assert sorted(v) == pytest.approx([-math.sqrt(5), math.sqrt(5)])
    with pytest.raises(DimensionMismatch):
        minkowski_image(Q5, [1])


@given(
    st.sampled_from(ALL_FIELDS),
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=12), min_size=2, max_size=2),
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=12), min_size=2, max_size=2),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
)
def test_minkowski_linear(F, a, b, c):
    a, b = a[: F.degree], b[: F.degree]
    lhs = minkowski_image(F, [x + y for x, y in zip(a, b)])
    assert np.allclose(lhs, minkowski_image(F, a) + minkowski_image(F, b), atol=1e-9)
    assert np.allclose(minkowski_image(F, [c * x for x in a]), float(c) * minkowski_image(F, a), atol=1e-9)


def test_complex_place_norm_is_counting_form():
    # N(a + bi) * 2 = squared calibrated norm
    v = minkowski_image(QI, [3, 4])
    assert float(v @ v) == pytest.approx(2 * 25)


@pytest.mark.parametrize("bad", [0, 1, 4, 12, -4, 2.5, True, "x"])
def test_invalid_fields(bad):
    with pytest.raises(InvalidFieldSpec):
        make_field(bad)


@pytest.mark.parametrize("text,D", [("Q", None), ("q", None), ("Q(sqrt -1)", -1), ("Q(sqrt(5))", 5), ("Q( sqrt -3 )", -3)])
def test_parse_field(text, D):
    assert parse_field(text).D == D


def test_parse_field_rejects_garbage():
    with pytest.raises(InvalidFieldSpec):
        parse_field("Q(i)")


def test_equality_and_record():
    assert make_field(5) == Q5 and hash(make_field(5)) == hash(Q5)
    assert Q5 != QI
    assert QI.to_record() == {"kind": "quadratic", "D": -1, "disc": 4, "signature": [0, 1]}
