import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chebylie.errors import ConstraintError, CoordinateOverflowError
from chebylie.rootsys import (CorootVector, LieType, Weight, build_root_system,
                              dominance_leq, highest_roots, inner_product, is_dominant,
                              is_strictly_dominant, parse_type, positive_coroots, positive_roots,
                              weight_to_root_coords)

ALL_TYPES = ["A1", "A2", "A5", "B2", "B4", "C3", "C5", "D4", "D6", "E6", "E7", "E8", "F4", "G2"]


def test_build_g2():
    rs = build_root_system("G2")
    assert rs.cartan.tolist() == [[2, -1], [-3, 2]]
    assert rs.degrees == (2, 6)
    assert rs.weyl_order == 12
    assert rs.m_g == 3


def test_build_a1_and_b2():
    a1 = build_root_system("A1")
    assert a1.cartan.tolist() == [[2]]
    assert (a1.degrees, a1.weyl_order, a1.m_g) == ((2,), 2, 1)

    b2 = build_root_system("B2")
    assert b2.cartan.tolist() == [[2, -2], [-1, 2]]
    assert (b2.weyl_order, b2.m_g) == (8, 2)


@pytest.mark.parametrize("name,order,m_g", [
    ("A3", 24, 1), ("B3", 48, 2), ("C4", 384, 2), ("D4", 192, 2), ("D5", 1920, 2),
    ("E6", 51840, 3), ("E7", 2903040, 4), ("E8", 696729600, 6), ("F4", 1152, 4),
])
def test_orders_and_highest_coefficients(name, order, m_g):
    rs = build_root_system(name)
    assert rs.weyl_order == order
    assert rs.m_g == m_g


@pytest.mark.parametrize("name", ALL_TYPES)
def test_cartan_shape_and_inverse(name):
    rs = build_root_system(name)
    assert np.all(np.diag(rs.cartan) == 2)
    off_diagonal = rs.cartan[~np.eye(rs.rank, dtype=bool)]
    assert np.all(off_diagonal <= 0)
    product = sympy.Matrix(rs.cartan.tolist()) * rs.cartan_inverse
    assert product == sympy.eye(rs.rank)


@pytest.mark.parametrize("name", ["A4", "B3", "C3", "D5", "E6", "F4", "G2"])
def test_positive_roots_match_degrees(name):
    rs = build_root_system(name)
    assert len(positive_roots(rs)) == sum(d - 1 for d in rs.degrees)


@pytest.mark.parametrize("name", ["B3", "C3", "G2"])
def test_positive_coroots(name):
    rs = build_root_system(name)
    coroots = positive_coroots(rs)
    assert len(coroots) == len(positive_roots(rs))
    rho = Weight.rho(rs.rank)
    assert all(inner_product(rho, c) == sum(c.coords) > 0 for c in coroots)


@pytest.mark.parametrize("name", ["A3", "B4", "C3", "D5", "E6", "E7", "F4", "G2"])
def test_highest_root_coefficient(name):
    rs = build_root_system(name)
    (highest,) = highest_roots(rs)
    assert max(highest) == rs.m_g


def test_g2_highest_root():
    assert highest_roots(build_root_system("G2")) == ((3, 2),)


def test_semisimple_sum():
    rs = build_root_system("A2xG2")
    assert rs.name == "A2xG2"
    assert rs.cartan.tolist() == [[2, -1, 0, 0], [-1, 2, 0, 0], [0, 0, 2, -1], [0, 0, -3, 2]]
    assert rs.degrees == (2, 3, 2, 6)
    assert rs.weyl_order == 72
    assert rs.m_g == 3
    assert highest_roots(rs) == ((1, 1, 0, 0), (0, 0, 3, 2))


def test_parse_type():
    assert parse_type("g2") == (LieType("G", 2),)
    assert parse_type("a1xa1") == (LieType("A", 1), LieType("A", 1))
    assert str(LieType("b", 3)) == "B3"


@pytest.mark.parametrize("text", ["D3", "B1", "C1", "E5", "E9", "F3", "G3", "A0", "Q2", "", "A2x", "G"])
def test_parse_type_rejects(text):
    with pytest.raises(ConstraintError):
        parse_type(text)


def test_d3_error_names_a3():
    with pytest.raises(ConstraintError, match="A3"):
        build_root_system("D3")


def test_weight_to_root_coords_g2():
    rs = build_root_system("G2")
    assert weight_to_root_coords(rs, Weight((1, 0))) == (2, 1)
    assert weight_to_root_coords(rs, Weight((0, 1))) == (3, 2)
    assert weight_to_root_coords(rs, Weight.zero(2)) == (0, 0)


def test_weight_to_root_coords_rational():
    rs = build_root_system("A2")
    assert weight_to_root_coords(rs, Weight((1, 0))) == (sympy.Rational(2, 3), sympy.Rational(1, 3))


def test_inner_product():
    assert inner_product(Weight.fundamental(3, 1), CorootVector.simple_coroot(3, 1)) == 1
    assert inner_product(Weight.fundamental(3, 1), CorootVector.simple_coroot(3, 2)) == 0
    assert inner_product(Weight((2, 0)), CorootVector((1, 0))) == 2
    assert inner_product(Weight((-2, 2)), CorootVector((1, 3))) == 4


def test_inner_product_rank_mismatch():
    with pytest.raises(ConstraintError):
        inner_product(Weight((1, 0)), CorootVector((1, 0, 0)))


def test_coordinate_overflow():
    with pytest.raises(CoordinateOverflowError):
        Weight((2**63,))
    with pytest.raises(CoordinateOverflowError):
        Weight((2**62,)) * 2


def test_dominance_cases():
    g2 = build_root_system("G2")
    assert dominance_leq(g2, Weight.rho(2), Weight((2, 1)))
    assert not dominance_leq(g2, Weight((2, 1)), Weight.rho(2))

    a2 = build_root_system("A2")
    omega_1, omega_2 = Weight((1, 0)), Weight((0, 1))
    assert not dominance_leq(a2, omega_1, omega_2)
    assert not dominance_leq(a2, omega_2, omega_1)


def test_dominant_predicates():
    rho = Weight.rho(3)
    assert is_strictly_dominant(rho)
    lowered = rho - Weight.fundamental(3, 1)
    assert is_dominant(lowered) and not is_strictly_dominant(lowered)
    negative = -Weight.fundamental(3, 0)
    assert not is_dominant(negative) and not is_strictly_dominant(negative)


small_weights = st.tuples(st.integers(-4, 4), st.integers(-4, 4)).map(Weight)


@settings(max_examples=60, deadline=None)
@given(small_weights, small_weights, small_weights)
def test_dominance_is_a_partial_order(a, b, c):
    rs = build_root_system("G2")
    assert dominance_leq(rs, a, a)
    if dominance_leq(rs, a, b) and dominance_leq(rs, b, a):
        assert a == b
    if dominance_leq(rs, a, b) and dominance_leq(rs, b, c):
        assert dominance_leq(rs, a, c)


@settings(max_examples=60, deadline=None)
@given(small_weights, small_weights)
def test_dominance_translation_invariant(a, b):
    rs = build_root_system("B2")
    shift = Weight((3, -1))
    assert dominance_leq(rs, a, b) == dominance_leq(rs, a + shift, b + shift)
