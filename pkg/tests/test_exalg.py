import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebylie.errors import ConstraintError, CoordinateOverflowError
from chebylie.exalg import (ExpSum, J_sum, S_sum, character, derivation_D, determinant,
                            dimension, divide_by_denominator, is_anti_invariant, is_invariant,
                            maximal_terms, weyl_action, weyl_dimension)
from chebylie.rootsys import Weight, build_root_system, positive_roots
from chebylie.weyl import enumerate_group


def group(name):
    return enumerate_group(build_root_system(name))


def e(*coords, coeff=1):
    return ExpSum.monomial(coords, coeff)


def test_arithmetic():
    a = e(1, 0) + e(0, 1) * 2
    b = e(1, 0) - 3
    assert a + b == e(1, 0) * 2 + e(0, 1) * 2 - 3
    assert a - a == ExpSum.zero(2)
    assert -a + a == 0
    assert (e(1, 0) * e(-1, 2)) == e(0, 2)
    assert (a * b).terms == {(2, 0): 1, (1, 1): 2, (1, 0): -3, (0, 1): -6}


def test_rank_mismatch():
    with pytest.raises(ConstraintError):
        e(1, 0) + e(1)


def test_a1_square_of_orbit_sum():
    grp = group("A1")
    s = S_sum(grp, Weight((1,)))
    assert s * s == e(2) + 2 + e(-2)
    assert dimension(s * s) == 4


def test_s_sum():
    grp = group("G2")
    s = S_sum(grp, Weight((1, 0)))
    assert len(s) == 6
    assert all(c == 1 for c in s.terms.values())
    assert S_sum(grp, Weight.zero(2)) == 1
    with pytest.raises(ConstraintError):
        S_sum(grp, Weight((-1, 1)))


def test_j_sum():
    grp = group("G2")
    j = J_sum(grp, Weight.rho(2))
    assert len(j) == 12
    assert j.coefficient((1, 1)) == 1
    assert is_anti_invariant(grp, j)
    # rho - omega_i is fixed by sigma_i, so its alternating sum cancels
    assert J_sum(grp, Weight((0, 1))) == 0
    assert J_sum(grp, Weight((1, 0))) == 0


def test_weyl_action_moves_terms():
    grp = group("G2")
    s1 = grp.generators[0]
    assert weyl_action(s1, e(1, 0) * 5) == e(-1, 1) * 5


sums = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                       st.integers(-5, 5), max_size=5).map(lambda terms: ExpSum(2, terms))


@settings(max_examples=40, deadline=None)
@given(sums, sums)
def test_weyl_action_is_a_ring_homomorphism(a, b):
    for w in group("B2"):
        assert weyl_action(w, a * b) == weyl_action(w, a) * weyl_action(w, b)
        assert weyl_action(w, a + b) == weyl_action(w, a) + weyl_action(w, b)


@settings(max_examples=40, deadline=None)
@given(sums, sums)
def test_derivation_leibniz(a, b):
    for j in range(2):
        assert derivation_D(j, a * b) == derivation_D(j, a) * b + a * derivation_D(j, b)


def test_derivation_values():
    assert derivation_D(0, e(3, -1) + e(0, 2)) == e(3, -1) * 3
    assert derivation_D(1, ExpSum.one(2)) == 0


def test_maximal_terms():
    rs = build_root_system("A2")
    assert sorted(maximal_terms(rs, e(1, 0) + e(0, 1) * 4), key=lambda t: t[0].coords) == \
        [(Weight((0, 1)), 4), (Weight((1, 0)), 1)]

    grp = group("G2")
    assert maximal_terms(grp.root_system, S_sum(grp, Weight((2, 1)))) == [(Weight((2, 1)), 1)]


def test_invariance_checks():
    grp = group("B3")
    s = S_sum(grp, Weight((0, 1, 1)))
    assert is_invariant(grp, s)
    assert not is_invariant(grp, e(1, 0, 0))
    assert is_anti_invariant(grp, J_sum(grp, Weight((2, 1, 3))))


def test_divide_by_denominator():
    grp = group("A2")
    rho = Weight.rho(2)
    quotient = divide_by_denominator(J_sum(grp, Weight((2, 1))), grp)
    assert quotient * J_sum(grp, rho) == J_sum(grp, Weight((2, 1)))
    assert divide_by_denominator(J_sum(grp, rho), grp) == 1
    with pytest.raises(ConstraintError):
        divide_by_denominator(e(1, 0), grp)


invariant_parts = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-4, 4)),
                           min_size=1, max_size=4)


@settings(max_examples=25, deadline=None)
@given(invariant_parts, st.sampled_from(["A2", "B2", "G2"]))
def test_divide_by_denominator_recovers_invariant(parts, name):
    grp = group(name)
    q = ExpSum.zero(2)
    for a, b, coeff in parts:
        q = q + S_sum(grp, Weight((a, b))) * coeff
    assert divide_by_denominator(q * J_sum(grp, Weight.rho(2)), grp) == q


@pytest.mark.parametrize("name", ["A1", "A3", "B3", "G2", "D4"])
def test_denominator_signs_balance(name):
    grp = group(name)
    j = J_sum(grp, Weight.rho(grp.rank))
    coefficients = list(j.terms.values())
    assert len(coefficients) == grp.order
    assert sorted(set(coefficients)) == [-1, 1]
    assert sum(coefficients) == 0


def test_weyl_action_overflow():
    s2 = group("G2").generators[1]
    with pytest.raises(CoordinateOverflowError):
        weyl_action(s2, e(0, 2**61))
    assert weyl_action(s2, e(0, 2**40)) == e(3 * 2**40, -(2**40))


def test_g2_characters():
    grp = group("G2")
    omega_1, omega_2 = Weight((1, 0)), Weight((0, 1))
    chi_1 = character(grp, omega_1)
    chi_2 = character(grp, omega_2)
    assert chi_1 == S_sum(grp, omega_1) + 1
    assert chi_2 == S_sum(grp, omega_2) + S_sum(grp, omega_1) + 2
    assert dimension(chi_1) == 7
    assert dimension(chi_2) == 14


@pytest.mark.parametrize("name", ["A2", "B2", "C3", "G2"])
def test_weyl_dimension_agrees_with_character(name):
    grp = group(name)
    n = grp.rank
    for coords in [(0,) * n, (1,) + (0,) * (n - 1), (2,) * n, tuple(range(n))]:
        weight = Weight(coords)
        assert dimension(character(grp, weight)) == weyl_dimension(grp.root_system, weight)


@pytest.mark.parametrize("name", ["A3", "B2", "G2", "F4"])
def test_dimension_of_multiple_of_rho(name):
    rs = build_root_system(name)
    positive = len(positive_roots(rs))
    for k in (1, 2, 3):
        assert weyl_dimension(rs, Weight.rho(rs.rank) * (k - 1)) == k**positive


def test_character_is_invariant():
    grp = group("B3")
    chi = character(grp, Weight((1, 0, 1)))
    assert is_invariant(grp, chi)
    assert maximal_terms(grp.root_system, chi) == [(Weight((1, 0, 1)), 1)]


def test_determinant_2x2():
    a, b, c, d = e(1, 0), e(0, 1), e(-1, 0), e(0, -1) * 2
    assert determinant([[a, b], [c, d]]) == a * d - b * c


def test_json_round_trip():
    a = e(1, -2) * 12345678901234567890 - 3
    data = a.to_json()
    assert data[0] == {"weight": [1, -2], "coeff": "12345678901234567890"}
    assert ExpSum.from_json(2, data) == a
