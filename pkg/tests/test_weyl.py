import os
from unittest import mock

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebylie.config import ENV_MAX_WEYL_ORDER
from chebylie.errors import ConstraintError, GroupTooLargeError
from chebylie.rootsys import CorootVector, Weight, build_root_system, inner_product, positive_roots
from chebylie.weyl import (act_on_coroot, act_on_weight, coset_representatives,
                           dominant_representative, enumerate_group, longest_element,
                           max_abs_entry, orbit, simple_reflection, stabilizer,
                           stabilizer_size)

ORDERS = [("A1", 2), ("A2", 6), ("A3", 24), ("A4", 120), ("A5", 720), ("A6", 5040),
          ("B2", 8), ("B3", 48), ("B4", 384), ("B5", 3840),
          ("C3", 48), ("C4", 384), ("C5", 3840),
          ("D4", 192), ("D5", 1920), ("G2", 12), ("F4", 1152), ("A1xA1", 4), ("A2xG2", 72),
          pytest.param("E6", 51840, marks=pytest.mark.slow)]


def group(name):
    return enumerate_group(build_root_system(name))


@pytest.mark.parametrize("name,order", ORDERS)
def test_enumerated_order(name, order):
    grp = group(name)
    assert grp.order == order == grp.root_system.weyl_order
    assert max_abs_entry(grp) == grp.root_system.m_g


def test_group_too_large():
    with pytest.raises(GroupTooLargeError, match="100"):
        enumerate_group(build_root_system("B4"), max_order=100)


@mock.patch.dict(os.environ, {ENV_MAX_WEYL_ORDER: "10"})
def test_group_cap_from_environment():
    with pytest.raises(GroupTooLargeError):
        enumerate_group(build_root_system("G2"))


def test_e8_is_refused_by_default():
    with pytest.raises(GroupTooLargeError, match="696729600"):
        enumerate_group(build_root_system("E8"))


def test_simple_reflection_g2():
    rs = build_root_system("G2")
    s1 = simple_reflection(rs, 0)
    assert s1.matrix.tolist() == [[-1, 1], [0, 1]]
    assert s1.det_sign == -1
    assert np.array_equal(s1.matrix @ s1.matrix, np.eye(2, dtype=np.int64))
    assert simple_reflection(rs, 1).matrix.tolist() == [[1, 0], [3, -1]]


def test_simple_reflection_index_error():
    with pytest.raises(ConstraintError):
        simple_reflection(build_root_system("A2"), 2)


def test_generators_follow_identity():
    grp = group("B3")
    assert grp.identity.length == 0
    for i, s in enumerate(grp.generators):
        assert s == simple_reflection(grp.root_system, i)


def test_reflection_of_fundamental_weight():
    rs = build_root_system("G2")
    s1, s2 = simple_reflection(rs, 0), simple_reflection(rs, 1)
    # sigma_i(omega_j) = omega_j - delta_ij alpha_i
    assert act_on_weight(s1, Weight((1, 0))) == Weight((-1, 1))
    assert act_on_weight(s1, Weight((0, 1))) == Weight((0, 1))
    assert act_on_weight(s2, Weight((0, 1))) == Weight((3, -1))


def test_reflection_of_simple_coroot():
    rs = build_root_system("G2")
    s1, s2 = simple_reflection(rs, 0), simple_reflection(rs, 1)
    assert act_on_coroot(s1, CorootVector((1, 0))) == CorootVector((-1, 0))
    assert act_on_coroot(s2, CorootVector((1, 0))) == CorootVector((1, 3))


def test_coroot_orbit_contains_both_signs():
    grp = group("G2")
    images = {act_on_coroot(w, CorootVector((1, 0))) for w in grp}
    assert CorootVector((1, 3)) in images
    assert CorootVector((-1, -3)) in images
    w0 = longest_element(grp)
    assert act_on_coroot(grp.product(w0, grp.generators[1]), CorootVector((1, 0))) == CorootVector((-1, -3))


@pytest.mark.parametrize("name", ["A3", "B2", "C3", "G2", "D4", "F4"])
def test_half_of_the_group_has_determinant_one(name):
    grp = group(name)
    assert sum(w.det_sign == 1 for w in grp) == grp.order // 2


def test_determinant_is_multiplicative():
    grp = group("B3")
    elements = list(grp)
    for w1 in elements[::5]:
        for w2 in elements:
            assert grp.product(w1, w2).det_sign == w1.det_sign * w2.det_sign


def test_determinant_is_parity_of_length():
    grp = group("C3")
    for w in grp:
        assert w.det_sign == (-1) ** w.length
        assert round(np.linalg.det(w.matrix)) == w.det_sign


@pytest.mark.parametrize("name", ["A3", "B3", "G2", "F4"])
def test_longest_element(name):
    grp = group(name)
    longest = longest_element(grp)
    assert longest.length == len(positive_roots(grp.root_system))
    rho = Weight.rho(grp.rank)
    image = act_on_weight(longest, rho)
    # w0 maps the fundamental chamber onto its negative
    assert all(c < 0 for c in image)


def test_product_matches_composition():
    grp = group("B2")
    weight = Weight((2, -1))
    for w1 in grp:
        for w2 in grp:
            composed = act_on_weight(w1, act_on_weight(w2, weight))
            assert act_on_weight(grp.product(w1, w2), weight) == composed


g2_weights = st.tuples(st.integers(-5, 5), st.integers(-5, 5)).map(Weight)
g2_coroots = st.tuples(st.integers(-5, 5), st.integers(-5, 5)).map(CorootVector)


@settings(max_examples=40, deadline=None)
@given(g2_weights, g2_coroots)
def test_action_preserves_pairing(weight, coroot):
    for w in group("G2"):
        assert inner_product(act_on_weight(w, weight), act_on_coroot(w, coroot)) == \
            inner_product(weight, coroot)


@pytest.mark.parametrize("name", ["A3", "B3", "C3", pytest.param("F4", marks=pytest.mark.slow)])
def test_action_preserves_pairing_in_rank_3_and_up(name):
    grp = group(name)
    n = grp.rank
    weight = Weight(tuple(range(2, 2 + n)))
    coroots = [CorootVector.simple_coroot(n, j) for j in range(n)] + [CorootVector((1, -2) + (3,) * (n - 2))]
    for w in grp:
        image = act_on_weight(w, weight)
        for coroot in coroots:
            assert inner_product(image, act_on_coroot(w, coroot)) == inner_product(weight, coroot)


def test_orbits_and_stabilizers_g2():
    grp = group("G2")
    omega_1 = Weight((1, 0))
    assert len(orbit(grp, omega_1)) == 6
    assert stabilizer_size(grp, omega_1) == 2
    assert stabilizer_size(grp, Weight.rho(2)) == 1
    assert stabilizer_size(grp, Weight.zero(2)) == 12


@pytest.mark.parametrize("name", ["A3", "B3", "G2"])
def test_stabilizer_of_rho_minus_fundamental(name):
    grp = group(name)
    for j in range(grp.rank):
        weight = Weight.rho(grp.rank) - Weight.fundamental(grp.rank, j)
        assert stabilizer(grp, weight) == (0, j + 1)


def test_coset_representatives():
    grp = group("B3")
    for i in range(3):
        coords = Weight.fundamental(3, i).coords
        indices, images = coset_representatives(grp, coords)
        assert len(indices) == len(images) == grp.order // stabilizer_size(grp, Weight(coords))
        assert indices[0] == 0
        assert tuple(images[0]) == coords
        assert len({tuple(row) for row in images}) == len(images)


def test_dominant_representative():
    rs = build_root_system("G2")
    dominant, steps = dominant_representative(rs, Weight((-1, 1)))
    assert dominant == Weight((1, 0))
    assert steps == 1
    assert dominant_representative(rs, Weight.rho(2)) == (Weight.rho(2), 0)
