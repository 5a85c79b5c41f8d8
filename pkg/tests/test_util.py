import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chebylie.errors import ConstraintError
from chebylie.util import laplace_adjugate, laplace_determinant, matrix_product

square = st.integers(min_value=1, max_value=5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=50, deadline=None)
@given(square)
def test_laplace_matches_sympy(rows):
    expected = sympy.Matrix(rows)
    assert laplace_determinant(rows, 0, 1) == expected.det()
    adjugate = laplace_adjugate(rows, 0, 1)
    assert [list(row) for row in adjugate] == expected.adjugate().tolist()


def test_adjugate_identity_with_singular_matrix():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 5]]
    adjugate = laplace_adjugate(rows, 0, 1)
    assert matrix_product(rows, adjugate, 0) == ((0, 0, 0), (0, 0, 0), (0, 0, 0))
    assert adjugate != ((0, 0, 0), (0, 0, 0), (0, 0, 0))


def test_small_sizes():
    assert laplace_adjugate([[7]], 0, 1) == ((1,),)
    assert laplace_adjugate([], 0, 1) == ()
    assert laplace_adjugate([[1, 2], [3, 4]], 0, 1) == ((4, -2), (-3, 1))


def test_non_square():
    with pytest.raises(ConstraintError):
        laplace_adjugate([[1, 2]], 0, 1)
    with pytest.raises(ConstraintError):
        matrix_product([[1, 2]], [[1, 2]], 0)
