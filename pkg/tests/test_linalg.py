from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from properlab.linalg import (
    as_fraction,
    fraction_str,
    nullspace,
    primitive,
    rank,
    solve,
    span_basis,
    sparse_nullspace,
    sparse_rank,
)

small_ints = st.integers(min_value=-4, max_value=4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=1, max_size=max_rows)
    )


def test_parsing():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(0.5) == Fraction(1, 2)
    assert as_fraction(np.int64(7)) == 7
    assert fraction_str(Fraction(-2, 6)) == "-1/3"
    assert fraction_str(Fraction(4)) == "4"


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(-1, 3)]) == (3, -2)
    assert primitive([-2, 4]) == (1, -2)
    assert primitive([-2, 4], canonical_sign=False) == (-1, 2)
    assert primitive([0, 0]) == (0, 0)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_numpy(m):
    assert rank(m) == np.linalg.matrix_rank(np.array(m, dtype=float))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_is_kernel(m):
    ncols = len(m[0])
    ker = nullspace(m, ncols)
    assert len(ker) == ncols - rank(m)
    for v in ker:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in m)
    assert rank(ker) == len(ker) if ker else True


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_sparse_agrees_with_dense(m):
    ncols = len(m[0])
    rows = [{j: Fraction(x) for j, x in enumerate(r) if x} for r in m]
    assert sparse_rank(rows) == rank(m)
    assert len(sparse_nullspace(rows, ncols)) == len(nullspace(m, ncols))


def test_solve_and_span():
    cols = [(1, 0, 1), (0, 1, 1)]
    assert solve(cols, (2, 3, 5)) == (2, 3)
    assert solve(cols, (0, 0, 1)) is None
    assert len(span_basis([(1, 1), (2, 2), (0, 1)])) == 2
