import random

import pytest
from hypothesis import given, settings, strategies as st

from freeloop.linalg import (LinalgError, Matrix, Subspace, image_basis, kernel_basis, quotient_basis,
                             rank, solve)
from freeloop.scalars import FieldSpec, Q

F2 = FieldSpec(2)


def test_rank_examples():
    assert rank(Matrix.zero(Q, 3, 3)) == 0
    assert rank(Matrix.identity(Q, 4)) == 4
    assert rank(Matrix.from_dense(Q, [[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(Q, 5)).dim == 0
    assert kernel_basis(Matrix.zero(Q, 2, 3)).dim == 3
    k = kernel_basis(Matrix.from_dense(F2, [[1, 1]]))
    assert k.basis == [{0: 1, 1: 1}]


def test_quotient_examples():
    full = Subspace.full(Q, 3)
    assert quotient_basis(full, Subspace(Q, 3)).dim == 3
    assert quotient_basis(full, Subspace.full(Q, 3)).dim == 0
    W = Subspace.span(Q, 3, [{0: 1}, {1: 1}])
    V = Subspace.span(Q, 3, [{0: 1, 1: 1}])
    assert quotient_basis(W, V).dim == 1


def test_quotient_requires_containment():
    W = Subspace.span(Q, 3, [{0: 1}])
    V = Subspace.span(Q, 3, [{2: 1}])
    with pytest.raises(LinalgError) as info:
        quotient_basis(W, V)
    assert "2" in str(info.value)


def test_subspace_equality_is_canonical():
    a = Subspace.span(Q, 3, [{0: 1, 1: 1}, {1: 1, 2: 1}])
    b = Subspace.span(Q, 3, [{0: 1, 2: -1}, {0: 2, 1: 3, 2: 1}])
    assert a == b
    assert a.rref().basis == b.rref().basis


def _random_matrix(field, rng, rows, cols, density=0.4):
    data = [[rng.randint(-3, 3) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_dense(field, data, cols)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), rows=st.integers(0, 9), cols=st.integers(0, 9))
def test_rank_nullity_and_kernel(seed, rows, cols):
    rng = random.Random(seed)
    for field in (Q, FieldSpec(3), FieldSpec(32003)):
        M = _random_matrix(field, rng, rows, cols)
        K = kernel_basis(M)
        assert rank(M) + K.dim == cols
        for v in K.basis:
            assert not M.apply(v)
        assert image_basis(M).dim == rank(M)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_composition_image_in_kernel(seed):
    rng = random.Random(seed)
    A = _random_matrix(Q, rng, 6, 4)
    # B kills the image of A: rows of B are in the left kernel of A
    left = kernel_basis(A.transpose())
    rows = left.basis[:3]
    B = Matrix(Q, 6, len(rows), rows).transpose()
    assert (B @ A).is_zero()
    K = kernel_basis(B)
    for v in image_basis(A).basis:
        assert K.contains(v)


def test_solve():
    M = Matrix.from_dense(Q, [[1, 2], [3, 4]])
    x = solve(M, {0: 1})
    assert M.apply(x) == {0: 1}
    assert solve(Matrix.from_dense(Q, [[1, 1], [1, 1]]), {0: 1}) is None


def test_matrix_algebra():
    A = Matrix.from_dense(Q, [[1, 2], [0, 1]])
    B = Matrix.from_dense(Q, [[1, -2], [0, 1]])
    assert A @ B == Matrix.identity(Q, 2)
    assert (A - A).is_zero()
    assert A.transpose().to_dense() == [[1, 0], [2, 1]]
    with pytest.raises(LinalgError):
        A @ Matrix.identity(Q, 3)
