import random

import pytest

from synmod.fields import gf
from synmod.linalg import (FpMatrix, Quotient, Subspace, gauss_rank_naive,
                           rank_kernel_image, rref, solve)


def test_identity_matrix():
    F = gf(3)
    M = FpMatrix.from_rows(F, [[1, 0], [0, 1]])
    rank, kernel, image = rank_kernel_image(M)
    assert rank == 2 and kernel == []


def test_zero_map():
    F = gf(5)
    M = FpMatrix(F, 1, 1)
    rank, kernel, image = rank_kernel_image(M)
    assert rank == 0
    assert kernel == [[1]]


def test_rank_against_naive_oracle():
    F = gf(3)
    rng = random.Random(7)
    for _ in range(60):
        rows = rng.randrange(1, 9)
        cols = rng.randrange(1, 9)
        data = [[rng.randrange(3) for _ in range(cols)] for _ in range(rows)]
        M = FpMatrix.from_rows(F, data)
        rank, kernel, image = rank_kernel_image(M)
        assert rank == gauss_rank_naive(F, data)
        assert rank + len(kernel) == cols
        for k in kernel:
            assert all(v == 0 for v in M.mul_vec(k))


def test_echelon_idempotent():
    F = gf(5)
    rng = random.Random(1)
    data = [[rng.randrange(5) for _ in range(6)] for _ in range(4)]
    red, piv = rref(F, data)
    red2, piv2 = rref(F, red)
    assert red == red2 and piv == piv2


def test_solve():
    F = gf(3)
    M = FpMatrix.from_rows(F, [[1, 2], [0, 1]])
    x = solve(M, [2, 1])
    assert M.mul_vec(x) == [2, 1]
    M2 = FpMatrix.from_rows(F, [[1, 0], [1, 0]])
    assert solve(M2, [1, 2]) is None


def test_subspace_ops():
    F = gf(3)
    S = Subspace(F, 3, [[1, 0, 1], [0, 1, 1]])
    assert S.dim == 2
    assert S.contains([1, 1, 2])
    assert not S.contains([1, 1, 1])
    T = Subspace(F, 3, [[1, 1, 2]])
    assert S.contains_space(T)
    assert S.sum(T).dim == 2
    coords = S.coords_in_basis([1, 1, 2])
    assert coords is not None


def test_quotient():
    F = gf(3)
    denom = Subspace(F, 3, [[1, 0, 0]])
    Q = Quotient(F, 3, denom)
    assert Q.dim == 2
    assert Q.is_zero([2, 0, 0])
    assert Q.coords([1, 1, 0]) == Q.coords([0, 1, 0])


def test_matmul_and_transpose():
    F = gf(3)
    A = FpMatrix.from_rows(F, [[1, 2], [0, 1]])
    B = FpMatrix.from_rows(F, [[1, 1], [1, 0]])
    C = A.matmul(B)
    assert C.data == [[0, 1], [1, 0]]
    assert A.transpose().data == [[1, 0], [2, 1]]
