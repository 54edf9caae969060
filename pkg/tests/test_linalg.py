"""Exact linear algebra over GF(p)."""

import random

import numpy as np
import pytest

from cartanwitt.errors import ModulusMismatch, ShapeError, UnsupportedPrime
from cartanwitt.linalg import Matrix, Subspace, eigenspace, prime_field, rref


def test_prime_field_rejects_bad_primes():
    for bad in (2, 4, 9, 37, 1):
        with pytest.raises(UnsupportedPrime):
            prime_field(bad)
    assert prime_field(5).p == 5


def test_field_inverses():
    f = prime_field(7)
    for a in range(1, 7):
        assert (a * f.inv(a)) % 7 == 1


def test_rref_identity():
    f = prime_field(5)
    m = Matrix.identity(f, 3)
    rank, red = rref(m)
    assert rank == 3 and red == m


def test_rref_zero():
    f = prime_field(5)
    m = Matrix.zeros(f, 2, 4)
    rank, red = rref(m)
    assert rank == 0 and red.rows == 0


def test_rref_dependent_rows():
    f = prime_field(7)
    m = Matrix(f, [[1, 2], [3, 6]])
    rank, red = rref(m)
    assert rank == 1
    assert red.a.tolist() == [[1, 2]]


def test_rref_idempotent():
    f = prime_field(5)
    rng = random.Random(7)
    for _ in range(20):
        m = Matrix(f, [[rng.randrange(5) for _ in range(6)] for _ in range(4)])
        _, red = rref(m)
        assert rref(red)[1] == red


def test_rref_unique_on_row_equivalent_inputs():
    f = prime_field(5)
    rng = random.Random(11)
    for _ in range(20):
        a = np.array([[rng.randrange(5) for _ in range(5)] for _ in range(4)])
        m = Matrix(f, a)
        b = a.copy()
        # random invertible row operations
        for _ in range(10):
            i, j = rng.randrange(4), rng.randrange(4)
            if i != j:
                b[i] = (b[i] + rng.randrange(1, 5) * b[j]) % 5
            else:
                b[i] = (b[i] * rng.randrange(1, 5)) % 5
        assert rref(Matrix(f, b))[1] == rref(m)[1]


def test_rank_nullity():
    f = prime_field(5)
    rng = random.Random(3)
    for _ in range(25):
        rows, cols = rng.randrange(1, 7), rng.randrange(1, 7)
        m = Matrix(f, [[rng.randrange(5) for _ in range(cols)] for _ in range(rows)])
        assert m.rank() + m.kernel().dim == cols


def test_kernel_vectors_annihilate():
    f = prime_field(5)
    rng = random.Random(5)
    for _ in range(10):
        m = Matrix(f, [[rng.randrange(5) for _ in range(5)] for _ in range(3)])
        ker = m.kernel()
        for v in ker.basis:
            assert not (m.a @ v % 5).any()


def test_eigenspace_diagonal():
    f = prime_field(5)
    m = Matrix(f, np.diag([0, 1, 1]))
    assert eigenspace(m, 1).dim == 2


def test_eigenspace_zero_matrix():
    f = prime_field(5)
    m = Matrix.zeros(f, 4, 4)
    assert eigenspace(m, 0).dim == 4


def test_eigenspace_companion():
    # companion matrix of x^2 - 1
    f = prime_field(5)
    m = Matrix(f, [[0, 1], [1, 0]])
    s = eigenspace(m, 1)
    assert s.dim == 1
    v = s.basis[0]
    assert ((m.a @ v) % 5 == v).all()


def test_eigenspace_vectors_are_exact():
    f = prime_field(5)
    rng = random.Random(17)
    for _ in range(10):
        m = Matrix(f, [[rng.randrange(5) for _ in range(4)] for _ in range(4)])
        total = 0
        for lam in range(5):
            s = m.eigenspace(lam)
            total += s.dim
            for v in s.basis:
                assert ((m.a @ v) % 5 == (lam * v) % 5).all()
        assert total <= 4


def test_eigenspace_needs_square():
    f = prime_field(5)
    with pytest.raises(ShapeError):
        Matrix.zeros(f, 2, 3).eigenspace(0)


def test_modulus_mismatch():
    a = Matrix.identity(prime_field(5), 2)
    b = Matrix.identity(prime_field(7), 2)
    with pytest.raises(ModulusMismatch):
        a @ b


def test_subspace_invariants():
    f = prime_field(5)
    s = Subspace.from_rows(f, 4, [[2, 0, 1, 0], [4, 0, 2, 1], [2, 0, 1, 3]])
    # rref basis: unit pivots, strictly increasing pivot columns, no zero rows
    assert s.pivots == sorted(s.pivots)
    for k, c in enumerate(s.pivots):
        assert s.basis[k, c] == 1
        assert not s.basis[:k, c].any() and not s.basis[k + 1:, c].any()


def test_subspace_membership_and_sum():
    f = prime_field(5)
    a = Subspace.from_rows(f, 3, [[1, 0, 0]])
    b = Subspace.from_rows(f, 3, [[0, 1, 0]])
    c = a.add(b)
    assert c.dim == 2
    assert c.contains_vector([2, 3, 0])
    assert not c.contains_vector([0, 0, 1])
    assert a.intersects_trivially(b)


def test_subspace_coefficients_roundtrip():
    f = prime_field(5)
    s = Subspace.from_rows(f, 4, [[1, 2, 0, 1], [0, 0, 1, 3]])
    v = (2 * s.basis[0] + 3 * s.basis[1]) % 5
    assert s.coefficients(v).tolist() == [2, 3]


def test_matrix_power():
    f = prime_field(5)
    m = Matrix(f, [[1, 1], [0, 1]])
    assert m.pow(5).a.tolist() == [[1, 0], [0, 1]]
