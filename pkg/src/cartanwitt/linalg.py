"""Exact dense linear algebra over the prime field GF(p).

Matrices are numpy ``int64`` arrays with entries reduced to ``[0, p)``;
the field context travels with every matrix.  Everything here is exact:
row reduction produces the unique reduced row-echelon form, and ranks,
kernels and eigenspaces follow from it.  Values are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ModulusMismatch, ShapeError, UnsupportedPrime

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


@lru_cache(maxsize=None)
def prime_field(p: int) -> "PrimeField":
    return PrimeField(p)


class PrimeField:
    """Arithmetic context for GF(p), p an odd prime with 3 <= p <= 31.

    The bound keeps every construction in this package at desk scale
    (basis sizes grow like p^(2r+1)).
    """

    __slots__ = ("p", "inv_table")

    def __init__(self, p: int):
        if p not in _SMALL_PRIMES:
            raise UnsupportedPrime(f"p must be an odd prime with 3 <= p <= 31, got {p}")
        self.p = p
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, p - 2, p)
        self.inv_table = inv
        self.inv_table.setflags(write=False)

    def __call__(self, a: int) -> int:
        return int(a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return int(self.inv_table[a])

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"GF({self.p})"


def _common_field(a: "Matrix", b: "Matrix") -> PrimeField:
    if a.field.p != b.field.p:
        raise ModulusMismatch(f"mixed moduli {a.field.p} and {b.field.p}")
    return a.field


class Matrix:
    """Immutable dense matrix over GF(p)."""

    __slots__ = ("field", "a", "_rref")

    def __init__(self, field: PrimeField, data):
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-dimensional, got ndim={arr.ndim}")
        arr = np.mod(arr, field.p)
        arr.setflags(write=False)
        self.field = field
        self.a = arr
        self._rref = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    # -- basic properties ---------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.field.p == self.field.p
            and other.a.shape == self.a.shape
            and bool(np.array_equal(other.a, self.a))
        )

    def __hash__(self):
        return hash((self.field.p, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.a.tolist()!r})"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        f = _common_field(self, other)
        if self.a.shape != other.a.shape:
            raise ShapeError("matrix shapes differ")
        return Matrix(f, self.a + other.a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        f = _common_field(self, other)
        if self.a.shape != other.a.shape:
            raise ShapeError("matrix shapes differ")
        return Matrix(f, self.a - other.a)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        f = _common_field(self, other)
        if self.cols != other.rows:
            raise ShapeError("inner dimensions differ")
        return Matrix(f, matmul_mod(self.a, other.a, f.p))

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.field, self.a * (c % self.field.p))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.a.T)

    def stack(self, other: "Matrix") -> "Matrix":
        f = _common_field(self, other)
        if self.cols != other.cols:
            raise ShapeError("column counts differ")
        return Matrix(f, np.vstack([self.a, other.a]))

    def is_zero(self) -> bool:
        return not self.a.any()

    def pow(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise ShapeError("matrix power needs a square matrix")
        result = np.eye(self.rows, dtype=np.int64)
        base = self.a
        while k:
            if k & 1:
                result = matmul_mod(result, base, self.field.p)
            base = matmul_mod(base, base, self.field.p)
            k >>= 1
        return Matrix(self.field, result)

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple[int, "Matrix"]:
        """Rank and the unique reduced row-echelon form (row space preserved)."""
        if self._rref is None:
            reduced, pivots = rref_array(self.a, self.field.p)
            self._rref = (len(pivots), Matrix(self.field, reduced))
        return self._rref

    def rank(self) -> int:
        return self.rref()[0]

    def kernel(self) -> "Subspace":
        """Right kernel {v : A v = 0} as a Subspace of GF(p)^cols."""
        _, red = self.rref()
        pivots = pivot_columns(red.a)
        free = [j for j in range(self.cols) if j not in set(pivots)]
        if not free:
            return Subspace(self.field, self.cols, np.zeros((0, self.cols), dtype=np.int64))
        p = self.field.p
        basis = np.zeros((len(free), self.cols), dtype=np.int64)
        for k, j in enumerate(free):
            basis[k, j] = 1
            for r, c in enumerate(pivots):
                basis[k, c] = (-int(red.a[r, j])) % p
        return Subspace.from_rows(self.field, self.cols, basis)

    def eigenspace(self, lam: int) -> "Subspace":
        """Kernel of (A - lam*I); eigenvectors satisfy A v = lam v exactly."""
        if self.rows != self.cols:
            raise ShapeError("eigenspace needs a square matrix")
        shifted = self.a - (lam % self.field.p) * np.eye(self.rows, dtype=np.int64)
        return Matrix(self.field, shifted).kernel()


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact mod-p matrix product.

    Entries are < p <= 31, so products accumulate to at most 30*30*k;
    for inner dimensions up to ~10^7 this stays far below 2^53 and the
    float64 BLAS path is exact and much faster than int64 matmul.
    """
    if a.shape[-1] > 10**7:
        raise ShapeError("inner dimension too large for the exact float path")
    prod = np.matmul(a.astype(np.float64), b.astype(np.float64))
    return np.mod(prod, p).astype(np.int64)


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` mod p; returns (rref, pivot columns)."""
    m = np.mod(np.asarray(a, dtype=np.int64), p).copy()
    rows, cols = m.shape
    inv = prime_field(p).inv_table
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * int(inv[m[r, c]])) % p
        hit = np.nonzero(m[:, c])[0]
        hit = hit[hit != r]
        if hit.size:
            m[hit] = (m[hit] - np.outer(m[hit, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m[: len(pivots)], pivots


def pivot_columns(rref_rows: np.ndarray) -> list[int]:
    """Pivot column of each row of a matrix already in rref."""
    cols = []
    for row in rref_rows:
        nz = np.nonzero(row)[0]
        if nz.size:
            cols.append(int(nz[0]))
    return cols


def rref(m: Matrix) -> tuple[int, Matrix]:
    """Module-level alias for Matrix.rref, matching the operation contract."""
    return m.rref()


def eigenspace(m: Matrix, lam: int) -> "Subspace":
    return m.eigenspace(lam)


class Subspace:
    """A subspace of GF(p)^ambient_dim held as an rref basis, one vector per row.

    Rows are nonzero, pivots are 1 and pivot columns strictly increase, so two
    equal subspaces have identical basis arrays.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: PrimeField, ambient_dim: int, basis_rows: np.ndarray):
        basis_rows = np.asarray(basis_rows, dtype=np.int64)
        if basis_rows.ndim != 2 or basis_rows.shape[1] != ambient_dim:
            raise ShapeError("basis rows must have ambient_dim columns")
        basis_rows = np.mod(basis_rows, field.p)
        basis_rows.setflags(write=False)
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis_rows
        self.pivots = pivot_columns(basis_rows)
        if len(self.pivots) != basis_rows.shape[0]:
            raise ShapeError("basis contains a zero row; use Subspace.from_rows")

    @classmethod
    def from_rows(cls, field: PrimeField, ambient_dim: int, rows) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, ambient_dim)
        reduced, pivots = rref_array(rows, field.p)
        return cls(field, ambient_dim, reduced[: len(pivots)])

    @classmethod
    def zero(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64))

    @classmethod
    def full(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, np.eye(ambient_dim, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and other.field.p == self.field.p
            and other.ambient_dim == self.ambient_dim
            and bool(np.array_equal(other.basis, self.basis))
        )

    def __hash__(self):
        return hash((self.field.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self):
        return f"<Subspace dim {self.dim} of GF({self.field.p})^{self.ambient_dim}>"

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Residual of row vector(s) after elimination against the basis.

        Because the basis is in rref, its pivot columns form an identity
        block and one elimination pass is complete.
        """
        v = np.mod(np.asarray(vectors, dtype=np.int64), self.field.p)
        single = v.ndim == 1
        v = v.reshape(-1, self.ambient_dim)
        if self.dim:
            coeffs = v[:, self.pivots]
            v = (v - matmul_mod(coeffs, self.basis, self.field.p)) % self.field.p
        return v[0] if single else v

    def coefficients(self, vectors: np.ndarray) -> np.ndarray:
        """Coefficients over the basis rows; raises if a vector is outside."""
        v = np.mod(np.asarray(vectors, dtype=np.int64), self.field.p)
        single = v.ndim == 1
        v = v.reshape(-1, self.ambient_dim)
        coeffs = v[:, self.pivots] if self.dim else np.zeros((v.shape[0], 0), np.int64)
        resid = (v - matmul_mod(coeffs, self.basis, self.field.p)) % self.field.p if self.dim else v
        if resid.any():
            raise ShapeError("vector not contained in the subspace")
        return coeffs[0] if single else coeffs

    def contains_vector(self, v) -> bool:
        return not self.reduce(v).any()

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ShapeError("ambient dimensions differ")
        return not self.reduce(other.basis).any() if other.dim else True

    def add(self, other: "Subspace") -> "Subspace":
        if other.ambient_dim != self.ambient_dim:
            raise ShapeError("ambient dimensions differ")
        return Subspace.from_rows(
            self.field, self.ambient_dim, np.vstack([self.basis, other.basis])
        )

    def intersects_trivially(self, other: "Subspace") -> bool:
        return self.add(other).dim == self.dim + other.dim
