"""The truncated polynomial algebra A(n) over GF(p).

Monomials are exponent tuples with entries in I = {0, ..., p-1}; a product
whose exponent overflows p-1 in any coordinate is zero.  Polynomials are
finitely supported coefficient maps on these tuples with no stored zeros.
Multi-index combinatorics used by the Hamiltonian/contact constructions
(the sign sigma, the conjugate index, the contact grading) live here too.

All values are immutable; the canonical term order is lexicographic on
exponent tuples, which every serialisation below follows.
"""

from __future__ import annotations

from itertools import product

from .errors import ArgumentError, ModulusMismatch, ShapeError

MultiIndex = tuple[int, ...]


def tau(n: int, p: int) -> MultiIndex:
    """The top multi-index (p-1, ..., p-1)."""
    return (p - 1,) * n


def eps(i: int, n: int) -> MultiIndex:
    """Unit multi-index with a single 1 in (1-based) position i."""
    if not 1 <= i <= n:
        raise ShapeError(f"direction {i} out of range 1..{n}")
    return tuple(1 if k == i - 1 else 0 for k in range(n))


def omega(a: MultiIndex, p: int) -> tuple[int, ...]:
    """1-based positions where the exponent is not p-1."""
    return tuple(i + 1 for i, ai in enumerate(a) if ai != p - 1)


def ell(a: MultiIndex, p: int) -> int:
    return len(omega(a, p))


def sigma(i: int, r: int) -> int:
    """Sign +1 on 1..r, -1 on r+1..2r."""
    if not 1 <= i <= 2 * r:
        raise ShapeError(f"index {i} out of range 1..{2 * r}")
    return 1 if i <= r else -1


def conj(i: int, r: int) -> int:
    """Conjugate index i' pairing i with i+r (and back)."""
    if not 1 <= i <= 2 * r:
        raise ShapeError(f"index {i} out of range 1..{2 * r}")
    return i + r if i <= r else i - r


def contact_degree(a: MultiIndex, p: int) -> int:
    """Grading degree of a monomial in the contact algebra: |a| + a_last - 2."""
    return sum(a) + a[-1] - 2


def all_multi_indices(n: int, p: int) -> list[MultiIndex]:
    """All of A(n) in lexicographic order."""
    return [tuple(a) for a in product(range(p), repeat=n)]


def mono_mul(a: MultiIndex, b: MultiIndex, p: int):
    """Product of monomials: a+b, or None when a coordinate overflows p-1."""
    if len(a) != len(b):
        raise ShapeError(f"multi-index lengths differ: {len(a)} vs {len(b)}")
    out = []
    for x, y in zip(a, b):
        s = x + y
        if s > p - 1:
            return None
        out.append(s)
    return tuple(out)


def mono_str(a: MultiIndex) -> str:
    parts = [f"x{i + 1}^{ai}" for i, ai in enumerate(a) if ai]
    return "*".join(parts) if parts else "1"


class Poly:
    """Element of A(n): finitely supported map from exponent tuples to GF(p)."""

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms: dict[MultiIndex, int] | None = None):
        self.n = n
        self.p = p
        clean: dict[MultiIndex, int] = {}
        if terms:
            for a, c in terms.items():
                if len(a) != n:
                    raise ShapeError(f"exponent tuple {a} has length != {n}")
                c %= p
                if c:
                    clean[a] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int, p: int) -> "Poly":
        return cls(n, p)

    @classmethod
    def one(cls, n: int, p: int) -> "Poly":
        return cls(n, p, {(0,) * n: 1})

    @classmethod
    def monomial(cls, exps: MultiIndex, p: int, coeff: int = 1) -> "Poly":
        return cls(len(exps), p, {tuple(exps): coeff})

    @classmethod
    def variable(cls, i: int, n: int, p: int) -> "Poly":
        return cls(n, p, {eps(i, n): 1})

    # -- structure ------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.n != other.n:
            raise ShapeError(f"variable counts differ: {self.n} vs {other.n}")
        if self.p != other.p:
            raise ModulusMismatch(f"mixed moduli {self.p} and {other.p}")

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, a: MultiIndex) -> int:
        return self.terms.get(tuple(a), 0)

    def support(self) -> list[MultiIndex]:
        return sorted(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and other.n == self.n
            and other.p == self.p
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.n, self.p, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            (f"{c}*{mono_str(a)}" if c != 1 or not any(a) else mono_str(a))
            for a, c in sorted(self.terms.items())
        )

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0) + c
        return Poly(self.n, self.p, terms)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0) - c
        return Poly(self.n, self.p, terms)

    def __neg__(self) -> "Poly":
        return Poly(self.n, self.p, {a: -c for a, c in self.terms.items()})

    def scale(self, c: int) -> "Poly":
        return Poly(self.n, self.p, {a: c * v for a, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        p = self.p
        terms: dict[MultiIndex, int] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ab = mono_mul(a, b, p)
                if ab is not None:
                    terms[ab] = terms.get(ab, 0) + ca * cb
        return Poly(self.n, p, terms)

    def partial(self, i: int) -> "Poly":
        """Partial derivative in (1-based) direction i."""
        if not 1 <= i <= self.n:
            raise ShapeError(f"direction {i} out of range 1..{self.n}")
        terms: dict[MultiIndex, int] = {}
        for a, c in self.terms.items():
            ai = a[i - 1]
            if ai:
                b = a[: i - 1] + (ai - 1,) + a[i:]
                terms[b] = terms.get(b, 0) + ai * c
        return Poly(self.n, self.p, terms)

    # -- serialisation ------------------------------------------------------

    def to_pairs(self) -> list[tuple[list[int], int]]:
        """Terms as (exponent list, coefficient), lexicographically sorted."""
        return [(list(a), c) for a, c in sorted(self.terms.items())]


def poly_mul(f: Poly, g: Poly) -> Poly:
    return f * g


def partial(i: int, f: Poly) -> Poly:
    return f.partial(i)


def check_odd_vars(n: int, what: str):
    if n % 2 == 0:
        raise ArgumentError(f"{what} needs an odd variable count, got {n}")


def check_even_vars(n: int, what: str):
    if n % 2 != 0:
        raise ArgumentError(f"{what} needs an even variable count, got {n}")
