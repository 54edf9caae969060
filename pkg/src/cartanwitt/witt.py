"""Derivations of A(n): the Jacobson-Witt algebra W(n).

A derivation is an n-tuple of polynomial components, D = sum f_i d_i.
The bracket uses the closed coefficient formula (component-wise, via
partial derivatives) rather than operator composition; composing
``apply`` twice gives an independent oracle used by the tests.  The
p-th power map composes the operator p times on the coordinate
functions only, which determines the resulting derivation.
"""

from __future__ import annotations

from .errors import ModulusMismatch, ShapeError
from .truncpoly import MultiIndex, Poly, contact_degree

Triple = tuple[int, list[int], int]


class Deriv:
    """Element of W(n), stored as one Poly per direction."""

    __slots__ = ("n", "p", "comps")

    def __init__(self, comps: tuple[Poly, ...] | list[Poly]):
        comps = tuple(comps)
        if not comps:
            raise ShapeError("a derivation needs at least one component")
        n, p = comps[0].n, comps[0].p
        for f in comps:
            if f.n != n:
                raise ShapeError("component variable counts differ")
            if f.p != p:
                raise ModulusMismatch("component moduli differ")
        if len(comps) != n:
            raise ShapeError(f"expected {n} components, got {len(comps)}")
        self.n = n
        self.p = p
        self.comps = comps

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n: int, p: int) -> "Deriv":
        return cls(tuple(Poly.zero(n, p) for _ in range(n)))

    @classmethod
    def monomial_term(cls, direction: int, exps: MultiIndex, p: int, coeff: int = 1) -> "Deriv":
        """coeff * x^exps d_direction (1-based direction)."""
        n = len(exps)
        if not 1 <= direction <= n:
            raise ShapeError(f"direction {direction} out of range 1..{n}")
        comps = [Poly.zero(n, p) for _ in range(n)]
        comps[direction - 1] = Poly.monomial(exps, p, coeff)
        return cls(tuple(comps))

    @classmethod
    def from_terms(cls, n: int, p: int, terms) -> "Deriv":
        """Build from an iterable of (direction, exponent tuple, coefficient)."""
        data: list[dict[MultiIndex, int]] = [dict() for _ in range(n)]
        for direction, exps, coeff in terms:
            if not 1 <= direction <= n:
                raise ShapeError(f"direction {direction} out of range 1..{n}")
            exps = tuple(exps)
            d = data[direction - 1]
            d[exps] = d.get(exps, 0) + coeff
        return cls(tuple(Poly(n, p, d) for d in data))

    # -- structure -------------------------------------------------------

    def _check(self, other: "Deriv"):
        if self.n != other.n:
            raise ShapeError(f"variable counts differ: {self.n} vs {other.n}")
        if self.p != other.p:
            raise ModulusMismatch(f"mixed moduli {self.p} and {other.p}")

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.comps)

    def __eq__(self, other):
        return (
            isinstance(other, Deriv)
            and other.n == self.n
            and other.p == self.p
            and other.comps == self.comps
        )

    def __hash__(self):
        return hash((self.n, self.p, self.comps))

    def __repr__(self):
        parts = []
        for i, f in enumerate(self.comps):
            if not f.is_zero():
                parts.append(f"({f!r})d{i + 1}")
        return " + ".join(parts) if parts else "0"

    def __add__(self, other: "Deriv") -> "Deriv":
        self._check(other)
        return Deriv(tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "Deriv") -> "Deriv":
        self._check(other)
        return Deriv(tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self) -> "Deriv":
        return Deriv(tuple(-a for a in self.comps))

    def scale(self, c: int) -> "Deriv":
        return Deriv(tuple(a.scale(c) for a in self.comps))

    # -- operations ---------------------------------------------------------

    def apply(self, f: Poly) -> Poly:
        """Action on A(n): sum f_i * d_i(f)."""
        if f.n != self.n:
            raise ShapeError("variable counts differ")
        if f.p != self.p:
            raise ModulusMismatch("mixed moduli")
        out = Poly.zero(self.n, self.p)
        for i, g in enumerate(self.comps):
            if not g.is_zero():
                out = out + g * f.partial(i + 1)
        return out

    def bracket(self, other: "Deriv") -> "Deriv":
        """Commutator [self, other] = sum_j (self(g_j) - other(f_j)) d_j."""
        self._check(other)
        return Deriv(
            tuple(
                self.apply(other.comps[j]) - other.apply(self.comps[j])
                for j in range(self.n)
            )
        )

    def divergence(self) -> Poly:
        out = Poly.zero(self.n, self.p)
        for i, f in enumerate(self.comps):
            out = out + f.partial(i + 1)
        return out

    def p_power(self) -> "Deriv":
        """The derivation D^p, evaluated by p-fold composition on each x_i."""
        comps = []
        for i in range(1, self.n + 1):
            g = Poly.variable(i, self.n, self.p)
            for _ in range(self.p):
                g = self.apply(g)
            comps.append(g)
        return Deriv(tuple(comps))

    def graded_parts(self, family: str = "W") -> dict[int, "Deriv"]:
        """Split into homogeneous parts.

        For W/S/H the degree of x^a d_i is |a| - 1.  For the contact
        family the grading lives on the recovered polynomial coordinate
        and the degree of a monomial a there is |a| + a_last - 2.
        """
        if family == "K":
            from .cartan import d_K, recover_K_poly  # deferred: cartan builds on witt

            if self.n % 2 == 0:
                raise ShapeError("contact grading needs an odd variable count")
            f = recover_K_poly(self)
            parts: dict[int, Deriv] = {}
            buckets: dict[int, dict[MultiIndex, int]] = {}
            for a, c in f.terms.items():
                buckets.setdefault(contact_degree(a, self.p), {})[a] = c
            for deg, terms in buckets.items():
                parts[deg] = d_K(Poly(self.n, self.p, terms))
            return dict(sorted(parts.items()))
        if family not in ("W", "S", "H"):
            raise ShapeError(f"unknown family {family!r}")
        buckets2: dict[int, list] = {}
        for j, f in enumerate(self.comps):
            for a, c in f.terms.items():
                buckets2.setdefault(sum(a) - 1, []).append((j + 1, a, c))
        return {
            deg: Deriv.from_terms(self.n, self.p, terms)
            for deg, terms in sorted(buckets2.items())
        }

    # -- serialisation --------------------------------------------------------

    def to_triples(self) -> list[Triple]:
        """(direction, exponent list, coefficient) triples, lexicographically sorted."""
        out = []
        for j, f in enumerate(self.comps):
            for a, c in f.terms.items():
                out.append((j + 1, a, c))
        out.sort()
        return [(d, list(a), c) for d, a, c in out]

    @classmethod
    def from_triples(cls, n: int, p: int, triples) -> "Deriv":
        return cls.from_terms(n, p, [(d, tuple(a), c) for d, a, c in triples])


def bracket(d: Deriv, e: Deriv) -> Deriv:
    return d.bracket(e)


def divergence(d: Deriv) -> Poly:
    return d.divergence()


def p_power(d: Deriv) -> Deriv:
    return d.p_power()


def graded_parts(d: Deriv, family: str = "W") -> dict[int, Deriv]:
    return d.graded_parts(family)
