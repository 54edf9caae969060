"""Construction of the graded Cartan-type algebras W(n), S(n), H(2r), K(2r+1).

W(n) is the full derivation algebra of the truncated polynomial algebra.
S(n) is the derived algebra of the divergence kernel and is built from an
explicit monomial basis, cross-checked against a bracket-spinning
computation of that derived algebra.  H(2r) is spanned by images of the
Hamiltonian operator, K(2r+1) is the derived algebra of the span of
contact-operator images, computed by one round of pairwise brackets with a
fixed-point check (a second round adds nothing).

Each constructed algebra carries a coordinate system: derivation
coordinates for W and S, polynomial coordinates through the Hamiltonian or
contact operator for H and K, plus sparse per-generator tables for the
adjoint action of the embedded Witt algebra.  Algebras are immutable after
construction and cached per (family, n, p).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ArgumentError,
    ConstructionMismatch,
    EmbeddingError,
    NotInContactImage,
    ShapeError,
)
from .linalg import PrimeField, Subspace, prime_field, rref_array
from .truncpoly import (
    MultiIndex,
    Poly,
    all_multi_indices,
    conj,
    eps,
    mono_mul,
    mono_str,
    omega,
    sigma,
    tau,
)
from .witt import Deriv

FAMILIES = ("W", "S", "H", "K")


# ---------------------------------------------------------------------------
# coordinate helpers
# ---------------------------------------------------------------------------

def _strides(n: int, p: int) -> tuple[int, ...]:
    return tuple(p ** (n - 1 - k) for k in range(n))


def _flat(a: MultiIndex, strides) -> int:
    return sum(x * s for x, s in zip(a, strides))


def _exp_grid(n: int, p: int) -> np.ndarray:
    """All exponent tuples as rows, in lexicographic (= flat index) order."""
    return np.indices((p,) * n).reshape(n, -1).T.astype(np.int64)


def deriv_w_vec(d: Deriv) -> np.ndarray:
    """Coordinates of a derivation in the monomial basis of W(n)."""
    n, p = d.n, d.p
    strides = _strides(n, p)
    pn = p**n
    v = np.zeros(n * pn, dtype=np.int64)
    for j, f in enumerate(d.comps):
        off = j * pn
        for a, c in f.terms.items():
            v[off + _flat(a, strides)] = c
    return v


# ---------------------------------------------------------------------------
# the operators D_ij, D_H, D_K and their inverses
# ---------------------------------------------------------------------------

def d_ij(i: int, j: int, f: Poly) -> Deriv:
    """The divergence-free derivation d_j(f) d_i - d_i(f) d_j, for i < j."""
    n = f.n
    if i == j:
        raise ArgumentError("d_ij needs two distinct directions")
    if not (1 <= i < j <= n):
        raise ArgumentError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    comps = [Poly.zero(n, f.p) for _ in range(n)]
    comps[i - 1] = f.partial(j)
    comps[j - 1] = -f.partial(i)
    return Deriv(tuple(comps))


def d_H(f: Poly) -> Deriv:
    """Hamiltonian operator: sum_i sigma(i) d_i(f) d_{i'} on an even variable count."""
    n = f.n
    if n % 2 != 0:
        raise ArgumentError(f"Hamiltonian operator needs an even variable count, got {n}")
    r = n // 2
    comps = [Poly.zero(n, f.p) for _ in range(n)]
    for i in range(1, n + 1):
        g = f.partial(i)
        if not g.is_zero():
            comps[conj(i, r) - 1] = comps[conj(i, r) - 1] + g.scale(sigma(i, r))
    return Deriv(tuple(comps))


def d_K(f: Poly) -> Deriv:
    """Contact operator on an odd variable count 2r+1.

    Component j <= 2r is x_j d_m(f) + sigma(j') d_{j'}(f); the last
    component is 2f - sum_j sigma(j) x_j f_{j'}.
    """
    n = f.n
    if n % 2 == 0:
        raise ArgumentError(f"contact operator needs an odd variable count, got {n}")
    r = (n - 1) // 2
    p = f.p
    fm = f.partial(n)
    comps = [Poly.zero(n, p) for _ in range(n)]
    for j in range(1, 2 * r + 1):
        comps[j - 1] = Poly.variable(j, n, p) * fm + f.partial(conj(j, r)).scale(
            sigma(conj(j, r), r)
        )
    last = f.scale(2)
    for j in range(1, 2 * r + 1):
        last = last - (Poly.variable(j, n, p) * comps[conj(j, r) - 1]).scale(sigma(j, r))
    comps[n - 1] = last
    return Deriv(tuple(comps))


def recover_K_poly(d: Deriv) -> Poly:
    """Invert the contact operator: f = (f_m + sum_j sigma(j) x_j f_{j'}) / 2."""
    n = d.n
    if n % 2 == 0:
        raise ArgumentError(f"contact recovery needs an odd variable count, got {n}")
    r = (n - 1) // 2
    p = d.p
    f = d.comps[n - 1]
    for j in range(1, 2 * r + 1):
        f = f + (Poly.variable(j, n, p) * d.comps[conj(j, r) - 1]).scale(sigma(j, r))
    f = f.scale(prime_field(p).inv(2))
    if d_K(f) != d:
        raise NotInContactImage("derivation is not a contact-operator image")
    return f


def recover_H_poly(d: Deriv) -> Poly:
    """Invert the Hamiltonian operator up to constants (constant term set to 0)."""
    n = d.n
    if n % 2 != 0:
        raise ArgumentError(f"Hamiltonian recovery needs an even variable count, got {n}")
    r = n // 2
    p = d.p
    terms: dict[MultiIndex, int] = {}
    for j in range(1, n + 1):
        # d_j f = sigma(j) * (component j' of d); integrate in direction j.
        g = d.comps[conj(j, r) - 1].scale(sigma(j, r))
        for a, c in g.terms.items():
            if a[j - 1] == p - 1:
                raise NotInContactImage("component is not integrable in its direction")
            b = a[: j - 1] + (a[j - 1] + 1,) + a[j:]
            terms[b] = (c * prime_field(p).inv(a[j - 1] + 1)) % p
    f = Poly(n, p, terms)
    if d_H(f) != d:
        raise NotInContactImage("derivation is not a Hamiltonian-operator image")
    return f


def poisson_bracket(f: Poly, g: Poly) -> Poly:
    """sum_{j<=r} (d_j f d_{j+r} g - d_{j+r} f d_j g); pulls the bracket back through d_H."""
    n = f.n
    if n % 2 != 0:
        raise ArgumentError(f"Poisson bracket needs an even variable count, got {n}")
    r = n // 2
    out = Poly.zero(n, f.p)
    for j in range(1, r + 1):
        out = out + f.partial(j) * g.partial(j + r) - f.partial(j + r) * g.partial(j)
    return out


def contact_bracket(f: Poly, g: Poly) -> Poly:
    """Pullback of the W(2r+1) bracket through the contact operator."""
    if f.n != g.n:
        raise ShapeError("variable counts differ")
    return recover_K_poly(d_K(f).bracket(d_K(g)))


# ---------------------------------------------------------------------------
# embeddings of the p-dimensional Witt algebra
# ---------------------------------------------------------------------------

def theta(family: str, n: int, p: int, i: int) -> Deriv:
    """Image of x_1^i d_1 under the canonical embedding into the family algebra."""
    field = prime_field(p)
    if not 0 <= i <= p - 1:
        raise ArgumentError(f"generator index {i} out of range 0..{p - 1}")
    if family == "W":
        return Deriv.monomial_term(1, (i,) + (0,) * (n - 1), p)
    if family == "S":
        if n < 2:
            raise ArgumentError("the divergence-free family needs n >= 2")
        img = d_ij(1, 2, Poly.monomial((i, 1) + (0,) * (n - 2), p))
        # pin the operator against the explicit closed form
        expected = Deriv.monomial_term(1, (i,) + (0,) * (n - 1), p)
        if i:
            expected = expected + Deriv.monomial_term(2, (i - 1, 1) + (0,) * (n - 2), p, -i)
        assert img == expected, "d_ij disagrees with its defining instance"
        return img
    if family == "H":
        if n % 2 or n < 2:
            raise ArgumentError("the Hamiltonian family needs an even variable count")
        r = n // 2
        a = tuple(i if k == 0 else (1 if k == r else 0) for k in range(n))
        return -d_H(Poly.monomial(a, p))
    if family == "K":
        if n % 2 == 0 or n < 3:
            raise ArgumentError("the contact family needs an odd variable count >= 3")
        a = (0,) * (n - 1) + (i,)
        return d_K(Poly.monomial(a, p)).scale(field.inv(2))
    raise ArgumentError(f"unknown family {family!r}")


@dataclass(frozen=True)
class Embedding:
    """The p images of x_1^i d_1, i in I, inside a family algebra."""

    family: str
    n: int
    p: int
    images: tuple[Deriv, ...]

    @classmethod
    def build(cls, family: str, n: int, p: int, alg: "CartanAlgebra | None" = None):
        images = tuple(theta(family, n, p, i) for i in range(p))
        if alg is not None:
            for i, d in enumerate(images):
                if not alg.contains(d):
                    raise EmbeddingError(f"image {i} is outside the target algebra")
        return cls(family, n, p, images)


@lru_cache(maxsize=None)
def embedding(family: str, n: int, p: int) -> Embedding:
    return Embedding.build(family, n, p, algebra(family, n, p))


def verify_embedding_images(alg: "CartanAlgebra", images) -> list[tuple[str, bool, str]]:
    """Check the restricted-homomorphism axioms for a list of p candidate images.

    Returns one (name, ok, detail) entry per check; nothing is raised, so a
    perturbed image list can be inspected as a negative control.
    """
    p = alg.p
    images = list(images)
    entries: list[tuple[str, bool, str]] = []

    rows = np.stack([deriv_w_vec(d) for d in images])
    rank = Subspace.from_rows(alg.field, rows.shape[1], rows).dim
    entries.append(("independence", rank == p, f"rank {rank} of {p}"))

    for a in range(p):
        in_span = alg.contains(images[a])
        entries.append((f"image_in_span({a})", in_span, ""))

    for a in range(p):
        for b in range(p):
            got = images[a].bracket(images[b])
            c = (b - a) % p
            k = a + b - 1
            if c == 0 or k > p - 1:
                want = Deriv.zero(alg.n, p)
            else:
                want = images[k].scale(c)
            ok = got == want
            entries.append((f"bracket({a},{b})", ok, "" if ok else "bracket image mismatch"))

    for a in range(p):
        got = images[a].p_power()
        want = images[1] if a == 1 else Deriv.zero(alg.n, p)
        ok = got == want
        entries.append((f"p_power({a})", ok, "" if ok else "p-th power mismatch"))
    return entries


def check_embedding(family: str, n: int, p: int):
    """Run all embedding checks for the canonical images; failures are entries."""
    alg = algebra(family, n, p)
    images = [theta(family, n, p, i) for i in range(p)]
    entries = verify_embedding_images(alg, images)
    return {"family": family, "n": n, "p": p,
            "checks": entries, "ok": all(ok for _, ok, _ in entries)}


# ---------------------------------------------------------------------------
# adjoint-action tables for the embedded generators
# ---------------------------------------------------------------------------
# Each table is a list of batches (src, dst, coeff); within a batch the
# destinations are distinct, so fancy-index accumulation is safe.

def _table_W(n: int, p: int, s: int):
    G = _exp_grid(n, p)
    pn = p**n
    stride1 = p ** (n - 1)
    a1 = G[:, 0]
    ok = (a1 + s - 1 >= 0) & (a1 + s - 1 <= p - 1)
    idx = np.arange(pn)
    src, dst, cf = [], [], []
    for j in range(n):
        coeff = (a1 - (s if j == 0 else 0)) % p
        keep = ok & (coeff != 0)
        k = idx[keep]
        src.append(j * pn + k)
        dst.append(j * pn + k + (s - 1) * stride1)
        cf.append(coeff[keep])
    return [(np.concatenate(src), np.concatenate(dst), np.concatenate(cf))]


def _table_S(n: int, p: int, s: int):
    G = _exp_grid(n, p)
    pn = p**n
    stride1, stride2 = p ** (n - 1), p ** (n - 2)
    a1, a2 = G[:, 0], G[:, 1]
    ok = (a1 + s - 1 >= 0) & (a1 + s - 1 <= p - 1)
    idx = np.arange(pn)
    src, dst, cf = [], [], []
    for j in range(n):
        if j == 0:
            coeff = (a1 - s - s * a2) % p
        elif j == 1:
            coeff = (a1 - s * a2 + s) % p
        else:
            coeff = (a1 - s * a2) % p
        keep = ok & (coeff != 0)
        k = idx[keep]
        src.append(j * pn + k)
        dst.append(j * pn + k + (s - 1) * stride1)
        cf.append(coeff[keep])
    batches = [(np.concatenate(src), np.concatenate(dst), np.concatenate(cf))]
    c2 = (s * (s - 1)) % p
    if c2:
        keep = (a1 + s - 2 >= 0) & (a1 + s - 2 <= p - 1) & (a2 + 1 <= p - 1)
        k = idx[keep]
        batches.append(
            (k, pn + k + (s - 2) * stride1 + stride2, np.full(k.size, c2, dtype=np.int64))
        )
    return batches


def _table_H(n: int, p: int, s: int):
    G = _exp_grid(n, p)
    r = n // 2
    stride1 = p ** (n - 1)
    b1, br1 = G[:, 0], G[:, r]
    coeff = (b1 - s * br1) % p
    keep = (b1 + s - 1 >= 0) & (b1 + s - 1 <= p - 1) & (coeff != 0)
    idx = np.arange(p**n)[keep]
    dst = idx + (s - 1) * stride1
    # target 0 is the constant monomial, which the operator kills
    live = dst != 0
    return [(idx[live], dst[live], coeff[keep][live])]


def _table_K(n: int, p: int, i: int):
    G = _exp_grid(n, p)
    bm = G[:, n - 1]
    b2 = G[:, : n - 1].sum(axis=1)
    inv2 = prime_field(p).inv(2)
    coeff = (inv2 * (i * (b2 - 2) + 2 * bm)) % p
    keep = (bm + i - 1 >= 0) & (bm + i - 1 <= p - 1) & (coeff != 0)
    idx = np.arange(p**n)[keep]
    return [(idx, idx + (i - 1), coeff[keep])]


_TABLE_BUILDERS = {"W": _table_W, "S": _table_S, "H": _table_H, "K": _table_K}


def apply_action(batches, rows: np.ndarray, p: int) -> np.ndarray:
    """Apply a sparse action table to row vectors (one vector per row)."""
    out = np.zeros_like(rows)
    for src, dst, cf in batches:
        out[:, dst] += rows[:, src] * cf
    return out % p


# ---------------------------------------------------------------------------
# the algebra container
# ---------------------------------------------------------------------------

class CartanAlgebra:
    """A constructed Cartan-type algebra with its coordinate system.

    ``ambient_dim`` hosts every subspace computation: derivation
    coordinates of W(n) for families W/S, polynomial coordinates for
    families H/K (for H these are taken modulo constants, so the flat
    index 0 is always normalised to zero).
    """

    def __init__(self, family: str, n: int, p: int, basis: list[Deriv],
                 basis_exps: list[MultiIndex] | None = None):
        self.family = family
        self.n = n
        self.p = p
        self.field: PrimeField = prime_field(p)
        self.r = n // 2 if family in ("H", "K") else None
        self.strides = _strides(n, p)
        self.basis = list(basis)
        self.dim = len(self.basis)
        self.basis_exps = list(basis_exps) if basis_exps is not None else None
        if family in ("W", "S"):
            self.ambient_dim = n * p**n
        elif family in ("H", "K"):
            self.ambient_dim = p**n
        else:
            raise ArgumentError(f"unknown family {family!r}")

        if family == "W":
            self.basis_coord_idx = np.arange(self.dim, dtype=np.int64)
            self.basis_matrix = None
        elif family in ("H", "K"):
            idx = np.array([_flat(a, self.strides) for a in self.basis_exps], dtype=np.int64)
            assert np.all(np.diff(idx) > 0)
            self.basis_coord_idx = idx
            self.basis_matrix = None
        else:
            self.basis_coord_idx = None
            self.basis_matrix = np.stack([deriv_w_vec(d) for d in self.basis])
        self._span: Subspace | None = None
        self._tables = None
        self._coord_data = None
        self._coord_mask = None

    def __repr__(self):
        return f"<{self.family}({self.n}) over GF({self.p}), dim {self.dim}>"

    # -- coordinates ------------------------------------------------------

    @property
    def span(self) -> Subspace:
        if self._span is None:
            if self.basis_coord_idx is not None:
                rows = np.zeros((self.dim, self.ambient_dim), dtype=np.int64)
                rows[np.arange(self.dim), self.basis_coord_idx] = 1
                self._span = Subspace(self.field, self.ambient_dim, rows)
            else:
                self._span = Subspace.from_rows(self.field, self.ambient_dim, self.basis_matrix)
        return self._span

    def poly_to_vec(self, f: Poly) -> np.ndarray:
        if self.family not in ("H", "K"):
            raise ShapeError("polynomial coordinates exist only for families H and K")
        if f.n != self.n or f.p != self.p:
            raise ShapeError("variable count or modulus mismatch")
        v = np.zeros(self.ambient_dim, dtype=np.int64)
        for a, c in f.terms.items():
            v[_flat(a, self.strides)] = c
        if self.family == "H":
            v[0] = 0
        return v

    def vec_to_poly(self, v: np.ndarray) -> Poly:
        grid_exps = all_multi_indices(self.n, self.p)
        terms = {grid_exps[i]: int(c) for i, c in enumerate(np.asarray(v)) if c}
        return Poly(self.n, self.p, terms)

    def deriv_to_vec(self, d: Deriv) -> np.ndarray:
        if d.n != self.n or d.p != self.p:
            raise ShapeError("variable count or modulus mismatch")
        if self.family in ("W", "S"):
            return deriv_w_vec(d)
        f = recover_H_poly(d) if self.family == "H" else recover_K_poly(d)
        return self.poly_to_vec(f)

    def vec_to_deriv(self, v: np.ndarray) -> Deriv:
        if self.family in ("W", "S"):
            v = np.asarray(v)
            pn = self.p**self.n
            grid_exps = all_multi_indices(self.n, self.p)
            terms = []
            for idx in np.nonzero(v)[0]:
                j, a = divmod(int(idx), pn)
                terms.append((j + 1, grid_exps[a], int(v[idx])))
            return Deriv.from_terms(self.n, self.p, terms)
        f = self.vec_to_poly(v)
        return d_H(f) if self.family == "H" else d_K(f)

    def contains(self, d: Deriv) -> bool:
        try:
            v = self.deriv_to_vec(d)
        except (NotInContactImage, ShapeError):
            return False
        if self.basis_coord_idx is not None:
            if self._coord_mask is None:
                mask = np.zeros(self.ambient_dim, dtype=bool)
                mask[self.basis_coord_idx] = True
                self._coord_mask = mask
            return not v[~self._coord_mask].any()
        return self.span.contains_vector(v)

    def coords(self, d: Deriv) -> np.ndarray:
        """Coefficients of d over the recorded basis."""
        v = self.deriv_to_vec(d)
        if self.basis_coord_idx is not None:
            c = v[self.basis_coord_idx]
            rest = v.copy()
            rest[self.basis_coord_idx] = 0
            if rest.any():
                raise ShapeError("element outside the algebra")
            return c
        if self._coord_data is None:
            aug = np.hstack([self.basis_matrix, np.eye(self.dim, dtype=np.int64)])
            red, piv = rref_array(aug, self.p)
            self._coord_data = (
                [c for c in piv if c < self.ambient_dim],
                red[:, self.ambient_dim:],
            )
        pivots, trans = self._coord_data
        c = (v[pivots] @ trans) % self.p
        if not np.array_equal((c @ self.basis_matrix) % self.p, v % self.p):
            raise ShapeError("element outside the algebra")
        return c

    # -- embedded Witt action ----------------------------------------------

    def theta_tables(self):
        if self._tables is None:
            build = _TABLE_BUILDERS[self.family]
            self._tables = [build(self.n, self.p, i) for i in range(self.p)]
        return self._tables

    def theta_image(self, i: int) -> Deriv:
        return theta(self.family, self.n, self.p, i)

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "p": self.p,
            "dim": self.dim,
            "basis": [d.to_triples() for d in self.basis],
        }


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def algebra(family: str, n: int, p: int) -> CartanAlgebra:
    if family == "W":
        return build_W(n, p)
    if family == "S":
        return build_S(n, p)
    if family == "H":
        return build_H(n, p)
    if family == "K":
        return build_K(n, p)
    raise ArgumentError(f"unknown family {family!r}")


def build_W(n: int, p: int) -> CartanAlgebra:
    """The full derivation algebra, basis x^a d_i ordered by (i, a) lexicographically."""
    prime_field(p)
    if n < 1:
        raise ArgumentError(f"need n >= 1, got {n}")
    exps = all_multi_indices(n, p)
    basis = [Deriv.monomial_term(j, a, p) for j in range(1, n + 1) for a in exps]
    return CartanAlgebra("W", n, p, basis)


def _divergence_kernel_basis(n: int, p: int) -> list[Deriv]:
    """A sparse basis of the divergence kernel inside W(n).

    The divergence matrix has at most one nonzero per column, so the kernel
    splits into free columns (x^a d_i with a_i = 0) and one 2-term combination
    per remaining column of each relation row.
    """
    basis: list[Deriv] = []
    for i in range(1, n + 1):
        for a in all_multi_indices(n, p):
            if a[i - 1] == 0:
                basis.append(Deriv.monomial_term(i, a, p))
    for b in all_multi_indices(n, p):
        cols = [i for i in range(1, n + 1) if b[i - 1] <= p - 2]
        if len(cols) < 2:
            continue
        i0 = cols[0]
        a0 = tuple(x + (1 if k == i0 - 1 else 0) for k, x in enumerate(b))
        for i in cols[1:]:
            ai = tuple(x + (1 if k == i - 1 else 0) for k, x in enumerate(b))
            d = Deriv.monomial_term(i, ai, p, b[i0 - 1] + 1) + Deriv.monomial_term(
                i0, a0, p, -(b[i - 1] + 1)
            )
            basis.append(d)
    expected = (n - 1) * p**n + 1
    assert len(basis) == expected
    return basis


def _canonical_row_key(d: Deriv):
    triples = d.to_triples()
    if not triples:
        return None
    inv0 = prime_field(d.p).inv(triples[0][2])
    return tuple((dirn, tuple(a), (c * inv0) % d.p) for dirn, a, c in triples)


def _bracket_span(elems: list[Deriv], n: int, p: int) -> Subspace:
    """Span of all pairwise brackets of the given derivations (one round)."""
    field = prime_field(p)
    seen = set()
    rows = []
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            b = elems[i].bracket(elems[j])
            key = _canonical_row_key(b)
            if key is None or key in seen:
                continue
            seen.add(key)
            rows.append(deriv_w_vec(b))
    if not rows:
        return Subspace.zero(field, n * p**n)
    return Subspace.from_rows(field, n * p**n, np.stack(rows))


def _check_bracket_fixed_point(basis: list[Deriv], span: Subspace, p: int):
    """Assert that pairwise brackets of a spanning set stay inside the span."""
    seen = set()
    rows = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            b = basis[i].bracket(basis[j])
            key = _canonical_row_key(b)
            if key is None or key in seen:
                continue
            seen.add(key)
            rows.append(deriv_w_vec(b))
    if rows and span.reduce(np.stack(rows)).any():
        raise ConstructionMismatch("second bracket round left the computed span")


def s_basis_parts(n: int, p: int) -> tuple[list[Deriv], list[Deriv]]:
    """The two halves of the monomial basis of the divergence-free family.

    Part one: single monomials x^a d_i with a_i = 0 and not every other
    exponent maximal.  Part two: d_ij images of x^a x_i x_j over consecutive
    pairs (i, j) of non-maximal positions of a.
    """
    part1: list[Deriv] = []
    for i in range(1, n + 1):
        for a in all_multi_indices(n, p):
            if a[i - 1] == 0 and any(a[k] != p - 1 for k in range(n) if k != i - 1):
                part1.append(Deriv.monomial_term(i, a, p))
    part2: list[Deriv] = []
    for a in all_multi_indices(n, p):
        om = omega(a, p)
        for k in range(len(om) - 1):
            i1, i2 = om[k], om[k + 1]
            f = Poly.monomial(mono_mul(mono_mul(a, eps(i1, n), p), eps(i2, n), p), p)
            part2.append(d_ij(i1, i2, f))
    return part1, part2


def build_S(n: int, p: int) -> CartanAlgebra:
    """The divergence-free family, basis from the explicit monomial construction.

    The span is cross-checked for equality against the derived algebra of
    the divergence kernel obtained by spinning brackets, with a fixed-point
    round on top.
    """
    prime_field(p)
    if n < 2:
        raise ArgumentError(f"need n >= 2, got {n}")
    part1, part2 = s_basis_parts(n, p)

    expected_dim = (n - 1) * (p**n - 1)
    assert len(part1) == n * (p ** (n - 1) - 1)
    assert len(part2) == (p - 1) ** 2 * sum(i * p ** (i - 1) for i in range(1, n))
    if len(part1) + len(part2) != expected_dim:
        raise ConstructionMismatch("basis size disagrees with the dimension formula")

    basis = part1 + part2
    for d in basis:
        assert d.divergence().is_zero()
    alg = CartanAlgebra("S", n, p, basis)
    if alg.span.dim != expected_dim:
        raise ConstructionMismatch(
            f"basis rank {alg.span.dim} != expected dimension {expected_dim}"
        )

    derived = _bracket_span(_divergence_kernel_basis(n, p), n, p)
    if derived.dim != expected_dim or not derived.contains(alg.span):
        raise ConstructionMismatch(
            "explicit basis span differs from the spun derived algebra"
        )
    _check_bracket_fixed_point(basis, derived, p)
    return alg


def build_H(n: int, p: int) -> CartanAlgebra:
    """The Hamiltonian family: images of all monomials strictly between 0 and tau."""
    prime_field(p)
    if n % 2 or n < 2:
        raise ArgumentError(f"need an even variable count >= 2, got {n}")
    top = tau(n, p)
    zero = (0,) * n
    exps = [a for a in all_multi_indices(n, p) if a != zero and a != top]
    basis = [d_H(Poly.monomial(a, p)) for a in exps]
    rows = np.stack([deriv_w_vec(d) for d in basis])
    rank = Subspace.from_rows(prime_field(p), rows.shape[1], rows).dim
    if rank != p**n - 2:
        raise ConstructionMismatch(f"spanning set has rank {rank}, expected {p**n - 2}")
    return CartanAlgebra("H", n, p, basis, basis_exps=exps)


# -- the contact derived algebra, by a vectorised pairwise-bracket sweep -----

def _contact_monomial_bracket(a: MultiIndex, b: MultiIndex, p: int) -> Poly:
    """Closed form of the contact bracket on monomials (scalar reference copy)."""
    m = len(a)
    r = (m - 1) // 2
    terms: dict[MultiIndex, int] = {}
    asum = sum(a[: m - 1])
    bsum = sum(b[: m - 1])
    c0 = a[m - 1] * (bsum - 2) - b[m - 1] * (asum - 2)
    if c0 % p:
        ab = list(x + y for x, y in zip(a, b))
        ab[m - 1] -= 1
        if all(0 <= x <= p - 1 for x in ab):
            terms[tuple(ab)] = c0 % p
    for j in range(r):
        cj = a[j] * b[j + r] - a[j + r] * b[j]
        if cj % p:
            ab = list(x + y for x, y in zip(a, b))
            ab[j] -= 1
            ab[j + r] -= 1
            if all(0 <= x <= p - 1 for x in ab):
                t = tuple(ab)
                terms[t] = (terms.get(t, 0) + cj) % p
    return Poly(m, p, terms)


def _contact_sweep(sel: np.ndarray, G: np.ndarray, p: int, covered: np.ndarray,
                   grow: bool, collect: bool):
    """One pass over unordered pairs of the selected monomials.

    In grow mode, every bracket row with exactly one term outside the covered
    set covers that term; rows with two or more uncovered terms are counted
    (and gathered when ``collect``).  With grow False, any uncovered term is a
    closure violation and is gathered.
    Returns (newly_covered, unresolved_count, gathered_rows).
    """
    m = G.shape[1]
    r = (m - 1) // 2
    strides = np.array(_strides(m, p), dtype=np.int64)
    A = G[sel]
    flat = (A * strides).sum(axis=1)
    nsel = len(sel)
    a2 = A[:, : m - 1].sum(axis=1)
    am = A[:, m - 1]
    new_count = 0
    unresolved = 0
    gathered: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    chunk = max(1, 500_000 // max(nsel, 1))
    for lo in range(0, nsel, chunk):
        hi = min(lo + chunk, nsel)
        S = A[lo:hi, None, :] + A[None, :, :]
        over = S > (p - 1)
        n_over = over.sum(axis=2)
        base = flat[lo:hi, None] + flat[None, :]
        tri = np.arange(nsel)[None, :] > np.arange(lo, hi)[:, None]

        tgts, cfs, oks = [], [], []
        last = S[..., m - 1]
        ok0 = (n_over - over[..., m - 1] == 0) & (last >= 1) & (last <= p) & tri
        cf0 = (am[lo:hi, None] * (a2[None, :] - 2) - am[None, :] * (a2[lo:hi, None] - 2)) % p
        tgts.append(base - 1)
        cfs.append(cf0)
        oks.append(ok0 & (cf0 != 0))
        for j in range(r):
            u = S[..., j]
            v = S[..., j + r]
            okj = (
                (n_over - over[..., j] - over[..., j + r] == 0)
                & (u >= 1) & (u <= p) & (v >= 1) & (v <= p) & tri
            )
            cfj = (A[lo:hi, j, None] * A[None, :, j + r]
                   - A[lo:hi, j + r, None] * A[None, :, j]) % p
            tgts.append(base - strides[j] - strides[j + r])
            cfs.append(cfj)
            oks.append(okj & (cfj != 0))

        active = []
        for ok, tgt in zip(oks, tgts):
            safe = np.where(ok, tgt, 0)
            active.append(ok & ~covered[safe])
        count = sum(a.astype(np.int8) for a in active)

        if grow:
            single = count == 1
            for act, tgt in zip(active, tgts):
                hit = single & act
                if hit.any():
                    before = covered.sum()
                    covered[tgt[hit]] = True
                    new_count += int(covered.sum() - before)
            multi = count >= 2
        else:
            multi = count >= 1
        n_multi = int(multi.sum())
        unresolved += n_multi
        if collect and n_multi:
            if len(gathered) + n_multi > 200_000:
                raise ConstructionMismatch("bracket span is far from the expected shape")
            pos = np.nonzero(multi)
            for x, y in zip(*pos):
                row_t, row_c = [], []
                for act, tgt, cf in zip(active, tgts, cfs):
                    if act[x, y]:
                        row_t.append(int(tgt[x, y]))
                        row_c.append(int(cf[x, y]))
                gathered.append((tuple(row_t), tuple(row_c)))
        del S, over, n_over, base, tri, tgts, cfs, oks, active
    return new_count, unresolved, gathered


def _reduce_leftover_rows(rows, covered: np.ndarray, p: int):
    """Gaussian elimination on sparse rows over the uncovered coordinates.

    Rows that shrink to a single uncovered term cover it (and the basis is
    requeued, since covering a coordinate can simplify other rows);
    independent multi-term rows are returned.
    """
    field = prime_field(p)
    queue = [dict(zip(t, c)) for t, c in rows]
    basis: dict[int, dict[int, int]] = {}
    while queue:
        row = queue.pop()
        row = {k: v % p for k, v in row.items() if v % p and not covered[k]}
        while row:
            lead = min(row)
            if lead not in basis:
                break
            other = basis[lead]
            factor = (row[lead] * field.inv(other[lead])) % p
            for k, v in other.items():
                nv = (row.get(k, 0) - factor * v) % p
                if nv:
                    row[k] = nv
                elif k in row:
                    del row[k]
        if not row:
            continue
        if len(row) == 1:
            covered[min(row)] = True
            queue.extend(basis.values())
            basis = {}
        else:
            basis[min(row)] = row
    return list(basis.values())


def _contact_derived(m: int, p: int):
    """Covered monomial set of the derived algebra of the contact span."""
    M = p**m
    G = _exp_grid(m, p)
    covered = np.zeros(M, dtype=bool)
    sel = np.arange(M)
    extra: list[dict[int, int]] = []
    for _ in range(4):  # fallback rounds are a safety net; one pass suffices
        while True:
            new, _, _ = _contact_sweep(sel, G, p, covered, grow=True, collect=False)
            if new == 0:
                break
        _, _, gathered = _contact_sweep(sel, G, p, covered, grow=True, collect=True)
        if not gathered:
            extra = []
            break
        before = covered.sum()
        extra = _reduce_leftover_rows(gathered, covered, p)
        if covered.sum() == before:
            break
    return covered, extra


def build_K(n: int, p: int) -> CartanAlgebra:
    """The contact family: derived algebra of the contact-operator span.

    One round of pairwise brackets spans the derived algebra; the resulting
    monomial set is checked against the expected shape (everything, or
    everything except the top monomial exactly when p divides 2r+4), and a
    second bracket round over the computed basis verifies the fixed point.
    """
    prime_field(p)
    if n % 2 == 0 or n < 3:
        raise ArgumentError(f"need an odd variable count >= 3, got {n}")
    r = (n - 1) // 2
    covered, extra = _contact_derived(n, p)
    exceptional = (2 * r + 4) % p == 0
    expected = np.ones(p**n, dtype=bool)
    if exceptional:
        expected[-1] = False  # the top monomial spans the missing line
    if extra or not np.array_equal(covered, expected):
        raise ConstructionMismatch("contact derived algebra has an unexpected span")

    # fixed point: brackets of the computed basis stay inside it
    G = _exp_grid(n, p)
    sel = np.nonzero(covered)[0]
    _, escapes, _ = _contact_sweep(sel, G, p, covered.copy(), grow=False, collect=False)
    if escapes:
        raise ConstructionMismatch("second bracket round left the contact span")

    grid_exps = all_multi_indices(n, p)
    exps = [grid_exps[i] for i in sel]
    basis = [d_K(Poly.monomial(a, p)) for a in exps]
    return CartanAlgebra("K", n, p, basis, basis_exps=exps)
