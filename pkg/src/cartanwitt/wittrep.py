"""Restricted representations of the p-dimensional Witt algebra.

A module is held as the list of p action matrices of the graded basis
x^i d, i = 0..p-1 (graded degree i-1).  The constructions are the baby
Verma modules V(lam), the simples L(lam), and the restriction of the
adjoint action of an embedded Witt algebra to an invariant subspace of a
Cartan-type algebra.  Classification of a block goes through its
generating maximal vectors; a projective-point spinning oracle provides
an independent composition series for small modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .cartan import CartanAlgebra, Embedding, apply_action
from .errors import (
    ArgumentError,
    DecompositionStuck,
    ModulusMismatch,
    NotInvariant,
    OracleMismatch,
    ShapeError,
    Unclassifiable,
)
from .linalg import Subspace, matmul_mod, prime_field, rref_array


@total_ordering
@dataclass(frozen=True)
class IsoType:
    """Isomorphism type of a block: a baby Verma module or a simple module.

    A p-dimensional module with highest weight strictly between 0 and p-1
    is both V(lam) and L(lam); such types are normalised to the simple
    form, so only V(0) and V(p-1) keep the Verma kind.
    """

    kind: str  # "V" or "L"
    lam: int
    p: int

    @classmethod
    def verma(cls, lam: int, p: int) -> "IsoType":
        lam %= p
        if 0 < lam < p - 1:
            return cls("L", lam, p)
        return cls("V", lam, p)

    @classmethod
    def simple(cls, lam: int, p: int) -> "IsoType":
        return cls("L", lam % p, p)

    @property
    def dim(self) -> int:
        if self.kind == "V":
            return self.p
        if self.lam == 0:
            return 1
        if self.lam == self.p - 1:
            return self.p - 1
        return self.p

    @property
    def is_simple(self) -> bool:
        return self.kind == "L"

    def label(self) -> str:
        return f"{self.kind}({self.lam})"

    def factors(self) -> dict[int, int]:
        """Composition factors as a map weight -> multiplicity."""
        if self.kind == "V":
            return {0: 1, self.p - 1: 1}
        return {self.lam: 1}

    def factor_weights(self) -> list[int]:
        """Union of the h-eigenvalue multisets of the composition factors."""
        out: list[int] = []
        for lam, mult in self.factors().items():
            for _ in range(mult):
                if lam == 0:
                    out.append(0)
                elif lam == self.p - 1:
                    out.extend(range(1, self.p))
                else:
                    out.extend(range(self.p))
        return sorted(out)

    def __lt__(self, other):
        return (self.kind, self.lam) < (other.kind, other.lam)

    def __repr__(self):
        return self.label()


class CompositionMultiset:
    """Formal sum of composition factors, weight -> multiplicity."""

    __slots__ = ("p", "counts")

    def __init__(self, p: int, counts: dict[int, int] | None = None):
        self.p = p
        self.counts = {lam: c for lam, c in sorted((counts or {}).items()) if c}

    @classmethod
    def from_types(cls, p: int, types) -> "CompositionMultiset":
        counts: dict[int, int] = {}
        for t in types:
            for lam, mult in t.factors().items():
                counts[lam] = counts.get(lam, 0) + mult
        return cls(p, counts)

    def total_dim(self) -> int:
        return sum(mult * IsoType.simple(lam, self.p).dim for lam, mult in self.counts.items())

    def __eq__(self, other):
        return (
            isinstance(other, CompositionMultiset)
            and other.p == self.p
            and other.counts == self.counts
        )

    def __repr__(self):
        inner = " + ".join(f"{c}[L({lam})]" for lam, c in self.counts.items())
        return inner or "0"

    def to_json(self) -> dict[str, int]:
        return {str(lam): self.counts.get(lam, 0) for lam in range(self.p)}


class WOneModule:
    """A finite-dimensional restricted module, one action matrix per basis element.

    ``acts[i]`` is the matrix of x^i d acting on column vectors.  On
    construction the bracket table and restrictedness (h^p = h, nilpotency
    of the other generators) are verified exactly.
    """

    __slots__ = ("p", "field", "dim", "acts", "provenance")

    def __init__(self, p: int, acts, provenance: str | None = None, check: bool = True):
        self.p = p
        self.field = prime_field(p)
        acts = [np.mod(np.asarray(a, dtype=np.int64), p) for a in acts]
        if len(acts) != p:
            raise ShapeError(f"expected {p} action matrices, got {len(acts)}")
        dim = acts[0].shape[0]
        for a in acts:
            if a.shape != (dim, dim):
                raise ShapeError("action matrices must be square and equally sized")
        self.dim = dim
        self.acts = acts
        self.provenance = provenance
        if check and dim:
            self._validate()

    def _validate(self):
        p = self.p
        for i in range(p):
            for j in range(p):
                got = (matmul_mod(self.acts[i], self.acts[j], p)
                       - matmul_mod(self.acts[j], self.acts[i], p)) % p
                k = i + j - 1
                if 0 <= k <= p - 1:
                    want = (((j - i) % p) * self.acts[k]) % p
                else:
                    want = np.zeros_like(got)
                assert np.array_equal(got, want), f"bracket table broken at ({i}, {j})"
        h = self.acts[1]
        assert np.array_equal(_mat_pow(h, p, p), h), "h is not restricted (h^p != h)"
        for i in range(p):
            if i == 1:
                continue
            assert not _mat_pow(self.acts[i], p, p).any(), f"generator {i} is not p-nilpotent"

    def E(self, a: int) -> np.ndarray:
        """Action matrix by graded degree a in -1..p-2."""
        if not -1 <= a <= self.p - 2:
            raise ArgumentError(f"graded degree {a} out of range")
        return self.acts[a + 1]

    @property
    def h(self) -> np.ndarray:
        return self.acts[1]

    def h_spectrum(self) -> dict[int, int]:
        """Eigenvalue -> multiplicity of the weight operator (it is diagonalisable)."""
        out = {}
        total = 0
        for lam in range(self.p):
            d = _kernel_rows(self.h - lam * np.eye(self.dim, dtype=np.int64), self.p).shape[0]
            if d:
                out[lam] = d
                total += d
        assert total == self.dim, "weight operator failed to diagonalise"
        return out

    def restrict(self, sub: Subspace) -> "WOneModule":
        """The module structure on an invariant subspace, in its basis."""
        mats = []
        for i in range(self.p):
            mapped = matmul_mod(sub.basis, self.acts[i].T, self.p)
            coeffs = mapped[:, sub.pivots] if sub.dim else mapped[:, :0]
            resid = (mapped - matmul_mod(coeffs, sub.basis, self.p)) % self.p
            if resid.any():
                row = int(np.nonzero(resid.any(axis=1))[0][0])
                raise NotInvariant(i, row)
            mats.append(coeffs.T)
        return WOneModule(self.p, mats, provenance=self.provenance)

    def section(self, inner: Subspace, outer: Subspace) -> "WOneModule":
        """The module structure on outer/inner (both assumed invariant)."""
        comp = Subspace.from_rows(self.field, self.dim, inner.reduce(outer.basis))
        mats = []
        for i in range(self.p):
            mapped = inner.reduce(matmul_mod(comp.basis, self.acts[i].T, self.p))
            coeffs = mapped[:, comp.pivots] if comp.dim else mapped[:, :0]
            resid = (mapped - matmul_mod(coeffs, comp.basis, self.p)) % self.p
            if resid.any():
                raise NotInvariant(i, int(np.nonzero(resid.any(axis=1))[0][0]))
            mats.append(coeffs.T)
        return WOneModule(self.p, mats, provenance=self.provenance)


def _mat_pow(a: np.ndarray, k: int, p: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    base = a % p
    while k:
        if k & 1:
            out = matmul_mod(out, base, p)
        base = matmul_mod(base, base, p)
        k >>= 1
    return out


def _kernel_rows(a: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {v : a v = 0}, in reduced echelon form."""
    red, piv = rref_array(a, p)
    cols = a.shape[1]
    pivset = set(piv)
    free = [j for j in range(cols) if j not in pivset]
    if not free:
        return np.zeros((0, cols), dtype=np.int64)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for r, c in enumerate(piv):
            basis[k, c] = (-int(red[r, j])) % p
    reduced, piv2 = rref_array(basis, p)
    return reduced[: len(piv2)]


# ---------------------------------------------------------------------------
# reference constructions
# ---------------------------------------------------------------------------

def baby_verma(lam: int, p: int) -> WOneModule:
    """The p-dimensional module induced from the weight-lam line.

    Basis m_0..m_{p-1} with d.m_k = m_{k+1}; the higher generators act by
    the commutation recursion e_i.m_{k+1} = d.(e_i.m_k) - i e_{i-1}.m_k
    with e_1.m_0 = lam m_0 and e_i.m_0 = 0 for i >= 2.
    """
    prime_field(p)
    if not 0 <= lam <= p - 1:
        raise ArgumentError(f"weight {lam} out of range 0..{p - 1}")
    acts = [np.zeros((p, p), dtype=np.int64) for _ in range(p)]
    for k in range(p - 1):
        acts[0][k + 1, k] = 1

    def shift_down(col):
        out = np.zeros(p, dtype=np.int64)
        out[1:] = col[:-1]
        return out

    for i in range(1, p):
        acts[i][0, 0] = lam if i == 1 else 0
        for k in range(p - 1):
            acts[i][:, k + 1] = (shift_down(acts[i][:, k]) - i * acts[i - 1][:, k]) % p
    return WOneModule(p, acts, provenance=f"V({lam})")


def natural_module(p: int) -> WOneModule:
    """The truncated polynomial line A(1) with x^i d acting as k x^{k+i-1}."""
    acts = [np.zeros((p, p), dtype=np.int64) for _ in range(p)]
    for i in range(p):
        for k in range(p):
            t = k + i - 1
            if k and 0 <= t <= p - 1:
                acts[i][t, k] = k
    return WOneModule(p, acts, provenance="A(1)")


def simple(lam: int, p: int) -> WOneModule:
    """The simple restricted module of highest weight lam."""
    prime_field(p)
    if not 0 <= lam <= p - 1:
        raise ArgumentError(f"weight {lam} out of range 0..{p - 1}")
    if lam == 0:
        return WOneModule(p, [np.zeros((1, 1), dtype=np.int64) for _ in range(p)],
                          provenance="L(0)")
    if lam == p - 1:
        # quotient of the natural module by the constants: basis x^1..x^{p-1}
        acts = [np.zeros((p - 1, p - 1), dtype=np.int64) for _ in range(p)]
        for i in range(p):
            for k in range(1, p):
                t = k + i - 1
                if 1 <= t <= p - 1:
                    acts[i][t - 1, k - 1] = k
        return WOneModule(p, acts, provenance="L(p-1)")
    return WOneModule(p, baby_verma(lam, p).acts, provenance=f"L({lam})")


def reference_module(iso: IsoType) -> WOneModule:
    return baby_verma(iso.lam, iso.p) if iso.kind == "V" else simple(iso.lam, iso.p)


# ---------------------------------------------------------------------------
# modules carved out of a Cartan-type algebra
# ---------------------------------------------------------------------------

def submodule_action(alg: CartanAlgebra, emb: Embedding, span: Subspace,
                     label: str | None = None) -> WOneModule:
    """Matrices of the embedded generators on an invariant subspace.

    The subspace lives in the algebra's ambient coordinates; failure to be
    invariant raises with the offending generator and basis row.
    """
    if emb.family != alg.family or emb.n != alg.n or emb.p != alg.p:
        raise ShapeError("embedding does not match the algebra")
    if span.ambient_dim != alg.ambient_dim:
        raise ShapeError("subspace lives in the wrong coordinate space")
    tables = alg.theta_tables()
    mats = []
    for i in range(alg.p):
        mapped = apply_action(tables[i], span.basis, alg.p)
        coeffs = mapped[:, span.pivots] if span.dim else mapped[:, :0]
        resid = (mapped - matmul_mod(coeffs, span.basis, alg.p)) % alg.p
        if resid.any():
            row = int(np.nonzero(resid.any(axis=1))[0][0])
            raise NotInvariant(i, row)
        mats.append(coeffs.T)
    name = label or f"{alg.family}({alg.n})|p={alg.p}"
    return WOneModule(alg.p, mats, provenance=name)


def whole_algebra_module(alg: CartanAlgebra, emb: Embedding) -> WOneModule:
    return submodule_action(alg, emb, alg.span, label=f"{alg.family}({alg.n}) adjoint")


# ---------------------------------------------------------------------------
# maximal vectors, spinning, classification
# ---------------------------------------------------------------------------

def maximal_vectors(m: WOneModule) -> list[tuple[int, np.ndarray]]:
    """Weight vectors killed by every positive-degree generator.

    Returns (weight, basis rows of the solution space) for each weight with
    solutions, weights ascending.
    """
    p = m.p
    if m.dim == 0:
        return []
    stacked = np.vstack([m.acts[i] for i in range(2, p)]) if p > 2 else \
        np.zeros((0, m.dim), dtype=np.int64)
    ann = _kernel_rows(stacked, p)
    if ann.shape[0] == 0:
        return []
    sub = Subspace(m.field, m.dim, ann)
    mapped = matmul_mod(sub.basis, m.h.T, p)
    coeffs = mapped[:, sub.pivots]
    assert not ((mapped - matmul_mod(coeffs, sub.basis, p)) % p).any(), \
        "annihilator space is not h-stable"
    restricted = coeffs  # row-convention matrix of h on the annihilator space
    out = []
    for lam in range(p):
        vecs = _kernel_rows((restricted - lam * np.eye(sub.dim, dtype=np.int64)).T, p)
        if vecs.shape[0]:
            rows, piv = rref_array(matmul_mod(vecs, sub.basis, p), p)
            out.append((lam, rows[: len(piv)]))
    return out


def spin(m: WOneModule, v: np.ndarray) -> Subspace:
    """Smallest subspace containing v and closed under all action matrices."""
    v = np.mod(np.asarray(v, dtype=np.int64), m.p).reshape(-1)
    if v.shape[0] != m.dim:
        raise ShapeError("vector has the wrong length")
    if not v.any():
        return Subspace.zero(m.field, m.dim)
    cur = Subspace.from_rows(m.field, m.dim, v.reshape(1, -1))
    while True:
        new_rows = []
        for a in m.acts:
            mapped = matmul_mod(cur.basis, a.T, m.p)
            resid = cur.reduce(mapped)
            if resid.any():
                new_rows.append(resid[resid.any(axis=1)])
        if not new_rows:
            return cur
        cur = Subspace.from_rows(
            m.field, m.dim, np.vstack([cur.basis] + new_rows)
        )


def classify_block(m: WOneModule) -> IsoType:
    """Identify a block of shape 1, p-1 or p via a generating maximal vector.

    A module generated by a maximal vector of weight lam is a quotient of
    V(lam), so the dimension pins the type.
    """
    p = m.p
    if m.dim not in (1, p - 1, p):
        raise Unclassifiable(f"dimension {m.dim} outside the block catalogue")
    gen_weight = None
    for lam, rows in maximal_vectors(m):
        for v in rows:
            if spin(m, v).dim == m.dim:
                gen_weight = lam
                break
        if gen_weight is not None:
            break
    if gen_weight is None:
        raise Unclassifiable("no maximal vector generates the module")
    if m.dim == p:
        return IsoType.verma(gen_weight, p)
    if m.dim == p - 1:
        if gen_weight != p - 1:
            raise Unclassifiable(f"(p-1)-dimensional block of weight {gen_weight}")
        return IsoType.simple(p - 1, p)
    if gen_weight != 0:
        raise Unclassifiable(f"one-dimensional block of weight {gen_weight}")
    return IsoType.simple(0, p)


def iso_intertwiner(a: WOneModule, b: WOneModule) -> np.ndarray | None:
    """An invertible T with T E_i^a = E_i^b T for all i, or None.

    Solves the full linear system; invertibility is searched over the
    solution space (its dimension is tiny for the modules at hand).
    """
    if a.p != b.p:
        raise ModulusMismatch("modules over different primes")
    p = a.p
    if a.dim != b.dim:
        return None
    d = a.dim
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)
    blocks = []
    for i in range(p):
        blocks.append((np.kron(eye, a.acts[i].T) - np.kron(b.acts[i], eye)) % p)
    sols = _kernel_rows(np.vstack(blocks), p)
    if sols.shape[0] == 0:
        return None
    k = sols.shape[0]
    if p**k <= 4096:
        coeff_sets = np.stack(
            np.meshgrid(*[np.arange(p)] * k, indexing="ij"), axis=-1
        ).reshape(-1, k)
    else:
        coeff_sets = np.vstack([np.eye(k, dtype=np.int64),
                                np.ones((1, k), dtype=np.int64)])
    for cs in coeff_sets:
        if not cs.any():
            continue
        mat = ((cs @ sols) % p).reshape(d, d)
        _, piv = rref_array(mat, p)
        if len(piv) == d:
            return mat
    return None


# ---------------------------------------------------------------------------
# decomposition and composition series
# ---------------------------------------------------------------------------

def decompose(m: WOneModule) -> list[tuple[Subspace, IsoType]]:
    """Greedy peel into blocks from the catalogue.

    Candidates are the maximal vectors; those with the largest spin are
    taken first so that a block is never shadowed by the interior maximal
    vector of a Verma block.  The blocks are pairwise independent by
    construction and must exhaust the module.
    """
    if m.dim == 0:
        return []
    base = []
    for lam, rows in maximal_vectors(m):
        for idx, v in enumerate(rows):
            base.append((lam, idx, v))
    candidates = []
    for lam, idx, v in base:
        s = spin(m, v)
        candidates.append((-s.dim, lam, idx, v, s))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))

    chosen = Subspace.zero(m.field, m.dim)
    blocks: list[tuple[Subspace, IsoType]] = []

    def try_take(v, s):
        nonlocal chosen
        if s.dim == 0 or chosen.add(s).dim != chosen.dim + s.dim:
            return False
        try:
            iso = classify_block(m.restrict(s))
        except Unclassifiable:
            return False
        blocks.append((s, iso))
        chosen = chosen.add(s)
        return True

    for _, lam, idx, v, s in candidates:
        if chosen.dim == m.dim:
            break
        try_take(v, s)

    if chosen.dim != m.dim:
        # second chance: combinations of two candidates of the same weight
        by_weight: dict[int, list[np.ndarray]] = {}
        for _, lam, idx, v, s in candidates:
            by_weight.setdefault(lam, []).append(v)
        for lam in sorted(by_weight):
            vs = by_weight[lam]
            for i in range(len(vs)):
                for j in range(i + 1, len(vs)):
                    for c in range(1, m.p):
                        v = (vs[i] + c * vs[j]) % m.p
                        try_take(v, spin(m, v))
                        if chosen.dim == m.dim:
                            return blocks
    if chosen.dim != m.dim:
        raise DecompositionStuck(
            f"peeled {chosen.dim} of {m.dim} dimensions before running out of candidates"
        )
    return blocks


def submodule_lattice(m: WOneModule) -> list[Subspace]:
    """All submodules, as the join closure of the cyclic ones.

    Every submodule is a sum of spans of single vectors, so spinning each
    projective point and closing under sums yields the whole lattice.
    Enumeration is capped at p <= 7.
    """
    if m.p > 7:
        raise ArgumentError("lattice enumeration is capped at p <= 7")
    found: dict[bytes, Subspace] = {}
    zero = Subspace.zero(m.field, m.dim)
    found[zero.basis.tobytes()] = zero
    for v in _projective_points(m.dim, m.p):
        s = spin(m, v)
        found.setdefault(s.basis.tobytes(), s)
    while True:
        items = list(found.values())
        added = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                s = items[i].add(items[j])
                key = s.basis.tobytes()
                if key not in found:
                    found[key] = s
                    added = True
        if not added:
            return sorted(found.values(), key=lambda s: (s.dim, s.basis.tobytes()))


def _projective_points(dim: int, p: int):
    """One representative per line of GF(p)^dim (leading coordinate 1)."""
    from itertools import product

    for lead in range(dim):
        for rest in product(range(p), repeat=dim - lead - 1):
            v = np.zeros(dim, dtype=np.int64)
            v[lead] = 1
            v[lead + 1:] = rest
            yield v


def oracle_multiset(m: WOneModule) -> CompositionMultiset:
    """Composition factors from the full submodule lattice (dim <= p only)."""
    if m.dim > m.p:
        raise ArgumentError("the lattice oracle is limited to dimension <= p")
    lattice = submodule_lattice(m)
    current = lattice[0]
    factors = []
    while current.dim < m.dim:
        cover = min(
            (s for s in lattice if s.dim > current.dim and s.contains(current)),
            key=lambda s: (s.dim, s.basis.tobytes()),
        )
        piece = m.section(current, cover)
        iso = classify_block(piece)
        assert iso.is_simple, "lattice cover produced a non-simple section"
        factors.append(iso)
        current = cover
    return CompositionMultiset.from_types(m.p, factors)


def composition_multiset(m: WOneModule) -> CompositionMultiset:
    """Composition factors via block decomposition, oracle-checked when small."""
    blocks = decompose(m)
    fast = CompositionMultiset.from_types(m.p, [iso for _, iso in blocks])
    if 0 < m.dim <= m.p:
        slow = oracle_multiset(m)
        if slow != fast:
            raise OracleMismatch(
                f"lattice oracle found {slow}, block decomposition found {fast}"
            )
    return fast
