"""Constructions of the four families and the Witt-algebra embeddings."""

import random
from itertools import product

import numpy as np
import pytest

from cartanwitt.cartan import (
    CartanAlgebra,
    Embedding,
    _contact_monomial_bracket,
    algebra,
    apply_action,
    check_embedding,
    contact_bracket,
    d_H,
    d_ij,
    d_K,
    deriv_w_vec,
    embedding,
    poisson_bracket,
    recover_H_poly,
    recover_K_poly,
    s_basis_parts,
    theta,
    verify_embedding_images,
)
from cartanwitt.errors import ArgumentError, NotInContactImage, UnsupportedPrime
from cartanwitt.linalg import Subspace, prime_field
from cartanwitt.truncpoly import Poly, all_multi_indices, tau
from cartanwitt.witt import Deriv


def rand_poly(rng, n, p, terms=3):
    return Poly(n, p, {
        tuple(rng.randrange(p) for _ in range(n)): rng.randrange(p) for _ in range(terms)
    })


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def test_d_ij_instances():
    p = 5
    got = d_ij(1, 2, Poly.monomial((2, 1), p))
    want = Deriv.from_terms(2, p, [(1, (2, 0), 1), (2, (1, 1), -2)])
    assert got == want
    assert d_ij(1, 2, Poly.variable(1, 2, p)) == Deriv.monomial_term(2, (0, 0), p, -1)
    assert d_ij(1, 2, Poly.one(2, p)).is_zero()


def test_d_ij_argument_errors():
    with pytest.raises(ArgumentError):
        d_ij(2, 2, Poly.one(2, 5))
    with pytest.raises(ArgumentError):
        d_ij(2, 1, Poly.one(2, 5))


def test_d_ij_divergence_free():
    rng = random.Random(71)
    for _ in range(10):
        f = rand_poly(rng, 3, 5)
        for (i, j) in ((1, 2), (1, 3), (2, 3)):
            assert d_ij(i, j, f).divergence().is_zero()


def test_d_H_examples():
    p = 5
    got = d_H(Poly.monomial((1, 1), p))
    assert got == Deriv.from_terms(2, p, [(1, (1, 0), -1), (2, (0, 1), 1)])
    assert d_H(Poly.monomial((2, 0), p)) == Deriv.monomial_term(2, (1, 0), p, 2)
    assert d_H(Poly.one(2, p)).is_zero()
    with pytest.raises(ArgumentError):
        d_H(Poly.one(3, p))


def test_d_H_kills_divergence():
    rng = random.Random(73)
    for n in (2, 4):
        for _ in range(8):
            f = rand_poly(rng, n, 5)
            assert d_H(f).divergence().is_zero()


def test_d_K_examples():
    p = 5
    assert d_K(Poly.one(3, p)) == Deriv.monomial_term(3, (0, 0, 0), p, 2)
    got = d_K(Poly.variable(3, 3, p))
    want = Deriv.from_terms(3, p, [(1, (1, 0, 0), 1), (2, (0, 1, 0), 1), (3, (0, 0, 1), 2)])
    assert got == want
    got = d_K(Poly.variable(1, 3, p))
    assert got == Deriv.from_terms(3, p, [(2, (0, 0, 0), 1), (3, (1, 0, 0), 1)])
    with pytest.raises(ArgumentError):
        d_K(Poly.one(2, p))


def test_recover_K_poly():
    p = 5
    for exps in [(0, 0, 0), (1, 1, 0), (0, 0, 2), (4, 4, 4)]:
        f = Poly.monomial(exps, p)
        assert recover_K_poly(d_K(f)) == f
    assert recover_K_poly(Deriv.monomial_term(3, (0, 0, 0), p, 2)) == Poly.one(3, p)
    with pytest.raises(NotInContactImage):
        recover_K_poly(Deriv.monomial_term(1, (0, 0, 0), p))


def test_recover_K_poly_all_monomials():
    p = 3
    for a in all_multi_indices(3, p):
        f = Poly.monomial(a, p)
        assert recover_K_poly(d_K(f)) == f


def test_recover_H_poly():
    p = 5
    rng = random.Random(79)
    for _ in range(10):
        f = rand_poly(rng, 2, p)
        f = f - Poly(2, p, {(0, 0): f.coeff((0, 0))})  # defined up to constants
        assert recover_H_poly(d_H(f)) == f
    with pytest.raises(NotInContactImage):
        recover_H_poly(Deriv.monomial_term(1, (1, 0), p))


def test_contact_bracket_examples():
    p = 5
    one = Poly.one(3, p)
    x3 = Poly.variable(3, 3, p)
    x1 = Poly.variable(1, 3, p)
    assert contact_bracket(one, x3) == Poly.one(3, p, ).scale(2)
    f = rand_poly(random.Random(83), 3, p)
    assert contact_bracket(f, f).is_zero()
    # the weight formula forces <x3, x1> = -x1
    assert contact_bracket(x3, x1) == x1.scale(-1)


def test_contact_bracket_consistency():
    rng = random.Random(89)
    p = 5
    for _ in range(10):
        f, g = rand_poly(rng, 3, p), rand_poly(rng, 3, p)
        assert d_K(contact_bracket(f, g)) == d_K(f).bracket(d_K(g))


def test_contact_monomial_closed_form_exhaustive():
    # the vectorised sweep and the generic bracket must agree everywhere
    for p in (3, 5):
        monos = all_multi_indices(3, p)
        for a, b in product(monos, repeat=2):
            via_ops = contact_bracket(Poly.monomial(a, p), Poly.monomial(b, p))
            assert _contact_monomial_bracket(a, b, p) == via_ops


def test_contact_monomial_closed_form_sampled_r2():
    rng = random.Random(97)
    p = 3
    monos = all_multi_indices(5, p)
    for _ in range(60):
        a, b = rng.choice(monos), rng.choice(monos)
        via_ops = contact_bracket(Poly.monomial(a, p), Poly.monomial(b, p))
        assert _contact_monomial_bracket(a, b, p) == via_ops


def test_poisson_bracket_pulls_back():
    rng = random.Random(101)
    for n in (2, 4):
        for _ in range(10):
            f, g = rand_poly(rng, n, 5), rand_poly(rng, n, 5)
            assert d_H(poisson_bracket(f, g)) == d_H(f).bracket(d_H(g))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def test_dimensions():
    assert algebra("W", 1, 5).dim == 5
    assert algebra("W", 2, 5).dim == 50
    assert algebra("W", 3, 5).dim == 375
    assert algebra("S", 2, 5).dim == 24
    assert algebra("H", 2, 5).dim == 23
    assert algebra("H", 2, 3).dim == 7
    assert algebra("K", 3, 5).dim == 125
    assert algebra("K", 3, 3).dim == 26


def test_unsupported_prime():
    with pytest.raises(UnsupportedPrime):
        algebra("W", 2, 2)
    with pytest.raises(UnsupportedPrime):
        algebra("K", 3, 33)


def test_s_basis_counts():
    p = 5
    part1, part2 = s_basis_parts(2, p)
    assert len(part1) == 8 and len(part2) == 16
    part1, part2 = s_basis_parts(3, p)
    assert len(part1) == 3 * (25 - 1)
    assert len(part2) == 16 * 11


def test_s_basis_divergence_free():
    for d in algebra("S", 2, 5).basis:
        assert d.divergence().is_zero()


def test_h_excluded_top_monomial():
    # the image of the top monomial is nonzero but lies outside the algebra
    p = 3
    alg = algebra("H", 2, p)
    d = d_H(Poly.monomial(tau(2, p), p))
    assert not d.is_zero()
    assert not alg.contains(d)
    v = deriv_w_vec(d)
    rows = np.vstack([np.stack([deriv_w_vec(b) for b in alg.basis]), v.reshape(1, -1)])
    assert Subspace.from_rows(alg.field, rows.shape[1], rows).dim == alg.dim + 1


def test_k_exceptional_top_monomial():
    p = 3
    alg = algebra("K", 3, p)  # 2r+4 = 6 is divisible by 3
    assert alg.dim == 26
    top = Poly.monomial(tau(3, p), p)
    assert not alg.contains(d_K(top))
    assert algebra("K", 3, 5).contains(d_K(Poly.monomial(tau(3, 5), 5)))


def test_bracket_closure_small_algebras():
    for fam, n, p in [("W", 2, 3), ("S", 2, 5), ("H", 2, 5), ("K", 3, 3)]:
        alg = algebra(fam, n, p)
        for i, a in enumerate(alg.basis):
            for b in alg.basis[i + 1:]:
                assert alg.contains(a.bracket(b)), (fam, n, p)


def test_p_power_closure_small_algebras():
    for fam, n, p in [("W", 2, 3), ("S", 2, 5), ("H", 2, 5), ("K", 3, 5)]:
        alg = algebra(fam, n, p)
        for b in alg.basis:
            assert alg.contains(b.p_power()), (fam, n, p)


def test_k_graded_bracket_compatibility():
    # homogeneous pieces multiply into the right graded piece
    from cartanwitt.truncpoly import contact_degree

    p = 5
    monos = all_multi_indices(3, p)
    for a in monos[:30]:
        for b in monos[::7]:
            br = contact_bracket(Poly.monomial(a, p), Poly.monomial(b, p))
            deg = contact_degree(a, p) + contact_degree(b, p)
            for c in br.terms:
                assert contact_degree(c, p) == deg


def test_coords_roundtrip():
    for fam, n, p in [("W", 2, 3), ("S", 2, 3), ("H", 2, 3), ("K", 3, 3)]:
        alg = algebra(fam, n, p)
        rng = random.Random(fam.encode()[0])
        coeffs = [rng.randrange(p) for _ in range(alg.dim)]
        elem = Deriv.zero(n, p)
        for c, b in zip(coeffs, alg.basis):
            if c:
                elem = elem + b.scale(c)
        got = alg.coords(elem)
        assert got.tolist() == [c % p for c in coeffs]


def test_action_tables_match_generic_brackets():
    # sparse tables against actual derivation brackets, on random basis vectors
    rng = random.Random(107)
    for fam, n, p in [("W", 2, 5), ("S", 2, 5), ("H", 2, 5), ("K", 3, 5), ("H", 4, 3), ("K", 5, 3)]:
        alg = algebra(fam, n, p)
        tables = alg.theta_tables()
        for _ in range(6):
            b = rng.choice(alg.basis)
            vec = alg.deriv_to_vec(b).reshape(1, -1)
            for i in (0, 1, rng.randrange(p)):
                got = apply_action(tables[i], vec, p)[0]
                want = alg.deriv_to_vec(theta(fam, n, p, i).bracket(b))
                assert np.array_equal(got, want), (fam, n, p, i)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

def test_theta_values():
    p = 5
    assert theta("S", 2, p, 1) == Deriv.from_terms(2, p, [(1, (1, 0), 1), (2, (0, 1), -1)])
    assert theta("H", 2, p, 0) == Deriv.monomial_term(1, (0, 0), p)
    assert theta("K", 3, p, 0) == Deriv.monomial_term(3, (0, 0, 0), p)
    # the short display form of the contact embedding
    r, i = 1, 3
    inv2 = prime_field(p).inv(2)
    want = Deriv.from_terms(3, p, [
        (1, (1, 0, i - 1), (i * inv2) % p),
        (2, (0, 1, i - 1), (i * inv2) % p),
        (3, (0, 0, i), 1),
    ])
    assert theta("K", 3, p, i) == want


def test_embeddings_pass_all_checks():
    for fam, n, p in [("W", 2, 5), ("W", 3, 5), ("S", 2, 5), ("S", 3, 5),
                      ("H", 2, 5), ("H", 4, 5), ("K", 3, 5), ("K", 3, 3)]:
        rep = check_embedding(fam, n, p)
        bad = [name for name, ok, _ in rep["checks"] if not ok]
        assert rep["ok"], (fam, n, p, bad)


def test_embedding_bracket_relation():
    # Theta([e_a, e_b]) = (b-a) Theta(e_{a+b-1}) for all pairs
    p = 5
    for fam, n in [("S", 2), ("K", 3)]:
        th = [theta(fam, n, p, i) for i in range(p)]
        for a in range(p):
            for b in range(p):
                got = th[a].bracket(th[b])
                k = a + b - 1
                want = th[k].scale(b - a) if 0 <= k <= p - 1 else Deriv.zero(n, p)
                assert got == want


def test_perturbed_embedding_fails_bracket_check():
    p = 5
    alg = algebra("S", 2, p)
    images = [theta("S", 2, p, i) for i in range(p)]
    images[1], images[2] = images[2], images[1]
    entries = verify_embedding_images(alg, images)
    failed = [name for name, ok, _ in entries if not ok]
    assert any(name.startswith("bracket") for name in failed)


def test_embedding_object():
    emb = embedding("H", 2, 5)
    assert isinstance(emb, Embedding) and len(emb.images) == 5
    assert emb.images[0] == theta("H", 2, 5, 0)


def test_algebra_json_shape():
    alg = algebra("H", 2, 3)
    doc = alg.to_json()
    assert doc["family"] == "H" and doc["dim"] == 7
    assert len(doc["basis"]) == 7
    assert all(isinstance(t, tuple) or len(t) == 3 for row in doc["basis"] for t in row)
