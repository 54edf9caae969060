"""Derivations of the truncated polynomial algebra."""

import random

import numpy as np
import pytest

from cartanwitt.cartan import algebra, deriv_w_vec
from cartanwitt.errors import ShapeError
from cartanwitt.linalg import matmul_mod
from cartanwitt.truncpoly import Poly, all_multi_indices
from cartanwitt.witt import Deriv, bracket, divergence, graded_parts, p_power


def rand_deriv(rng, n, p, terms=3):
    return Deriv.from_terms(n, p, [
        (rng.randrange(1, n + 1), tuple(rng.randrange(p) for _ in range(n)), rng.randrange(p))
        for _ in range(terms)
    ])


def rand_poly(rng, n, p, terms=3):
    return Poly(n, p, {
        tuple(rng.randrange(p) for _ in range(n)): rng.randrange(p) for _ in range(terms)
    })


def test_apply_examples():
    p = 5
    x1d1 = Deriv.monomial_term(1, (1,), p)
    assert x1d1.apply(Poly.monomial((2,), p)) == Poly.monomial((2,), p, 2)
    d1 = Deriv.monomial_term(1, (0, 0), p)
    assert d1.apply(Poly.variable(2, 2, p)).is_zero()
    x2d1 = Deriv.monomial_term(1, (0, 1), p)
    assert x2d1.apply(Poly.monomial((1, 1), p)) == Poly.monomial((0, 2), p)


def test_apply_is_leibniz():
    rng = random.Random(41)
    for _ in range(15):
        d = rand_deriv(rng, 2, 5)
        f, g = rand_poly(rng, 2, 5), rand_poly(rng, 2, 5)
        assert d.apply(f * g) == d.apply(f) * g + f * d.apply(g)


def test_bracket_examples():
    p = 5
    d1 = Deriv.monomial_term(1, (0,), p)
    x1d1 = Deriv.monomial_term(1, (1,), p)
    assert bracket(d1, x1d1) == d1
    sq = Deriv.monomial_term(1, (2,), p)
    assert bracket(sq, sq).is_zero()
    # bracket of two embedded images matches the image of the bracket
    a = Deriv.from_terms(2, p, [(1, (1, 0), 1), (2, (0, 1), -1)])
    b = Deriv.from_terms(2, p, [(1, (2, 0), 1), (2, (1, 1), -2)])
    assert bracket(a, b) == b


def test_bracket_matches_operator_composition():
    # closed coefficient formula against the composition oracle
    rng = random.Random(43)
    for n in (1, 2, 3):
        p = 5
        for _ in range(12):
            d, e = rand_deriv(rng, n, p), rand_deriv(rng, n, p)
            br = bracket(d, e)
            for a in all_multi_indices(n, p):
                m = Poly.monomial(a, p)
                assert br.apply(m) == d.apply(e.apply(m)) - e.apply(d.apply(m))


def test_bracket_antisymmetry_and_jacobi():
    rng = random.Random(47)
    p, n = 5, 2
    for _ in range(50):
        a, b, c = (rand_deriv(rng, n, p) for _ in range(3))
        assert bracket(a, b) == -bracket(b, a)
        total = (bracket(a, bracket(b, c)) + bracket(b, bracket(c, a))
                 + bracket(c, bracket(a, b)))
        assert total.is_zero()


def test_divergence_examples():
    p = 5
    assert divergence(Deriv.monomial_term(1, (1,), p)) == Poly.one(1, p)
    assert divergence(Deriv.monomial_term(1, (0, 1), p)).is_zero()
    d = Deriv.from_terms(2, p, [(1, (2, 0), 1), (2, (1, 1), 1)])
    assert divergence(d) == Poly.monomial((1, 0), p, 3)


def test_divergence_cocycle():
    rng = random.Random(53)
    p, n = 5, 2
    for _ in range(20):
        d, e = rand_deriv(rng, n, p), rand_deriv(rng, n, p)
        lhs = divergence(bracket(d, e))
        rhs = d.apply(divergence(e)) - e.apply(divergence(d))
        assert lhs == rhs


def test_p_power_examples():
    p = 5
    assert p_power(Deriv.monomial_term(1, (0,), p)).is_zero()
    h = Deriv.monomial_term(1, (1,), p)
    assert p_power(h) == h
    assert p_power(Deriv.monomial_term(1, (2,), p)).is_zero()


def test_p_power_result_is_a_derivation():
    rng = random.Random(59)
    for _ in range(8):
        d = rand_deriv(rng, 2, 5)
        e = p_power(d)
        f, g = rand_poly(rng, 2, 5), rand_poly(rng, 2, 5)
        assert e.apply(f * g) == e.apply(f) * g + f * e.apply(g)


def _ad_matrix(d, alg):
    cols = [deriv_w_vec(d.bracket(b)) for b in alg.basis]
    return np.stack(cols, axis=1) % alg.p


def test_ad_of_p_power_is_p_th_power_of_ad():
    # restrictedness of the full derivation algebra, every graded basis element
    p, n = 5, 2
    alg = algebra("W", n, p)
    for b in alg.basis:
        ad_b = _ad_matrix(b, alg)
        lhs = _ad_matrix(p_power(b), alg)
        rhs = np.eye(alg.dim, dtype=np.int64)
        for _ in range(p):
            rhs = matmul_mod(rhs, ad_b, p)
        assert np.array_equal(lhs, rhs)


def test_full_space_dimension():
    p = 5
    for n in (1, 2):
        assert algebra("W", n, p).dim == n * p**n


def test_graded_parts_examples():
    p = 5
    h = Deriv.monomial_term(1, (1,), p)
    assert graded_parts(h) == {0: h}
    d = Deriv.monomial_term(1, (0,), p) + Deriv.monomial_term(1, (2,), p)
    parts = graded_parts(d)
    assert sorted(parts) == [-1, 1]
    assert parts[-1] == Deriv.monomial_term(1, (0,), p)
    total = Deriv.zero(1, p)
    for v in parts.values():
        total = total + v
    assert total == d


def test_graded_parts_contact_family():
    from cartanwitt.cartan import d_K

    p = 5
    d = d_K(Poly.monomial((0, 0, 1), p))
    parts = graded_parts(d, family="K")
    assert list(parts) == [0] and parts[0] == d
    e = d_K(Poly.one(3, p) + Poly.monomial((1, 1, 1), p))
    parts = graded_parts(e, family="K")
    assert sorted(parts) == [-2, 2]
    assert parts[-2] == d_K(Poly.one(3, p))


def test_graded_bracket_degree_additivity():
    rng = random.Random(61)
    p, n = 5, 2
    monos = all_multi_indices(n, p)
    for _ in range(30):
        a, b = rng.choice(monos), rng.choice(monos)
        i, j = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
        d = Deriv.monomial_term(i, a, p)
        e = Deriv.monomial_term(j, b, p)
        br = bracket(d, e)
        if not br.is_zero():
            parts = graded_parts(br)
            assert list(parts) == [sum(a) + sum(b) - 2]


def test_serialisation_roundtrip():
    p = 5
    d = Deriv.from_terms(2, p, [(2, (1, 3), 4), (1, (0, 0), 2)])
    triples = d.to_triples()
    assert triples == [(1, [0, 0], 2), (2, [1, 3], 4)]
    assert Deriv.from_triples(2, p, triples) == d


def test_shape_errors():
    p = 5
    with pytest.raises(ShapeError):
        Deriv.monomial_term(3, (1, 0), p)
    d2 = Deriv.monomial_term(1, (1, 0), p)
    d3 = Deriv.monomial_term(1, (1, 0, 0), p)
    with pytest.raises(ShapeError):
        bracket(d2, d3)
