"""The truncated polynomial algebra and its multi-index combinatorics."""

import random
from itertools import product

import pytest

from cartanwitt.errors import ShapeError
from cartanwitt.truncpoly import (
    Poly,
    all_multi_indices,
    conj,
    contact_degree,
    ell,
    eps,
    mono_mul,
    mono_str,
    omega,
    partial,
    poly_mul,
    sigma,
    tau,
)


def rand_poly(rng, n, p, terms=4):
    return Poly(n, p, {
        tuple(rng.randrange(p) for _ in range(n)): rng.randrange(p)
        for _ in range(terms)
    })


def test_mono_mul_truncates():
    assert mono_mul((4,), (1,), 5) is None


def test_mono_mul_adds():
    assert mono_mul((1, 0), (1, 0), 5) == (2, 0)
    assert mono_mul((0, 0), (3, 4), 5) == (3, 4)


def test_mono_mul_shape_error():
    with pytest.raises(ShapeError):
        mono_mul((1, 0), (1,), 5)


def test_poly_mul_difference_of_squares():
    p = 5
    one = Poly.one(1, p)
    x = Poly.variable(1, 1, p)
    assert poly_mul(one + x, one - x) == one - x * x


def test_poly_mul_truncation():
    p = 5
    x3 = Poly.monomial((3,), p)
    x2 = Poly.monomial((2,), p)
    assert poly_mul(x3, x2).is_zero()


def test_poly_square_expansion():
    p = 5
    f = Poly.variable(1, 2, p) + Poly.variable(2, 2, p)
    sq = f * f
    assert sq == Poly(2, p, {(2, 0): 1, (1, 1): 2, (0, 2): 1})


def test_partial_examples():
    p = 5
    assert partial(1, Poly.monomial((3,), p)) == Poly.monomial((2,), p, 3)
    assert partial(2, Poly.monomial((2, 0), p)).is_zero()
    assert partial(1, Poly.monomial((4, 1), p)) == Poly.monomial((3, 1), p, 4)


def test_partial_direction_range():
    with pytest.raises(ShapeError):
        partial(3, Poly.one(2, 5))


def test_leibniz_rule():
    rng = random.Random(23)
    for n in (2, 3):
        for _ in range(15):
            f, g = rand_poly(rng, n, 5), rand_poly(rng, n, 5)
            for i in range(1, n + 1):
                assert partial(i, f * g) == partial(i, f) * g + f * partial(i, g)


def test_partials_commute_on_all_monomials():
    p, n = 5, 2
    for a in all_multi_indices(n, p):
        m = Poly.monomial(a, p)
        assert partial(1, partial(2, m)) == partial(2, partial(1, m))


def test_partial_pth_power_is_zero():
    p = 5
    for n in (1, 2, 3):
        for a in all_multi_indices(n, p):
            f = Poly.monomial(a, p)
            for i in range(1, n + 1):
                g = f
                for _ in range(p):
                    g = partial(i, g)
                assert g.is_zero()


def test_mul_commutative_associative():
    rng = random.Random(29)
    for _ in range(10):
        f, g, h = (rand_poly(rng, 2, 5) for _ in range(3))
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)


def test_no_stored_zeros():
    f = Poly(2, 5, {(1, 0): 5, (0, 1): 3})
    assert (1, 0) not in f.terms and f.terms[(0, 1)] == 3


def test_full_span_dimension():
    assert len(all_multi_indices(3, 5)) == 125
    assert all_multi_indices(2, 3)[:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]


def test_multi_index_helpers():
    p = 5
    assert tau(3, p) == (4, 4, 4)
    assert eps(2, 3) == (0, 1, 0)
    a = (4, 0, 2)
    assert omega(a, p) == (2, 3)
    assert ell(a, p) == 2
    assert ell(tau(3, p), p) == 0
    assert sigma(1, 2) == 1 and sigma(3, 2) == -1
    assert conj(1, 2) == 3 and conj(4, 2) == 2


def test_contact_degree():
    p = 5
    for r in (1, 2):
        n = 2 * r + 1
        assert contact_degree(tau(n, p), p) == n * (p - 1) + (p - 1) - 2
    assert contact_degree((0, 0, 0), p) == -2
    assert contact_degree((0, 0, 1), p) == 0


def test_mono_str():
    assert mono_str((0, 0)) == "1"
    assert mono_str((2, 0, 1)) == "x1^2*x3^1"


def test_serialisation_is_sorted():
    f = Poly(2, 5, {(1, 1): 2, (0, 2): 3, (1, 0): 1})
    assert f.to_pairs() == [([0, 2], 3), ([1, 0], 1), ([1, 1], 2)]


def test_exhaustive_truncation_against_integers():
    # multiplication agrees with integer polynomial multiplication followed
    # by dropping overflowing exponents
    p, n = 3, 2
    monos = all_multi_indices(n, p)
    for a, b in product(monos, repeat=2):
        prod_poly = Poly.monomial(a, p) * Poly.monomial(b, p)
        s = tuple(x + y for x, y in zip(a, b))
        if all(v <= p - 1 for v in s):
            assert prod_poly == Poly.monomial(s, p)
        else:
            assert prod_poly.is_zero()
