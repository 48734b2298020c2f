import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zigzag.errors import LevelUnavailable, ParseError, ZeroInverse, ZeroLambda
from zigzag.repclasses import (
    Fp2Element,
    Irreducible,
    det_exponent,
    equals,
    fp2,
    make_irreducible,
    make_reducible,
    nonresidue,
    parse_rep,
    solve_selfdual,
)

PRIMES = (5, 7, 11, 13)


def all_fp2(p):
    return [Fp2Element(p, a, b) for a in range(p) for b in range(p)]


def test_inverse_examples():
    assert fp2("inv", Fp2Element(5, 4)) == Fp2Element(5, 4)
    assert fp2("inv", Fp2Element(7, 4)) == Fp2Element(7, 2)
    with pytest.raises(ZeroInverse):
        fp2("inv", Fp2Element(7, 0))


@pytest.mark.parametrize("p", (5, 7))
def test_field_axioms_brute_force(p):
    elems = all_fp2(p)
    one = Fp2Element(p, 1)
    for x in elems:
        if not x.is_zero():
            assert x * x.inverse() == one
        # Frobenius is x -> x^p
        power = one
        for _ in range(p):
            power = power * x
        assert x.frobenius() == power
    # no zero divisors
    assert sum(1 for x, y in itertools.product(elems, repeat=2) if (x * y).is_zero()) == 2 * p * p - 1


def test_nonresidue_is_smallest():
    assert nonresidue(5) == 2
    assert nonresidue(7) == 3
    assert nonresidue(11) == 2
    assert nonresidue(13) == 2


def test_selfdual_examples():
    roots = solve_selfdual(Fp2Element(7, 0))
    brute = sorted((x for x in all_fp2(7) if x * x == Fp2Element(7, -1)), key=Fp2Element.sort_key)
    assert list(roots) == brute
    assert all(r.a == 0 for r in roots)  # purely "imaginary": -1 is a non-residue mod 7
    assert solve_selfdual(Fp2Element(5, 0)) == (Fp2Element(5, 2), Fp2Element(5, 3))
    for p in PRIMES:
        assert solve_selfdual(Fp2Element(p, 2)) == (Fp2Element(p, 1), Fp2Element(p, 1))


@given(st.sampled_from(PRIMES), st.integers(0, 12))
def test_selfdual_product_and_sum(p, s):
    s = Fp2Element(p, s % p)
    lam, mu = solve_selfdual(s)
    assert lam * mu == Fp2Element(p, 1)
    assert lam + mu == s


def test_irreducible_examples():
    assert make_irreducible(5, 2) == make_irreducible(5, 10)
    assert not make_irreducible(5, 3).reducible_as_representation
    assert make_irreducible(5, 6).reducible_as_representation
    assert make_irreducible(7, 4).det_exponent() == 4


def test_reducible_examples():
    r = make_reducible(5, 2, 1, 4)
    assert r.render() == "mu(4)*w^2 + mu(4)*w^1"
    assert make_reducible(5, 2, 1, 2) == make_reducible(5, 1, 2, 3)
    assert make_reducible(7, 3, 1, 4).render() == "mu(4)*w^3 + mu(2)*w^1"
    assert det_exponent(make_reducible(5, 2, 1)) == 3
    with pytest.raises(ZeroLambda):
        make_reducible(5, 2, 1, 0)


@given(st.sampled_from(PRIMES), st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 12), st.integers(0, 12))
def test_reducible_symmetry_and_idempotence(p, a, b, la, lb):
    lam = Fp2Element(p, la % p, lb % p)
    if lam.is_zero():
        return
    r = make_reducible(p, a, b, lam)
    assert r == make_reducible(p, b, a, lam.inverse())
    assert make_reducible(p, r.a, r.b, r.lam) == r
    assert parse_rep(r.render(), p) == r


@given(st.sampled_from(PRIMES), st.integers(-10**4, 10**4))
def test_irreducible_canonical(p, c):
    r = make_irreducible(p, c)
    assert make_irreducible(p, r.c) == r
    assert make_irreducible(p, p * c) == r
    assert parse_rep(r.render(), p) == r
    assert r.det_exponent() == c % (p - 1)


@pytest.mark.parametrize("p", PRIMES)
def test_classifier_exponents_never_reducible(p):
    for r0 in range(1, p):
        for i in range(r0 // 2 + 1):
            c = r0 + 1 + i * (p - 1)
            assert c % (p + 1) != 0
            assert make_irreducible(p, c).det_exponent() == (r0 + 1) % (p - 1)


def test_equals_examples():
    full = make_reducible(5, 2, 1, 4)
    bare = make_reducible(5, 2, 1)
    assert equals(full, bare, "inertia")
    assert not equals(full, make_reducible(5, 2, 1, 2), "full")
    for level in ("inertia", "full"):
        assert equals(make_irreducible(5, 2), make_irreducible(5, 10), level)
    with pytest.raises(LevelUnavailable):
        equals(full, bare, "full")
    assert not equals(full, make_irreducible(5, 3), "inertia")


def test_parse_rep_errors():
    with pytest.raises(ParseError):
        parse_rep("mu(4)*w^2", 5)
    with pytest.raises(ParseError):
        parse_rep("mu(4)*w^2 + w^1", 5)
    with pytest.raises(ParseError):
        parse_rep("mu(4)*w^2 + mu(2)*w^1", 5)
    assert isinstance(parse_rep("ind(w2^7)", 5), Irreducible)


def test_fp2_text():
    x = Fp2Element(7, 2, 3)
    assert str(x) == "2+3*th"
    assert Fp2Element.parse(str(x), 7) == x
