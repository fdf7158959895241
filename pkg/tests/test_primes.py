import pytest
import sympy
from hypothesis import given, strategies as st

from ternarycc.primes import (
    is_group_type,
    is_primitive_root,
    lemma41_witness,
    lemma42_check,
    log_table,
    multiplicative_order,
    one_minus,
    prime_factors,
    primes_up_to,
    primitive_roots,
    quadratic_class,
    radical_mod_p,
)

odd_primes = st.sampled_from([p for p in primes_up_to(200) if p > 2])


def brute_radical(p, X):
    return frozenset(y for y in range(1, p) if frozenset(y * x % p for x in X) == frozenset(X))


def test_primes_match_sympy():
    assert primes_up_to(2000) == list(sympy.primerange(2, 2001))


@given(st.integers(2, 10**6))
def test_prime_factors(n):
    assert prime_factors(n) == sorted(sympy.factorint(n))


@given(odd_primes)
def test_primitive_roots_match_sympy(p):
    roots = primitive_roots(p)
    assert roots[0] == sympy.primitive_root(p)
    assert len(roots) == sympy.totient(p - 1)
    assert all(sympy.n_order(g, p) == p - 1 for g in roots)


@given(odd_primes, st.data())
def test_multiplicative_order(p, data):
    x = data.draw(st.integers(1, p - 1))
    assert multiplicative_order(x, p) == sympy.n_order(x, p)


@pytest.mark.parametrize("p, r, square", [(7, 7, True), (17, 1, True), (5, 5, False), (11, 3, False), (13, 5, False)])
def test_quadratic_class(p, r, square):
    q = quadratic_class(p)
    assert (q.residue_mod8, q.two_is_square) == (r, square)
    assert q.two_is_square == sympy.is_quad_residue(2, p)


def test_quadratic_class_rejects():
    with pytest.raises(ValueError):
        quadratic_class(9)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 9973])
def test_lemma41_witness(p):
    x = lemma41_witness(p)
    assert x is not None
    assert is_primitive_root(x, p) and is_primitive_root(1 - x, p)


@given(odd_primes, st.data())
def test_radical_matches_brute_force(p, data):
    X = data.draw(st.sets(st.integers(1, p - 1), min_size=1))
    assert radical_mod_p(p, X) == brute_radical(p, X)


@given(odd_primes, st.data())
def test_group_type_matches_brute_force(p, data):
    X = data.draw(st.sets(st.integers(2, p - 1), min_size=1))
    H = X | {1}
    closed = all(a * b % p in H for a in H for b in H)
    assert is_group_type(p, X) == closed


def test_group_type_examples():
    assert is_group_type(7, {2, 4})
    assert is_group_type(7, {6})
    assert not is_group_type(7, {2, 3})
    with pytest.raises(ValueError):
        is_group_type(7, {1, 2})


def test_log_table_roundtrip():
    t = log_table(13)
    X = frozenset({2, 5, 11})
    assert t.from_mask(t.to_mask(X)) == X
    assert t.from_mask(t.subgroup_mask(3)) == frozenset({1, 3, 9})


def test_one_minus():
    assert one_minus(7, {2, 4}) == frozenset({6, 4})


@given(st.sampled_from([p for p in primes_up_to(61) if p >= 5]), st.data())
def test_lemma42_no_violation(p, data):
    X = data.draw(st.sets(st.integers(2, p - 1), min_size=1))
    rec = lemma42_check(p, X)
    assert rec.ok, rec.violations
    assert rec.radical_X == brute_radical(p, X)


def test_lemma42_rejects_one():
    with pytest.raises(ValueError):
        lemma42_check(7, {1, 3})
