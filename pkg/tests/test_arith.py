import random

import pytest
from hypothesis import given, strategies as st

from bnquintic.arith import PrimeField, field_new, is_prime, legendre, primes_in_range

SMALL_PRIMES = primes_in_range(2, 100)


def test_field_new_5_inverse_table():
    f = field_new(5)
    assert list(f.inv_table[1:]) == [1, 3, 2, 4]


def test_field_new_13_inverse_of_7():
    assert field_new(13).inv(7) == 2


@pytest.mark.parametrize("n", [0, 1, 4, 6, 9, 91])
def test_rejects_non_primes(n):
    with pytest.raises(ValueError, match="not prime"):
        field_new(n)


def test_rejects_huge_modulus():
    with pytest.raises(ValueError):
        field_new(1048583)  # prime just above 2**20


def test_tables_are_immutable():
    f = field_new(7)
    with pytest.raises(ValueError):
        f.chi_table[1] = 5
    with pytest.raises(AttributeError):
        f.p = 11


def test_legendre_examples():
    assert legendre(field_new(13), 1) == 1
    assert legendre(field_new(13), 12) == 1
    assert legendre(field_new(7), 6) == -1
    assert legendre(field_new(5), 0) == 0
    with pytest.raises(ValueError):
        legendre(field_new(5), 5)


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_tables_against_brute_force(p):
    f = PrimeField(p)
    squares = {b * b % p for b in range(1, p)}
    for a in range(1, p):
        assert a * int(f.inv_table[a]) % p == 1
        assert f.inv(f.inv(a)) == a
        assert (legendre(f, a) == 1) == (a in squares)
        assert legendre(f, a) % p == pow(a, (p - 1) // 2, p)
        if a in squares:
            assert f.sqrt(a) ** 2 % p == a
        else:
            assert f.sqrt(a) is None
    assert f.chi_table[0] == 0
    if p > 2:
        assert int((f.chi_table == 1).sum()) == (p - 1) // 2


@pytest.mark.parametrize("p", [5, 13, 97, 8191])
def test_legendre_multiplicative(p):
    f = PrimeField(p)
    rng = random.Random(p)
    for _ in range(1000):
        a, b = rng.randrange(1, p), rng.randrange(1, p)
        assert legendre(f, a * b % p) == legendre(f, a) * legendre(f, b)


@given(st.integers(min_value=-50, max_value=2000))
def test_is_prime_matches_trial_division(n):
    expected = n >= 2 and all(n % d for d in range(2, n))
    assert is_prime(n) == expected
