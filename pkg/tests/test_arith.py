import math
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from sqrtlab.arith import (Factorization, MAX_MODULUS, ResidueSet, factorize, gcd_sum, inv_mod,
                           mult_functions, root_count, sqrt_mod, sqrt_mod_prime_power, symmetric)
from sqrtlab.oracles import roots_scan


def test_factorize_examples():
    assert factorize(1).factors == ()
    assert factorize(12).factors == ((2, 2), (3, 1))
    assert sympy.isprime(9999999967)
    assert factorize(9999999967).factors == ((9999999967, 1),)


@pytest.mark.parametrize("n", [0, -3, MAX_MODULUS + 1])
def test_factorize_rejects(n):
    with pytest.raises(ValueError):
        factorize(n)


def test_factorization_validates():
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))
    with pytest.raises(ValueError):
        Factorization(12, ((2, 1), (3, 1)))


@pytest.mark.parametrize("n, expected", [(12, (6, 2, 0, 4, 2)), (1, (1, 0, 1, 1, 1)), (30, (8, 3, -1, 8, 1))])
def test_mult_functions(n, expected):
    assert tuple(mult_functions(n)) == expected


@given(st.integers(1, 5000))
def test_mult_functions_against_sympy(n):
    f = mult_functions(n)
    assert f.tau == sympy.divisor_count(n)
    assert f.phi == sympy.totient(n)
    assert f.mu == sympy.mobius(n)
    assert f.square_part**2 == max(d * d for d in range(1, math.isqrt(n) + 1) if n % (d * d) == 0)


def test_inv_mod():
    assert inv_mod(3, 7) == 5
    assert inv_mod(1, 1) == 0
    assert inv_mod(11, 26) == 19
    with pytest.raises(ValueError):
        inv_mod(4, 26)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_symmetric_representative(x, r):
    s = symmetric(x, r)
    assert (s - x) % r == 0
    assert -r < 2 * s <= r


def test_prime_power_examples():
    assert list(sqrt_mod_prime_power(4, 5, 1)) == [2, 3]
    assert list(sqrt_mod_prime_power(0, 3, 2)) == [0, 3, 6]
    assert list(sqrt_mod_prime_power(1, 2, 3)) == [1, 3, 5, 7]


def test_sqrt_mod_examples():
    assert list(sqrt_mod(4, 15)) == [2, 7, 8, 13]
    assert list(sqrt_mod(2, 5)) == []
    assert list(sqrt_mod(0, 1)) == [0]
    s = sqrt_mod(4, 15)
    assert isinstance(s, ResidueSet) and 7 in s and 3 not in s and len(s) == 4


def test_sqrt_mod_exhaustive_small():
    for r in range(1, 400):
        for m in range(r):
            assert list(sqrt_mod(m, r)) == roots_scan(m, r)


@given(st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 7), st.data())
def test_prime_powers_against_scan(p, k, data):
    n = p**k
    if n > 2 * 10**5:
        k = math.floor(math.log(2 * 10**5, p))
        n = p**k
    m = data.draw(st.integers(0, n - 1))
    assert list(sqrt_mod_prime_power(m, p, k)) == roots_scan(m, n)


@given(st.integers(1, 300), st.integers(1, 300), st.integers(0, 10**6))
def test_root_count_multiplicative(a, b, m):
    if math.gcd(a, b) != 1:
        return
    assert root_count(a * b, m) == root_count(a, m) * root_count(b, m)


@given(st.integers(1, 10**5), st.integers(0, 10**6))
def test_root_count_envelope(r, m):
    # s(r; m) <= 2^(omega(r) + 1) sqrt(gcd(r, m))
    s = root_count(r, m)
    assert s * s <= 4**(mult_functions(r).omega + 1) * math.gcd(r, m)


@given(st.integers(1, 3000), st.integers(1, 200))
def test_gcd_sum_bound(r, M):
    assert gcd_sum(r, 1, M) <= mult_functions(r).tau * M
    assert gcd_sum(r, 1, M) == sum(math.gcd(r, m) for m in range(1, M + 1))


@given(st.integers(2, 10**12))
def test_large_modulus_roots_are_roots(r):
    for x0 in (1, 2, 12345):
        m = x0 * x0 % r
        roots = sqrt_mod(m, r)
        assert x0 % r in roots
        assert all(x * x % r == m for x in list(roots)[:64])


def test_crt_product_of_sets():
    r1, r2 = 9, 20
    e1 = r2 * pow(r2, -1, r1)  # 1 mod r1, 0 mod r2
    e2 = r1 * pow(r1, -1, r2)
    for m in range(r1 * r2):
        pairs = product(roots_scan(m % r1, r1), roots_scan(m % r2, r2))
        want = sorted((x * e1 + y * e2) % (r1 * r2) for x, y in pairs)
        assert list(sqrt_mod(m, r1 * r2)) == want
