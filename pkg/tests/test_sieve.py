import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqrtlab import oracles, sieve
from sqrtlab.errors import CapExceeded
from sqrtlab.rng import complex_normal, generator
from sqrtlab.sieve import SieveInstance


def test_lhs_single_term():
    a = np.array([2 - 1j])
    Z = 5.0
    assert sieve.ls_lhs(SieveInstance(2, a)) == pytest.approx(3 * Z)
    # N = 1: every admissible (q, a) contributes |a_1|^2, and there are q phi(q) of them
    Q = 6
    count = sum(q * sum(1 for b in range(1, q + 1) if math.gcd(b, q) == 1) for q in range(1, Q + 1))
    assert count == 49
    assert sieve.ls_lhs(SieveInstance(Q, a)) == pytest.approx(count * Z)


def test_lhs_trivial_cases():
    assert sieve.ls_lhs(SieveInstance(5, np.zeros(40, complex))) == 0
    a = complex_normal(generator(1), 30)
    assert sieve.ls_lhs(SieveInstance(1, a)) == pytest.approx(abs(a.sum()) ** 2)


@given(st.integers(1, 8), st.integers(1, 200), st.integers(-500, 500), st.integers(0, 2**32))
def test_lhs_matches_direct(Q, N, offset, seed):
    a = complex_normal(generator(seed), N)
    fast = sieve.ls_lhs(SieveInstance(Q, a, offset))
    assert fast == pytest.approx(oracles.ls_lhs_direct(Q, a, offset), rel=1e-9)


def test_certificate():
    cert = sieve.mv_certificate(SieveInstance(2, np.array([1.0 + 0j])))
    assert cert.ok and cert.lhs == pytest.approx(3) and cert.bound == 16
    assert sieve.mv_certificate(SieveInstance(3, np.zeros(5, complex))).ok
    cert = sieve.mv_certificate(SieveInstance(8, complex_normal(generator(8), 512)))
    assert cert.ok and 0 < cert.ratio < 1


def test_caps():
    with pytest.raises(CapExceeded):
        sieve.ls_lhs(SieveInstance(101, np.ones(3, complex)))
    with pytest.raises(CapExceeded):
        sieve.ls_lhs(SieveInstance(2, np.ones(sieve.MAX_N + 1, complex)))


def test_count_P_examples():
    for Q in (2, 3, 10):
        assert sieve.count_P(0, Q, Fraction(1, Q**3)) == 1
    assert sieve.count_P(Fraction(1, 4), 4, Fraction(1, 64)) == 1
    with pytest.raises(ValueError):
        sieve.count_P(0, 4, 0)


@given(st.fractions(-3, 3, max_denominator=10**6), st.integers(1, 40),
       st.fractions(Fraction(1, 10**5), 3, max_denominator=10**5))
def test_count_P_matches_brute(alpha, Q, Delta):
    assert sieve.count_P(alpha, Q, Delta) == oracles.count_P_brute(alpha, Q, Delta)


@given(st.fractions(-3, 3, max_denominator=10**4), st.integers(1, 30), st.fractions(Fraction(1, 10**5), 1))
def test_count_P_symmetries(alpha, Q, Delta):
    p = sieve.count_P(alpha, Q, Delta)
    assert sieve.count_P(alpha + 1, Q, Delta) == p
    assert sieve.count_P(-alpha, Q, Delta) == p


def test_long_ranges_use_inclusion_exclusion():
    assert sieve._coprime_in_range(1, 1000, 30) == sum(1 for a in range(1, 1001) if math.gcd(a, 30) == 1)
    assert sieve.count_P(Fraction(1, 3), 20, Fraction(2)) == oracles.count_P_brute(Fraction(1, 3), 20, Fraction(2))


def test_targets():
    ts = list(sieve.enumerate_targets(4, extreme_only=True))
    assert sorted({t.r for t in ts}) == list(range(1, 9))
    assert all(math.gcd(t.b, t.r) == 1 and 0 <= t.b < t.r for t in ts)
    assert next(t for t in ts if t.r == 1).alpha == Fraction(1, 8)  # sqrt(1/64)
    assert next(t for t in ts if t.r == 8).z == Fraction(1, 64)
    zs = sieve.z_grid(10**6, 3, points=5)
    assert zs[0] == Fraction(1, 10**6) and zs[-1] == Fraction(1, 3000)
    assert all(a < b for a, b in zip(zs, zs[1:]))


def test_critical_params():
    Q = 10**4
    p = sieve.critical_params(Q, Q**1.5, 0.001, 0.05)
    assert p.delta == pytest.approx(Q**2)
    assert p.M == pytest.approx(2 * Q**0.5) and p.L == pytest.approx(Q**1.001 * Q**1.5 / Q**2)
    p = sieve.critical_params(1e4, 1e5, 0.01, 0.05)
    assert p.H == pytest.approx(1e5**0.5 / 1e4**0.27)
    assert p.eta == pytest.approx(0.05**2 / 16 - 0.08)
    assert p.conditions["1 <= H"] and p.conditions["H <= M"]
    assert not p.conditions["eps < min(nu^2/128, 1/13 - nu)"]
    with pytest.raises(sieve.RangeError):
        sieve.critical_params(1e4, 10, 0.01, 0.05)


def test_pq_experiment():
    rows = sieve.pq_experiment(16, [sieve.ApproximationTarget(0, 1, Fraction(0))] * 2)
    assert rows[0] == rows[1]
    assert rows[0].P == 1 and rows[0].ratio == 0.25
    rows = sieve.pq_experiment(64, sieve.enumerate_targets(64, r_max=8, extreme_only=True))
    assert len(rows) == 22
    assert max(r.ratio for r in rows) == 0.25  # regression baseline
