"""Exact integer and modular arithmetic.

Factorization, multiplicative functions, modular inverses, prime-power
square roots (Tonelli-Shanks + Hensel lifting, explicit 2-adic handling)
and composite square roots assembled by CRT.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from sympy import factorint

MAX_MODULUS = 2**63 - 1


class NoInverseError(ValueError):
    """Raised when a residue has no inverse modulo r."""


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, k in self.factors:
            if p <= last or k < 1:
                raise ValueError(f"malformed factor list {self.factors}")
            last = p
            prod *= p**k
        if prod != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")

    def __iter__(self):
        return iter(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**k for p, k in self.factors)


@dataclass(frozen=True)
class ResidueSet:
    """Sorted distinct residues modulo ``modulus``."""

    modulus: int
    elements: tuple[int, ...]

    def __post_init__(self):
        els = self.elements
        if any(not 0 <= x < self.modulus for x in els):
            raise ValueError("residue out of range")
        if any(a >= b for a, b in zip(els, els[1:])):
            raise ValueError("residues must be sorted and distinct")

    @classmethod
    def of(cls, modulus: int, values: Iterable[int]) -> "ResidueSet":
        return cls(modulus, tuple(sorted({v % modulus for v in values})))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements


class MultFunctions(NamedTuple):
    tau: int
    omega: int
    mu: int
    phi: int
    square_part: int  # s with s^2 the largest square dividing n


def _check_modulus(n: int) -> None:
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if n > MAX_MODULUS:
        raise ValueError(f"modulus {n} exceeds 2^63-1")


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    _check_modulus(n)
    return Factorization(n, tuple(sorted(factorint(n).items())))


def mult_functions(n: int) -> MultFunctions:
    fac = factorize(n)
    tau = mu = phi = s = 1
    omega = 0
    for p, k in fac:
        tau *= k + 1
        omega += 1
        mu = 0 if k > 1 else -mu
        phi *= (p - 1) * p ** (k - 1)
        s *= p ** (k // 2)
    return MultFunctions(tau, omega, mu, phi, s)


def inv_mod(a: int, r: int) -> int:
    if r < 1:
        raise ValueError(f"modulus must be positive, got {r}")
    if r == 1:
        return 0
    try:
        return pow(a, -1, r)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse modulo {r}") from None


def symmetric(x: int, r: int) -> int:
    """Representative of x mod r in (-r/2, r/2]."""
    v = x % r
    return v - r if 2 * v > r else v


def _sqrt_unit_prime(a: int, p: int) -> int | None:
    """One square root of a unit a mod an odd prime p (Tonelli-Shanks)."""
    a %= p
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, e = p - 1, 0
    while q % 2 == 0:
        q //= 2
        e += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = e
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return x


def _unit_roots_odd(a: int, p: int, e: int) -> list[int]:
    """Roots of x^2 = a mod p^e for a unit a and odd p (0 or 2 roots)."""
    y = _sqrt_unit_prime(a, p)
    if y is None:
        return []
    pe = p
    for _ in range(1, e):
        pe *= p
        # Newton step y <- y - (y^2 - a) / (2y)
        y = (y - (y * y - a) * pow(2 * y, -1, pe)) % pe
    return sorted({y, (-y) % pe})


def _unit_roots_two(a: int, e: int) -> list[int]:
    """Roots of x^2 = a mod 2^e for odd a."""
    if e == 1:
        return [1]
    if e == 2:
        return [1, 3] if a % 4 == 1 else []
    if a % 8 != 1:
        return []
    y = 1
    for i in range(3, e):
        if (y * y - a) % (1 << (i + 1)):
            y += 1 << (i - 1)
    mod = 1 << e
    half = 1 << (e - 1)
    return sorted({y % mod, -y % mod, (y + half) % mod, (-y + half) % mod})


def sqrt_mod_prime_power(m: int, p: int, k: int) -> ResidueSet:
    """All x in [0, p^k) with x^2 = m mod p^k."""
    if k < 1:
        raise ValueError("exponent must be >= 1")
    pk = p**k
    m %= pk
    if m == 0:
        step = p ** ((k + 1) // 2)
        return ResidueSet(pk, tuple(range(0, pk, step)))
    l = 0
    m0 = m
    while m0 % p == 0:
        m0 //= p
        l += 1
    if l % 2:
        return ResidueSet(pk, ())
    e = k - l
    base = _unit_roots_two(m0, e) if p == 2 else _unit_roots_odd(m0, p, e)
    if not base:
        return ResidueSet(pk, ())
    half = p ** (l // 2)
    pe = p**e
    # x0 is only pinned mod p^e but x = p^(l/2) x0 lives mod p^k
    out = {(half * (y + pe * i)) % pk for y in base for i in range(half)}
    return ResidueSet(pk, tuple(sorted(out)))


def _as_factorization(r: int | Factorization) -> Factorization:
    return r if isinstance(r, Factorization) else factorize(r)


def sqrt_mod(m: int, r: int | Factorization) -> ResidueSet:
    """All square roots of m modulo r, assembled over the prime powers of r."""
    fac = _as_factorization(r)
    n = fac.n
    m %= n
    if n == 1:
        return ResidueSet(1, (0,))
    parts = []
    for p, k in fac:
        rs = sqrt_mod_prime_power(m, p, k)
        if not rs.elements:
            return ResidueSet(n, ())
        parts.append((p**k, rs.elements))
    coeffs = []
    for pk, _ in parts:
        other = n // pk
        coeffs.append(other * pow(other, -1, pk))
    roots = {
        sum(c * x for c, x in zip(coeffs, combo)) % n
        for combo in itertools.product(*(els for _, els in parts))
    }
    return ResidueSet(n, tuple(sorted(roots)))


def root_count(r: int | Factorization, m: int) -> int:
    """s(r; m): the number of square roots of m modulo r."""
    fac = _as_factorization(r)
    count = 1
    for p, k in fac:
        count *= len(sqrt_mod_prime_power(m, p, k))
        if count == 0:
            return 0
    return count


def gcd_sum(r: int, j: int, M: int) -> int:
    """sum_{m <= M} gcd(r, j m)."""
    return sum(math.gcd(r, j * m) for m in range(1, M + 1))
