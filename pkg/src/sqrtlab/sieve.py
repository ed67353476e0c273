"""Large sieve for square moduli: the exact left-hand side, the explicit
classical certificate, the counting function P(alpha) and the parameter
choices at the critical point N = Q^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceeded, CertificateError

MAX_Q_SQUARED = 10**4
MAX_N = 10**6


@dataclass(frozen=True)
class SieveInstance:
    Q: int
    a: np.ndarray = field(repr=False)  # a_n for n = offset+1 .. offset+N
    offset: int = 0

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def Z(self) -> float:
        return math.fsum((np.abs(self.a) ** 2).tolist())


def _check_caps(Q: int, N: int) -> None:
    if Q * Q > MAX_Q_SQUARED or N > MAX_N:
        raise CapExceeded(f"sieve instance Q={Q} (Q^2={Q * Q}), N={N} exceeds caps Q^2<={MAX_Q_SQUARED}, N<={MAX_N}")


def ls_lhs(inst: SieveInstance) -> float:
    """sum_{q<=Q} sum_{a mod q^2, (a,q)=1} |sum_n a_n e(n a / q^2)|^2.

    For each q the sequence is folded modulo q^2 and one length-q^2 DFT
    gives every inner sum at once.
    """
    Q, N = inst.Q, inst.N
    _check_caps(Q, N)
    a = np.asarray(inst.a, dtype=np.complex128)
    n = np.arange(inst.offset + 1, inst.offset + N + 1)
    parts = []
    for q in range(1, Q + 1):
        q2 = q * q
        folded = np.zeros(q2, dtype=np.complex128)
        np.add.at(folded, n % q2, a)
        # ifft carries e(+k a / q^2) and a 1/q^2 factor
        S = np.fft.ifft(folded) * q2
        res = np.arange(q2)
        units = np.gcd(res, q) == 1
        if q == 1:
            units[:] = True
        vals = S[units]
        parts.extend((vals.real**2 + vals.imag**2).tolist())
    return math.fsum(parts)


@dataclass(frozen=True)
class SieveCertificate:
    ok: bool
    lhs: float
    bound: float
    ratio: float


def mv_certificate(inst: SieveInstance, strict: bool = True) -> SieveCertificate:
    """ls_lhs <= (N - 1 + Q^4) Z: the classical large sieve for the Q^-4 spaced points a/q^2."""
    lhs = ls_lhs(inst)
    Z = inst.Z
    bound = (inst.N - 1 + inst.Q**4) * Z
    ok = lhs <= bound * (1 + 1e-12)
    if strict and not ok:
        raise CertificateError("large sieve certificate", f"Q={inst.Q} N={inst.N} lhs={lhs} bound={bound}")
    return SieveCertificate(ok, lhs, bound, lhs / bound if bound else 0.0)


def count_P(alpha, Q: int, Delta) -> int:
    """#{(q, a): 1 <= q <= Q, gcd(q, a) = 1, |a/q^2 - alpha| <= Delta}.

    alpha and Delta are converted to exact rationals (floats exactly), so the
    window test is decided in integer arithmetic.
    """
    alpha, Delta = Fraction(alpha), Fraction(Delta)
    if Delta <= 0:
        raise ValueError("Delta must be positive")
    lo_f, hi_f = alpha - Delta, alpha + Delta
    total = 0
    for q in range(1, Q + 1):
        q2 = q * q
        lo = math.ceil(lo_f * q2)
        hi = math.floor(hi_f * q2)
        if hi < lo:
            continue
        if q == 1:
            total += hi - lo + 1
            continue
        if hi - lo < 64:
            total += sum(1 for a in range(lo, hi + 1) if math.gcd(a, q) == 1)
        else:
            total += _coprime_in_range(lo, hi, q)
    return total


def _coprime_in_range(lo: int, hi: int, q: int) -> int:
    primes = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    total = 0
    for mask in range(1 << len(primes)):
        d = 1
        bits = 0
        for i, p in enumerate(primes):
            if mask >> i & 1:
                d *= p
                bits += 1
        total += (-1) ** bits * (hi // d - (lo - 1) // d)
    return total


@dataclass(frozen=True)
class ApproximationTarget:
    b: int
    r: int
    z: Fraction

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.b, self.r) + self.z


def sqrt_delta(N: int) -> Fraction:
    """sqrt(1/N), exact when N is a perfect square, else the nearest double."""
    s = math.isqrt(N)
    if s * s == N:
        return Fraction(1, s)
    return Fraction(1.0 / math.sqrt(N))


def z_grid(N: int, r: int, points: int = 8) -> list[Fraction]:
    """Geometric grid from Delta = 1/N up to the extreme point sqrt(Delta)/r (both exact)."""
    lo = Fraction(1, N)
    hi = sqrt_delta(N) / r
    if points < 2 or hi <= lo:
        return [hi]
    ratio = float(hi / lo)
    inner = [lo * Fraction(ratio ** (i / (points - 1))) for i in range(1, points - 1)]
    return [lo, *inner, hi]


def enumerate_targets(Q: int, N: int | None = None, r_max: int | None = None, points: int = 8,
                      extreme_only: bool = False) -> Iterator[ApproximationTarget]:
    """x = b/r + z with 1 <= r <= tau = floor(sqrt N), gcd(r, b) = 1, 0 <= b < r."""
    N = Q**3 if N is None else N
    tau = math.isqrt(N)
    top = tau if r_max is None else min(tau, r_max)
    for r in range(1, top + 1):
        zs = [sqrt_delta(N) / r] if extreme_only else z_grid(N, r, points)
        for b in range(r):
            if math.gcd(r, b) != 1:
                continue
            for z in zs:
                yield ApproximationTarget(b, r, z)


class RangeError(ValueError):
    """r lies outside the remaining range Q^(15/26 - eps) < r <= Q^(3/2)."""


@dataclass(frozen=True)
class CriticalParams:
    Q: float
    r: float
    eps: float
    nu: float
    H: float
    delta: float
    L: float
    M0: float
    M: float
    F: float
    z: float
    eta: float  # nu^2/16 - 8 eps, the exponent saving the bound chain delivers
    conditions: dict[str, bool]


def critical_params(Q: float, r: float, eps: float, nu: float, C0: float = 1.0, C1: float = 2.0,
                    C2: float = 1.0) -> CriticalParams:
    if not Q ** (15 / 26 - eps) < r <= Q**1.5:
        raise RangeError(f"r={r} outside the remaining range Q^(15/26-eps) < r <= Q^(3/2) for Q={Q}")
    delta = math.sqrt(r) * Q**1.25
    H = math.sqrt(r) / Q ** (0.25 + 2 * eps)
    L = Q ** (1 + eps) * r / delta
    M0 = C0 * math.sqrt(Q)
    M = C1 * math.sqrt(Q)
    F = C2 * math.sqrt(Q) / r
    tol = 1 + 1e-12
    conds = {
        "delta range r Q^(1/2) <= delta <= Q^2": r * math.sqrt(Q) <= delta * tol and delta <= Q**2 * tol,
        "M <= r": M <= r,
        "1 <= H": H >= 1,
        "H <= 1/(L F)": H <= tol / (L * F),
        "H <= M": H <= M,
        "C1 Q^(1/2) <= r": C1 * math.sqrt(Q) <= r,
        "r <= Q^(2eps) min(delta^2/(C2^2 Q^(5/2)), C1^2 Q^(3/2))":
            r <= tol * Q ** (2 * eps) * min(delta**2 / (C2**2 * Q**2.5), C1**2 * Q**1.5),
        "Q^(1/2+nu) <= r": Q ** (0.5 + nu) <= r * tol,
        "nu < 1/13": nu < 1 / 13,
        "eps < min(nu^2/128, 1/13 - nu)": eps < min(nu * nu / 128, 1 / 13 - nu),
    }
    return CriticalParams(Q, r, eps, nu, H, delta, L, M0, M, F, 1.0 / (Q**1.5 * r),
                          nu * nu / 16 - 8 * eps, conds)


@dataclass(frozen=True)
class PRow:
    Q: int
    N: int
    r: int
    b: int
    z: Fraction
    P: int
    ratio: float  # P / Q^(1/2)


def pq_experiment(Q: int, targets, N: int | None = None) -> list[PRow]:
    """Exact P(x) for each target with Delta = 1/N; the Q^(1/2 - eta) bound is only reported."""
    N = Q**3 if N is None else N
    Delta = Fraction(1, N)
    rows = []
    for t in targets:
        P = count_P(t.alpha, Q, Delta)
        rows.append(PRow(Q, N, t.r, t.b, t.z, P, P / math.sqrt(Q)))
    return rows
