"""Geometry of numbers for the congruence lattice {(x, y): x = c y mod rt}.

Successive minima are taken for the box |x| <= A, |y| <= B, i.e. for the
gauge max(|x|/A, |y|/B).  All comparisons are exact: A and B may be
Fractions and the gauge is compared through integer cross-multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import CertificateError

Vector = tuple[int, int]


@dataclass(frozen=True)
class LatticeInstance:
    rt: int
    c: int

    def __post_init__(self):
        if self.rt < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.c < self.rt and not (self.rt == 1 and self.c == 0):
            raise ValueError("c must be reduced mod rt")

    @property
    def basis(self) -> tuple[Vector, Vector]:
        return (self.c, 1), (self.rt, 0)

    @property
    def covolume(self) -> int:
        return self.rt

    def contains(self, v: Vector) -> bool:
        return (v[0] - self.c * v[1]) % self.rt == 0


@dataclass(frozen=True)
class Box:
    A: Fraction
    B: Fraction

    def __post_init__(self):
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "B", Fraction(self.B))
        if self.A < 0 or self.B < 0:
            raise ValueError("box half-widths must be nonnegative")

    @property
    def volume(self) -> Fraction:
        return 4 * self.A * self.B

    def gauge(self, v: Vector) -> Fraction:
        return max(Fraction(abs(v[0])) / self.A, Fraction(abs(v[1])) / self.B)


class MinimaResult(NamedTuple):
    lam1: Fraction
    lam2: Fraction
    v1: Vector
    v2: Vector


class MinkowskiResult(NamedTuple):
    ok: bool
    lower_slack: Fraction  # (1/(lam1 lam2)) / (Vol/(4 rt)), >= 1 when valid
    upper_slack: Fraction  # (Vol/(2 rt)) / (1/(lam1 lam2)), >= 1 when valid


class BHWResult(NamedTuple):
    ok: bool
    count: int
    bound: Fraction


def lattice_of(rt: int, k: int, d: int) -> LatticeInstance:
    return LatticeInstance(rt, (k * d * d) % rt)


def box_for(Ht: Fraction, M: int) -> Box:
    """B(Ht) = {|x| <= Ht^2, |y| <= 4M}."""
    Ht = Fraction(Ht)
    return Box(Ht * Ht, Fraction(4 * M))


def _scales(box: Box) -> tuple[int, int, int]:
    # gauge(v) = max(|x| sx, |y| sy) / den with integer sx, sy, den
    An, Ad = box.A.numerator, box.A.denominator
    Bn, Bd = box.B.numerator, box.B.denominator
    return Ad * Bn, Bd * An, An * Bn


def _witness_order(v: Vector, key: int) -> tuple:
    x, y = v
    return key, abs(x), abs(y), 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _gauss_reduce(b1: Vector, b2: Vector, sx: int, sy: int) -> tuple[Vector, Vector]:
    def ip(u, v):
        return u[0] * v[0] * sx * sx + u[1] * v[1] * sy * sy

    if ip(b1, b1) > ip(b2, b2):
        b1, b2 = b2, b1
    while True:
        n1 = ip(b1, b1)
        mu = (2 * ip(b1, b2) + n1) // (2 * n1)
        if mu == 0:
            return b1, b2
        b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
        if ip(b2, b2) >= n1:
            return b1, b2
        b1, b2 = b2, b1


def successive_minima(lattice: LatticeInstance, box: Box) -> MinimaResult:
    """Exact lambda_1, lambda_2 with deterministic witnesses.

    Gauss-reduce in the scaled Euclidean form, then enumerate every lattice
    vector whose scaled Euclidean norm is at most sqrt(2) times the larger
    gauge of the reduced basis; that ball contains both minimisers.
    """
    if box.A <= 0 or box.B <= 0:
        raise ValueError("successive minima need a box with positive half-widths")
    sx, sy, den = _scales(box)

    def key(v):
        return max(abs(v[0]) * sx, abs(v[1]) * sy)

    b1, b2 = _gauss_reduce(*lattice.basis, sx, sy)
    smax = max(key(b1), key(b2))
    bound = 2 * smax * smax

    def ip(u, v):
        return u[0] * v[0] * sx * sx + u[1] * v[1] * sy * sy

    g11, g12, g22 = ip(b1, b1), ip(b1, b2), ip(b2, b2)
    det = g11 * g22 - g12 * g12
    bmax = math.isqrt(bound * g11 // det) + 1
    cands = []
    for b in range(-bmax, bmax + 1):
        rest = bound * g11 - b * b * det
        if rest < 0:
            continue
        w = math.isqrt(rest) + 1
        lo = -((w + b * g12) // g11) - 1
        hi = (w - b * g12) // g11 + 1
        for a in range(lo, hi + 1):
            v = (a * b1[0] + b * b2[0], a * b1[1] + b * b2[1])
            if v != (0, 0):
                cands.append((_witness_order(v, key(v)), v))
    cands.sort()
    v1 = cands[0][1]
    v2 = next(v for _, v in cands if v[0] * v1[1] - v[1] * v1[0] != 0)
    return MinimaResult(Fraction(key(v1), den), Fraction(key(v2), den), v1, v2)


def count_lattice_points(lattice: LatticeInstance, box: Box) -> int:
    """Exact number of lattice points in the closed box, one residue step per row."""
    A = math.floor(box.A)
    B = math.floor(box.B)
    rt = lattice.rt
    y = np.arange(-B, B + 1, dtype=object if max(A, B, rt) > 2**30 else np.int64)
    x0 = (lattice.c * y) % rt
    return int(((A - x0) // rt + (A + x0) // rt + 1).sum())


def minkowski_check(lattice: LatticeInstance, box: Box, minima: MinimaResult) -> MinkowskiResult:
    """Both sides of Minkowski's second theorem for n = 2."""
    ratio = box.volume / lattice.covolume
    mid = 1 / (minima.lam1 * minima.lam2)
    lower, upper = ratio / 4, ratio / 2
    return MinkowskiResult(lower <= mid <= upper, mid / lower, upper / mid)


def bhw_check(lattice: LatticeInstance, box: Box, minima: MinimaResult, count: int | None = None) -> BHWResult:
    """Betke-Henk-Wills: #(L cap B) <= (2/lam1 + 1)(4/lam2 + 1)."""
    if count is None:
        count = count_lattice_points(lattice, box)
    bound = (2 / minima.lam1 + 1) * (4 / minima.lam2 + 1)
    return BHWResult(count <= bound, count, bound)


def certify(lattice: LatticeInstance, box: Box) -> tuple[MinimaResult, int, MinkowskiResult, BHWResult]:
    """Minima, point count and both certificates; raises on any violation."""
    mins = successive_minima(lattice, box)
    count = count_lattice_points(lattice, box)
    mk = minkowski_check(lattice, box, mins)
    bhw = bhw_check(lattice, box, mins, count)
    if not mk.ok:
        raise CertificateError("Minkowski second theorem", f"{lattice} {box} {mins}")
    if not bhw.ok:
        raise CertificateError("Betke-Henk-Wills bound", f"{lattice} {box} {mins} count={count}")
    return mins, count, mk, bhw


def classify(minima: MinimaResult) -> str:
    if minima.lam1 > 1:
        return "S0"
    if minima.lam2 > 1:
        return "S1"
    return "S2"


def classify_case(rt: int, t: int, u: int, d: int, H, M: int, k: int = 1) -> str:
    """S0 / S1 / S2 class of d for the box B(H/(tu))."""
    lat = lattice_of(rt, k, d)
    return classify(successive_minima(lat, box_for(Fraction(H) / (t * u), M)))


def _count_in_class(m0: int, mod: int, lo: int, hi: int) -> int:
    """#{m in [lo, hi] : m = m0 mod mod}."""
    if hi < lo:
        return 0
    return (hi - m0) // mod - (lo - 1 - m0) // mod


def _solutions_linear(a: int, b: int, n: int, lo: int, hi: int) -> int:
    """#{m in [lo, hi] : a m = b mod n}."""
    a %= n
    b %= n
    g = math.gcd(a, n)
    if b % g:
        return 0
    n_g = n // g
    m0 = (b // g) * pow(a // g, -1, n_g) % n_g if n_g > 1 else 0
    return _count_in_class(m0, n_g, lo, hi)


def count_J(rt: int, t: int, u: int, d: int, k: int, H, M: int) -> int:
    """#{(h, m): 1 <= |h| <= H/(tu), 1 <= m <= 4M, h^2 + k^2 t^2 u^2 d^4 = k d^2 m mod rt}."""
    Ht = math.floor(Fraction(H) / (t * u))
    a = k * d * d
    const = k * k * t * t * u * u * d**4
    total = 0
    for h in range(1, Ht + 1):
        total += 2 * _solutions_linear(a, h * h + const, rt, 1, 4 * M)
    return total


def max_m_per_h(rt: int, t: int, u: int, d: int, k: int, H, M: int) -> int:
    """Largest number of admissible m for a single h in count_J's set."""
    Ht = math.floor(Fraction(H) / (t * u))
    a = k * d * d
    const = k * k * t * t * u * u * d**4
    return max((_solutions_linear(a, h * h + const, rt, 1, 4 * M) for h in range(1, Ht + 1)), default=0)


def count_box_congruence(r: int, k: int, H: int, M: int, D: int) -> int:
    """#{(h, m, d): 1 <= h <= H, 1 <= m <= 4M, |d| <= D, h^2 - k d^2 m + k^2 d^4 = 0 mod r}."""
    if math.gcd(k, r) != 1:
        raise ValueError(f"k={k} is not a unit modulo r={r}")
    total = 0
    for d in range(0, D + 1):
        weight = 1 if d == 0 else 2
        a = k * d * d
        c4 = k * k * d**4
        for h in range(1, H + 1):
            total += weight * _solutions_linear(a, h * h + c4, r, 1, 4 * M)
    return total
