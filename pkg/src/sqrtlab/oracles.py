"""Slow, independent reference implementations.

Nothing here calls the fast paths: square roots come from an exhaustive
scan of x^2 mod r, tuples are enumerated directly, lattice minima from a
certified window scan.  Tests and the verification runner compare every
fast path against these.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np


def square_table(r: int) -> dict[int, list[int]]:
    """value -> sorted list of x in [0, r) with x^2 = value mod r."""
    table: dict[int, list[int]] = defaultdict(list)
    for x in range(r):
        table[x * x % r].append(x)
    return table


def roots_scan(m: int, r: int) -> list[int]:
    m %= r
    return [x for x in range(r) if x * x % r == m]


def _pair_differences(r: int, j: int, M: int, H: int, restricted: bool) -> np.ndarray:
    sq = square_table(r)
    roots = {m: sq.get(j * m % r, []) for m in range(1, M + 1)}
    diffs = []
    for m1 in range(1, M + 1):
        for m2 in range(1, M + 1):
            if restricted and not 1 <= abs(m1 - m2) <= H:
                continue
            for x1 in roots[m1]:
                for x2 in roots[m2]:
                    diffs.append((x1 - x2) % r)
    return np.array(diffs, dtype=np.int64)


def energy2_brute(r: int, j: int, M: int, H: int, restricted: bool = True) -> int:
    """Count quadruples with x1 - x2 = x3 - x4 (mod r) by direct comparison."""
    D = _pair_differences(r, j, M, H, restricted)
    total = 0
    for start in range(0, len(D), 1024):
        total += int((D[start:start + 1024, None] == D[None, :]).sum())
    return total


def energy4_brute(r: int, j: int, M: int, H: int, restricted: bool = True) -> int:
    """Count octuples by meet-in-the-middle over pairs of constrained pairs."""
    D = _pair_differences(r, j, M, H, restricted)
    counts: dict[int, int] = defaultdict(int)
    for start in range(0, len(D), 1024):
        sums = ((D[start:start + 1024, None] + D[None, :]) % r).ravel()
        vals, cnt = np.unique(sums, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] += c
    return sum(c * c for c in counts.values())


def pair_mass(r: int, j: int, M: int, H: int) -> int:
    """sum s(m1) s(m2) over 1 <= |m1 - m2| <= H by a plain double loop."""
    sq = square_table(r)
    s = [0] + [len(sq.get(j * m % r, [])) for m in range(1, M + 1)]
    return sum(s[a] * s[b] for a in range(1, M + 1) for b in range(1, M + 1) if 1 <= abs(a - b) <= H)


def lattice_minima_scan(rt: int, c: int, A: Fraction, B: Fraction):
    """Successive minima of {x = c y mod rt} for the box |x| <= A, |y| <= B.

    Scans a window certified by the two independent lattice vectors
    (rt, 0), (0, rt) and (c', 1).  Returns (lam1, lam2, v1, v2) with the
    same witness tie-break as the fast path.
    """
    A, B = Fraction(A), Fraction(B)
    cs = c % rt
    if 2 * cs > rt:
        cs -= rt

    def norm(x, y):
        return max(Fraction(abs(x)) / A, Fraction(abs(y)) / B)

    cands = [(rt, 0), (0, rt), (cs, 1)]
    bound = min(max(norm(*a), norm(*b)) for i, a in enumerate(cands) for b in cands[i + 1:]
                if a[0] * b[1] - a[1] * b[0] != 0)
    ymax = math.floor(bound * B)
    xmax = math.floor(bound * A)
    An, Ad = A.numerator, A.denominator
    Bn, Bd = B.numerator, B.denominator
    ys = np.arange(-ymax, ymax + 1, dtype=np.int64)
    pts_x, pts_y = [], []
    for y in ys.tolist():
        x0 = (cs * y) % rt
        lo = -xmax + ((x0 + xmax) % rt)
        xs = np.arange(lo, xmax + 1, rt, dtype=np.int64)
        pts_x.append(xs)
        pts_y.append(np.full(len(xs), y, dtype=np.int64))
    X = np.concatenate(pts_x)
    Y = np.concatenate(pts_y)
    keep = (X != 0) | (Y != 0)
    X, Y = X[keep], Y[keep]
    # compare max(|x|/A, |y|/B) through the common denominator An*Bn
    key = np.maximum(np.abs(X) * Ad * Bn, np.abs(Y) * Bd * An)
    order = np.lexsort((((Y < 0) | ((Y == 0) & (X < 0))).astype(np.int64), np.abs(Y), np.abs(X), key))
    X, Y, key = X[order], Y[order], key[order]
    v1 = (int(X[0]), int(Y[0]))
    indep = X * v1[1] - Y * v1[0] != 0
    i2 = int(np.flatnonzero(indep)[0])
    v2 = (int(X[i2]), int(Y[i2]))
    return norm(*v1), norm(*v2), v1, v2


def count_points_brute(rt: int, c: int, A: int, B: int) -> int:
    return sum(1 for x in range(-A, A + 1) for y in range(-B, B + 1) if (x - c * y) % rt == 0)


def count_J_brute(rt: int, t: int, u: int, d: int, k: int, H, M: int) -> int:
    Ht = math.floor(Fraction(H) / (t * u))
    rhs_const = k * k * t * t * u * u * d**4
    return sum(
        1
        for h in range(-Ht, Ht + 1) if h != 0
        for m in range(1, 4 * M + 1)
        if (h * h + rhs_const - k * d * d * m) % rt == 0
    )


def count_box_brute(r: int, k: int, H: int, M: int, D: int) -> int:
    return sum(
        1
        for h in range(1, H + 1)
        for d in range(-D, D + 1)
        for m in range(1, 4 * M + 1)
        if (h * h - k * d * d * m + k * k * d**4) % r == 0
    )


def sigma_naive(r: int, j: int, alpha: Mapping[int, complex], beta: Sequence[complex],
                f: Callable[[float], float] | None = None, fixed_root: bool = False) -> complex:
    """Direct double loop over l, m and the roots of j m, with fsum accumulation."""
    sq = square_table(r)
    re, im = [], []
    for l, a in alpha.items():
        if a == 0:
            continue
        for m, b in enumerate(beta, start=1):
            if b == 0:
                continue
            roots = sq.get(j * m % r, [])
            if fixed_root:
                roots = roots[:1]
            fl = 0.0 if f is None else l * f(m)
            fl -= math.floor(fl)
            for x in roots:
                z = a * b * cmath.exp(2j * math.pi * ((l * x % r) / r + fl))
                re.append(z.real)
                im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def ls_lhs_direct(Q: int, a: Sequence[complex], offset: int = 0) -> float:
    """sum_{q<=Q} sum_{a mod q^2, (a,q)=1} |sum_n a_n e(n a / q^2)|^2, term by term."""
    total = []
    n_vals = range(offset + 1, offset + len(a) + 1)
    for q in range(1, Q + 1):
        q2 = q * q
        for b in range(1, q2 + 1):
            if math.gcd(q, b) != 1:
                continue
            re, im = [], []
            for n, c in zip(n_vals, a):
                z = c * cmath.exp(2j * math.pi * ((n * b) % q2) / q2)
                re.append(z.real)
                im.append(z.imag)
            s = complex(math.fsum(re), math.fsum(im))
            total.append(abs(s) ** 2)
    return math.fsum(total)


def count_P_brute(alpha: Fraction, Q: int, Delta: Fraction) -> int:
    alpha, Delta = Fraction(alpha), Fraction(Delta)
    count = 0
    for q in range(1, Q + 1):
        q2 = q * q
        centre = math.floor(alpha * q2)
        spread = math.ceil(Delta * q2) + 2
        for a in range(centre - spread, centre + spread + 1):
            if math.gcd(q, a) == 1 and abs(Fraction(a, q2) - alpha) <= Delta:
                count += 1
    return count
