"""Root tables, difference spectra and restricted/unrestricted additive energies.

Convention used everywhere: tuples are ordered and each argument m carries
one term per square root of jm, so m contributes with multiplicity s(m).

The difference spectrum g[d] (d mod r) counts constrained pairs
(m1, x1), (m2, x2) with x1 - x2 = d.  E2 = sum g^2 and E4 = sum h^2 with
h the cyclic self-convolution of g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import oracles
from .arith import ResidueSet, factorize, inv_mod, mult_functions, sqrt_mod
from .errors import CapExceeded, CertificateError

ENGINES = ("brute", "convolution", "spectral")
DEFAULT_BRUTE_CAP = 200
_PAIR_CHUNK = 1 << 22


@dataclass(frozen=True)
class EnergyInstance:
    r: int
    j: int
    M: int
    H: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be positive, got {self.r}")
        if math.gcd(self.r, self.j) != 1:
            raise ValueError(f"j not invertible: gcd({self.r}, {self.j}) != 1")
        if not 1 <= self.H <= self.M <= self.r:
            raise ValueError(f"need 1 <= H <= M <= r, got H={self.H} M={self.M} r={self.r}")

    @property
    def k(self) -> int:
        """Inverse of j modulo r."""
        return inv_mod(self.j, self.r)


@dataclass(frozen=True)
class RootTable:
    instance: EnergyInstance
    roots: tuple[ResidueSet, ...]  # roots[m - 1] = sqrt(j m) mod r

    def __getitem__(self, m: int) -> ResidueSet:
        return self.roots[m - 1]

    @property
    def counts(self) -> np.ndarray:
        return np.array([len(rs) for rs in self.roots], dtype=np.int64)

    def entries(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (m, x) pairs, sorted by m."""
        ms = [m for m, rs in enumerate(self.roots, start=1) for _ in rs]
        xs = [x for rs in self.roots for x in rs]
        return np.array(ms, dtype=np.int64), np.array(xs, dtype=np.int64)

    def root_histogram(self) -> np.ndarray:
        _, xs = self.entries()
        return np.bincount(xs, minlength=self.instance.r).astype(np.int64)


@dataclass(frozen=True)
class DifferenceSpectrum:
    table: RootTable
    restricted: bool
    g: np.ndarray = field(repr=False)

    @property
    def instance(self) -> EnergyInstance:
        return self.table.instance

    @property
    def r(self) -> int:
        return self.table.instance.r


@dataclass(frozen=True)
class ReducedTriple:
    rt: int  # r-tilde
    t: int
    u: int
    d1: int


def build_root_table(instance: EnergyInstance) -> RootTable:
    r, j = instance.r, instance.j
    fac = factorize(r)
    return RootTable(instance, tuple(sqrt_mod(j * m % r, fac) for m in range(1, instance.M + 1)))


def cyclic_convolve(a: np.ndarray, b: np.ndarray, r: int) -> np.ndarray:
    """Exact integer cyclic convolution of two length-r count vectors."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if int(a.sum()) * int(b.sum()) >= 2**63:
        raise CapExceeded("convolution would overflow 64-bit counts")
    nz = np.flatnonzero(a)
    if 32 * len(nz) <= r:
        out = np.zeros(r, dtype=np.int64)
        for d in nz:
            out += a[d] * np.roll(b, d)
        return out
    full = np.convolve(a, b)
    out = full[:r].copy()
    out[: r - 1] += full[r:]
    return out


def _restricted_spectrum(ms: np.ndarray, xs: np.ndarray, H: int, r: int) -> np.ndarray:
    # pairs with m_i - H <= m_j < m_i; the mirrored half (m_j > m_i) is d -> -d
    lo = np.searchsorted(ms, ms - H, side="left")
    hi = np.searchsorted(ms, ms, side="left")
    counts = hi - lo
    half = np.zeros(r, dtype=np.int64)
    n = len(ms)
    start = 0
    while start < n:
        cum = np.cumsum(counts[start:])
        stop = start + max(1, int(np.searchsorted(cum, _PAIR_CHUNK, side="right")))
        c = counts[start:stop]
        total = int(c.sum())
        if total:
            i_idx = np.repeat(np.arange(start, stop), c)
            offs = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            j_idx = np.repeat(lo[start:stop], c) + offs
            half += np.bincount((xs[i_idx] - xs[j_idx]) % r, minlength=r)
        start = stop
    return half + np.roll(half[::-1], 1)


def difference_spectrum(table: RootTable, restricted: bool = True) -> DifferenceSpectrum:
    """I(d) for every d mod r.

    Restricted mode keeps pairs with 1 <= |m1 - m2| <= H; unrestricted mode
    keeps every pair (m1, m2) in [1, M]^2, including m1 = m2.
    """
    inst = table.instance
    r = inst.r
    if restricted:
        ms, xs = table.entries()
        g = _restricted_spectrum(ms, xs, inst.H, r)
    else:
        c = table.root_histogram()
        g = cyclic_convolve(c, np.roll(c[::-1], 1), r)
    g.setflags(write=False)
    return DifferenceSpectrum(table, restricted, g)


def first_moment(spectrum: DifferenceSpectrum) -> int:
    return int(spectrum.g.sum())


def constrained_mass(table: RootTable, restricted: bool = True) -> int:
    """sum s(m1) s(m2) over constrained pairs, from prefix sums of s."""
    s = table.counts
    M = table.instance.M
    if not restricted:
        tot = int(s.sum())
        return tot * tot
    H = table.instance.H
    pref = np.concatenate(([0], np.cumsum(s)))
    m = np.arange(1, M + 1)
    upper = pref[np.minimum(M, m + H)] - pref[m]
    lower = pref[m - 1] - pref[np.maximum(0, m - 1 - H)]
    return int((s * (upper + lower)).sum())


def _sum_squares(v: np.ndarray) -> int:
    return sum(int(x) * int(x) for x in v[v != 0])


def _spectral_fourth(g: np.ndarray) -> float:
    r = len(g)
    S = np.fft.fft(g.astype(np.float64))
    mag2 = S.real**2 + S.imag**2
    return math.fsum((mag2 * mag2).tolist()) / r


def _check_cap(spectrum: DifferenceSpectrum, cap: int | None) -> None:
    mass = first_moment(spectrum)
    if cap is not None and mass > cap:
        raise CapExceeded(f"brute engine: spectrum mass {mass} exceeds cap {cap}")


def _second(spectrum: DifferenceSpectrum, engine: str, cap: int | None) -> int | float:
    if engine == "brute":
        _check_cap(spectrum, cap)
        inst = spectrum.instance
        return oracles.energy2_brute(inst.r, inst.j, inst.M, inst.H, restricted=spectrum.restricted)
    if engine == "convolution":
        return _sum_squares(spectrum.g)
    if engine == "spectral":
        S = np.fft.fft(spectrum.g.astype(np.float64))
        return math.fsum((S.real**2 + S.imag**2).tolist()) / spectrum.r
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def _fourth(spectrum: DifferenceSpectrum, engine: str, cap: int | None) -> int | float:
    if engine == "brute":
        _check_cap(spectrum, cap)
        inst = spectrum.instance
        return oracles.energy4_brute(inst.r, inst.j, inst.M, inst.H, restricted=spectrum.restricted)
    if engine == "convolution":
        h = cyclic_convolve(spectrum.g, spectrum.g, spectrum.r)
        return _sum_squares(h)
    if engine == "spectral":
        return _spectral_fourth(spectrum.g)
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def _require_restricted(spectrum: DifferenceSpectrum) -> None:
    if not spectrum.restricted:
        raise ValueError("E-energies need a restricted spectrum; use energy_T2/energy_T4")


def energy_E2(spectrum: DifferenceSpectrum, engine: str = "convolution",
              cap: int | None = DEFAULT_BRUTE_CAP) -> int | float:
    _require_restricted(spectrum)
    return _second(spectrum, engine, cap)


def energy_E4(spectrum: DifferenceSpectrum, engine: str = "convolution",
              cap: int | None = DEFAULT_BRUTE_CAP) -> int | float:
    """E4 by octuple brute force, exact convolution, or (1/r) sum_a |S(a)|^4."""
    _require_restricted(spectrum)
    return _fourth(spectrum, engine, cap)


def _unrestricted(table: RootTable) -> DifferenceSpectrum:
    return difference_spectrum(table, restricted=False)


def energy_T2(table: RootTable, engine: str = "convolution",
              cap: int | None = DEFAULT_BRUTE_CAP) -> int | float:
    return _second(_unrestricted(table), engine, cap)


def energy_T4(table: RootTable, engine: str = "convolution",
              cap: int | None = DEFAULT_BRUTE_CAP) -> int | float:
    return _fourth(_unrestricted(table), engine, cap)


# --- reduction of d --------------------------------------------------------


def reduce_d(r: int, d: int) -> ReducedTriple:
    if not 1 <= d <= r:
        raise ValueError(f"need 1 <= d <= r, got d={d}, r={r}")
    s = mult_functions(r).square_part
    t = math.gcd(s, d)
    r0 = r // (t * t)
    d0 = d // t
    u = math.gcd(d0 * d0, r0)
    rt, d1 = r0 // u, d0 // u
    out = ReducedTriple(rt, t, u, d1)
    if (d0 % u or mult_functions(u).mu == 0 or math.gcd(rt, u) != 1
            or math.gcd(rt, d1) != 1 or rt * t * t * u != r or t * u * d1 != d):
        raise CertificateError("reduce_d invariants", f"r={r} d={d} -> {out}")
    return out


def reduce_all(r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised reduce_d over d = 1..r; returns (rt, t, u, d1) arrays."""
    s = mult_functions(r).square_part
    d = np.arange(1, r + 1, dtype=np.int64)
    t = np.gcd(s, d)
    r0 = r // (t * t)
    d0 = d // t
    red = d0 % r0
    u = np.gcd(red * red % r0, r0)
    return r0 // u, t, u, d0 // u


def admissible_triples(r: int) -> Iterator[tuple[int, int, int]]:
    """(rt, t, u) with rt t^2 u = r, u squarefree and gcd(rt, u) = 1."""
    t = 1
    while t * t <= r:
        if r % (t * t) == 0:
            rest = r // (t * t)
            for u in _divisors(rest):
                rt = rest // u
                if math.gcd(rt, u) == 1 and mult_functions(u).mu != 0:
                    yield rt, t, u
        t += 1


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**e for d in divs for e in range(k + 1)]
    return sorted(divs)


def partition_check(r: int) -> bool:
    """True iff {t u d : 1 <= d <= t rt, gcd(rt, d) = 1} tiles {1..r} exactly once."""
    marks = np.zeros(r + 1, dtype=np.int64)
    for rt, t, u in admissible_triples(r):
        d = np.arange(1, t * rt + 1, dtype=np.int64)
        d = d[np.gcd(d, rt) == 1]
        marks += np.bincount(t * u * d, minlength=r + 1)[: r + 1]
    return bool(marks[0] == 0 and np.all(marks[1:] == 1))


# --- bounds and reports ----------------------------------------------------


@dataclass(frozen=True)
class BoundValues:
    """Main terms of the energy bounds; r^eps is reported, never folded in."""

    B2: Fraction            # H^3 M^2 / r + H M
    B4: Fraction            # H^2 M^2 B2
    expected_E2: Fraction   # H^2 M^2 / r + H M
    expected_E4: Fraction   # H^4 M^4 / r + H^2 M^2
    expected_T2: Fraction   # M^4 / r + M^2
    expected_T4: Fraction   # M^8 / r + M^4
    prior_T2: float          # M^(7/2) / r^(1/2) + M^2
    prior_T4: float          # M^4 (M^(7/2) / r^(1/2) + M^2)
    hypothesis_E4: float | None  # H^(2-nu) M^2 B2
    nu: float | None
    eps: float
    r_eps: float


def bound_values(instance: EnergyInstance, nu: float | None = None, eps: float = 0.0) -> BoundValues:
    r, M, H = instance.r, instance.M, instance.H
    B2 = Fraction(H**3 * M**2, r) + H * M
    prior = M**3.5 / math.sqrt(r) + M**2
    return BoundValues(
        B2=B2,
        B4=H * H * M * M * B2,
        expected_E2=Fraction(H * H * M * M, r) + H * M,
        expected_E4=Fraction(H**4 * M**4, r) + H * H * M * M,
        expected_T2=Fraction(M**4, r) + M * M,
        expected_T4=Fraction(M**8, r) + M**4,
        prior_T2=prior,
        prior_T4=M**4 * prior,
        hypothesis_E4=None if nu is None else H ** (2 - nu) * M * M * float(B2),
        nu=nu,
        eps=eps,
        r_eps=r**eps,
    )


def _ratio(value: int | float, bound: Fraction | float) -> float:
    if isinstance(value, int) and isinstance(bound, Fraction):
        return float(Fraction(value) / bound)
    return float(value) / float(bound)


@dataclass(frozen=True)
class EnergyReport:
    instance: EnergyInstance
    engine: str
    first_moment: int
    E2: int | float
    E4: int | float
    bounds: BoundValues
    E2_over_B2: float
    E4_over_B4: float
    E4_over_hypothesis: float | None


def check_energy_chain(first: int, E2: int | float, E4: int | float, r: int) -> None:
    """Hard-assert E4 <= first^2 E2 and r E2 >= first^2."""
    if isinstance(E4, int) and isinstance(E2, int):
        upper_ok = E4 <= first * first * E2
    else:
        upper_ok = E4 <= first * first * E2 * (1 + 1e-9)
    if not upper_ok:
        raise CertificateError("E4 <= (sum I)^2 E2", f"E4={E4}, sum I={first}, E2={E2}")
    if isinstance(E2, int):
        lower_ok = r * E2 >= first * first
    else:
        lower_ok = r * E2 * (1 + 1e-9) >= first * first
    if not lower_ok:
        raise CertificateError("E2 >= (sum I)^2 / r", f"E2={E2}, sum I={first}, r={r}")


def energy_report(instance: EnergyInstance, engine: str = "convolution", nu: float | None = None,
                  eps: float = 0.0, cap: int | None = DEFAULT_BRUTE_CAP) -> EnergyReport:
    spectrum = difference_spectrum(build_root_table(instance))
    return report_from_spectrum(spectrum, engine=engine, nu=nu, eps=eps, cap=cap)


def report_from_spectrum(spectrum: DifferenceSpectrum, engine: str = "convolution", nu: float | None = None,
                         eps: float = 0.0, cap: int | None = DEFAULT_BRUTE_CAP) -> EnergyReport:
    inst = spectrum.instance
    first = first_moment(spectrum)
    E2 = energy_E2(spectrum, "convolution" if engine == "spectral" else engine, cap)
    E4 = energy_E4(spectrum, engine, cap)
    check_energy_chain(first, E2, E4, inst.r)
    b = bound_values(inst, nu, eps)
    return EnergyReport(
        instance=inst,
        engine=engine,
        first_moment=first,
        E2=E2,
        E4=E4,
        bounds=b,
        E2_over_B2=_ratio(E2, b.B2),
        E4_over_B4=_ratio(E4, b.B4),
        E4_over_hypothesis=None if b.hypothesis_E4 is None else float(E4) / b.hypothesis_E4,
    )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float  # root-mean-square residual in log space
    points: int


def exponent_fit(H_values: Sequence[float], E_values: Sequence[float]) -> FitResult:
    """Least-squares slope of log E against log H over points with E > 0."""
    pts = [(h, e) for h, e in zip(H_values, E_values) if e > 0 and h > 0]
    if len(pts) < 4:
        raise ValueError(f"insufficient data: {len(pts)} usable points, need 4")
    x = np.log([p[0] for p in pts])
    y = np.log([float(p[1]) for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), len(pts))


def e2_sweep(r: int, j: int, M: int, H_values: Sequence[int]) -> list[int]:
    """E2 for each H, reusing one root table."""
    table = build_root_table(EnergyInstance(r, j, M, max(H_values)))
    out = []
    for H in H_values:
        t = RootTable(EnergyInstance(r, j, M, H), table.roots)
        out.append(energy_E2(difference_spectrum(t)))
    return out
