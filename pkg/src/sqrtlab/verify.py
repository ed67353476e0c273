"""Verification suite: every fast path against its oracle, every hard
certificate, at two sizes ("quick" for smoke runs, "full" for acceptance).

Each check raises on the first violation; ``run_verify`` collects results
and names the violated invariant.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import bilinear, energy, lattice, oracles, sieve
from .arith import sqrt_mod
from .errors import CertificateError
from .rng import complex_normal, generator

LEVELS = ("quick", "full")

# log-log slope of E2 in H (j = 1, M = floor(sqrt r), H = 2, 4, ..., <= M),
# frozen from the first run of the E2 engine
SLOPE_BASELINE = {10007: 1.0584985994153033, 40009: 1.0545683062196063}
SLOPE_WINDOW = (0.5, 3.3)
SLOPE_TOLERANCE = 0.2

SIZES = {
    "quick": dict(root_r=300, root_m=20, energy_r=20, energy_M=6, spectral_n=20, spectral_r=1000,
                  moment_n=10, moment_r=10**4, moment_M=300, lattice_n=100, tiling_r=500, bilinear_n=50,
                  weyl_n=100, sieve_n=10, p_n=50, slope_r=(10007,)),
    "full": dict(root_r=2000, root_m=50, energy_r=40, energy_M=10, spectral_n=200, spectral_r=5000,
                 moment_n=100, moment_r=10**5, moment_M=10**3, lattice_n=500, tiling_r=3000, bilinear_n=1000,
                 weyl_n=1000, sieve_n=200, p_n=500, slope_r=(10007, 40009)),
}


def _fail(name: str, detail: str):
    raise CertificateError(name, detail)


def _random_unit(rng: np.random.Generator, r: int) -> int:
    if r == 1:
        return 1
    while True:
        j = int(rng.integers(1, r))
        if math.gcd(j, r) == 1:
            return j


def largest_unit_below(r: int) -> int:
    return next((j for j in range(r - 1, 0, -1) if math.gcd(j, r) == 1), 1)


def small_energy_instances(r_max: int, M_max: int) -> Iterator[energy.RootTable]:
    """Every (r, j, M, H) with r <= r_max, j in {1, largest unit < r}, H <= M <= min(r, M_max)."""
    for r in range(1, r_max + 1):
        for j in sorted({1, largest_unit_below(r)}):
            for M in range(1, min(r, M_max) + 1):
                table = energy.build_root_table(energy.EnergyInstance(r, j, M, M))
                for H in range(1, M + 1):
                    yield energy.RootTable(energy.EnergyInstance(r, j, M, H), table.roots)


def _random_energy_table(rng, r_lo: int, r_hi: int, M_hi: int) -> energy.RootTable:
    r = int(rng.integers(r_lo, r_hi + 1))
    j = _random_unit(rng, r)
    M = int(rng.integers(1, min(r, M_hi) + 1))
    H = int(rng.integers(1, M + 1))
    return energy.build_root_table(energy.EnergyInstance(r, j, M, H))


# --- the checks -------------------------------------------------------------


def check_roots(level: str, seed: int) -> str:
    sz = SIZES[level]
    rng = generator(seed, 1)
    n = 0
    for r in range(1, sz["root_r"] + 1):
        sq = np.arange(r, dtype=np.int64) ** 2 % r
        for m in rng.integers(0, r, size=sz["root_m"]).tolist():
            got = list(sqrt_mod(m, r))
            want = np.flatnonzero(sq == m).tolist()
            if got != want:
                _fail("root oracle equivalence", f"r={r} m={m}: {got} != {want}")
            n += 1
    return f"{n} (r, m) pairs"


def check_e2_agreement(level: str, seed: int) -> str:
    sz = SIZES[level]
    n = 0
    for t in small_energy_instances(sz["energy_r"], sz["energy_M"]):
        i = t.instance
        spectrum = energy.difference_spectrum(t)
        fast = energy.energy_E2(spectrum)
        brute = oracles.energy2_brute(i.r, i.j, i.M, i.H)
        if fast != brute:
            _fail("E2 engine agreement", f"{i}: spectrum {fast} != brute {brute}")
        n += 1
    return f"{n} instances, exact"


def check_e4_agreement(level: str, seed: int) -> str:
    sz = SIZES[level]
    n = 0
    for t in small_energy_instances(sz["energy_r"], sz["energy_M"]):
        i = t.instance
        spectrum = energy.difference_spectrum(t)
        fast = energy.energy_E4(spectrum)
        brute = oracles.energy4_brute(i.r, i.j, i.M, i.H)
        if fast != brute:
            _fail("E4 engine agreement", f"{i}: convolution {fast} != brute {brute}")
        n += 1
    return f"{n} instances, exact"


def check_spectral(level: str, seed: int) -> str:
    sz = SIZES[level]
    golden = energy.difference_spectrum(energy.build_root_table(energy.EnergyInstance(7, 1, 4, 3)))
    if energy.energy_E2(golden) != 96 or energy.energy_E4(golden) != 47616:
        _fail("spectral identity", "golden instance (7,1,4,3) lost E2=96 / E4=47616")
    rng = generator(seed, 3)
    worst = 0.0
    for _ in range(sz["spectral_n"]):
        spectrum = energy.difference_spectrum(_random_energy_table(rng, 2, sz["spectral_r"], 200))
        exact = energy.energy_E4(spectrum)
        approx = energy.energy_E4(spectrum, "spectral")
        err = abs(approx - exact) / exact if exact else abs(approx)
        worst = max(worst, err)
        if err > 1e-6:
            _fail("spectral identity", f"{spectrum.instance}: spectral {approx} vs convolution {exact}")
    return f"{sz['spectral_n']} random instances, worst relative error {worst:.2e}"


def check_first_moment(level: str, seed: int) -> str:
    sz = SIZES[level]
    n = 0
    for t in small_energy_instances(sz["energy_r"], sz["energy_M"]):
        i = t.instance
        got = energy.first_moment(energy.difference_spectrum(t))
        want = oracles.pair_mass(i.r, i.j, i.M, i.H)
        if got != want:
            _fail("first-moment identity", f"{i}: sum I(d) = {got} != sum s s = {want}")
        n += 1
    rng = generator(seed, 4)
    for _ in range(sz["moment_n"]):
        t = _random_energy_table(rng, 2, sz["moment_r"], sz["moment_M"])
        spectrum = energy.difference_spectrum(t)
        got, want = energy.first_moment(spectrum), energy.constrained_mass(t)
        if got != want:
            _fail("first-moment identity", f"{t.instance}: sum I(d) = {got} != sum s s = {want}")
        if not np.array_equal(spectrum.g[1:], spectrum.g[1:][::-1]):
            _fail("spectrum symmetry", f"{t.instance}")
        n += 1
    return f"{n} instances, exact"


def check_chain(level: str, seed: int) -> str:
    sz = SIZES[level]
    n = 0
    for t in small_energy_instances(sz["energy_r"], sz["energy_M"]):
        energy.report_from_spectrum(energy.difference_spectrum(t))
        n += 1
    rng = generator(seed, 5)
    for _ in range(sz["spectral_n"]):
        energy.report_from_spectrum(energy.difference_spectrum(_random_energy_table(rng, 2, sz["spectral_r"], 200)))
        n += 1
    return f"{n} reports, chain asserted on each"


def check_lattice(level: str, seed: int) -> str:
    sz = SIZES[level]
    lat = lattice.LatticeInstance(5, 1)
    box = lattice.Box(4, 4)
    mins, count, _, _ = lattice.certify(lat, box)
    if (mins.lam1, mins.lam2, count) != (Fraction(1, 4), Fraction(3, 4), 17):
        _fail("lattice certificates", f"golden instance gave {mins}, count {count}")
    rng = generator(seed, 6)
    for _ in range(sz["lattice_n"]):
        rt = int(rng.integers(1, 101))
        d = int(rng.integers(1, rt + 1))
        k = _random_unit(rng, rt)
        A, B = int(rng.integers(1, 65)), int(rng.integers(1, 65))
        lat = lattice.lattice_of(rt, k, d)
        box = lattice.Box(A, B)
        mins, count, _, _ = lattice.certify(lat, box)
        scan = oracles.lattice_minima_scan(lat.rt, lat.c, box.A, box.B)
        if tuple(mins) != tuple(scan):
            _fail("lattice certificates", f"{lat} {box}: fast {tuple(mins)} != scan {scan}")
    return f"{sz['lattice_n']} random instances, minima exact, 0 certificate violations"


def check_tiling(level: str, seed: int) -> str:
    sz = SIZES[level]
    for r in range(1, sz["tiling_r"] + 1):
        if not energy.partition_check(r):
            _fail("reduction tiling", f"r={r}")
    return f"r <= {sz['tiling_r']}"


def _random_bilinear(rng) -> bilinear.BilinearInstance:
    r = int(rng.integers(2, 10**4 + 1))
    j = _random_unit(rng, r)
    L = int(rng.integers(1, 201))
    M = int(rng.integers(1, min(r, 200) + 1))
    alpha = bilinear.CoeffSeq.alpha(complex_normal(rng, 2 * L + 1))
    beta = bilinear.CoeffSeq.beta(complex_normal(rng, M))
    amp = bilinear.amplitude_f(float(rng.integers(1, 10**4)), r) if rng.random() < 0.5 else None
    return bilinear.BilinearInstance(r, j, alpha, beta, amp)


def check_bilinear(level: str, seed: int) -> str:
    sz = SIZES[level]
    rng = generator(seed, 8)
    worst = 0.0
    for _ in range(sz["bilinear_n"]):
        inst = _random_bilinear(rng)
        fast = bilinear.eval_sigma(inst)
        naive = oracles.sigma_naive(inst.r, inst.j, dict(inst.alpha.items()), inst.beta.values.tolist(), inst.f)
        err = abs(fast - naive) / max(abs(naive), 1e-300)
        worst = max(worst, err)
        if err > 2e-10:
            _fail("bilinear dual path", f"r={inst.r} j={inst.j} L={inst.L} M={inst.M}: {fast} vs {naive}")
        if abs(fast) > bilinear.triangle_bound(inst) * (1 + 1e-12):
            _fail("bilinear triangle bound", f"r={inst.r}")
    return f"{sz['bilinear_n']} random instances, worst relative error {worst:.2e}"


def random_weyl_trial(rng):
    M = int(rng.integers(1, 201))
    H = int(rng.integers(1, M + 1))
    kind = int(rng.integers(0, 3))
    beta = complex_normal(rng, M) if kind else rng.standard_normal(M)
    if kind == 2:
        beta[rng.random(M) < 0.5] = 0
    coeffs = rng.standard_normal(3) * np.array([1.0, 0.1, 0.001])
    if rng.random() < 0.5:
        g = rng.random(M)
    else:
        m = np.arange(1, M + 1)
        g = coeffs[0] * m + coeffs[1] * m**2 + coeffs[2] * m**3
    return beta, g, H


def check_weyl(level: str, seed: int) -> str:
    sz = SIZES[level]
    rng = generator(seed, 9)
    worst = 0.0
    for _ in range(sz["weyl_n"]):
        beta, g, H = random_weyl_trial(rng)
        res = bilinear.weyl_check(beta, g, H)
        worst = max(worst, res.ratio)
        if res.ratio > 3:
            _fail("Weyl sanity", f"M={len(beta)} H={H}: ratio {res.ratio}")
    return f"{sz['weyl_n']} trials, max ratio {worst:.4f}"


def check_sieve(level: str, seed: int) -> str:
    sz = SIZES[level]
    rng = generator(seed, 10)
    worst = 0.0
    for Q in (2, 4, 8):
        for N in (8, 64, 512):
            for _ in range(sz["sieve_n"]):
                a = complex_normal(rng, N)
                cert = sieve.mv_certificate(sieve.SieveInstance(Q, a, int(rng.integers(-1000, 1000))))
                worst = max(worst, cert.ratio)
    return f"{9 * sz['sieve_n']} sequences, 0 violations, max ratio {worst:.4f}"


def check_P(level: str, seed: int) -> str:
    sz = SIZES[level]
    rng = generator(seed, 11)
    for _ in range(sz["p_n"]):
        Q = int(rng.integers(1, 65))
        den = int(rng.integers(1, 10**6))
        alpha = Fraction(int(rng.integers(-3 * den, 3 * den)), den)
        Delta = Fraction(1, Q**3) if rng.random() < 0.5 else Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 10**5)))
        fast, brute = sieve.count_P(alpha, Q, Delta), oracles.count_P_brute(alpha, Q, Delta)
        if fast != brute:
            _fail("P fast path", f"alpha={alpha} Q={Q} Delta={Delta}: {fast} != {brute}")
    return f"{sz['p_n']} random alpha, exact"


def slope_sweep(r: int) -> tuple[list[int], list[int]]:
    M = math.isqrt(r)
    Hs = [2**e for e in range(1, M.bit_length()) if 2**e <= M]
    return Hs, energy.e2_sweep(r, 1, M, Hs)


def check_slope(level: str, seed: int) -> str:
    sz = SIZES[level]
    out = []
    for r in sz["slope_r"]:
        Hs, Es = slope_sweep(r)
        fit = energy.exponent_fit(Hs, Es)
        lo, hi = SLOPE_WINDOW
        if not lo < fit.slope < hi:
            _fail("E2 exponent slope", f"r={r}: slope {fit.slope} outside ({lo}, {hi})")
        base = SLOPE_BASELINE.get(r)
        if base is not None and abs(fit.slope - base) > SLOPE_TOLERANCE:
            _fail("E2 exponent slope", f"r={r}: slope {fit.slope} drifted from baseline {base}")
        out.append(f"r={r} slope={fit.slope:.4f}")
    return ", ".join(out)


CHECKS: list[tuple[str, Callable[[str, int], str]]] = [
    ("root oracle equivalence", check_roots),
    ("E2 engine agreement", check_e2_agreement),
    ("E4 engine agreement", check_e4_agreement),
    ("spectral identity", check_spectral),
    ("first-moment identity", check_first_moment),
    ("inequality chain", check_chain),
    ("lattice certificates", check_lattice),
    ("reduction tiling", check_tiling),
    ("bilinear dual path", check_bilinear),
    ("Weyl sanity", check_weyl),
    ("large sieve certificate", check_sieve),
    ("P fast path", check_P),
    ("E2 exponent slope", check_slope),
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class VerifyReport:
    level: str
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        out = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} {r.seconds:8.2f}s  {r.detail}" for r in self.results]
        out.append(f"{'PASS' if self.passed else 'FAIL'}  verify {self.level}: "
                   f"{sum(r.passed for r in self.results)}/{len(self.results)} checks, "
                   f"{sum(r.seconds for r in self.results):.2f}s total")
        return out


def run_verify(level: str = "quick", seed: int = 0, only: list[str] | None = None) -> VerifyReport:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    results = []
    for name, fn in CHECKS:
        if only is not None and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            detail, ok = fn(level, seed), True
        except (CertificateError, AssertionError) as exc:
            detail, ok = str(exc), False
            # the violated invariant may be more specific than the check
            if isinstance(exc, CertificateError) and exc.name != name:
                detail = f"{exc.name}: {exc.detail}"
        results.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return VerifyReport(level, results)
