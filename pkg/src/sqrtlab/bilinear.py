"""Bilinear sums with square-root phases and their bound formulas.

    Sigma = sum_{|l|<=L} sum_{m<=M} alpha_l beta_m e_r(l sqrt(jm)) e(l f(m))

where e_r(l sqrt(jm)) sums over every root of jm mod r (multiset
convention); ``fixed_root=True`` keeps only the smallest root instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .arith import factorize, sqrt_mod

TWO_PI = 2.0 * math.pi


class BoundRangeError(ValueError):
    """H is outside 1 <= H <= min(1/(L F), M)."""


@dataclass(frozen=True)
class CoeffSeq:
    """Complex coefficients indexed from ``start``."""

    values: np.ndarray = field(repr=False)
    start: int

    @classmethod
    def alpha(cls, values: Sequence[complex]) -> "CoeffSeq":
        vals = np.asarray(values, dtype=np.complex128)
        if len(vals) % 2 == 0:
            raise ValueError("alpha needs 2L+1 values indexed -L..L")
        return cls(vals, -(len(vals) // 2))

    @classmethod
    def beta(cls, values: Sequence[complex]) -> "CoeffSeq":
        return cls(np.asarray(values, dtype=np.complex128), 1)

    def __len__(self):
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.values))

    def items(self):
        return zip(self.indices.tolist(), self.values.tolist())

    @property
    def norm2(self) -> float:
        return math.sqrt(math.fsum((np.abs(self.values) ** 2).tolist()))

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.values).max()) if len(self.values) else 0.0


@dataclass(frozen=True)
class BilinearInstance:
    r: int
    j: int
    alpha: CoeffSeq
    beta: CoeffSeq
    f: Callable[[float], float] | None = None
    F: float = 0.0

    def __post_init__(self):
        if math.gcd(self.r, self.j) != 1:
            raise ValueError(f"j not invertible: gcd({self.r}, {self.j}) != 1")
        # an Amplitude carries its own derivative bound
        if self.F == 0.0 and self.f is not None:
            object.__setattr__(self, "F", float(getattr(self.f, "F", 0.0)))

    @property
    def L(self) -> int:
        return len(self.alpha) // 2

    @property
    def M(self) -> int:
        return len(self.beta)


def _root_entries(r: int, j: int, M: int, fixed_root: bool) -> tuple[np.ndarray, np.ndarray]:
    fac = factorize(r)
    ms, xs = [], []
    for m in range(1, M + 1):
        roots = sqrt_mod(j * m % r, fac).elements
        if fixed_root:
            roots = roots[:1]
        ms.extend([m] * len(roots))
        xs.extend(roots)
    return np.array(ms, dtype=np.int64), np.array(xs, dtype=np.int64)


def eval_sigma(inst: BilinearInstance, fixed_root: bool = False, block: int = 256) -> complex:
    r = inst.r
    ms, xs = _root_entries(r, inst.j, inst.M, fixed_root)
    if len(ms) == 0:
        return 0j
    ls = inst.alpha.indices.astype(np.int64)
    if inst.L * r >= 2**62:
        raise OverflowError("l * x would overflow 64-bit phase reduction")
    weights = inst.beta.values[ms - 1]
    fm = None if inst.f is None else np.array([inst.f(float(m)) for m in ms.tolist()])
    re, im = [], []
    for lo in range(0, len(ls), block):
        lb = ls[lo:lo + block]
        # arithmetic phase reduced exactly before leaving the integers
        phase = ((lb[:, None] * xs[None, :]) % r) / r
        if fm is not None:
            an = lb[:, None] * fm[None, :]
            phase = phase + (an - np.floor(an))
        rows = (np.exp(1j * TWO_PI * phase) * weights[None, :]).sum(axis=1)
        terms = inst.alpha.values[lo:lo + block] * rows
        re.extend(terms.real.tolist())
        im.extend(terms.imag.tolist())
    return complex(math.fsum(re), math.fsum(im))


def triangle_bound(inst: BilinearInstance) -> float:
    """sum |alpha_l| * sum |beta_m| s(m)."""
    ms, _ = _root_entries(inst.r, inst.j, inst.M, False)
    sa = math.fsum(np.abs(inst.alpha.values).tolist())
    sb = math.fsum(np.abs(inst.beta.values[ms - 1]).tolist())
    return sa * sb


@dataclass(frozen=True)
class Amplitude:
    Q: float
    r: float
    M0: float
    M: float
    F: float

    def __call__(self, x: float) -> float:
        return -self.Q**0.75 * math.sqrt(x) / self.r

    def derivative(self, x: float) -> float:
        return -self.Q**0.75 / (2.0 * self.r * math.sqrt(x))


def amplitude_f(Q: float, r: float, M0: float | None = None, M: float | None = None,
                C0: float = 1.0, C1: float = 2.0) -> Amplitude:
    """f(x) = -Q^(3/4) sqrt(x) / r on [M0, M]; |f'| is decreasing so F = |f'(M0)|."""
    M0 = C0 * math.sqrt(Q) if M0 is None else M0
    M = C1 * math.sqrt(Q) if M is None else M
    if not 0 < M0 <= M:
        raise ValueError("need 0 < M0 <= M")
    F = Q**0.75 / (2.0 * r * math.sqrt(M0))
    return Amplitude(Q, r, M0, M, F)


@dataclass(frozen=True)
class BoundTerms:
    terms: tuple[float, ...]
    norms: float  # ||alpha||_2 ||beta||_inf

    @property
    def value(self) -> float:
        return math.fsum(self.terms) * self.norms


def check_H_range(H: float, L: float, M: float, F: float) -> None:
    cap = M if F == 0 else min(1.0 / (L * F), M)
    if not 1 <= H <= cap:
        raise BoundRangeError(f"H={H} outside [1, min(1/(LF), M)] = [1, {cap}]")


def unconditional_terms(r: float, L: float, M: float, H: float) -> tuple[float, float, float]:
    return (H**-0.5 * L**0.5 * M, H**0.25 * L**0.25 * M, H**-0.25 * L**0.25 * M**0.75 * r**0.25)


def balanced_terms(r: float, L: float, M: float) -> tuple[float, float]:
    return (L**0.5 * M**1.25 * r**-0.25, L**0.25 * M**0.875 * r**0.125)


def conditional_terms(r: float, L: float, M: float, H: float, nu: float) -> tuple[float, float, float]:
    return (
        H**-0.5 * L**0.5 * M,
        H ** (0.125 - nu / 8) * L**0.375 * M,
        H ** (-0.125 - nu / 8) * L**0.375 * M**0.875 * r**0.125,
    )


def conditional_full_terms(r: float, L: float, M: float, nu: float) -> tuple[float, float, float]:
    return (L**0.5 * M**0.5, L**0.375 * M ** (1.125 - nu / 8), L**0.375 * M ** (0.75 - nu / 8) * r**0.125)


def _norms(inst: BilinearInstance) -> float:
    return inst.alpha.norm2 * inst.beta.norm_inf


def bound_unconditional(inst: BilinearInstance, H: float) -> BoundTerms:
    check_H_range(H, inst.L, inst.M, inst.F)
    return BoundTerms(unconditional_terms(inst.r, inst.L, inst.M, H), _norms(inst))


def bound_conditional(inst: BilinearInstance, H: float, nu: float) -> BoundTerms:
    if not 0 < nu < 1:
        raise ValueError("nu must lie in (0, 1)")
    check_H_range(H, inst.L, inst.M, inst.F)
    return BoundTerms(conditional_terms(inst.r, inst.L, inst.M, H, nu), _norms(inst))


@dataclass(frozen=True)
class BoundReport:
    value: float
    trivial: float
    H: float
    unconditional: float
    balanced: float
    conditional: float | None
    nu: float | None

    @property
    def ratio_trivial(self) -> float:
        return self.value / self.trivial if self.trivial else 0.0


def default_H(r: int, L: int, M: int, F: float = 0.0) -> int:
    """floor(sqrt(r/M)) clipped into the admissible H-range."""
    cap = M if F == 0 else min(1.0 / (L * F), M)
    return max(1, min(math.isqrt(r // M) if M else 1, math.floor(cap)))


def bound_report(inst: BilinearInstance, H: float | None = None, nu: float | None = None,
                 value: complex | None = None) -> BoundReport:
    if H is None:
        H = default_H(inst.r, inst.L, inst.M, inst.F)
    if value is None:
        value = eval_sigma(inst)
    n = _norms(inst)
    return BoundReport(
        value=abs(value),
        trivial=math.sqrt(inst.L) * inst.M * n,
        H=H,
        unconditional=bound_unconditional(inst, H).value,
        balanced=math.fsum(balanced_terms(inst.r, inst.L, inst.M)) * n,
        conditional=None if nu is None else bound_conditional(inst, H, nu).value,
        nu=nu,
    )


@dataclass(frozen=True)
class Condition:
    ok: bool
    margin: float  # log(larger side) - log(smaller side); >= 0 iff ok


@dataclass(frozen=True)
class Nontriviality:
    unconditional: bool
    unconditional_conditions: Mapping[str, Condition]
    conditional: bool | None
    conditional_conditions: Mapping[str, Condition] | None
    exponent_saving: float | None  # log_r(trivial) - log_r(largest conditional term)


def _geq(lhs_log: float, rhs_log: float) -> Condition:
    return Condition(lhs_log >= rhs_log - 1e-12, lhs_log - rhs_log)


def nontriviality_region(r: float, L: float, M: float, eps: float, nu: float | None = None) -> Nontriviality:
    lr, lL, lM = math.log(r), math.log(L), math.log(M)
    unc = {
        "M >= r^(1/3)": _geq(lM, lr / 3),
        "M <= r^(1-4eps)": _geq((1 - 4 * eps) * lr, lM),
        "L^2 M >= r^(1+8eps)": _geq(2 * lL + lM, (1 + 8 * eps) * lr),
    }
    cond = saving = None
    if nu is not None:
        cond = {
            "M >= r^(2eps)": _geq(lM, 2 * eps * lr),
            "L >= M^(1-nu) r^(8eps)": _geq(lL, (1 - nu) * lM + 8 * eps * lr),
            "M^(2+nu) L >= r^(1+8eps)": _geq((2 + nu) * lM + lL, (1 + 8 * eps) * lr),
        }
        logs = [math.log(t) for t in conditional_full_terms(r, L, M, nu)]
        saving = (0.5 * lL + lM - max(logs)) / lr
    return Nontriviality(
        unconditional=all(c.ok for c in unc.values()),
        unconditional_conditions=unc,
        conditional=None if cond is None else all(c.ok for c in cond.values()),
        conditional_conditions=cond,
        exponent_saving=saving,
    )


@dataclass(frozen=True)
class WeylResult:
    lhs: float
    rhs: float
    ratio: float


def weyl_check(beta: Sequence[complex], g: Callable[[int], float] | Sequence[float], H: int) -> WeylResult:
    """Both sides of Weyl differencing on I = (0, M].

    lhs = |sum beta_m e(g(m))|^2
    rhs = (M/H) (sum |beta_m|^2 + sum_{1<=|m1-m2|<=H} (1 - |m1-m2|/H) beta_m1 conj(beta_m2) e(g(m1) - g(m2)))
    """
    b = np.asarray(beta, dtype=np.complex128)
    M = len(b)
    if not 1 <= H <= M:
        raise ValueError(f"need 1 <= H <= |I| = {M}")
    gv = np.array([g(m) for m in range(1, M + 1)], dtype=np.float64) if callable(g) else np.asarray(g, np.float64)
    w = b * np.exp(1j * TWO_PI * (gv - np.floor(gv)))
    s = w.sum()
    lhs = float(s.real**2 + s.imag**2)
    parts = [math.fsum((np.abs(b) ** 2).tolist())]
    for h in range(1, min(H, M - 1) + 1):
        weight = 1.0 - h / H
        if weight == 0.0:
            continue
        c = np.vdot(w[:-h], w[h:])  # sum_m w_{m+h} conj(w_m)
        parts.append(2.0 * weight * c.real)
    rhs = (M / H) * math.fsum(parts)
    if lhs == 0.0:
        return WeylResult(lhs, rhs, 0.0)
    return WeylResult(lhs, rhs, lhs / rhs if rhs > 0 else math.inf)
