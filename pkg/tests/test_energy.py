import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqrtlab import energy, oracles
from sqrtlab.arith import mult_functions
from sqrtlab.energy import (EnergyInstance, RootTable, build_root_table, difference_spectrum, energy_E2,
                            energy_E4, energy_T2, energy_T4, first_moment)
from sqrtlab.errors import CapExceeded, CertificateError

GOLDEN = EnergyInstance(7, 1, 4, 3)
GOLDEN_G = [0, 4, 4, 4, 4, 4, 4]
GOLDEN_E2 = 96
GOLDEN_E4 = 47616  # 96^2 + 6 * 80^2


def spectrum(r, j, M, H, restricted=True):
    return difference_spectrum(build_root_table(EnergyInstance(r, j, M, H)), restricted)


@st.composite
def instances(draw, r_max=60, M_max=12):
    r = draw(st.integers(1, r_max))
    j = draw(st.integers(1, max(1, r)).filter(lambda j: math.gcd(j, r) == 1))
    M = draw(st.integers(1, min(r, M_max)))
    H = draw(st.integers(1, M))
    return EnergyInstance(r, j, M, H)


def test_instance_validation():
    with pytest.raises(ValueError):
        EnergyInstance(10, 4, 3, 2)
    with pytest.raises(ValueError):
        EnergyInstance(7, 1, 4, 5)
    with pytest.raises(ValueError):
        EnergyInstance(7, 1, 8, 1)
    assert EnergyInstance(7, 3, 4, 3).k == 5


def test_root_table_examples():
    t = build_root_table(GOLDEN)
    assert [list(t[m]) for m in range(1, 5)] == [[1, 6], [3, 4], [], [2, 5]]
    assert list(build_root_table(EnergyInstance(5, 1, 1, 1))[1]) == [1, 4]
    t = build_root_table(EnergyInstance(15, 2, 2, 1))
    assert list(t[1]) == [] and list(t[2]) == [2, 7, 8, 13]
    assert t.counts.tolist() == [0, 4]


def test_golden_spectrum_and_energies():
    g = spectrum(7, 1, 4, 3)
    assert g.g.tolist() == GOLDEN_G
    assert first_moment(g) == 24
    for engine in energy.ENGINES:
        assert energy_E2(g, engine) == pytest.approx(GOLDEN_E2, rel=1e-12)
        assert energy_E4(g, engine) == pytest.approx(GOLDEN_E4, rel=1e-12)
    assert energy_E2(g) == GOLDEN_E2 and energy_E4(g) == GOLDEN_E4


def test_zero_spectra():
    assert not spectrum(5, 1, 3, 2).g.any()
    assert energy_E2(spectrum(5, 1, 3, 2)) == 0
    for r in (1, 2, 7, 30):
        s = spectrum(r, 1, 1, 1)
        assert not s.g.any() and energy_E2(s) == 0 and energy_E4(s) == 0


def test_spectrum_is_read_only():
    g = spectrum(7, 1, 4, 3).g
    with pytest.raises(ValueError):
        g[0] = 1


def test_T_energies():
    # unrestricted spectrum of m = 1 mod 7 (roots 1, 6): differences 0, 0, +-5
    table = build_root_table(EnergyInstance(7, 1, 1, 1))
    assert energy_T2(table) == 6
    assert energy_T2(table) == oracles.energy2_brute(7, 1, 1, 1, restricted=False)
    assert energy_T2(build_root_table(EnergyInstance(5, 2, 1, 1))) == 0
    with pytest.raises(ValueError):
        energy_E2(difference_spectrum(table, restricted=False))


def test_brute_cap():
    s = spectrum(40, 1, 20, 20)
    with pytest.raises(CapExceeded):
        energy_E2(s, "brute")
    assert energy_E2(s, "brute", cap=None) == energy_E2(s)


def test_unknown_engine():
    with pytest.raises(ValueError):
        energy_E2(spectrum(7, 1, 4, 3), "magic")


@given(instances())
def test_engines_agree_with_oracles(inst):
    t = build_root_table(inst)
    s = difference_spectrum(t)
    assert energy_E2(s) == oracles.energy2_brute(inst.r, inst.j, inst.M, inst.H)
    assert energy_E4(s) == oracles.energy4_brute(inst.r, inst.j, inst.M, inst.H)
    assert first_moment(s) == oracles.pair_mass(inst.r, inst.j, inst.M, inst.H) == energy.constrained_mass(t)
    assert energy_T2(t) == oracles.energy2_brute(inst.r, inst.j, inst.M, inst.H, restricted=False)
    assert energy_T4(t) == oracles.energy4_brute(inst.r, inst.j, inst.M, inst.H, restricted=False)


@given(instances(r_max=3000, M_max=150))
def test_spectrum_properties(inst):
    t = build_root_table(inst)
    s = difference_spectrum(t)
    g = s.g
    assert g[0] == 0  # distinct m with a common root would force r | j(m1 - m2)
    assert np.array_equal(g[1:], g[1:][::-1])
    assert first_moment(s) == energy.constrained_mass(t)
    E2, E4 = energy_E2(s), energy_E4(s)
    assert E4 == pytest.approx(energy_E4(s, "spectral"), rel=1e-9, abs=1e-6)
    energy.check_energy_chain(first_moment(s), E2, E4, inst.r)


@given(instances(r_max=500, M_max=40))
def test_monotone_in_H_and_M(inst):
    r, j, M, H = inst.r, inst.j, inst.M, inst.H
    e2 = energy_E2(spectrum(r, j, M, H))
    e4 = energy_E4(spectrum(r, j, M, H))
    if H < M:
        assert energy_E2(spectrum(r, j, M, H + 1)) >= e2
        assert energy_E4(spectrum(r, j, M, H + 1)) >= e4
    if M < r:
        assert energy_E2(spectrum(r, j, M + 1, H)) >= e2
        assert energy_E4(spectrum(r, j, M + 1, H)) >= e4


def test_chain_violation_raises():
    with pytest.raises(CertificateError):
        energy.check_energy_chain(10, 5, 10**6, 7)
    with pytest.raises(CertificateError):
        energy.check_energy_chain(10, 1, 1, 7)


def test_cyclic_convolve_matches_definition():
    rng = np.random.default_rng(3)
    for r in (1, 5, 64, 300):
        for density in (0.01, 0.5):
            a = (rng.random(r) < density) * rng.integers(0, 50, r)
            b = rng.integers(0, 50, r)
            want = np.zeros(r, dtype=np.int64)
            for i in np.flatnonzero(a):
                want += a[i] * np.roll(b, i)
            assert np.array_equal(energy.cyclic_convolve(a, b, r), want)


@pytest.mark.parametrize("r, d, want", [(12, 2, (3, 2, 1, 1)), (7, 3, (7, 1, 1, 3)), (36, 6, (1, 6, 1, 1))])
def test_reduce_d_examples(r, d, want):
    tri = energy.reduce_d(r, d)
    assert (tri.rt, tri.t, tri.u, tri.d1) == want


def test_reduce_all_matches_reduce_d():
    for r in range(1, 400):
        rt, t, u, d1 = energy.reduce_all(r)
        for d in range(1, r + 1):
            tri = energy.reduce_d(r, d)
            assert (tri.rt, tri.t, tri.u, tri.d1) == (rt[d - 1], t[d - 1], u[d - 1], d1[d - 1])


def test_reduce_invariants_up_to_1e4():
    mu_zero = {u for u in range(1, 10**4 + 1) if mult_functions(u).mu == 0}
    for r in range(1, 10**4 + 1):
        rt, t, u, d1 = energy.reduce_all(r)
        d = np.arange(1, r + 1)
        assert np.all(rt * t * t * u == r)
        assert np.all(t * u * d1 == d)
        assert np.all(np.gcd(rt, d1) == 1)
        assert np.all(np.gcd(rt, u) == 1)
        assert not mu_zero.intersection(np.unique(u).tolist())


@pytest.mark.parametrize("r", [1, 12, 360, 2**10, 3**6 * 4])
def test_partition_check(r):
    assert energy.partition_check(r)


def test_bound_values_examples():
    b = energy.bound_values(GOLDEN)
    assert b.B2 == pytest.approx(27 * 16 / 7 + 12)
    assert float(b.B2) == pytest.approx(73.714285714, rel=1e-9)
    assert energy.bound_values(EnergyInstance(10**6, 1, 100, 10)).B2 == 1010
    r = 11
    # H = M = r: H^3 M^2 / r + H M = r^4 + r^2
    assert energy.bound_values(EnergyInstance(r, 1, r, r)).B2 == r**4 + r**2
    b = energy.bound_values(GOLDEN, nu=0.1, eps=0.5)
    assert b.r_eps == pytest.approx(math.sqrt(7))
    assert b.hypothesis_E4 == pytest.approx(3**1.9 * 16 * float(b.B2))


def test_report_golden():
    rep = energy.energy_report(GOLDEN, nu=0.05)
    assert (rep.first_moment, rep.E2, rep.E4) == (24, GOLDEN_E2, GOLDEN_E4)
    assert rep.E2_over_B2 == pytest.approx(96 / (516 / 7))


def test_exponent_fit():
    Hs = [2, 4, 8, 16, 32]
    assert energy.exponent_fit(Hs, [5 * h**3 for h in Hs]).slope == pytest.approx(3.0, abs=1e-9)
    assert energy.exponent_fit(Hs, [7 * h for h in Hs]).slope == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError, match="insufficient"):
        energy.exponent_fit([2, 4, 8], [1, 2, 3])
    with pytest.raises(ValueError, match="insufficient"):
        energy.exponent_fit(Hs, [0, 0, 0, 1, 2])


def test_real_sweep_slope():
    Hs = [2, 4, 8, 16, 32, 64]
    fit = energy.exponent_fit(Hs, energy.e2_sweep(10007, 1, 100, Hs))
    assert 0.5 < fit.slope < 3.3
