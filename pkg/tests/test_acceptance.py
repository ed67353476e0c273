"""Acceptance criteria at full size; each test prints one PASS/FAIL line."""

import time

import pytest

from sqrtlab import verify
from sqrtlab.errors import CertificateError

pytestmark = pytest.mark.acceptance

SEED = 0


def run(capsys, label, checks, budget=None):
    t0 = time.perf_counter()
    details, error = [], None
    try:
        for fn in checks:
            details.append(fn("full", SEED))
    except (CertificateError, AssertionError) as exc:
        error = exc
    elapsed = time.perf_counter() - t0
    over = budget is not None and elapsed > budget
    ok = error is None and not over
    note = str(error) if error else "; ".join(details)
    if over:
        note += f"; over the {budget:.0f}s budget"
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label} ({elapsed:.2f}s): {note}")
    assert ok, note


def test_c01_root_oracle(capsys):
    run(capsys, "C1 root oracle equivalence, r <= 2000 x 50 m, exact", [verify.check_roots], budget=30)


def test_c02_energy_engines(capsys):
    run(capsys, "C2 E2/E4 engine agreement, r <= 40, M <= 10, zero tolerance",
        [verify.check_e2_agreement, verify.check_e4_agreement], budget=60)


def test_c03_spectral_identity(capsys):
    run(capsys, "C3 spectral E4 within 1e-6 relative, 200 instances r <= 5000; golden E2=96, E4=47616",
        [verify.check_spectral])


def test_c04_first_moment(capsys):
    run(capsys, "C4 first-moment identity, criterion-2 set + 100 instances r <= 1e5, M <= 1e3",
        [verify.check_first_moment])


def test_c05_inequality_chain(capsys):
    run(capsys, "C5 E4 <= (sum I)^2 E2 and r E2 >= (sum I)^2 on every report", [verify.check_chain])


def test_c06_lattice_certificates(capsys):
    run(capsys, "C6 exact minima + Minkowski + BHW on 500 instances; golden (5,1,4,4)",
        [verify.check_lattice])


def test_c07_reduction_tiling(capsys):
    run(capsys, "C7 partition_check(r) for r <= 3000", [verify.check_tiling], budget=20)


def test_c08_bilinear_dual_path(capsys):
    run(capsys, "C8 eval_sigma vs naive within 2e-10 relative, 1000 instances", [verify.check_bilinear])


def test_c09_weyl_sanity(capsys):
    run(capsys, "C9 Weyl ratio <= 3 over 1000 trials", [verify.check_weyl])


def test_c10_large_sieve(capsys):
    run(capsys, "C10 large sieve certificate 200 x 9 sequences; P fast path Q <= 64, 500 alpha",
        [verify.check_sieve, verify.check_P])


def test_c11_e2_slope(capsys):
    run(capsys, "C11 E2 slope in (0.5, 3.3) at r = 10007, 40009; baseline +-0.2", [verify.check_slope])
