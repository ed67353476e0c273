import numpy as np

from sqrtlab import energy, verify


def test_quick_passes():
    rep = verify.run_verify("quick")
    assert rep.passed, rep.lines()
    assert [r.name for r in rep.results] == [name for name, _ in verify.CHECKS]


def test_injected_convolution_fault(monkeypatch):
    real = energy.cyclic_convolve

    def corrupted(a, b, r):
        out = real(a, b, r).copy()
        if out.any():
            out[int(np.argmax(out))] += 1
        return out

    monkeypatch.setattr(energy, "cyclic_convolve", corrupted)
    rep = verify.run_verify("quick", only=["E4 engine agreement", "E2 engine agreement"])
    assert not rep.passed
    assert rep.failures == ["E4 engine agreement"]
    assert "FAIL  E4 engine agreement" in "\n".join(rep.lines())


def test_failure_names_specific_invariant(monkeypatch):
    monkeypatch.setattr(energy, "partition_check", lambda r: r != 360)
    rep = verify.run_verify("quick", only=["reduction tiling"])
    assert rep.failures == ["reduction tiling"] and "r=360" in rep.results[0].detail


def test_unknown_level():
    import pytest
    with pytest.raises(ValueError):
        verify.run_verify("medium")
