import pytest

from sqrtlab.config import SweepConfig, load_config, parse_config, parse_values
from sqrtlab.errors import ConfigError

ENERGY = """
# comment
[sweep]
subject = energy
seed = 3

[grid]
r = 101, 103
M = 10, 20
H = 2, 5
"""


def test_parse_values():
    assert parse_values("1, 3..7:2, 0.5") == (1, 3, 5, 7, 0.5)
    assert parse_values("2..4") == (2, 3, 4)
    assert parse_values("5..4") == ()
    assert parse_values("-2..-1") == (-2, -1)
    with pytest.raises(ConfigError):
        parse_values("1..3:0")
    with pytest.raises(ConfigError):
        parse_values("abc")


def test_energy_grid_product():
    cfg = parse_config(ENERGY)
    cells = cfg.cells()
    assert len(cells) == 8
    assert cells[0] == {"r": 101, "M": 10, "H": 2, "j": 1, "nu": None, "eps": 0.0}
    assert cells[-1]["r"] == 103 and cells[-1]["H"] == 5
    assert cfg.seed == 3 and cfg.threads == 1 and cfg.caps["brute"] == 200


@pytest.mark.parametrize("text, msg", [
    ("[sweep]\nsubject = energy\n[grid]\nr = 7\nM = 4\nH = 5..4\n", "empty grid"),
    ("[sweep]\nsubject = energy\n[grid]\nr = 7\nM = 4\n", "missing"),
    ("[sweep]\nsubject = energy\n[grid]\nr = 7\nM = 4\nH = 1\nQ = 3\n", "unknown grid"),
    ("[sweep]\nsubject = nope\n", "subject"),
    ("[sweep]\nsubject = energy\n[extra]\n", "unknown sections"),
    ("[sweep]\nsubject = energy\nthreads = x\n", "integer"),
    ("[sweep]\nsubject = energy\n[caps]\nbrute = 0\n", "positive"),
    ("[sweep]\nsubject = energy\ncolour = red\n", "unknown"),
    ("no section\n", "malformed"),
    ("[grid]\nr = 1\n", "subject"),
])
def test_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


def test_keys_case_sensitive():
    cfg = parse_config("[sweep]\nsubject = sieve\n[grid]\nQ = 2, 4\n")
    assert [c["Q"] for c in cfg.cells()] == [2, 4]
    with pytest.raises(ConfigError):
        parse_config("[sweep]\nsubject = sieve\n[grid]\nq = 2\n")


def test_max_cells():
    cfg = parse_config("[sweep]\nsubject = sieve\n[grid]\nQ = 1..20\n[caps]\nmax_cells = 10\n")
    with pytest.raises(ConfigError, match="max_cells"):
        cfg.cells()


def test_load_config(tmp_path):
    p = tmp_path / "a.ini"
    p.write_text(ENERGY)
    assert load_config(p) == parse_config(ENERGY)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_direct_construction_validates():
    with pytest.raises(ConfigError):
        SweepConfig("energy", {"r": (7,), "M": (4,), "H": (3,)}, threads=0)
