"""Sweep configuration: INI-style ``key = value`` files with three sections.

Grammar (documented in full in the README)::

    [sweep]    subject, engine, seed, threads, format, out, mirror, points, sieve_mode
    [grid]     one parameter per line, value = comma-separated items
    [caps]     brute, max_r, max_cells

An item is a number or an inclusive integer range ``a..b`` / ``a..b:step``.
"""

from __future__ import annotations

import configparser
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

SUBJECTS = ("energy", "lattice", "bilinear", "sieve")
FORMATS = ("csv", "jsonl")
SIEVE_MODES = ("certificate", "P")

# grid keys per subject: required keys, then optional keys with their defaults
GRID_KEYS: dict[str, tuple[tuple[str, ...], dict[str, tuple]]] = {
    "energy": (("r", "M", "H"), {"j": (1,), "nu": (None,), "eps": (0.0,)}),
    "lattice": (("r", "d", "H", "M"), {"k": (1,)}),
    "bilinear": (("r", "L", "M"), {"j": (1,), "H": (None,), "nu": (None,)}),
    "sieve:certificate": (("Q",), {"N": (None,)}),
    "sieve:P": (("Q", "r", "b"), {"zi": (None,)}),
}

DEFAULT_CAPS = {"brute": 200, "max_r": 10**6, "max_cells": 10**5}
SWEEP_KEYS = {"subject", "engine", "seed", "threads", "format", "out", "mirror", "points", "sieve_mode"}

_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)(?::(\d+))?$")
_INT = re.compile(r"^-?\d+$")


def parse_values(text: str, key: str = "value") -> tuple:
    """'1, 3..7:2, 0.5' -> (1, 3, 5, 7, 0.5).  A reversed range is empty."""
    out = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        m = _RANGE.match(item)
        if m:
            a, b, step = int(m[1]), int(m[2]), int(m[3] or 1)
            if step <= 0:
                raise ConfigError(f"{key}: range step must be positive in {item!r}")
            out.extend(range(a, b + 1, step))
        elif _INT.match(item):
            out.append(int(item))
        else:
            try:
                out.append(float(item))
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {item!r}") from None
    return tuple(out)


@dataclass(frozen=True)
class SweepConfig:
    subject: str
    grid: dict[str, tuple] = field(default_factory=dict)
    engine: str = "convolution"
    seed: int = 0
    threads: int = 1
    format: str = "csv"
    out: str | None = None
    mirror: bool = False  # also write a .jsonl copy next to a CSV output
    points: int = 8       # z-grid size for the P experiment
    sieve_mode: str = "certificate"
    caps: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_CAPS))

    def __post_init__(self):
        if self.subject not in SUBJECTS:
            raise ConfigError(f"subject must be one of {SUBJECTS}, got {self.subject!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.sieve_mode not in SIEVE_MODES:
            raise ConfigError(f"sieve_mode must be one of {SIEVE_MODES}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.points < 2:
            raise ConfigError("points must be >= 2")
        for name, v in self.caps.items():
            if name not in DEFAULT_CAPS:
                raise ConfigError(f"unknown cap {name!r}")
            if not isinstance(v, int) or v <= 0:
                raise ConfigError(f"cap {name} must be a positive integer")
        required, optional = GRID_KEYS[self.grid_kind]
        unknown = set(self.grid) - set(required) - set(optional)
        if unknown:
            raise ConfigError(f"unknown grid keys for {self.grid_kind}: {sorted(unknown)}")
        missing = [k for k in required if k not in self.grid]
        if missing:
            raise ConfigError(f"missing grid keys for {self.grid_kind}: {missing}")
        for k, vals in self.grid.items():
            if len(vals) == 0:
                raise ConfigError(f"empty grid: {k} has no values")

    @property
    def grid_kind(self) -> str:
        return f"sieve:{self.sieve_mode}" if self.subject == "sieve" else self.subject

    @property
    def axes(self) -> list[tuple[str, tuple]]:
        required, optional = GRID_KEYS[self.grid_kind]
        keys = list(required) + list(optional)
        return [(k, self.grid.get(k, optional.get(k))) for k in keys]

    def cells(self) -> list[dict]:
        """Grid points in row-major order over the subject's key order."""
        axes = self.axes
        n = 1
        for _, vals in axes:
            n *= len(vals)
        if n > self.caps["max_cells"]:
            raise ConfigError(f"grid has {n} cells, above max_cells={self.caps['max_cells']}")
        names = [k for k, _ in axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in axes))]


def _as_int(section: str, key: str, text: str) -> int:
    if not _INT.match(text.strip()):
        raise ConfigError(f"[{section}] {key} must be an integer, got {text!r}")
    return int(text)


def _as_bool(key: str, text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def parse_config(text: str) -> SweepConfig:
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=None, interpolation=None,
                                   empty_lines_in_values=False, default_section="\x00")
    cp.optionxform = str  # keys are case-sensitive (M, H, Q)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    extra = set(cp.sections()) - {"sweep", "grid", "caps"}
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    if not cp.has_section("sweep") or "subject" not in cp["sweep"]:
        raise ConfigError("[sweep] subject is required")
    sw = cp["sweep"]
    unknown = set(sw) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown [sweep] keys: {sorted(unknown)}")
    kw: dict = {"subject": sw["subject"].strip()}
    for key in ("engine", "format", "out", "sieve_mode"):
        if key in sw:
            kw[key] = sw[key].strip()
    for key in ("seed", "threads", "points"):
        if key in sw:
            kw[key] = _as_int("sweep", key, sw[key])
    if "mirror" in sw:
        kw["mirror"] = _as_bool("mirror", sw["mirror"])
    kw["grid"] = {k: parse_values(v, k) for k, v in cp["grid"].items()} if cp.has_section("grid") else {}
    caps = dict(DEFAULT_CAPS)
    if cp.has_section("caps"):
        for k, v in cp["caps"].items():
            caps[k] = _as_int("caps", k, v)
    kw["caps"] = caps
    return SweepConfig(**kw)


def load_config(path: str | Path) -> SweepConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
