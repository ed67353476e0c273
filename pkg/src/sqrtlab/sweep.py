"""Deterministic parameter sweeps and the v1 result schema.

Each grid cell is evaluated by a pure function of (config, index); cell i
draws random coefficients from ``generator(seed, i)``.  Cells may run in a
process pool but rows are always written in grid order by a single writer,
so output bytes do not depend on the thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import bilinear, energy, lattice, sieve
from .config import SweepConfig
from .errors import CapExceeded, ConfigError
from .rng import complex_normal, generator

SCHEMA = "v1"

# column name -> type tag; every row starts with schema, subject, index
_HEAD = [("schema", "str"), ("subject", "str"), ("index", "int")]
COLUMNS: dict[str, list[tuple[str, str]]] = {
    "energy": _HEAD + [
        ("r", "int"), ("j", "int"), ("M", "int"), ("H", "int"), ("engine", "str"), ("nu", "float"),
        ("eps", "float"), ("first_moment", "int"), ("E2", "num"), ("E4", "num"), ("B2", "frac"),
        ("B4", "frac"), ("E2_over_B2", "float"), ("E4_over_B4", "float"), ("E4_over_hypothesis", "float"),
        ("r_eps", "float"),
    ],
    "lattice": _HEAD + [
        ("r", "int"), ("d", "int"), ("k", "int"), ("H", "int"), ("M", "int"), ("rt", "int"), ("t", "int"),
        ("u", "int"), ("d1", "int"), ("c", "int"), ("A", "frac"), ("B", "frac"), ("lam1", "frac"),
        ("lam2", "frac"), ("lam1_float", "float"), ("lam2_float", "float"), ("v1x", "int"), ("v1y", "int"),
        ("v2x", "int"), ("v2y", "int"), ("class", "str"), ("count", "int"), ("bhw_bound", "frac"),
        ("count_over_bhw", "float"), ("minkowski_ok", "bool"), ("bhw_ok", "bool"), ("J", "int"),
    ],
    "bilinear": _HEAD + [
        ("r", "int"), ("j", "int"), ("L", "int"), ("M", "int"), ("H", "int"), ("nu", "float"),
        ("sigma_re", "float"), ("sigma_im", "float"), ("sigma_abs", "float"), ("triangle", "float"),
        ("trivial", "float"), ("ratio_trivial", "float"), ("unconditional", "float"), ("balanced", "float"),
        ("conditional", "float"), ("ratio_unconditional", "float"),
    ],
    "sieve:certificate": _HEAD + [
        ("Q", "int"), ("N", "int"), ("Z", "float"), ("lhs", "float"), ("bound", "float"), ("ratio", "float"),
        ("ok", "bool"),
    ],
    "sieve:P": _HEAD + [
        ("Q", "int"), ("N", "int"), ("r", "int"), ("b", "int"), ("zi", "int"), ("z", "frac"),
        ("z_float", "float"), ("P", "int"), ("P_over_sqrtQ", "float"),
    ],
}

# ratio columns summarised after a sweep
RATIOS = {
    "energy": ("E2_over_B2", "E4_over_B4", "E4_over_hypothesis"),
    "lattice": ("count_over_bhw",),
    "bilinear": ("ratio_trivial", "ratio_unconditional"),
    "sieve:certificate": ("ratio",),
    "sieve:P": ("P_over_sqrtQ",),
}


# --- validation ---------------------------------------------------------------


def _bad(i: int, msg: str):
    raise ConfigError(f"grid cell {i}: {msg}")


def validate_cell(cfg: SweepConfig, i: int, p: dict) -> None:
    kind = cfg.grid_kind
    for k, v in p.items():
        if isinstance(v, float) and k not in ("nu", "eps"):
            _bad(i, f"{k} must be an integer, got {v}")
    if "r" in p and p["r"] > cfg.caps["max_r"]:
        raise CapExceeded(f"grid cell {i}: r={p['r']} exceeds max_r={cfg.caps['max_r']}")
    if kind == "energy":
        if cfg.engine not in energy.ENGINES:
            raise ConfigError(f"engine must be one of {energy.ENGINES}")
        r, j, M, H = p["r"], p["j"], p["M"], p["H"]
        if r < 1 or not 1 <= H <= M <= r:
            _bad(i, f"need 1 <= H <= M <= r, got r={r} M={M} H={H}")
        if math.gcd(r, j) != 1:
            _bad(i, f"j={j} is not a unit mod r={r}")
    elif kind == "lattice":
        r, d, H, M = p["r"], p["d"], p["H"], p["M"]
        if r < 1 or not 1 <= d <= r:
            _bad(i, f"need 1 <= d <= r, got r={r} d={d}")
        if H < 1 or M < 1:
            _bad(i, "H and M must be positive")
    elif kind == "bilinear":
        r, j, L, M, H = p["r"], p["j"], p["L"], p["M"], p["H"]
        if r < 2 or L < 0 or M < 1:
            _bad(i, f"need r >= 2, L >= 0, M >= 1, got r={r} L={L} M={M}")
        if math.gcd(r, j) != 1:
            _bad(i, f"j={j} is not a unit mod r={r}")
        if H is not None and not 1 <= H <= M:
            _bad(i, f"need 1 <= H <= M, got H={H}")
    elif kind == "sieve:certificate":
        if p["Q"] < 1 or (p["N"] is not None and p["N"] < 1):
            _bad(i, "Q and N must be positive")
    else:
        Q, r, b, zi = p["Q"], p["r"], p["b"], p["zi"]
        if Q < 1:
            _bad(i, "Q must be positive")
        if not 1 <= r <= math.isqrt(Q**3):
            _bad(i, f"need 1 <= r <= sqrt(Q^3), got r={r}")
        if not 0 <= b < r or math.gcd(b, r) != 1:
            _bad(i, f"need 0 <= b < r with gcd(b, r) = 1, got b={b} r={r}")
        if zi is not None and not 0 <= zi < cfg.points:
            _bad(i, f"zi must lie in 0..{cfg.points - 1}")


# --- cell evaluation ----------------------------------------------------------


def _energy_row(cfg: SweepConfig, p: dict) -> dict:
    inst = energy.EnergyInstance(p["r"], p["j"], p["M"], p["H"])
    rep = energy.energy_report(inst, cfg.engine, p["nu"], p["eps"], cap=cfg.caps["brute"])
    b = rep.bounds
    return dict(r=inst.r, j=inst.j, M=inst.M, H=inst.H, engine=cfg.engine, nu=p["nu"], eps=float(p["eps"]),
                first_moment=rep.first_moment, E2=rep.E2, E4=rep.E4, B2=b.B2, B4=b.B4,
                E2_over_B2=rep.E2_over_B2, E4_over_B4=rep.E4_over_B4,
                E4_over_hypothesis=rep.E4_over_hypothesis, r_eps=b.r_eps)


def _lattice_row(cfg: SweepConfig, p: dict) -> dict:
    r, d, k, H, M = p["r"], p["d"], p["k"], p["H"], p["M"]
    tri = energy.reduce_d(r, d)
    lat = lattice.lattice_of(tri.rt, k, tri.d1)
    box = lattice.box_for(Fraction(H, tri.t * tri.u), M)
    mins, count, mk, bhw = lattice.certify(lat, box)
    J = lattice.count_J(tri.rt, tri.t, tri.u, tri.d1, k, H, M)
    return dict(r=r, d=d, k=k, H=H, M=M, rt=tri.rt, t=tri.t, u=tri.u, d1=tri.d1, c=lat.c, A=box.A, B=box.B,
                lam1=mins.lam1, lam2=mins.lam2, lam1_float=float(mins.lam1), lam2_float=float(mins.lam2),
                v1x=mins.v1[0], v1y=mins.v1[1], v2x=mins.v2[0], v2y=mins.v2[1], **{"class": lattice.classify(mins)},
                count=count, bhw_bound=bhw.bound, count_over_bhw=float(count / bhw.bound),
                minkowski_ok=mk.ok, bhw_ok=bhw.ok, J=J)


def _bilinear_row(cfg: SweepConfig, p: dict, index: int) -> dict:
    r, j, L, M = p["r"], p["j"], p["L"], p["M"]
    rng = generator(cfg.seed, index)
    inst = bilinear.BilinearInstance(r, j, bilinear.CoeffSeq.alpha(complex_normal(rng, 2 * L + 1)),
                                     bilinear.CoeffSeq.beta(complex_normal(rng, M)))
    value = bilinear.eval_sigma(inst)
    rep = bilinear.bound_report(inst, H=p["H"], nu=p["nu"], value=value)
    return dict(r=r, j=j, L=L, M=M, H=int(rep.H), nu=p["nu"], sigma_re=value.real, sigma_im=value.imag,
                sigma_abs=rep.value, triangle=bilinear.triangle_bound(inst), trivial=rep.trivial,
                ratio_trivial=rep.ratio_trivial, unconditional=rep.unconditional, balanced=rep.balanced,
                conditional=rep.conditional,
                ratio_unconditional=rep.value / rep.unconditional if rep.unconditional else 0.0)


def _certificate_row(cfg: SweepConfig, p: dict, index: int) -> dict:
    Q = p["Q"]
    N = Q**3 if p["N"] is None else p["N"]
    sieve._check_caps(Q, N)
    a = complex_normal(generator(cfg.seed, index), N)
    cert = sieve.mv_certificate(sieve.SieveInstance(Q, a))
    return dict(Q=Q, N=N, Z=sieve.SieveInstance(Q, a).Z, lhs=cert.lhs, bound=cert.bound, ratio=cert.ratio,
                ok=cert.ok)


def _p_row(cfg: SweepConfig, p: dict) -> dict:
    Q, r, b = p["Q"], p["r"], p["b"]
    N = Q**3
    zs = sieve.z_grid(N, r, cfg.points)
    zi = len(zs) - 1 if p["zi"] is None else min(p["zi"], len(zs) - 1)
    target = sieve.ApproximationTarget(b, r, zs[zi])
    row = sieve.pq_experiment(Q, [target], N)[0]
    return dict(Q=Q, N=N, r=r, b=b, zi=zi, z=target.z, z_float=float(target.z), P=row.P, P_over_sqrtQ=row.ratio)


def eval_cell(cfg: SweepConfig, index: int, params: dict) -> dict:
    kind = cfg.grid_kind
    if kind == "energy":
        body = _energy_row(cfg, params)
    elif kind == "lattice":
        body = _lattice_row(cfg, params)
    elif kind == "bilinear":
        body = _bilinear_row(cfg, params, index)
    elif kind == "sieve:certificate":
        body = _certificate_row(cfg, params, index)
    else:
        body = _p_row(cfg, params)
    return {"schema": SCHEMA, "subject": cfg.subject, "index": index, **body}


def _eval_task(task) -> dict:
    return eval_cell(*task)


# --- serialisation ------------------------------------------------------------


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


_INTLIKE = re.compile(r"^-?\d+$")


def parse_value(text: str, tag: str) -> Any:
    if text == "":
        return None
    if tag == "str":
        return text
    if tag == "int":
        return int(text)
    if tag == "float":
        return float(text)
    if tag == "num":
        return int(text) if _INTLIKE.match(text) else float(text)
    if tag == "frac":
        return Fraction(text)
    if tag == "bool":
        return {"true": True, "false": False}[text]
    raise ValueError(f"unknown column type {tag!r}")


def _json_value(v: Any) -> Any:
    if isinstance(v, Fraction):
        return format_value(v)
    if isinstance(v, float) and not math.isfinite(v):
        return format_value(v)
    return v


def to_csv(kind: str, rows: list[dict]) -> str:
    cols = [c for c, _ in COLUMNS[kind]]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in cols])
    return buf.getvalue()


def to_jsonl(kind: str, rows: list[dict]) -> str:
    cols = [c for c, _ in COLUMNS[kind]]
    return "".join(json.dumps({c: _json_value(row.get(c)) for c in cols}) + "\n" for row in rows)


def parse_csv(kind: str, text: str) -> list[dict]:
    """Inverse of to_csv; the header must match the v1 column list exactly."""
    types = COLUMNS[kind]
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != [c for c, _ in types]:
        raise ValueError(f"header does not match schema {SCHEMA} for {kind}")
    return [{c: parse_value(cell, t) for (c, t), cell in zip(types, rec)} for rec in reader]


def parse_jsonl(kind: str, text: str) -> list[dict]:
    types = COLUMNS[kind]
    out = []
    for line in text.splitlines():
        raw = json.loads(line)
        out.append({c: (parse_value(raw[c], t) if isinstance(raw[c], str) else raw[c]) for c, t in types})
    return out


# --- driver -------------------------------------------------------------------


@dataclass
class SweepResult:
    kind: str
    rows: list[dict]
    text: str
    summary: dict[str, tuple[float, float]]

    def summary_lines(self) -> list[str]:
        out = [f"{self.kind}: {len(self.rows)} rows, schema {SCHEMA}"]
        for name, (lo, hi) in self.summary.items():
            out.append(f"  {name}: min {lo:.6g}  max {hi:.6g}")
        return out


def _summarise(kind: str, rows: list[dict]) -> dict[str, tuple[float, float]]:
    out = {}
    for name in RATIOS[kind]:
        vals = [r[name] for r in rows if r.get(name) is not None]
        if vals:
            out[name] = (min(vals), max(vals))
    return out


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> SweepResult:
    """Validate every cell, evaluate in grid order and serialise once."""
    cells = cfg.cells()
    if not cells:
        raise ConfigError("empty grid")
    for i, p in enumerate(cells):
        validate_cell(cfg, i, p)
    threads = cfg.threads if threads is None else threads
    tasks = [(cfg, i, p) for i, p in enumerate(cells)]
    if threads <= 1 or len(tasks) == 1:
        rows = [_eval_task(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
            rows = list(pool.map(_eval_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    kind = cfg.grid_kind
    text = to_jsonl(kind, rows) if cfg.format == "jsonl" else to_csv(kind, rows)
    return SweepResult(kind, rows, text, _summarise(kind, rows))
