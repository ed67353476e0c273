"""Command-line front end.

Exit codes: 0 ok, 1 hard-assert violation, 2 config error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .arith import sqrt_mod
from .config import DEFAULT_CAPS, SweepConfig, load_config, parse_values
from .errors import CapExceeded, CertificateError, ConfigError
from .sweep import run_sweep
from .verify import LEVELS, run_verify

EXIT_OK, EXIT_CERT, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="sweep configuration file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    p.add_argument("--engine", help="energy engine: brute, convolution or spectral")
    p.add_argument("--format", choices=("csv", "jsonl"), help="output format")


def _grid_args(p: argparse.ArgumentParser, keys: dict[str, bool]) -> None:
    for key, required in keys.items():
        p.add_argument(f"--{key}", dest=f"grid_{key}", metavar="VALUES", required=required,
                       help="value list, e.g. 3,5 or 2..10:2")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqrtlab", description="Square roots modulo r: energies, lattices, bilinear sums, sieve.")
    parser.add_argument("--version", action="version", version=f"sqrtlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sqrt", help="all square roots of m modulo r")
    p.add_argument("m", type=int)
    p.add_argument("r", type=int)
    _common(p)

    p = sub.add_parser("energy", help="restricted energies E2, E4 with bound ratios")
    _grid_args(p, {"r": True, "j": False, "M": True, "H": True, "nu": False, "eps": False})
    _common(p)

    p = sub.add_parser("lattice", help="reduction of d, successive minima and certificates")
    _grid_args(p, {"r": True, "d": True, "k": False, "H": True, "M": True})
    _common(p)

    p = sub.add_parser("bilinear", help="bilinear sum with random coefficients against its bounds")
    _grid_args(p, {"r": True, "j": False, "L": True, "M": True, "H": False, "nu": False})
    _common(p)

    p = sub.add_parser("sieve", help="large sieve certificate, or P(x) with --mode P")
    p.add_argument("--mode", choices=("certificate", "P"), default="certificate")
    _grid_args(p, {"Q": True, "N": False, "r": False, "b": False, "zi": False})
    p.add_argument("--points", type=int, help="z-grid size for --mode P")
    _common(p)

    p = sub.add_parser("sweep", help="run a sweep described by --config")
    p.add_argument("--mirror", action="store_true", help="also write a JSON-lines copy of a CSV output")
    _common(p)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--level", choices=LEVELS, default="quick")
    _common(p)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(text.encode("utf-8"))


def _apply_flags(cfg: SweepConfig, args) -> SweepConfig:
    changes = {}
    for key in ("out", "threads", "seed", "engine", "format"):
        v = getattr(args, key, None)
        if v is not None:
            changes[key] = v
    if getattr(args, "mirror", False):
        changes["mirror"] = True
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _config_from_args(args) -> SweepConfig:
    subject = args.command
    grid = {}
    for name, value in vars(args).items():
        if name.startswith("grid_") and value is not None:
            key = name[5:]
            grid[key] = parse_values(value, key)
    kw = dict(subject=subject, grid=grid, caps=dict(DEFAULT_CAPS))
    if subject == "sieve":
        kw["sieve_mode"] = args.mode
        if args.mode == "certificate":
            extra = sorted(k for k in grid if k in ("r", "b", "zi"))
        else:
            extra = sorted(k for k in grid if k == "N")
        if extra:
            raise ConfigError(f"--{', --'.join(extra)} not valid with --mode {args.mode}")
        if args.points is not None:
            kw["points"] = args.points
    return SweepConfig(**kw)


def _run_sqrt(args) -> int:
    if args.r < 1:
        raise ConfigError("r must be positive")
    roots = list(sqrt_mod(args.m % args.r, args.r))
    if args.format == "jsonl":
        text = json.dumps({"m": args.m, "r": args.r, "count": len(roots), "roots": roots}) + "\n"
    else:
        text = f"m,r,count,roots\n{args.m},{args.r},{len(roots)},{' '.join(map(str, roots))}\n"
    _emit(text, args.out)
    return EXIT_OK


def _run_verify(args) -> int:
    report = run_verify(args.level, seed=args.seed or 0)
    text = "\n".join(report.lines()) + "\n"
    _emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_CERT


def _run_grid(args) -> int:
    if args.command == "sweep":
        if not args.config:
            raise ConfigError("sweep needs --config")
        cfg = load_config(args.config)
    elif args.config:
        cfg = load_config(args.config)
        if cfg.subject != args.command:
            raise ConfigError(f"config subject {cfg.subject!r} does not match command {args.command!r}")
    else:
        cfg = _config_from_args(args)
    cfg = _apply_flags(cfg, args)
    result = run_sweep(cfg)
    _emit(result.text, cfg.out)
    if cfg.mirror and cfg.out and cfg.format == "csv":
        from .sweep import to_jsonl
        Path(cfg.out).with_suffix(".jsonl").write_bytes(to_jsonl(result.kind, result.rows).encode("utf-8"))
    for line in result.summary_lines():
        print(line, file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if args.command == "sqrt":
            return _run_sqrt(args)
        if args.command == "verify":
            return _run_verify(args)
        return _run_grid(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CertificateError as exc:
        print(f"hard assert violated: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    raise SystemExit(main())
