"""``corrwork``: sweep the correlation cost of interacting pairs and write CSV.

Exit status: 0 on success, 2 for usage errors, 3 when a grid cell fails a
numerical check (the cell is named on stderr).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import sweeps

EPILOG = """\
grids accept comma lists and inclusive ranges start:stop:step, e.g.
  --t 0.1:1:0.1   --w-rel 0.01,0.05:1:0.05   --eps 0:-1:-0.1

examples:
  corrwork --system two-qubit --alpha-ii 0.5
  corrwork --system fermion --eps-even 1.0 --eps-odd 0.5 --t 0.1:1:0.1 --w-rel 0.05:1:0.05
  corrwork --system fermion --kind thermal --eps-even 0.5 --eps-odd 0.25
  corrwork --system boson --eps 0.5 --w 0.1:2:0.1

CORRWORK_THREADS caps the number of worker processes.
"""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="corrwork", epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Minimal work cost of correlating two interacting subsystems.")
    p.add_argument("--system", choices=sweeps.SYSTEMS,
                   help="two-qubit protocol, fermionic modes or bosonic modes (required)")
    p.add_argument("--config", metavar="FILE", help="JSON file with default values; flags override it")
    p.add_argument("--omega", type=float, help="mode frequency (default 1)")
    p.add_argument("--eps", help="coupling grid for two-qubit (default 0:-1:-0.1) and boson (default 0.5)")
    p.add_argument("--eps-even", type=float, help="fermionic pairing coupling (default 0.5)")
    p.add_argument("--eps-odd", type=float, help="fermionic hopping coupling (default 0.25)")
    p.add_argument("--t", help="temperature grid")
    w = p.add_mutually_exclusive_group()
    w.add_argument("--w", help="absolute work grid")
    w.add_argument("--w-rel", help="work grid in units of W_min (fermions only)")
    p.add_argument("--alpha-ii", type=float, help="step II fraction for two-qubit sweeps (default 0.5)")
    p.add_argument("--kind", choices=sweeps.KINDS,
                   help="fermions: optimized correlations (default) or thermal-state correlations")
    p.add_argument("--scale", help="coupling scale grid for --kind thermal (default 0:2:0.05)")
    p.add_argument("--output", "-o", help="CSV path (default: stdout)")
    return p


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise sweeps.ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise sweeps.ConfigError("config", f"invalid JSON in {path}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise sweeps.ConfigError("config", "top level must be an object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_config(argv) -> sweeps.SweepConfig:
    """Merge config file and flags (flags win) into a validated SweepConfig."""
    args = build_parser().parse_args(argv)
    values = _load_config(args.config) if args.config else {}
    for key, val in vars(args).items():
        if key != "config" and val is not None:
            values[key] = val
    if values.get("w") is not None and values.get("w_rel") is not None:
        # a flag for one replaces a file value for the other
        flag = "w" if args.w is not None else ("w_rel" if args.w_rel is not None else None)
        if flag is not None:
            values.pop("w_rel" if flag == "w" else "w")
    return sweeps.build_config(values)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        print("corrwork: error: --system is required (see --help)", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except sweeps.ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"corrwork: error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = sweeps.run_sweep(cfg)
    except sweeps.ConfigError as exc:
        print(f"corrwork: error: {exc}", file=sys.stderr)
        return 2
    except (sweeps.NumericalFailure, ArithmeticError, ValueError) as exc:
        print(f"corrwork: numerical failure: {exc}", file=sys.stderr)
        return 3
    try:
        text = sweeps.write_csv(cfg, rows)
    except OSError as exc:
        print(f"corrwork: cannot write {cfg.output_path}: {exc.strerror}", file=sys.stderr)
        return 1
    if cfg.output_path == "-":
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
