"""Command-line entry point: ``bosonrpa <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import List, Optional

from .config import MODES, load_config_file, make_config
from .errors import BosonRPAError
from .report import report_to_json, table_to_csv, table_to_json
from . import runs


def _count(text: str) -> int:
    """Integer that also accepts scientific notation such as ``1e12``."""
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(value)


EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    size = common.add_mutually_exclusive_group()
    size.add_argument("--n-particles", type=_count, help="reference particle number N (hbar = N^-1/3)")
    size.add_argument("--k-fermi", type=float, help="Fermi radius; N is the lattice count inside it")
    common.add_argument("--m-patches", type=int, help="number of patches M (even)")
    common.add_argument("--delta", type=float, help="cutoff exponent: keep patches with k.omega >= N^-delta")
    common.add_argument("--potential", help="coulomb | zero | indicator:radius=R,strength=V | table:PATH")
    common.add_argument("--k-min", type=float)
    common.add_argument("--k-max", type=float)
    common.add_argument("--k-steps", type=int)
    common.add_argument("--k-direction", help="direction of the |k| sweep, 'x y z'")
    common.add_argument("--k-list", help="explicit modes, 'x y z; x y z; ...'")
    common.add_argument("--k-cutoff", type=float, help="lattice-sum radius for energy totals")
    common.add_argument("--corridor", type=float, help="corridor half-width between patches (paircount)")
    common.add_argument("--rank-one", choices=("paired", "joint"), help="rank-one structure for spectra")
    common.add_argument("--n-random", type=int, help="randomized modes in validate")
    common.add_argument("--tol", help="tolerance overrides for validate, 'name=value,...'")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="bosonrpa", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "spectrum": "single-boson excitation energies of every branch",
        "plasmon": "continuum and finite-M Coulomb plasmon curve",
        "energy": "finite-M and continuum correlation energy",
        "paircount": "exact lattice pair counts against flat-box estimates",
        "validate": "run the invariant suite; non-zero exit on failure",
    }
    for name in MODES:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


_FLAG_KEYS = (
    "n_particles", "k_fermi", "m_patches", "delta", "potential", "k_min", "k_max", "k_steps",
    "k_direction", "k_list", "k_cutoff", "corridor", "rank_one", "n_random", "seed", "out", "format",
)


def _config_from_args(args):
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {key: getattr(args, key) for key in _FLAG_KEYS}
    overrides["tolerances"] = args.tol
    overrides["mode"] = args.mode
    for key in ("n_particles", "k_fermi"):
        # a size given on the command line replaces either size from the file
        if overrides[key] is not None:
            file_values.pop("k_fermi" if key == "n_particles" else "n_particles", None)
    return make_config(file_values, **overrides)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_bytes(text.encode())
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except (BosonRPAError, ValueError, OSError) as exc:
        print(f"bosonrpa: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if config.mode == "energy":
            rep, out, meta = runs.run_energy(config)
            if config.format == "json":
                _emit(report_to_json(out, meta), config.out)
            else:
                _emit(table_to_csv(runs.energy_table(rep, meta)), config.out)
            return EXIT_OK
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = {
                "spectrum": runs.run_spectrum,
                "plasmon": runs.run_plasmon,
                "paircount": runs.run_paircount,
                "validate": runs.run_validate,
            }[config.mode](config)
        for w in caught:
            print(f"bosonrpa: warning: {w.message}", file=sys.stderr)
    except BosonRPAError as exc:
        print(f"bosonrpa: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL if not isinstance(exc, ValueError) else EXIT_USAGE

    _emit(table_to_json(table) if config.format == "json" else table_to_csv(table), config.out)
    if config.mode == "validate":
        failed = [row[0] for row in table.rows if not row[3]]
        for name in failed:
            print(f"bosonrpa: check failed: {name}", file=sys.stderr)
        return EXIT_CHECK_FAILED if failed else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
