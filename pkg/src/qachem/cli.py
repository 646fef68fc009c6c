"""Command line: ``qachem scan`` and ``qachem scaling``.

Exit status: 0 success, 1 invalid input, 2 runtime failure (including any
scan row marked failed).
"""
from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numba
import numpy as np
import scipy

from . import __version__
from .anneal import AnnealConfig
from .pipeline import (CSV_COLUMNS, DEFAULT_GRIDS, MOLECULES, SOLVERS, UNITS, ScanSpec,
                       ValidationError, derived_seed, distance_grid, rows_to_csv, run_scan, scaling_report,
                       scaling_to_csv)
from .quad import PENALTY_POLICIES

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--molecule", default="H2", help="H2, LiH or a geometry file (El x y z lines)")
    p.add_argument("--basis", default="sto-3g")
    p.add_argument("--dmin", type=float, default=None)
    p.add_argument("--dmax", type=float, default=None)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--distance", type=float, default=None,
                   help="single bond length (overrides the grid)")
    p.add_argument("--unit", choices=UNITS, default="angstrom")
    p.add_argument("--active", type=_int_list, default=None, help="active orbital indices, e.g. 1,2")
    p.add_argument("--frozen", type=_int_list, default=(), help="frozen orbital indices, e.g. 0")
    p.add_argument("--encoding", type=str.upper, choices=("JW", "BK"), default="BK")
    p.add_argument("--no-taper", action="store_true")
    p.add_argument("--penalty", choices=PENALTY_POLICIES, default="tight")
    p.add_argument("--chimera-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None,
                   help="CSV path; a JSON manifest is written next to it")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qachem", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qachem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="bond-length scan")
    _common(scan)
    scan.add_argument("--r", type=int, default=1)
    scan.add_argument("--solver", choices=SOLVERS, default="exact")
    scan.add_argument("--reads", type=int, default=1000)
    scan.add_argument("--sweeps", type=int, default=1000)
    scan.add_argument("--beta-start", type=float, default=0.1)
    scan.add_argument("--beta-end", type=float, default=50.0)
    scan.add_argument("--schedule", choices=("linear", "geometric"), default="geometric")
    scan.add_argument("--eps", type=float, default=1e-4)
    scan.add_argument("--embed-k", type=int, default=0)
    scan.add_argument("--chain-strength", type=float, default=None)
    scan.add_argument("--solve-embedded", action="store_true")
    scan.add_argument("--dump-hamiltonian", type=Path, default=None, metavar="DIR")
    scan.add_argument("--dump-ising", type=Path, default=None, metavar="DIR")

    scaling = sub.add_parser("scaling", help="qubit counts against r (compile path only)")
    _common(scaling)
    scaling.add_argument("--r", type=_int_list, default=(2, 4, 8, 16))
    scaling.add_argument("--embed-k", type=int, default=100)
    scaling.add_argument("--grow-chimera", action="store_true",
                         help="enlarge the target until the native clique layout fits")
    return parser


def _grid(args) -> tuple[float, ...]:
    if args.molecule not in MOLECULES and not Path(args.molecule).is_file():
        raise ValidationError(f"unknown molecule {args.molecule!r}: use one of "
                              f"{sorted(MOLECULES)} or a geometry file")
    if args.distance is not None:
        return (args.distance,)
    lo, hi = DEFAULT_GRIDS.get(args.molecule, (None, None))
    dmin = args.dmin if args.dmin is not None else lo
    dmax = args.dmax if args.dmax is not None else hi
    if dmin is None or dmax is None:
        raise ValidationError("--dmin/--dmax (or --distance) required for geometry files")
    if args.unit == "bohr" and args.dmin is None and args.dmax is None:
        raise ValidationError("default grids are in angstrom; give --dmin/--dmax in bohr")
    return distance_grid(dmin, dmax, args.steps)


def _spec(args) -> ScanSpec:
    scan = args.command == "scan"
    anneal = AnnealConfig(args.reads, args.sweeps, args.beta_start, args.beta_end, args.schedule,
                          args.seed) if scan else AnnealConfig(seed=args.seed)
    return ScanSpec(
        molecule=args.molecule, distances=_grid(args), unit=args.unit, basis=args.basis,
        r=args.r if scan else 1, frozen=tuple(args.frozen),
        active=tuple(args.active) if args.active is not None else None,
        encoding=args.encoding, taper=not args.no_taper,
        solver=args.solver if scan else "exact", anneal=anneal, penalty=args.penalty,
        eps=args.eps if scan else 1e-4, embed_k=args.embed_k, chimera_size=args.chimera_size,
        chain_strength=args.chain_strength if scan else None,
        solve_embedded=args.solve_embedded if scan else False, seed=args.seed)


def versions() -> dict:
    return {"qachem": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def _write_manifest(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def _scan(args, spec: ScanSpec) -> int:
    t0 = time.perf_counter()
    out = open(args.out, "w") if args.out else sys.stdout
    header = rows_to_csv([])
    out.write(header)
    out.flush()

    def emit(row):
        out.write(rows_to_csv([row]).split("\n", 1)[1])
        out.flush()
        logging.info("d=%g status=%s E=%r", row.distance, row.status, row.e_anneal)

    try:
        rows = run_scan(spec, args.dump_hamiltonian, args.dump_ising, on_row=emit)
    finally:
        if out is not sys.stdout:
            out.close()
    failed = [r for r in rows if r.status != "ok"]
    if args.out:
        _write_manifest(manifest_path(args.out), {
            "command": "scan", "argv": args.argv, "spec": asdict(spec), "versions": versions(),
            "seeds": {"base": spec.seed,
                      "per_distance": [derived_seed(spec.seed, i) for i in range(len(rows))]},
            "columns": CSV_COLUMNS,
            "wall_time": {"total": time.perf_counter() - t0,
                          "per_row": [r.wall_time for r in rows]},
            "failed_rows": len(failed)})
    return EXIT_RUNTIME if failed else EXIT_OK


def _scaling(args, spec: ScanSpec) -> int:
    t0 = time.perf_counter()
    rows, slope = scaling_report(spec, args.r, args.embed_k, args.grow_chimera)
    text = scaling_to_csv(rows)
    if args.out:
        args.out.write_text(text)
        _write_manifest(manifest_path(args.out), {
            "command": "scaling", "argv": args.argv, "spec": asdict(spec), "r": list(args.r),
            "embed_k": args.embed_k, "versions": versions(), "seeds": {"base": spec.seed},
            "loglog_slope": slope, "wall_time": {"total": time.perf_counter() - t0}})
    else:
        sys.stdout.write(text)
    print(f"# log-log slope of physical qubits vs r: {slope:.3f}", file=sys.stderr)
    return EXIT_RUNTIME if any(r.status != "ok" for r in rows) else EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = _spec(args)
        if args.command == "scaling" and (not args.r or min(args.r) < 1):
            raise ValidationError("--r needs positive integers")
    except (ValidationError, ValueError) as exc:
        print(f"qachem: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
        return _scan(args, spec) if args.command == "scan" else _scaling(args, spec)
    except ValidationError as exc:
        print(f"qachem: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report and map to the runtime exit code
        logging.getLogger("qachem").exception("run failed")
        print(f"qachem: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
