"""Logical variables and embedded physical qubits against r for H2."""
import argparse
from pathlib import Path

from qachem.pipeline import ScanSpec, scaling_report, scaling_to_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--r", type=int, nargs="+", default=[2, 4, 8, 16])
    p.add_argument("--embed-k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results/scaling.csv"))
    args = p.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    rows, slope = scaling_report(ScanSpec("H2", (0.7414,), seed=args.seed), args.r,
                                 args.embed_k, grow_chimera=True)
    args.out.write_text(scaling_to_csv(rows))
    for row in rows:
        print(f"r={row.r:2d} logical={row.logical_vars:4d} physical={row.physical_qubits} "
              f"C{row.chimera_size} terms {row.terms_pre_reduction}/{row.terms_post_reduction}")
    print(f"log-log slope {slope:.2f}")


if __name__ == "__main__":
    main()
