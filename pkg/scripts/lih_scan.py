"""LiH scan in a two-orbital active space (orbital 0 frozen) at r = 2."""
import argparse
from pathlib import Path

from qachem.pipeline import ScanSpec, distance_grid, rows_to_csv, run_scan


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results/lih.csv"))
    args = p.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    spec = ScanSpec("LiH", distance_grid(0.8, 3.0, args.steps), r=args.r, frozen=(0,),
                    active=(1, 2), solver="sa", seed=args.seed)
    rows = run_scan(spec)
    args.out.write_text(rows_to_csv(rows))
    for row in rows:
        print(f"d={row.distance:.3f} HF={row.e_hf:.6f} exact={row.e_exact:.6f} "
              f"anneal={row.e_anneal:.6f} {row.status}")


if __name__ == "__main__":
    main()
