"""Learning-time bounds and held-out error against training size.

    python3 scripts/run_bounds_curve.py --data data/magic.csv --sizes 100,500,1000,5000
"""

import argparse
from pathlib import Path

from mrc.data import load_csv
from mrc.evaluation import bounds_curve
from mrc.learn import TrainConfig
from mrc.persist import write_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default="data/magic.csv")
    ap.add_argument("--sizes", default="100,500,1000,5000")
    ap.add_argument("--seeds", type=int, default=1, help="repeat with seeds 0..N-1")
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    data = load_csv(args.data)
    sizes = [int(s) for s in args.sizes.split(",")]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.data).stem
    for seed in range(args.seeds):
        curve = bounds_curve(data, sizes, TrainConfig(lam=0.25), seed=seed)
        path = out_dir / f"curve_{stem}_seed{seed}.csv"
        write_curve(curve, path)
        print(f"seed {seed} -> {path}")
        for r in curve.rows:
            print(f"  n={r.n:6d}  lower {r.lower:.4f}  error {r.test_error:.4f}  upper {r.upper:.4f}")


if __name__ == "__main__":
    main()
