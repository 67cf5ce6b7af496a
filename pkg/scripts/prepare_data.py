"""Write headed CSV copies of the UCI tables used in the experiments.

No network is needed: the tables are read from the KEEL mirrors bundled in
the ``keel-ds`` and ``imbalanced-databases`` wheels (``pip install keel-ds
imbalanced-databases``).  If you already have the UCI files, any headed CSV
with the label in the last column works with the CLI directly.

    python scripts/prepare_data.py --out data
"""

import argparse
import csv
from importlib import resources
from pathlib import Path

TABLES = {
    # name: (package, resource path, header, keep columns from)
    "haberman": ("keel_ds", "data/imbalanced/raw/haberman.dat",
                 ["age", "year", "nodes", "survival"], 0),
    "mammographic": ("keel_ds", "data/balanced/raw/mammographic.dat",
                     ["birads", "age", "shape", "margin", "density", "severity"], 0),
    "magic": ("keel_ds", "data/balanced/raw/magic.dat",
              ["fLength", "fWidth", "fSize", "fConc", "fConc1", "fAsym", "fM3Long",
               "fM3Trans", "fAlpha", "fDist", "class"], 0),
    # first column of the UCI glass file is a row id
    "glass": ("imbalanced_databases", "data/glass/glass.data.txt",
              ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe", "type"], 1),
}


def convert(name: str, out_dir: Path) -> Path:
    package, rel, header, first = TABLES[name]
    text = resources.files(package).joinpath(rel).read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")][first:]
        if len(cells) != len(header):
            raise ValueError(f"{name}: unexpected row {line!r}")
        rows.append(cells)
    path = out_dir / f"{name}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data")
    ap.add_argument("names", nargs="*", default=sorted(TABLES))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        path = convert(name, out)
        print(f"{name}: {sum(1 for _ in path.open()) - 1} rows -> {path}")


if __name__ == "__main__":
    main()
