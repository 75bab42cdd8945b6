"""Regenerate the synthetic corpora bundled under src/expertrec/data/."""

import argparse
from pathlib import Path

from expertrec.synthetic import write_bundled

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=None,
                    help="write here instead of the package data directory")
    args = ap.parse_args()
    for name, path in write_bundled(args.out_dir).items():
        print(f"{name}: {path}")
