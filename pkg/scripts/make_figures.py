#!/usr/bin/env python3
"""Regenerate the five reference CSV datasets.

Writes figure1.csv .. figure5.csv into the chosen directory (default
figures/).  Thin wrapper over `greensign figure N` so the data is exactly
what the CLI produces.
"""
import argparse
import pathlib
import sys

from greensign.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="figures",
                        help="directory for the CSV files (default figures/)")
    parser.add_argument("--only", type=int, choices=[1, 2, 3, 4, 5],
                        help="regenerate a single dataset")
    args = parser.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    numbers = [args.only] if args.only else [1, 2, 3, 4, 5]
    for n in numbers:
        code = cli_main(["figure", str(n),
                         "--output", str(out / f"figure{n}.csv")])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
