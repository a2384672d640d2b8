"""Scan (dim, k) cells for cyclic 2-designs and write a CSV."""

import argparse
import sys

from cyclic_designs import search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--ks", type=int, nargs="+", default=list(range(2, 9)))
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()
    cells = search.grid_scan(args.dims, args.ks, restarts=args.restarts, seed=args.seed)
    text = search.scan_to_csv(cells)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
