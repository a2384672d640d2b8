"""Regenerate numerical simplex-2-design bases and save them as JSON."""

import argparse
import json
import pathlib
import time

from cyclic_designs import basisgen


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 6, 7])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="bases")
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for d in args.dims:
        start = time.perf_counter()
        b = basisgen.numeric_basis(d, seed=args.seed)
        secs = time.perf_counter() - start
        (out / f"basis_d{d}.json").write_text(json.dumps(b.to_json(), indent=1))
        print(f"d={d} residual={b.residual:.2e} certified={b.certified} time={secs:.2f}s")


if __name__ == "__main__":
    main()
