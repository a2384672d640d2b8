"""Monte Carlo statistics of epsilon for random-phase cyclic designs."""

import argparse

from cyclic_designs import approx, basisgen


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", nargs="+", default=["2:20", "3:20", "4:30"], help="dim:k pairs")
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("dim,k,mean,stderr,(d-1)/(2(k+1)),2(d-1)/(k+1)")
    for case in args.cases:
        d, k = (int(x) for x in case.split(":"))
        rep = approx.monte_carlo_epsilon(basisgen.basis_for_dim(d), k, args.samples, seed=args.seed)
        print(f"{d},{k},{rep.mean_epsilon:.5f},{rep.stderr:.5f},{rep.derived_mean:.5f},{rep.predicted_mean:.5f}")


if __name__ == "__main__":
    main()
