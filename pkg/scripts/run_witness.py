"""Closed-form Rayleigh quotient of the shell test function against q^eps.

    python scripts/run_witness.py --q 5 --r 1 --jmin 4 --jmax 10
"""

import argparse

from contrast_spectra.harness import witness_study
from contrast_spectra.params import canonical


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=float, default=5.0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=2, help="space dimension (2 or 3)")
    ap.add_argument("--jmin", type=int, default=4)
    ap.add_argument("--jmax", type=int, default=10)
    args = ap.parse_args()

    params = canonical(args.q, args.r, n=args.n)
    rows = witness_study(params, [2.0 ** -j for j in range(args.jmin, args.jmax + 1)])
    print("eps,witness,q_eps,ratio")
    for row in rows:
        print(",".join(f"{row[k]:.17g}" for k in ("eps", "witness", "q_eps", "ratio")))


if __name__ == "__main__":
    main()
