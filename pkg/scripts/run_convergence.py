"""Hausdorff distance between the epsilon-level and limit spectra on a shrinking eps sweep.

    python scripts/run_convergence.py --q 5 --r 1 --eps 0.25 0.125 0.0625 --window 0 4.5
"""

import argparse
import json

from contrast_spectra.harness import convergence_study
from contrast_spectra.params import canonical


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=float, default=5.0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.25, 0.125, 0.0625])
    ap.add_argument("--window", type=float, nargs=2, default=[0.0, 4.5])
    ap.add_argument("--h-over-eps", type=float, default=0.125)
    ap.add_argument("--out", help="write the full report as JSON here")
    args = ap.parse_args()

    params = canonical(args.q, args.r)
    eps_list = sorted(args.eps, reverse=True)
    rep = convergence_study(params, eps_list, tuple(args.window), lambda e: args.h_over_eps * e)
    print("eps,hausdorff,n_eigenvalues")
    for eps, dist, vals in zip(rep.eps_list, rep.distances, rep.eps_sets):
        print(f"{eps:.17g},{dist:.17g},{len(vals)}")
    print(f"# monotone_decreasing={rep.monotone_decreasing}")
    for s in rep.skipped:
        print(f"# skipped eps={s['eps']}: {s['reason']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(json.loads(rep.to_json()), fh, indent=2)


if __name__ == "__main__":
    main()
