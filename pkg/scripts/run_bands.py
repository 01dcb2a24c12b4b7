"""Floquet-Bloch bands of the periodic waveguide and the gap near q.

    python scripts/run_bands.py --eps 0.25 0.125 --phi-count 33 --out bands.csv
"""

import argparse
import csv

from contrast_spectra.bands import compare_limit, sweep
from contrast_spectra.limit import waveguide_limit
from contrast_spectra.params import DomainSpec, canonical


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=float, default=5.0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--d-minus", type=float, default=-1.0)
    ap.add_argument("--d-plus", type=float, default=1.0)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.25, 0.125])
    ap.add_argument("--phi-count", type=int, default=33)
    ap.add_argument("--h-over-eps", type=float, default=0.125)
    ap.add_argument("--window", type=float, nargs=2, default=[0.0, 12.0])
    ap.add_argument("--out", help="CSV file for the raw band values")
    args = ap.parse_args()

    dom = DomainSpec("waveguide", 1.0, args.d_minus, args.d_plus)
    params = canonical(args.q, args.r, domain=dom)
    limit = waveguide_limit(args.q, args.r, args.d_minus, args.d_plus)
    print(f"# limit: alpha1={limit.alpha1:.10g} gap={limit.gap}")
    writer = None
    if args.out:
        fh = open(args.out, "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(["eps", "phi", "k", "lambda"])
    print("eps,band1_bottom,gap_lo,gap_hi,hausdorff")
    for eps in args.eps:
        b = sweep(params, eps, args.h_over_eps * eps, args.phi_count)
        rep = compare_limit(b, limit, tuple(args.window))
        print(f"{eps:.17g},{rep['band1_bottom']:.10g},{rep.get('gap_lo')},{rep.get('gap_hi')},{rep['hausdorff']:.6g}")
        if writer:
            for phi, vals in zip(b.phi_grid, b.values):
                for k, lam in enumerate(vals, 1):
                    writer.writerow([f"{eps:.17g}", f"{phi:.17g}", k, f"{lam:.17g}"])
    if writer:
        fh.close()


if __name__ == "__main__":
    main()
