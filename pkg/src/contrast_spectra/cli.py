"""Command line entry point: ``contrast-spectra <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__
from .bands import compare_limit, sweep
from .config import ConfigError, load_config, params_from_config
from .dispersion import alpha_of_mu
from .fem.eigen import SolverError
from .fem.mesh import MeshError
from .fem.pipeline import eps_spectrum
from .hausdorff import EmptySetError
from .harness import convergence_study, witness_study
from .limit import TieError, limit_spectrum_cases, waveguide_limit
from .params import NoShellsError, limits, validate
from .roots import BracketError

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER = 0, 2, 3
log = logging.getLogger("contrast_spectra")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _pair(text: str):
    lo, hi = (float(v) for v in text.split(","))
    return lo, hi


def _floats(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


class Output:
    """Collects tables and key-value blocks; mirrors them to --out if given."""

    def __init__(self, out_dir: str | None):
        self.out_dir = out_dir
        self.results: dict = {}
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def table(self, name: str, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        text = buf.getvalue()
        sys.stdout.write(text)
        if self.out_dir:
            with open(os.path.join(self.out_dir, f"{name}.csv"), "w") as fh:
                fh.write(text)
        self.results[name] = [dict(zip(header, (None if v is None else float(v) for v in row))) for row in rows]

    def block(self, name: str, items: dict):
        text = "".join(f"{k}={fmt(v)}\n" for k, v in items.items())
        sys.stdout.write(text)
        if self.out_dir:
            with open(os.path.join(self.out_dir, f"{name}.txt"), "w") as fh:
                fh.write(text)
        self.results[name] = items

    def finish(self, args, cfg):
        if not self.out_dir:
            return
        doc = {"command": args.command, "argv": sys.argv[1:], "config": cfg, "seed": args.seed,
               "versions": {"contrast_spectra": __version__, "numpy": np.__version__,
                            "scipy": scipy.__version__, "python": platform.python_version()},
               "results": self.results}
        with open(os.path.join(self.out_dir, "run.json"), "w") as fh:
            json.dump(doc, fh, indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


# ---------------------------------------------------------------------------


def cmd_validate(args, cfg, out: Output) -> int:
    params = params_from_config(cfg)
    report = validate(params)
    items = {"valid": not report}
    if not report:
        lim = limits(params)
        items.update(q=lim.q, r=lim.r)
    out.block("validate", items)
    for line in report:
        print(f"violation: {line}")
    out.results["violations"] = report
    return EXIT_VALIDATION if report else EXIT_OK


def _checked_params(cfg):
    params = params_from_config(cfg)
    report = validate(params)
    if report:
        raise ConfigError("; ".join(report))
    return params


def cmd_alpha(args, cfg, out: Output) -> int:
    params = params_from_config(cfg)
    dom = params.domain
    lo, hi = args.mu_range
    mus = np.linspace(lo, hi, args.mu_count)
    out.table("alpha", ["mu", "alpha"], [(m, alpha_of_mu(m, dom.d_minus, dom.d_plus)) for m in mus])
    return EXIT_OK


def cmd_limit(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    lim = limits(params)
    dom = params.domain
    if dom.is_waveguide:
        wl = waveguide_limit(lim.q, lim.r, dom.d_minus, dom.d_plus)
        out.block("waveguide_limit", wl.report())
        return EXIT_OK
    s = limit_spectrum_cases(lim.q, lim.r, dom, args.window)
    rows = [(v, m, 0) for v, m in s.points] + [(e, 1, 1) for e in s.essential]
    rows.sort()
    out.table("limit_spectrum", ["value", "multiplicity", "essential_flag"], rows)
    out.results["truncation_note"] = s.truncation_note
    return EXIT_OK


def _first_eps(args):
    if not args.eps_list:
        raise ConfigError("--eps-list is required")
    return args.eps_list[0]


def _h(cfg, eps):
    return float(cfg["fem.h_over_eps"]) * eps


def cmd_eps(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    eps = _first_eps(args)
    s = eps_spectrum(params, eps, _h(cfg, eps), args.k, seed=args.seed,
                     shell_layers=int(cfg["fem.shell_layers"]))
    out.table("eps_spectrum", ["value", "multiplicity", "essential_flag"], [(v, m, 0) for v, m in s.points])
    return EXIT_OK


def _bands(args, cfg, params):
    eps = _first_eps(args)
    k = args.k if args.k_given else None
    return sweep(params, eps, _h(cfg, eps), int(cfg["bands.phi_count"]), k, seed=args.seed,
                 shell_layers=int(cfg["fem.shell_layers"]))


def cmd_bands(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    b = _bands(args, cfg, params)
    rows = [(phi, j + 1, lam) for phi, vals in zip(b.phi_grid, b.values) for j, lam in enumerate(vals)]
    out.table("bands", ["phi", "k", "lambda"], rows)
    return EXIT_OK


def cmd_gap(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    lim = limits(params)
    dom = params.domain
    wl = waveguide_limit(lim.q, lim.r, dom.d_minus, dom.d_plus)
    b = _bands(args, cfg, params)
    window = args.window
    rep = compare_limit(b, wl, window)
    gap = wl.gap
    out.block("gap", {"gap_lo": rep.get("gap_lo"), "gap_hi": rep.get("gap_hi"),
                      "limit_gap_lo": gap[0] if gap else None, "limit_gap_hi": gap[1] if gap else None,
                      "hausdorff": rep["hausdorff"]})
    out.results["comparison"] = rep
    return EXIT_OK


def cmd_converge(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    h_over = float(cfg["fem.h_over_eps"])
    rep = convergence_study(params, sorted(args.eps_list, reverse=True), args.window,
                            lambda e: h_over * e, seed=args.seed)
    out.table("hausdorff", ["eps", "hausdorff"], list(zip(rep.eps_list, rep.distances)))
    out.block("trend", {"monotone_decreasing": rep.monotone_decreasing, "first_violation": rep.first_violation})
    out.results["report"] = json.loads(rep.to_json())
    return EXIT_OK


def cmd_witness(args, cfg, out: Output) -> int:
    params = _checked_params(cfg)
    eps_list = args.eps_list or [2.0 ** -j for j in range(4, 11)]
    rows = witness_study(params, eps_list)
    out.table("witness", ["eps", "witness", "q_eps", "ratio"],
              [(r["eps"], r["witness"], r["q_eps"], r["ratio"]) for r in rows])
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "alpha": cmd_alpha, "limit": cmd_limit, "eps": cmd_eps,
            "bands": cmd_bands, "gap": cmd_gap, "converge": cmd_converge, "witness": cmd_witness}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON configuration file")
    common.add_argument("--out", help="directory for CSV files and the JSON run report")
    common.add_argument("--window", type=_pair, default=(0.0, 50.0), help="lo,hi")
    common.add_argument("--eps-list", type=_floats, default=None, help="v1,v2,...")
    common.add_argument("--k", type=int, default=None, help="number of eigenvalues")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="contrast-spectra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "alpha":
            p.add_argument("--mu-range", type=_pair, default=(-50.0, 50.0))
            p.add_argument("--mu-count", type=int, default=101)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.k_given = args.k is not None
    if args.k is None:
        args.k = 10
    try:
        cfg = load_config(args.config)
        out = Output(args.out)
        code = COMMANDS[args.command](args, cfg, out)
        out.finish(args, cfg)
        return code
    except (ConfigError, TieError, MeshError, NoShellsError, EmptySetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SolverError, BracketError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
