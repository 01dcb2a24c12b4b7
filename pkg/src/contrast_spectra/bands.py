"""Floquet-Bloch band structure of the epsilon-level waveguide and gap comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fem.eigen import FEM_TOL
from .fem.pipeline import cell_eigenvalues
from .hausdorff import clip_intervals, hausdorff_intervals, merge_intervals
from .limit import WaveguideLimit
from .params import ModelParams

# Splittings between folded bands produced by the mesh (which is not exactly
# eps-periodic) shrink with h and are far below this relative width.
GAP_RTOL = 1e-3


@dataclass
class BandStructure:
    phi_grid: np.ndarray
    values: np.ndarray  # (n_phi, k)
    bands: list = field(default_factory=list)
    refined_bands: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    unresolved_gaps: list = field(default_factory=list)

    @classmethod
    def from_values(cls, phi_grid, values, *, gap_rtol: float = GAP_RTOL) -> "BandStructure":
        phi_grid = np.asarray(phi_grid, dtype=float)
        values = np.sort(np.asarray(values, dtype=float), axis=1)
        bands = [(float(values[:, j].min()), float(values[:, j].max())) for j in range(values.shape[1])]
        refined = [_refine_band(phi_grid, values[:, j]) for j in range(values.shape[1])]
        gaps = gap_report(bands, min_rel_width=gap_rtol)
        tiny = [g for g in gap_report(bands) if g not in gaps]
        return cls(phi_grid, values, bands, refined, gaps, tiny)

    @property
    def top_band_bottom(self) -> float:
        return self.bands[-1][0]

    def lipschitz_estimate(self) -> np.ndarray:
        """Largest |d lambda_k / d phi| seen between neighbouring grid points, per band."""
        if len(self.phi_grid) < 2:
            return np.zeros(self.values.shape[1])
        return np.max(np.abs(np.diff(self.values, axis=0)) / np.diff(self.phi_grid)[:, None], axis=0)


def _parabola_vertex(x, y):
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    B = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / denom
    if A == 0:
        return None
    xv = -B / (2 * A)
    if not (min(x0, x2) <= xv <= max(x0, x2)):
        return None
    C = y0 - A * x0 ** 2 - B * x0
    return A * xv * xv + B * xv + C


def _refine_band(phi, lam):
    lo, hi = float(lam.min()), float(lam.max())
    if len(phi) >= 3:
        i = int(np.argmin(lam))
        if 0 < i < len(phi) - 1:
            v = _parabola_vertex(phi[i - 1:i + 2], lam[i - 1:i + 2])
            if v is not None:
                lo = min(lo, v)
        i = int(np.argmax(lam))
        if 0 < i < len(phi) - 1:
            v = _parabola_vertex(phi[i - 1:i + 2], lam[i - 1:i + 2])
            if v is not None:
                hi = max(hi, v)
    return lo, hi


def sweep(params: ModelParams, eps: float, h: float, phi_count: int = 33, k: int | None = None, *,
          tol: float = FEM_TOL, seed: int = 0, shell_layers: int = 2) -> BandStructure:
    """Bands on a uniform phi grid of [0, pi] (the other half follows by symmetry)."""
    if not params.domain.is_waveguide:
        raise ValueError("sweep needs a waveguide domain")
    inv = 1.0 / eps
    if abs(inv - round(inv)) > 1e-9 or round(inv) < 1:
        raise ValueError(f"1/eps must be a positive integer, got eps={eps}")
    if k is None:
        k = int(round(inv)) + 6
    phis = np.linspace(0.0, math.pi, phi_count)
    cache: dict = {}
    values = np.array([cell_eigenvalues(params, eps, h, phi, k, tol=tol, seed=seed,
                                        shell_layers=shell_layers, _cache=cache) for phi in phis])
    return BandStructure.from_values(phis, values)


def gap_report(bands, window=None, *, min_rel_width: float = 0.0):
    """Maximal open intervals not covered by the bands (touching bands leave no gap).

    Gaps of width at most ``min_rel_width * max(1, |lower edge|)`` are dropped.
    """
    merged = merge_intervals(bands)
    gaps = [(b1, a2) for (_, b1), (a2, _) in zip(merged[:-1], merged[1:])
            if a2 - b1 > min_rel_width * max(1.0, abs(b1))]
    if window is not None:
        lo, hi = window
        gaps = [(max(a, lo), min(b, hi)) for a, b in gaps if b > lo and a < hi]
    return gaps


def _limit_intervals(limit: WaveguideLimit, hi: float):
    return [(a, min(b, hi)) for a, b in limit.spectrum if a <= hi]


def compare_limit(bands: BandStructure, limit: WaveguideLimit, window) -> dict:
    """Endpoint deltas and the Hausdorff distance of the spectra inside ``window``.

    Above the bottom of the highest computed band the epsilon spectrum is not
    fully known, so the comparison window is cut there (guard band).
    """
    lo, hi = window
    hi_eff = min(hi, bands.top_band_bottom)
    win = (lo, hi_eff)
    eps_set = clip_intervals(merge_intervals(bands.bands[:-1] + [(bands.bands[-1][0], bands.bands[-1][0])]), win)
    lim_set = clip_intervals(_limit_intervals(limit, hi_eff), win)
    report = {"window_lo": lo, "window_hi": hi, "compared_up_to": hi_eff,
              "alpha1": limit.alpha1, "band1_bottom": bands.bands[0][0],
              "delta_alpha1": abs(bands.bands[0][0] - limit.alpha1)}
    report["hausdorff"] = hausdorff_intervals(eps_set, lim_set) if eps_set and lim_set else math.inf
    eps_gaps = bands.gaps
    report["eps_gaps"] = eps_gaps
    report["unresolved_eps_gaps"] = bands.unresolved_gaps
    gap = limit.gap
    if gap is None:
        report["limit_gap"] = None
        report["gap_note"] = "limit spectrum has no gap"
        return report
    report["limit_gap"] = gap
    if gap[1] <= lo or gap[0] >= hi_eff:
        report["gap_note"] = "gap outside window"
        return report
    overlapping = [g for g in eps_gaps if g[1] > gap[0] and g[0] < gap[1]]
    if overlapping:
        g = max(overlapping, key=lambda g: min(g[1], gap[1]) - max(g[0], gap[0]))
        report.update(gap_lo=g[0], gap_hi=g[1], delta_q=abs(g[0] - gap[0]), delta_alpha2=abs(g[1] - gap[1]),
                      gap_note="eps gap overlaps the limit gap")
    else:
        report.update(gap_lo=None, gap_hi=None, gap_note="no eps gap overlaps the limit gap")
    return report
