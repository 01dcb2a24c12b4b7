"""Experiment orchestration: epsilon sweeps against the limit spectrum and witness tables."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .fem.eigen import SolverError
from .fem.mesh import MeshError
from .fem.pipeline import default_h, eps_eigenvalues, rayleigh_witness
from .hausdorff import EmptySetError, hausdorff
from .limit import limit_spectrum_cases
from .params import ModelParams, NoShellsError, admissible_count, limits, q_eps

log = logging.getLogger(__name__)


@dataclass
class HausdorffReport:
    eps_list: list
    window: tuple
    distances: list
    eps_sets: list = field(default_factory=list)
    limit_set: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    monotone_decreasing: bool = True
    first_violation: int | None = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.eps_list[:-1], self.eps_list[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        if any(d < 0 for d in self.distances):
            raise ValueError("distances are nonnegative")

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["window"] = list(self.window)
        return json.dumps(d, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "HausdorffReport":
        d = json.loads(text)
        d["window"] = tuple(d["window"])
        return cls(**d)


def trend(distances) -> tuple[bool, int | None]:
    """(strictly decreasing?, index of the first value that fails to decrease)."""
    for i in range(1, len(distances)):
        if not distances[i] < distances[i - 1]:
            return False, i
    return True, None


def eps_window_values(params: ModelParams, eps: float, h: float, window, *, seed: int = 0,
                      k_start: int | None = None, k_max: int = 400) -> np.ndarray:
    """All epsilon-level eigenvalues in ``window``; k grows until one exceeds window[1]."""
    k = k_start or admissible_count(eps, params.domain.L_x, 2) + 6
    while True:
        vals = eps_eigenvalues(params, eps, h, k, seed=seed)
        if vals[-1] > window[1] or k >= k_max:
            break
        k = min(2 * k, k_max)
    if vals[-1] <= window[1]:
        raise SolverError(f"window not exhausted with k={k} eigenvalues")
    lo, hi = window
    return vals[(vals >= lo) & (vals <= hi)]


def convergence_study(params: ModelParams, eps_list, window, h_rule=default_h, *, seed: int = 0,
                      include_essential: bool = True) -> HausdorffReport:
    """Hausdorff distances between sigma(A^eps) and sigma(A_{q,r}) restricted to ``window``."""
    lim = limits(params)
    limit_set = limit_spectrum_cases(lim.q, lim.r, params.domain, window)
    Y = limit_set.as_set() if include_essential else np.array([v for v, _ in limit_set.points])
    used, dists, sets, skipped, notes = [], [], [], [], []
    for eps in eps_list:
        try:
            X = eps_window_values(params, eps, h_rule(eps), window, seed=seed)
        except (MeshError, NoShellsError) as exc:
            skipped.append({"eps": eps, "reason": str(exc)})
            continue
        try:
            dist = hausdorff(X, Y)
        except EmptySetError:
            dist = math.inf
            notes.append(f"eps={eps}: one side is empty in the window; distance recorded as inf")
        used.append(eps)
        dists.append(dist)
        sets.append([float(x) for x in X])
    ok, first = trend(dists)
    if not ok:
        log.warning("Hausdorff distances do not decrease monotonically (first violation at %s)", first)
    return HausdorffReport(used, tuple(window), dists, sets, [float(y) for y in Y], skipped, ok, first,
                           notes + [limit_set.truncation_note])


def witness_study(params: ModelParams, eps_list) -> list[dict]:
    rows = []
    for eps in eps_list:
        w = rayleigh_witness(params, eps)
        qe = q_eps(params, eps)
        rows.append({"eps": eps, "witness": w, "q_eps": qe, "ratio": w / qe})
    return rows
