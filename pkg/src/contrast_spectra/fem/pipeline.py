"""End-to-end epsilon-level spectra and the closed-form test-function quotient."""

from __future__ import annotations

import math

import numpy as np

from ..limit import SpectralSet, group_multiplicities
from ..params import ModelParams, unit_ball_volume, unit_sphere_area
from .assembly import apply_dirichlet, apply_floquet, assemble
from .eigen import FEM_TOL, solve_smallest
from .mesh import mesh_for


def default_h(eps: float) -> float:
    return eps / 8


def eps_system(params: ModelParams, eps: float, h: float, shell_layers: int = 2):
    mesh = mesh_for(params, eps, h, shell_layers)
    system = apply_dirichlet(assemble(mesh, params.alpha(eps), params.beta(eps)), mesh)
    return mesh, system


def eps_eigenvalues(params: ModelParams, eps: float, h: float, k: int, *, tol: float = FEM_TOL,
                    seed: int = 0, shell_layers: int = 2) -> np.ndarray:
    if params.domain.is_waveguide:
        raise ValueError("eps_spectrum works on the bounded rectangle; use bands.sweep for the waveguide")
    _, system = eps_system(params, eps, h, shell_layers)
    return solve_smallest(system, k, tol, seed=seed).values


def eps_spectrum(params: ModelParams, eps: float, h: float, k: int, *, tol: float = FEM_TOL,
                 seed: int = 0, shell_layers: int = 2) -> SpectralSet:
    """The k smallest eigenvalues of the epsilon-level operator on the rectangle."""
    vals = eps_eigenvalues(params, eps, h, k, tol=tol, seed=seed, shell_layers=shell_layers)
    window = (min(0.0, float(vals[0])), float(vals[-1]))
    return SpectralSet(group_multiplicities(vals, rtol=1e-9), [], window,
                       f"{k} smallest eigenvalues, h={h:g}")


def cell_eigenvalues(params: ModelParams, eps: float, h: float, phi: float, k: int, *,
                     tol: float = FEM_TOL, seed: int = 0, shell_layers: int = 2, _cache=None):
    """k smallest eigenvalues of the period-cell operator at quasimomentum phi."""
    if _cache is not None and "system" in _cache:
        mesh, system = _cache["mesh"], _cache["system"]
    else:
        mesh, system = eps_system(params, eps, h, shell_layers)
        if _cache is not None:
            _cache.update(mesh=mesh, system=system)
    reduced = apply_floquet(system, mesh, phi)
    return solve_smallest(reduced, k, tol, seed=seed).values


# ---------------------------------------------------------------------------
# analytic witness


def _shell_mass_2d(R: float, d: float) -> float:
    """2 pi * int_{R-d}^{R} G(rho)^2 rho d rho with G = ln(rho/R)/ln((R-d)/R)."""
    a = R - d
    L = math.log(a / R)

    def prim(rho):
        t = math.log(rho / R)
        return 0.5 * rho * rho * (t * t - t + 0.5)

    return 2 * math.pi * (prim(R) - prim(a)) / (L * L)


def _shell_mass_3d(R: float, d: float) -> float:
    """4 pi * int G^2 rho^2 with G = (rho^-1 - R^-1) / ((R-d)^-1 - R^-1)."""
    a = R - d
    c = 1.0 / a - 1.0 / R

    def prim(rho):
        # integrand (1/rho - 1/R)^2 rho^2 = 1 - 2 rho/R + rho^2/R^2
        return rho - rho * rho / R + rho ** 3 / (3 * R * R)

    return 4 * math.pi * (prim(R) - prim(a)) / (c * c)


def witness_parts(params: ModelParams, eps: float):
    """(numerator, denominator) of the Rayleigh quotient of the per-shell test function.

    The function equals 1 on the ball, 0 outside the shell, and interpolates by
    the radial fundamental solution G across the shell.
    """
    n = params.n
    R = params.R_eps(eps)
    d = params.d(eps)
    a = params.alpha(eps)
    b = params.beta(eps)
    if n == 2:
        num = a * 2 * math.pi / math.log(R / (R - d))
        shell = _shell_mass_2d(R, d)
    elif n == 3:
        num = a * (n - 2) * unit_sphere_area(n) / ((R - d) ** (2 - n) - R ** (2 - n))
        shell = _shell_mass_3d(R, d)
    else:
        raise ValueError("the witness is implemented for n = 2 and n = 3")
    den = b * (R - d) ** n * unit_ball_volume(n) + shell
    return num, den


def rayleigh_witness(params: ModelParams, eps: float) -> float:
    num, den = witness_parts(params, eps)
    return num / den
