"""Smallest eigenpairs of a sparse symmetric/Hermitian pencil (K, M)."""

from __future__ import annotations

import gc
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import DiscreteSystem

log = logging.getLogger(__name__)

DEFAULT_SHIFT = -1.0
# residual bound ||Kv - lam Mv|| <= FEM_TOL ||Mv||
FEM_TOL = 1e-6
# Above this size the sparse LU factors are released eagerly (see solve_smallest).
GC_DOFS = 20_000


class SolverError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    shift: float
    empty: bool = False


def _residuals(K, M, vals, vecs):
    KV = K @ vecs
    MV = M @ vecs
    R = KV - MV * vals[None, :]
    return np.linalg.norm(R, axis=0) / np.maximum(np.linalg.norm(MV, axis=0), 1e-300)


def _inverse_subspace_step(K, M, lu, V):
    W = lu.solve(np.asarray(M @ V))
    W, _ = np.linalg.qr(W)
    Kr = W.conj().T @ (K @ W)
    Mr = W.conj().T @ (M @ W)
    Kr = 0.5 * (Kr + Kr.conj().T)
    Mr = 0.5 * (Mr + Mr.conj().T)
    vals, Y = sla.eigh(Kr, Mr)
    return vals, W @ Y


def _dense(K, M, k):
    Kd = K.toarray() if sp.issparse(K) else np.asarray(K)
    Md = M.toarray() if sp.issparse(M) else np.asarray(M)
    vals, vecs = sla.eigh(Kd, Md, subset_by_index=[0, k - 1])
    return vals, vecs


def solve_smallest(system: DiscreteSystem, k: int, tol: float = FEM_TOL, *, seed: int = 0,
                   shift: float = DEFAULT_SHIFT, maxiter: int | None = None) -> EigenResult:
    """k smallest generalized eigenpairs by shift-invert Lanczos (ARPACK).

    The shift sits below the spectrum (K is positive semidefinite), so
    K - shift*M is definite.  If the factorisation fails the shift is
    perturbed; after three failures the solver gives up.
    """
    n = system.n_dofs
    if n == 0:
        return EigenResult(np.zeros(0), np.zeros((0, 0)), np.zeros(0), shift, empty=True)
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= {n} retained dofs, got k={k}")
    K, M = system.K, system.M
    if k >= n - 1:
        # ARPACK needs k < n - 1; such tiny systems are solved densely
        vals, vecs = _dense(K, M, k)
        return EigenResult(vals, vecs, _residuals(K, M, vals, vecs), shift)
    complex_field = np.iscomplexobj(K.data) or np.iscomplexobj(M.data)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    if complex_field:
        v0 = v0 + 1j * rng.standard_normal(n)
    sigma = shift
    scale = max(1.0, abs(shift))
    last_err = None
    for attempt in range(3):
        try:
            lu = spla.splu((K - sigma * M).tocsc())
            if not np.all(np.isfinite(lu.U.diagonal())) or np.min(np.abs(lu.U.diagonal())) == 0:
                raise RuntimeError("singular factor")
            dtype = complex if complex_field else float
            opinv = spla.LinearOperator((n, n), matvec=lu.solve, dtype=dtype)
            ncv = min(n, max(2 * k + 1, k + 20))
            vals, vecs = spla.eigsh(K, k=k, M=M, sigma=sigma, which="LM", OPinv=opinv,
                                    v0=v0, ncv=ncv, tol=min(tol * 1e-3, 1e-10), maxiter=maxiter)
            break
        except spla.ArpackNoConvergence as exc:
            res = _residuals(K, M, exc.eigenvalues, exc.eigenvectors) if len(exc.eigenvalues) else None
            raise SolverError("eigen-iteration did not converge", residuals=res) from exc
        except RuntimeError as exc:
            last_err = exc
            sigma = shift - 0.1 * scale * (attempt + 1)
            log.warning("factorisation at shift %g failed (%s); retrying at %g", shift, exc, sigma)
    else:
        raise SolverError(f"factorisation failed after 3 shifts: {last_err}")
    order = np.argsort(vals)
    vals, vecs = np.real(vals[order]), vecs[:, order]
    res = _residuals(K, M, vals, vecs)
    # the Ritz vectors are accurate for the shift-inverted operator; components
    # along stiff high-frequency modes are removed by a few inverse subspace
    # steps followed by a Rayleigh-Ritz projection
    for _ in range(3):
        if np.all(res <= tol):
            break
        vals, vecs = _inverse_subspace_step(K, M, lu, vecs)
        res = _residuals(K, M, vals, vecs)
    # eigsh keeps the factorisation alive through reference cycles; on large
    # meshes a band sweep would otherwise hold one LU per quasimomentum
    del lu, opinv
    if n >= GC_DOFS:
        gc.collect()
    if np.any(res > tol):
        raise SolverError(f"residuals above tolerance: max {res.max():.3e}", residuals=res)
    return EigenResult(vals, vecs, res, sigma)
