"""P1 assembly of the weighted stiffness and mass forms and boundary reductions.

A :class:`DiscreteSystem` keeps the assembled pair on its current degrees of
freedom together with a prolongation ``P`` so that ``u_vertices = P @ u``.
Dirichlet elimination drops columns of ``P``; the Floquet identification
merges each right-boundary column into its left partner with the factor
exp(-i phi), i.e. u(1, y) = exp(-i phi) u(0, y).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import BALL, SHELL, Mesh


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteSystem:
    K: sp.csr_matrix
    M: sp.csr_matrix
    P: sp.csr_matrix  # vertices x dofs
    scalar_field: str = "real"
    dirichlet_applied: bool = False
    phi: float | None = None

    @property
    def n_dofs(self) -> int:
        return self.K.shape[0]

    @property
    def empty(self) -> bool:
        return self.n_dofs == 0

    def hermitian_residual(self) -> float:
        def rel(A):
            nrm = spla.norm(A)
            return 0.0 if nrm == 0 else spla.norm(A - A.conj().T) / nrm
        return max(rel(self.K), rel(self.M))


def element_matrices(p: np.ndarray):
    """Unit-coefficient P1 stiffness and mass for triangles ``p`` of shape (nt, 3, 2)."""
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    area = 0.5 * np.abs(det)
    if np.any(area < 1e-14):
        raise AssemblyError("degenerate triangle (area < 1e-14)")
    # gradients of the barycentric coordinates: rows of inv(J)^T
    inv = np.empty((len(p), 2, 2))
    inv[:, 0, 0] = e2[:, 1] / det
    inv[:, 0, 1] = -e2[:, 0] / det
    inv[:, 1, 0] = -e1[:, 1] / det
    inv[:, 1, 1] = e1[:, 0] / det
    g12 = inv  # grad(lambda_1), grad(lambda_2) as rows
    grads = np.concatenate([-(g12[:, 0] + g12[:, 1])[:, None, :], g12], axis=1)
    Ke = area[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    Me = area[:, None, None] / 12.0 * (np.ones((3, 3)) + np.eye(3))
    return Ke, Me


def assemble(mesh: Mesh, alpha_eps: float, beta_eps: float) -> DiscreteSystem:
    """Stiffness weight alpha on shells and 1 elsewhere; mass weight beta on balls, 1 elsewhere."""
    p = mesh.vertices[mesh.triangles]
    Ke, Me = element_matrices(p)
    kw = np.where(mesh.regions == SHELL, alpha_eps, 1.0)
    mw = np.where(mesh.regions == BALL, beta_eps, 1.0)
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = len(mesh.vertices)
    K = sp.coo_matrix(((kw[:, None, None] * Ke).ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix(((mw[:, None, None] * Me).ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K = 0.5 * (K + K.T)
    M = 0.5 * (M + M.T)
    return DiscreteSystem(K.tocsr(), M.tocsr(), sp.identity(n, format="csr"))


def _restrict(system: DiscreteSystem, keep: np.ndarray, **changes) -> DiscreteSystem:
    K = system.K[keep][:, keep]
    M = system.M[keep][:, keep]
    return replace(system, K=K.tocsr(), M=M.tocsr(), P=system.P[:, keep].tocsr(), **changes)


def apply_dirichlet(system: DiscreteSystem, mesh: Mesh) -> DiscreteSystem:
    """Eliminate every degree of freedom that touches a Dirichlet vertex (idempotent)."""
    bad = np.zeros(system.P.shape[0], dtype=bool)
    bad[mesh.dirichlet_vertices] = True
    touched = np.asarray(abs(system.P[bad]).sum(axis=0)).ravel() > 0
    keep = np.nonzero(~touched)[0]
    return _restrict(system, keep, dirichlet_applied=True)


def floquet_pairs(mesh: Mesh, tol: float = 1e-12):
    """(left, right) vertex index pairs with equal y coordinates."""
    left, right = mesh.left_vertices, mesh.right_vertices
    yl, yr = mesh.vertices[left, 1], mesh.vertices[right, 1]
    ol, orr = np.argsort(yl), np.argsort(yr)
    if len(left) != len(right) or np.max(np.abs(yl[ol] - yr[orr]), initial=0.0) > tol:
        raise AssemblyError("left and right trace meshes do not match")
    return left[ol], right[orr]


def apply_floquet(system: DiscreteSystem, mesh: Mesh, phi: float) -> DiscreteSystem:
    """Quasi-periodic identification u(0, y) = exp(i phi) u(1, y)."""
    if not mesh.periodic:
        raise AssemblyError("Floquet reduction needs a periodic cell mesh")
    left, right = floquet_pairs(mesh)
    # map vertex -> dof column (only trivial columns of P are expected here)
    P = system.P.tocsc()
    col_of_vertex = -np.ones(P.shape[0], dtype=int)
    single = np.nonzero(np.diff(P.indptr) == 1)[0]
    col_of_vertex[P.indices[P.indptr[single]]] = single
    cl, cr = col_of_vertex[left], col_of_vertex[right]
    ok = (cl >= 0) & (cr >= 0)
    if np.any((cl >= 0) != (cr >= 0)):
        raise AssemblyError("left/right degrees of freedom are inconsistently constrained")
    cl, cr = cl[ok], cr[ok]
    n = system.n_dofs
    phase = cmath.exp(-1j * phi)
    real = math.isclose(phase.imag, 0.0, abs_tol=1e-15)
    factor = round(phase.real) if real else phase
    dtype = float if real else complex
    keep = np.setdiff1d(np.arange(n), cr)
    new_index = -np.ones(n, dtype=int)
    new_index[keep] = np.arange(len(keep))
    rows = np.concatenate([keep, cr])
    cols = np.concatenate([new_index[keep], new_index[cl]])
    vals = np.concatenate([np.ones(len(keep), dtype=dtype), np.full(len(cr), factor, dtype=dtype)])
    T = sp.csr_matrix((vals, (rows, cols)), shape=(n, len(keep)))
    TH = T.conj().T.tocsr()
    K = TH @ system.K @ T
    M = TH @ system.M @ T
    K = 0.5 * (K + K.conj().T)
    M = 0.5 * (M + M.conj().T)
    return replace(system, K=K.tocsr(), M=M.tocsr(), P=(system.P @ T).tocsr(),
                   scalar_field="real" if real else "complex", phi=phi)
