import math

import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from contrast_spectra.fem.assembly import DiscreteSystem, apply_dirichlet, assemble
from contrast_spectra.fem.eigen import SolverError, solve_smallest
from contrast_spectra.fem.mesh import structured_mesh

PI2 = math.pi ** 2


def square_system(h):
    m = structured_mesh((0, 1, 0, 1), h)
    return apply_dirichlet(assemble(m, 1.0, 1.0), m)


def pencil(K, M):
    K, M = sp.csr_matrix(K), sp.csr_matrix(M)
    return DiscreteSystem(K, M, sp.identity(K.shape[0], format="csr"))


def test_unit_square_values_and_multiplicity():
    vals = solve_smallest(square_system(1 / 32), 4).values
    assert vals[:3] == pytest.approx([2 * PI2, 5 * PI2, 5 * PI2], rel=1e-2)
    assert vals[3] == pytest.approx(8 * PI2, rel=1e-2)
    # one-directional diagonals split the double eigenvalue at O(h^2)
    coarse = solve_smallest(square_system(1 / 16), 3).values
    split_fine, split_coarse = vals[2] - vals[1], coarse[2] - coarse[1]
    assert 3.0 <= split_coarse / split_fine <= 5.0
    assert split_fine < 0.01 * (vals[1] - vals[0])


def test_second_order_convergence():
    errs = [solve_smallest(square_system(h), 1).values[0] - 2 * PI2 for h in (1 / 8, 1 / 16, 1 / 32)]
    assert all(e > 0 for e in errs)
    for a, b in zip(errs[:-1], errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_galerkin_monotone_on_nested_meshes():
    prev = None
    for h in (1 / 4, 1 / 8, 1 / 16):
        vals = solve_smallest(square_system(h), 4).values
        if prev is not None:
            assert np.all(vals <= prev + 1e-6 * prev)
        prev = vals


def test_identity_pencil():
    n = 40
    res = solve_smallest(pencil(sp.identity(n), sp.identity(n)), 5)
    assert res.values == pytest.approx(np.ones(5), abs=1e-12)


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 10))
def test_dense_oracle_12(seed, k):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((12, 12))
    K = A @ A.T
    B = rng.standard_normal((12, 12))
    M = B @ B.T + 12 * np.eye(12)
    ref = sla.eigh(K, M, eigvals_only=True)[:k]
    got = solve_smallest(pencil(K, M), k, tol=1e-9).values
    assert np.max(np.abs(got - ref)) <= 1e-10 * max(1.0, np.abs(ref).max())


def test_residuals_and_determinism():
    s = square_system(1 / 16)
    a = solve_smallest(s, 6, seed=3)
    b = solve_smallest(s, 6, seed=3)
    assert np.array_equal(a.values, b.values)
    assert np.all(a.residuals <= 1e-6)
    MV = s.M @ a.vectors
    assert np.allclose(a.vectors.T @ MV, np.eye(6), atol=1e-8)


def test_shift_on_an_eigenvalue_is_perturbed():
    n = 60
    K = sp.diags(np.arange(1.0, n + 1))
    res = solve_smallest(pencil(K, sp.identity(n)), 3, shift=1.0)
    assert res.values == pytest.approx([1.0, 2.0, 3.0], abs=1e-10)
    assert res.shift != 1.0


def test_k_out_of_range():
    s = square_system(1 / 4)
    with pytest.raises(ValueError):
        solve_smallest(s, s.n_dofs + 1)
    with pytest.raises(ValueError):
        solve_smallest(s, 0)


def test_unreachable_tolerance_reports_residuals():
    s = square_system(1 / 16)
    with pytest.raises(SolverError) as info:
        solve_smallest(s, 3, tol=1e-30)
    assert info.value.residuals is not None
