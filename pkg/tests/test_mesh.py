import math

import numpy as np
import pytest

from contrast_spectra.fem.mesh import (
    BALL, MATRIX, MIN_ANGLE_DEG, SHELL, Mesh, MeshError, ShellGeometry, build_mesh, mesh_for,
    n_polygon_segments, shell_geometry, structured_mesh,
)
from contrast_spectra.params import DomainSpec, canonical

UNIT = (-0.5, 0.5, -0.5, 0.5)


def one_shell(eps=0.5, R=0.25, d=1 / 32):
    return ShellGeometry(np.array([[0.0, 0.0]]), R * eps, d, eps)


def test_structured_mesh_without_shells():
    m = build_mesh((0, 1, 0, 1), None, 0.1)
    assert np.all(m.regions == MATRIX)
    assert m.check() == []
    assert m.min_angle() == pytest.approx(45.0)
    assert m.areas.sum() == pytest.approx(1.0, rel=1e-14)


def test_single_shell_area():
    shells = one_shell()
    m = build_mesh(UNIT, shells, 1 / 16)
    Re, d = shells.R_eps, shells.d_eps
    exact = math.pi * (Re ** 2 - (Re - d) ** 2)
    assert abs(m.region_area(SHELL) - exact) <= 0.02 * exact
    assert m.region_area(BALL) == pytest.approx(math.pi * (Re - d) ** 2, rel=0.02)
    assert m.areas.sum() == pytest.approx(1.0, rel=1e-12)
    assert m.check() == []
    assert m.min_angle() >= MIN_ANGLE_DEG
    assert m.n_segments >= max(32, math.ceil(2 * math.pi * Re / (1 / 16)))


def test_refinement_quadruples_triangles():
    shells = one_shell()
    coarse = build_mesh(UNIT, shells, 1 / 16)
    fine = build_mesh(UNIT, shells, 1 / 32)
    assert 3.0 <= len(fine.triangles) / len(coarse.triangles) <= 5.0


def test_shell_layers_resolve_thickness():
    shells = one_shell()
    m = build_mesh(UNIT, shells, 1 / 16, shell_layers=3)
    c = m.centroids[m.regions == SHELL]
    rho = np.hypot(c[:, 0], c[:, 1])
    # three distinct radial strips of centroids
    assert len(np.unique(np.round(rho / (shells.d_eps / 3)))) >= 3


def test_canonical_rectangle_mesh():
    p = canonical(5.0, 1.0)
    m = mesh_for(p, 0.25, 0.25 / 8)
    geo = shell_geometry(p, 0.25)
    assert len(geo) == 3
    assert geo.centers[:, 0] == pytest.approx([-0.25, 0.0, 0.25])
    assert m.check() == []
    # matrix region keeps its full area up to the polygonal approximation
    inner = math.pi * geo.inner_radius ** 2 * 3
    assert m.region_area(BALL) == pytest.approx(inner, rel=0.01)


def test_waveguide_cell_mesh():
    p = canonical(5.0, 1.0, domain=DomainSpec("waveguide", 1.0, -1.0, 1.0))
    geo = shell_geometry(p, 0.25)
    assert geo.centers[:, 0] == pytest.approx([0.125, 0.375, 0.625, 0.875])
    m = mesh_for(p, 0.25, 0.25 / 8)
    assert m.periodic and m.check() == []
    yl = np.sort(m.vertices[m.left_vertices, 1])
    yr = np.sort(m.vertices[m.right_vertices, 1])
    assert np.array_equal(yl, yr)
    with pytest.raises(MeshError):
        shell_geometry(p, 0.3)


def test_mesh_errors():
    with pytest.raises(MeshError):
        ShellGeometry(np.zeros((1, 2)), 0.1, 0.2, 0.5)
    with pytest.raises(MeshError):
        ShellGeometry(np.zeros((1, 2)), 0.3, 0.01, 0.5)
    with pytest.raises(MeshError):
        build_mesh(UNIT, ShellGeometry(np.zeros((1, 2)), 0.125, 1e-10, 0.5), 1 / 16)
    with pytest.raises(MeshError):
        build_mesh(UNIT, one_shell(), 0.2)  # h > eps/4
    with pytest.raises(MeshError):
        build_mesh(UNIT, one_shell(), 1 / 16, shell_layers=1)


def test_text_round_trip():
    m = build_mesh(UNIT, one_shell(), 1 / 8)
    text = m.to_text()
    assert text.splitlines()[0] == "contrast-mesh v1"
    back = Mesh.from_text(text)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.triangles, m.triangles)
    assert np.array_equal(back.regions, m.regions)
    assert back.bounds == m.bounds
    with pytest.raises(MeshError):
        Mesh.from_text("something else\n")


def test_check_detects_bad_tags():
    m = build_mesh(UNIT, one_shell(), 1 / 16)
    bad = Mesh(m.vertices, m.triangles, np.zeros_like(m.regions), m.bounds, shells=m.shells,
               n_segments=m.n_segments)
    assert any("region" in s for s in bad.check())


def test_boundary_sets():
    m = structured_mesh((0, 1, -1, 1), 0.25, periodic=True)
    assert len(m.left_vertices) == len(m.right_vertices) == 9
    # periodic cell: only top and bottom are Dirichlet
    ys = m.vertices[m.dirichlet_vertices, 1]
    assert np.all(np.isclose(np.abs(ys), 1.0))
    r = structured_mesh((0, 1, 0, 1), 0.25)
    assert len(r.dirichlet_vertices) == 16


def test_polygon_segment_rule():
    assert n_polygon_segments(0.125, 1 / 32, 1 / 16, 2) == 32
    assert n_polygon_segments(0.125, 1 / 512, 1 / 64, 2) == math.ceil(math.pi * 0.125 * 2 * 512)
