"""Interface-fitted triangular meshes of the rectangle and of the waveguide cell.

Each shell is resolved by ``shell_layers + 1`` concentric regular polygons
sharing the same angular vertices, so the thin annulus is filled with
well shaped near-rectangular strips.  Everything else is handed to Jonathan
Shewchuk's ``triangle`` as a planar straight line graph.  Boundary segments
are pre-split at spacing ``h`` and Steiner points on segments are disabled,
so left and right cell boundaries carry identical vertex sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import triangle as tr

from ..params import ModelParams, NoShellsError, admissible_count

MATRIX, SHELL, BALL = 0, 1, 2
REGION_NAMES = {MATRIX: "matrix", SHELL: "shell", BALL: "ball"}
MIN_ANGLE_DEG = 15.0
MESH_HEADER = "contrast-mesh v1"


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class ShellGeometry:
    centers: np.ndarray  # (N, 2)
    R_eps: float
    d_eps: float
    eps: float

    def __post_init__(self):
        if not self.R_eps - self.d_eps > 0:
            raise MeshError("shell thickness exceeds the shell radius")
        if not 2 * self.R_eps < self.eps:
            raise MeshError("shells of neighbouring cells would overlap")

    @property
    def inner_radius(self) -> float:
        return self.R_eps - self.d_eps

    def __len__(self):
        return len(self.centers)


def shell_geometry(params: ModelParams, eps: float) -> ShellGeometry:
    """Shell centers for the rectangle ((i eps, 0), admissible) or the cell ((i eps + eps/2, 0))."""
    dom = params.domain
    if dom.is_waveguide:
        n_cells = 1.0 / eps
        if abs(n_cells - round(n_cells)) > 1e-9:
            raise MeshError(f"1/eps must be an integer on the period cell, got eps={eps}")
        xs = (np.arange(round(n_cells)) + 0.5) * eps
    else:
        N = admissible_count(eps, dom.L_x, 2)
        if N == 0:
            raise NoShellsError(f"no admissible shells for eps={eps}")
        half = (N - 1) // 2
        xs = np.arange(-half, half + 1) * eps
    if min(-dom.d_minus, dom.d_plus) < params.R * eps:
        raise MeshError("shells do not fit between d_minus and d_plus")
    centers = np.column_stack([xs, np.zeros_like(xs)])
    return ShellGeometry(centers, params.R_eps(eps), params.d(eps), eps)


@dataclass
class Mesh:
    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3) int
    regions: np.ndarray  # (nt,) int in {MATRIX, SHELL, BALL}
    bounds: tuple  # (xmin, xmax, ymin, ymax)
    periodic: bool = False  # True for the waveguide period cell
    shells: ShellGeometry | None = None
    n_segments: int = 0

    # boundary bookkeeping -------------------------------------------------
    def _on(self, coord, value, tol=1e-12):
        return np.abs(self.vertices[:, coord] - value) <= tol * max(1.0, abs(value))

    @property
    def dirichlet_vertices(self) -> np.ndarray:
        xmin, xmax, ymin, ymax = self.bounds
        mask = self._on(1, ymin) | self._on(1, ymax)
        if not self.periodic:
            mask |= self._on(0, xmin) | self._on(0, xmax)
        return np.nonzero(mask)[0]

    @property
    def left_vertices(self) -> np.ndarray:
        return np.nonzero(self._on(0, self.bounds[0]))[0]

    @property
    def right_vertices(self) -> np.ndarray:
        return np.nonzero(self._on(0, self.bounds[1]))[0]

    def boundary_edges(self) -> dict:
        """Boundary edges grouped by tag (dirichlet / left / right)."""
        t = self.triangles
        edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        bnd = uniq[counts == 1]
        xmin, xmax, _, _ = self.bounds
        x = self.vertices[bnd, 0]
        left = np.all(np.abs(x - xmin) <= 1e-12, axis=1)
        right = np.all(np.abs(x - xmax) <= 1e-12, axis=1)
        if not self.periodic:
            return {"dirichlet": bnd, "left": bnd[:0], "right": bnd[:0]}
        return {"dirichlet": bnd[~(left | right)], "left": bnd[left], "right": bnd[right]}

    # geometry ---------------------------------------------------------------
    @property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    def min_angle(self) -> float:
        p = self.vertices[self.triangles]
        angles = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cosang = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            angles.append(np.degrees(np.arccos(np.clip(cosang, -1, 1))))
        return float(np.min(angles))

    def region_of_points(self, pts) -> np.ndarray:
        """Region of arbitrary points w.r.t. the polygonal interfaces."""
        pts = np.atleast_2d(pts)
        out = np.full(len(pts), MATRIX)
        if self.shells is None or len(self.shells) == 0:
            return out
        N = self.n_segments
        for c in self.shells.centers:
            d = pts - c
            out[inside_regular_polygon(d, self.shells.R_eps, N)] = SHELL
        for c in self.shells.centers:
            d = pts - c
            out[inside_regular_polygon(d, self.shells.inner_radius, N)] = BALL
        return out

    def check(self) -> list[str]:
        """Violated mesh invariants (empty when the mesh is valid)."""
        problems = []
        if np.any(self.areas <= 1e-14):
            problems.append("degenerate or inverted triangle")
        if self.min_angle() < MIN_ANGLE_DEG:
            problems.append(f"minimum angle {self.min_angle():.2f} below {MIN_ANGLE_DEG}")
        if np.any(self.region_of_points(self.centroids) != self.regions):
            problems.append("triangle centroid region disagrees with its tag")
        if self.periodic:
            yl = np.sort(self.vertices[self.left_vertices, 1])
            yr = np.sort(self.vertices[self.right_vertices, 1])
            if len(yl) != len(yr) or np.max(np.abs(yl - yr), initial=0) > 1e-12:
                problems.append("left and right boundary vertices do not match")
        return problems

    def region_area(self, region: int) -> float:
        return float(self.areas[self.regions == region].sum())

    # io -------------------------------------------------------------------
    def to_text(self) -> str:
        kind = "cell" if self.periodic else "rectangle"
        lines = [MESH_HEADER, f"kind {kind} " + " ".join(f"{b:.17g}" for b in self.bounds),
                 f"{len(self.vertices)} {len(self.triangles)}"]
        lines += [f"{x:.17g} {y:.17g}" for x, y in self.vertices]
        lines += [f"{a} {b} {c} {REGION_NAMES[int(t)]}" for (a, b, c), t in zip(self.triangles, self.regions)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Mesh":
        lines = text.strip().splitlines()
        if lines[0].strip() != MESH_HEADER:
            raise MeshError("not a contrast-mesh v1 file")
        kind, *bounds = lines[1].split()[1:]
        nv, nt = map(int, lines[2].split())
        verts = np.array([[float(v) for v in ln.split()] for ln in lines[3:3 + nv]])
        names = {v: k for k, v in REGION_NAMES.items()}
        tris, regs = [], []
        for ln in lines[3 + nv:3 + nv + nt]:
            a, b, c, tag = ln.split()
            tris.append((int(a), int(b), int(c)))
            regs.append(names[tag])
        return cls(verts, np.array(tris, dtype=int), np.array(regs, dtype=int),
                   tuple(float(b) for b in bounds), periodic=(kind == "cell"))


def inside_regular_polygon(d, rho, N, theta0=0.0) -> np.ndarray:
    """Points ``d`` (relative to the centre) inside the regular N-gon with
    circumradius ``rho`` and a vertex at angle ``theta0``."""
    theta = np.arctan2(d[:, 1], d[:, 0]) - theta0
    step = 2 * math.pi / N
    # angle to the normal of the edge containing this direction
    local = np.mod(theta, step) - step / 2
    proj = np.hypot(d[:, 0], d[:, 1]) * np.cos(local)
    return proj < rho * math.cos(step / 2)


def _split_segment(p, q, h):
    n = max(1, int(math.ceil(np.linalg.norm(np.subtract(q, p)) / h - 1e-9)))
    t = np.linspace(0, 1, n + 1)[:-1]
    return np.outer(1 - t, p) + np.outer(t, q)


def n_polygon_segments(R_eps: float, d_eps: float, h: float, shell_layers: int) -> int:
    return max(32, math.ceil(2 * math.pi * R_eps / h), math.ceil(math.pi * R_eps * shell_layers / d_eps))


def structured_mesh(bounds, h: float, periodic: bool = False) -> Mesh:
    """Right-triangle mesh of a rectangle with nx x ny cells."""
    xmin, xmax, ymin, ymax = bounds
    nx = max(1, math.ceil((xmax - xmin) / h - 1e-9))
    ny = max(1, math.ceil((ymax - ymin) / h - 1e-9))
    x = np.linspace(xmin, xmax, nx + 1)
    y = np.linspace(ymin, ymax, ny + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    tris = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    return Mesh(verts, tris, np.zeros(len(tris), dtype=int), tuple(bounds), periodic=periodic)


def build_mesh(bounds, shells: ShellGeometry | None, h: float, shell_layers: int = 2, *,
               periodic: bool = False) -> Mesh:
    """Conforming mesh of the box ``bounds`` with the given shells resolved."""
    if shells is None or len(shells) == 0:
        return structured_mesh(bounds, h, periodic)
    if shell_layers < 2:
        raise MeshError("need at least two radial layers across the shell")
    if shells.d_eps < 1e-8 * shells.eps:
        raise MeshError("shell thickness below 1e-8*eps; thinner shells are out of scope for the FEM path"
                        " (use the analytic witness instead)")
    if h > shells.eps / 4 * (1 + 1e-12):
        raise MeshError("mesh size must satisfy h <= eps/4")
    xmin, xmax, ymin, ymax = bounds
    corners = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
    outer = np.concatenate([_split_segment(corners[i], corners[(i + 1) % 4], h) for i in range(4)])
    nb = len(outer)
    verts = [outer]
    segs = [np.column_stack([np.arange(nb), (np.arange(nb) + 1) % nb])]
    regions = []
    N = n_polygon_segments(shells.R_eps, shells.d_eps, h, shell_layers)
    ang = 2 * math.pi * np.arange(N) / N
    radii = shells.inner_radius + shells.d_eps * np.arange(shell_layers + 1) / shell_layers
    offset = nb
    max_area = h * h / 2
    for c in shells.centers:
        for rho in radii:
            ring = c + rho * np.column_stack([np.cos(ang), np.sin(ang)])
            verts.append(ring)
            segs.append(offset + np.column_stack([np.arange(N), (np.arange(N) + 1) % N]))
            offset += N
        # region seeds: between polygons at half an angular step
        mid_ang = math.pi / N
        for lo_r, hi_r in zip(radii[:-1], radii[1:]):
            rr = 0.5 * (lo_r + hi_r) * math.cos(math.pi / N)
            regions.append([c[0] + rr * math.cos(mid_ang), c[1] + rr * math.sin(mid_ang), SHELL, max_area])
        regions.append([c[0], c[1], BALL, max_area])
    # matrix seed: just inside the lower-left corner
    regions.append([xmin + 1e-3 * h, ymin + 1e-3 * h, MATRIX, max_area])
    pslg = {"vertices": np.concatenate(verts), "segments": np.concatenate(segs),
            "regions": np.array(regions)}
    out = tr.triangulate(pslg, "pq20aYAQ")
    mesh = Mesh(out["vertices"], out["triangles"].astype(int),
                out["triangle_attributes"][:, 0].round().astype(int), tuple(bounds),
                periodic=periodic, shells=shells, n_segments=N)
    # orient counter-clockwise
    neg = mesh.areas < 0
    mesh.triangles[neg] = mesh.triangles[neg][:, [0, 2, 1]]
    return mesh


def mesh_for(params: ModelParams, eps: float, h: float, shell_layers: int = 2) -> Mesh:
    dom = params.domain
    shells = shell_geometry(params, eps)
    return build_mesh(dom.bounds(), shells, h, shell_layers, periodic=dom.is_waveguide)
