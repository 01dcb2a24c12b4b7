"""P1 finite elements for the epsilon-level operator."""

from .assembly import DiscreteSystem, apply_dirichlet, apply_floquet, assemble
from .eigen import SolverError, solve_smallest
from .mesh import Mesh, ShellGeometry, build_mesh, shell_geometry
from .pipeline import eps_spectrum, rayleigh_witness
