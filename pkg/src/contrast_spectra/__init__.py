"""Spectra of double-contrast operators with thin shells near a hyperplane.

Finite element spectra at finite epsilon, semi-analytic limit spectra on a
rectangle and on a periodic waveguide, and the Hausdorff comparison of both.
"""

__version__ = "0.1.0"

from .params import (DomainSpec, LimitPair, ModelParams, ScalingLaw, canonical, limits, q_eps,
                     r_eps, shell_mass, validate)
from .dispersion import DispersionSpec, alpha_of_mu, dispersion_value, transversal_eigs
from .limit import (SpectralSet, WaveguideLimit, limit_spectrum_cases, rect_point_spectrum,
                    steklov_spectrum, waveguide_limit)
from .hausdorff import hausdorff
