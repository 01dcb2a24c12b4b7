"""Problem parameters, contrast scaling laws and the derived coupling constants.

Every ε-dependent coefficient is a pure power law ``c * eps**gamma``.  From the
laws for the shell thickness d, the shell stiffness alpha and the ball density
beta we derive

    q_eps = alpha * n / (R * d * eps * beta)
    r_eps = R**n * kappa_n * eps * beta

and their limits as eps -> 0 by exponent algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

EXP_TOL = 1e-12

RECTANGLE = "bounded-rectangle"
WAVEGUIDE = "waveguide"
_DOMAIN_ALIASES = {"rectangle": RECTANGLE, RECTANGLE: RECTANGLE, WAVEGUIDE: WAVEGUIDE}


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n == 2:
        return math.pi
    if n == 3:
        return 4.0 * math.pi / 3.0
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Area of the unit sphere in R^n (equals n times the ball volume)."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True)
class ScalingLaw:
    coefficient: float
    exponent: float

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ValueError(f"scaling coefficient must be positive, got {self.coefficient}")

    def __call__(self, eps: float) -> float:
        return self.coefficient * eps ** self.exponent

    def scaled(self, factor: float) -> "ScalingLaw":
        return ScalingLaw(self.coefficient * factor, self.exponent)


@dataclass(frozen=True)
class DomainSpec:
    """Reference geometry.

    The bounded case is the rectangle (-L_x/2, L_x/2) x (d_minus, d_plus); the
    waveguide is R x (d_minus, d_plus) with period cell (0, 1) x (d_minus, d_plus).
    Gamma is always the line x_2 = 0.
    """

    kind: str = RECTANGLE
    L_x: float = 1.0
    d_minus: float = -1.0
    d_plus: float = 1.0

    def __post_init__(self):
        kind = _DOMAIN_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not self.d_minus < 0 < self.d_plus:
            raise ValueError("domain requires d_minus < 0 < d_plus")
        if not self.L_x > 0:
            raise ValueError("domain requires L_x > 0")

    @property
    def height(self) -> float:
        return self.d_plus - self.d_minus

    @property
    def is_waveguide(self) -> bool:
        return self.kind == WAVEGUIDE

    @property
    def period(self) -> float:
        return 1.0

    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) of the rectangle or of the period cell."""
        if self.is_waveguide:
            return 0.0, 1.0, self.d_minus, self.d_plus
        return -self.L_x / 2, self.L_x / 2, self.d_minus, self.d_plus

    @property
    def gamma_length(self) -> float:
        return self.period if self.is_waveguide else self.L_x


@dataclass(frozen=True)
class LimitPair:
    q: float  # may be math.inf
    r: float

    def __post_init__(self):
        if not (self.q >= 0 and self.r >= 0):
            raise ValueError("limits must be nonnegative")
        if math.isinf(self.r):
            raise ValueError("r must be finite")


@dataclass(frozen=True)
class ModelParams:
    R: float
    d_law: ScalingLaw
    alpha_law: ScalingLaw
    beta_law: ScalingLaw
    domain: DomainSpec = field(default_factory=DomainSpec)
    n: int = 2

    def R_eps(self, eps: float) -> float:
        return self.R * eps

    def d(self, eps: float) -> float:
        return self.d_law(eps)

    def alpha(self, eps: float) -> float:
        return self.alpha_law(eps)

    def beta(self, eps: float) -> float:
        return self.beta_law(eps)

    def with_laws(self, **laws) -> "ModelParams":
        vals = dict(R=self.R, d_law=self.d_law, alpha_law=self.alpha_law,
                    beta_law=self.beta_law, domain=self.domain, n=self.n)
        vals.update(laws)
        return ModelParams(**vals)


def canonical(q: float, r: float, *, n: int = 2, R: float = 0.25, d_coeff: float = 1.0 / 32,
              d_exp: float = 2.0, domain: DomainSpec | None = None) -> ModelParams:
    """Scaling laws realising the target limits (q, r) with d = d_coeff * eps**d_exp.

    For finite q > 0 and r > 0 the laws satisfy q_eps == q and r_eps == r for
    every eps.  q = 0 and q = inf are realised by a positive/negative power of
    eps in q_eps; r = 0 by a bounded ball density.
    """
    if r < 0 or math.isinf(r) or q < 0:
        raise ValueError("need q in [0, inf] and r in [0, inf)")
    kappa = unit_ball_volume(n)
    if r > 0:
        beta = ScalingLaw(r / (R ** n * kappa), -1.0)
    else:
        beta = ScalingLaw(1.0, 0.0)
    # q_eps = (alpha_c n / (R d_c beta_c)) * eps**(alpha_e - d_e - 1 - beta_e)
    base = d_exp + 1.0 + beta.exponent
    if math.isinf(q):
        shift, scale = -1.0, 1.0
    elif q == 0:
        shift, scale = (d_exp - 1.0 - beta.exponent) / 2.0, 1.0
    else:
        shift, scale = 0.0, q
    alpha = ScalingLaw(scale * R * d_coeff * beta.coefficient / n, base + shift)
    return ModelParams(R=R, d_law=ScalingLaw(d_coeff, d_exp), alpha_law=alpha,
                       beta_law=beta, domain=domain or DomainSpec(), n=n)


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")


def q_eps(params: ModelParams, eps: float) -> float:
    _check_eps(eps)
    return (params.alpha(eps) * params.n
            / (params.R * params.d(eps) * eps * params.beta(eps)))


def r_eps(params: ModelParams, eps: float) -> float:
    _check_eps(eps)
    return params.R ** params.n * unit_ball_volume(params.n) * eps * params.beta(eps)


def _power_limit(coefficient: float, exponent: float) -> float:
    if exponent > EXP_TOL:
        return 0.0
    if exponent < -EXP_TOL:
        return math.inf
    return coefficient


def limits(params: ModelParams) -> LimitPair:
    """Exact limits (q, r) of q_eps and r_eps as eps -> 0."""
    p = params
    q_coeff = p.alpha_law.coefficient * p.n / (p.R * p.d_law.coefficient * p.beta_law.coefficient)
    q_exp = p.alpha_law.exponent - p.d_law.exponent - 1.0 - p.beta_law.exponent
    r_coeff = p.R ** p.n * unit_ball_volume(p.n) * p.beta_law.coefficient
    r_exp = 1.0 + p.beta_law.exponent
    r = _power_limit(r_coeff, r_exp)
    if math.isinf(r):
        raise ValueError("r = lim r_eps is infinite; the ball mass is unbounded")
    return LimitPair(_power_limit(q_coeff, q_exp), r)


def validate(params: ModelParams) -> list[str]:
    """Names of the violated standing assumptions; empty when all hold."""
    p = params
    report = []
    if not (isinstance(p.n, int) and p.n >= 2):
        report.append("dimension: n must be an integer >= 2")
    if not 0 < p.R < 0.5:
        report.append(f"radius: R = {p.R} not in (0, 1/2)")
    if not p.d_law.exponent > 1.0 + EXP_TOL:
        report.append("thickness: d_eps must be o(eps) (d exponent > 1)")
    # (d_eps)^2 / alpha_eps -> 0 requires a strictly positive net exponent
    if not 2.0 * p.d_law.exponent - p.alpha_law.exponent > EXP_TOL:
        report.append("shell-concentration: (d_eps)^2/alpha_eps does not tend to 0")
    if 1.0 + p.beta_law.exponent < -EXP_TOL:
        report.append("finite-r: r_eps diverges")
    return report


def admissible_count(eps: float, gamma_length: float, n: int = 2) -> int:
    """Number of lattice centers eps*Z^(n-1) in the cube of (n-1)-volume
    gamma_length (centered at 0) at distance >= eps*sqrt(n)/2 from its border."""
    side = gamma_length ** (1.0 / (n - 1))
    reach = side / 2 - eps * math.sqrt(n) / 2
    if reach < 0:
        return 0
    per_axis = 2 * math.floor(reach / eps + 1e-12) + 1
    return per_axis ** (n - 1)


def shell_mass(params: ModelParams, eps: float, gamma_length: float, *,
               count: float | None = None, thickness: float | None = None) -> float:
    """Total weighted mass beta_eps * sum |B_i| of the heavy balls.

    ``count`` and ``thickness`` override the admissible-center count and d_eps.
    """
    _check_eps(eps)
    n = params.n
    N = admissible_count(eps, gamma_length, n) if count is None else count
    if N <= 0:
        raise NoShellsError(f"no admissible shell centers for eps={eps}, |Gamma|={gamma_length}")
    d = params.d(eps) if thickness is None else thickness
    return params.beta(eps) * (params.R_eps(eps) - d) ** n * unit_ball_volume(n) * N


class NoShellsError(ValueError):
    """Raised when the index set of admissible shells is empty."""
