"""Transversal interface problem on (d_-, d_+).

    -u'' = lam u  on (d_-, 0) and (0, d_+),      u(d_-) = u(d_+) = 0,
    u continuous at 0,   u'(-0) - u'(+0) = mu u(0).

Writing the eigenfunction as a pair of sines that vanish at the outer ends,
the jump condition becomes the scalar dispersion relation F(lam) = mu with

    F(lam) = s (cot(s |d_-|) + cot(s d_+)),    s = sqrt(lam),

continued by coth for lam < 0.  F is strictly decreasing between its poles,
which are the Dirichlet eigenvalues of the two half intervals.  When a pole
is shared by both halves the odd-type eigenfunction vanishes at 0 and is an
eigenvalue for every mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .roots import root_between_singularities

COINCIDENCE_RTOL = 1e-10
POLE_RTOL = 1e-14


class PoleProximityError(ValueError):
    def __init__(self, lam: float, pole: float):
        super().__init__(f"lambda={lam!r} is at the dispersion pole {pole!r}")
        self.lam = lam
        self.pole = pole


def _check_geometry(d_minus: float, d_plus: float) -> None:
    if not d_minus < 0 < d_plus:
        raise ValueError("need d_minus < 0 < d_plus")


def _branch(lam, a):
    """s cot(s a) extended to lam <= 0 (array friendly, no pole checks)."""
    lam = np.asarray(lam, dtype=float)
    out = np.empty_like(lam)
    pos = lam > 0
    neg = lam < 0
    zero = ~(pos | neg)
    s = np.sqrt(lam[pos])
    out[pos] = s / np.tan(s * a)
    sig = np.sqrt(-lam[neg])
    out[neg] = sig / np.tanh(sig * a)
    out[zero] = 1.0 / a
    return out


def dispersion_array(lam, d_minus: float, d_plus: float):
    """Vectorised F without pole checks; values at poles are huge or inf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return _branch(lam, -d_minus) + _branch(lam, d_plus)


def _branch_scalar(lam: float, a: float) -> float:
    if lam > 0:
        s = math.sqrt(lam)
        t = math.tan(s * a)
        return s / t if t != 0 else math.inf
    if lam < 0:
        sig = math.sqrt(-lam)
        return sig / math.tanh(sig * a)
    return 1.0 / a


def _dispersion_scalar(lam: float, d_minus: float, d_plus: float) -> float:
    return _branch_scalar(lam, -d_minus) + _branch_scalar(lam, d_plus)


def dispersion_value(lam: float, d_minus: float, d_plus: float) -> float:
    _check_geometry(d_minus, d_plus)
    if lam > 0:
        for a in (-d_minus, d_plus):
            k = round(math.sqrt(lam) * a / math.pi)
            if k >= 1:
                pole = (k * math.pi / a) ** 2
                if abs(lam - pole) <= POLE_RTOL * pole:
                    raise PoleProximityError(lam, pole)
    return _dispersion_scalar(lam, d_minus, d_plus)


@dataclass(frozen=True)
class Pole:
    value: float
    side: str  # "left", "right" or "both"

    @property
    def coincident(self) -> bool:
        return self.side == "both"


def half_interval_poles(d_minus: float, d_plus: float, window) -> list[Pole]:
    """All half-interval Dirichlet eigenvalues inside ``window`` (closed)."""
    _check_geometry(d_minus, d_plus)
    lo, hi = window
    tagged = []
    for side, a in (("left", -d_minus), ("right", d_plus)):
        kmax = int(math.floor(math.sqrt(max(hi, 0.0)) * a / math.pi)) + 1
        for k in range(1, kmax + 1):
            p = (k * math.pi / a) ** 2
            if lo <= p <= hi:
                tagged.append((p, side))
    tagged.sort()
    poles: list[Pole] = []
    for p, side in tagged:
        if poles and abs(p - poles[-1].value) <= COINCIDENCE_RTOL * p and poles[-1].side != side:
            poles[-1] = Pole(min(p, poles[-1].value), "both")
        else:
            poles.append(Pole(p, side))
    return poles


def first_poles(d_minus: float, d_plus: float, count: int) -> list[Pole]:
    """The ``count`` smallest distinct poles."""
    a = max(-d_minus, d_plus)
    hi = (count * math.pi / a) ** 2 * (1 + 1e-9)
    return half_interval_poles(d_minus, d_plus, (0.0, hi))[:count]


@dataclass(frozen=True)
class DispersionSpec:
    d_minus: float
    d_plus: float
    mu: float

    def __post_init__(self):
        _check_geometry(self.d_minus, self.d_plus)


@dataclass(frozen=True)
class TransversalSpectrum:
    eigenvalues: np.ndarray
    mu_independent_flags: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)


def _root_in_interval(mu: float, d_minus: float, d_plus: float, left: float | None, right: float) -> float:
    """Unique root of F = mu on (left, right); ``left=None`` means -inf."""
    g = lambda x: _dispersion_scalar(x, d_minus, d_plus) - mu
    if left is not None:
        return root_between_singularities(g, left, right)
    if g(0.0) > 0:
        lo = 0.0
    else:
        # F(-s^2) > 2 s, so this point lies strictly left of the root
        sig = max(mu / 2.0, 0.0) + 1.0
        lo = -sig * sig
    return root_between_singularities(g, lo, right, left_value_positive=True)


def iter_poles(d_minus: float, d_plus: float):
    """Distinct poles in increasing order, generated lazily."""
    a, b = -d_minus, d_plus
    j = k = 1
    while True:
        pa, pb = (j * math.pi / a) ** 2, (k * math.pi / b) ** 2
        if abs(pa - pb) <= COINCIDENCE_RTOL * max(pa, pb):
            yield Pole(min(pa, pb), "both")
            j += 1
            k += 1
        elif pa < pb:
            yield Pole(pa, "left")
            j += 1
        else:
            yield Pole(pb, "right")
            k += 1


def transversal_eigs(spec: DispersionSpec, count: int) -> TransversalSpectrum:
    """The ``count`` smallest eigenvalues of the transversal interface problem."""
    if count < 1:
        raise ValueError("count must be >= 1")
    poles = first_poles(spec.d_minus, spec.d_plus, count)
    vals, flags = [], []
    left = None
    for pole in poles:
        vals.append(_root_in_interval(spec.mu, spec.d_minus, spec.d_plus, left, pole.value))
        flags.append(False)
        if pole.coincident:
            vals.append(pole.value)
            flags.append(True)
        left = pole.value
        if len(vals) >= count:
            break
    return TransversalSpectrum(np.array(vals[:count]), np.array(flags[:count], dtype=bool))


def alpha_of_mu(mu: float, d_minus: float, d_plus: float) -> float:
    """Smallest transversal eigenvalue alpha(mu); decreasing in mu."""
    _check_geometry(d_minus, d_plus)
    p1 = min((math.pi / d_minus) ** 2, (math.pi / d_plus) ** 2)
    return _root_in_interval(mu, d_minus, d_plus, None, p1)


def alpha_limit_minus_infinity(d_minus: float, d_plus: float) -> float:
    """lim alpha(mu) as mu -> -inf."""
    return min((math.pi / d_minus) ** 2, (math.pi / d_plus) ** 2)
