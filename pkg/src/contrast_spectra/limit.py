"""Spectra of the limit operators.

Bounded case
------------
On the rectangle the mu-problem separates: its eigenvalues are
``(m pi / L_x)^2 + tau_j(mu)`` with tau_j from :mod:`dispersion`.  The point
spectrum of the limit operator consists of the intersections of the curves
lambda = lambda_k(mu) with the coupling curve lambda = q mu / (q r + mu).

Two equivalent routes are implemented:

* :func:`rect_point_spectrum` follows the curve picture literally and solves
  lambda_k(mu) = C(mu) in mu for each k (one branch on each side of -qr).
* :func:`mode_roots` works mode by mode in lambda: for a longitudinal mode with
  offset kappa it solves F(lambda - kappa) = mu(lambda), where mu(lambda) is
  the inverse of C.  This is cheap and is what the set-valued functions use,
  including the accumulation of lambda^+ at q.

Waveguide
---------
The spectrum is [alpha(mu1), q] U [alpha(mu2), inf) where mu1, mu2 are the
crossings of alpha(mu) with the coupling curve.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .dispersion import (COINCIDENCE_RTOL, DispersionSpec, _dispersion_scalar, alpha_of_mu,
                         alpha_limit_minus_infinity, dispersion_array, iter_poles,
                         transversal_eigs)
from .params import DomainSpec
from .roots import BracketError, bisect_decreasing_vec, root_between_singularities

TIE_TOL = 1e-10
MULT_RTOL = 1e-10
ACCUMULATION_TOL = 1e-8
HEAP_MAX_K = 256  # above this the order statistic is found by counting


class TieError(ValueError):
    """q coincides (within tolerance) with a threshold value (a Dirichlet eigenvalue
    or the waveguide gap threshold), so the splitting at q is ambiguous."""


# ---------------------------------------------------------------------------
# containers


@dataclass
class SpectralSet:
    points: list  # list of (value, multiplicity)
    essential: list
    window: tuple
    truncation_note: str = ""

    def __post_init__(self):
        lo, hi = self.window
        pts = sorted((float(v), int(m)) for v, m in self.points if lo <= v <= hi)
        self.points = pts
        self.essential = sorted(float(e) for e in self.essential if lo <= e <= hi)

    @property
    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        return np.array([v for v, m in self.points for _ in range(m)], dtype=float)

    def as_set(self) -> np.ndarray:
        """Distinct spectral points (eigenvalues and essential points)."""
        return np.unique(np.concatenate([[v for v, _ in self.points], self.essential]))

    def __len__(self):
        return len(self.points)


def group_multiplicities(values, rtol: float = MULT_RTOL) -> list:
    vals = np.sort(np.asarray(values, dtype=float))
    out: list = []
    for v in vals:
        if out and abs(v - out[-1][0]) <= rtol * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(v, m) for v, m in out]


@dataclass
class CurveIntersectionResult:
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    k0: int
    q: float
    mu_plus: np.ndarray
    mu_minus: np.ndarray

    @property
    def mu_values(self):
        return np.concatenate([self.mu_plus, self.mu_minus])


@dataclass
class WaveguideLimit:
    q: float
    r: float
    mu1: float
    alpha1: float
    mu2: float | None = None
    alpha2: float | None = None
    spectrum: list = field(default_factory=list)  # list of (lo, hi) closed intervals

    @property
    def gap(self):
        return None if self.mu2 is None else (self.q, self.alpha2)

    def report(self) -> dict:
        gap = self.gap
        return {"mu1": self.mu1, "mu2": self.mu2, "alpha1": self.alpha1, "alpha2": self.alpha2,
                "gap_lo": gap[0] if gap else None, "gap_hi": gap[1] if gap else None}


# ---------------------------------------------------------------------------
# coupling curve


def coupling_curve(mu, q: float, r: float):
    """C(mu) = q mu / (q r + mu)."""
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(mu_arr == -q * r):
        raise ValueError("mu = -q r is the pole of the coupling curve")
    out = q * mu_arr / (q * r + mu_arr)
    return float(out) if out.ndim == 0 else out


def mu_of_lambda(lam, q: float, r: float):
    """Inverse of :func:`coupling_curve`: lambda q r / (q - lambda)."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr == q):
        raise ValueError("lambda = q is excluded")
    out = lam_arr * q * r / (q - lam_arr)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# rectangle: separated quantities


def _require_rectangle(domain: DomainSpec) -> None:
    if domain.is_waveguide:
        raise ValueError("this operation needs a bounded-rectangle domain")


def _kappa(m, L):
    return (np.asarray(m, dtype=float) * math.pi / L) ** 2


def _merge_smallest(offsets, values, count):
    """``count`` smallest sums offsets[i] + values[j] (both sorted ascending)."""
    offsets = np.asarray(offsets, float)
    values = np.asarray(values, float)
    heap = [(offsets[0] + values[j], 0, j) for j in range(min(len(values), count))]
    heapq.heapify(heap)
    out = []
    while heap and len(out) < count:
        v, i, j = heapq.heappop(heap)
        out.append(v)
        if i + 1 < len(offsets):
            heapq.heappush(heap, (offsets[i + 1] + values[j], i + 1, j))
    return np.array(out)


def rect_full_dirichlet_eigs(domain: DomainSpec, count: int) -> np.ndarray:
    """Dirichlet Laplacian eigenvalues of the whole rectangle."""
    _require_rectangle(domain)
    trans = (np.arange(1, count + 1) * math.pi / domain.height) ** 2
    return _merge_smallest(_kappa(np.arange(1, count + 1), domain.L_x), trans, count)


def rect_full_dirichlet_window(domain: DomainSpec, hi: float) -> np.ndarray:
    _require_rectangle(domain)
    out = []
    m = 1
    while _kappa(m, domain.L_x) + (math.pi / domain.height) ** 2 <= hi:
        km = _kappa(m, domain.L_x)
        j = np.arange(1, int(math.sqrt(max(hi - km, 0)) * domain.height / math.pi) + 2)
        vals = km + (j * math.pi / domain.height) ** 2
        out.extend(vals[vals <= hi])
        m += 1
    return np.sort(np.array(out, dtype=float))


def _gamma_dirichlet_transversal(domain: DomainSpec, count: int) -> np.ndarray:
    a, b = -domain.d_minus, domain.d_plus
    j = np.arange(1, count + 1)
    return np.sort(np.concatenate([(j * math.pi / a) ** 2, (j * math.pi / b) ** 2]))[:count]


def rect_dirichlet_gamma_eigs(domain: DomainSpec, count: int) -> np.ndarray:
    """Eigenvalues lambda_k^D of the Laplacian with an extra Dirichlet condition on Gamma."""
    _require_rectangle(domain)
    trans = _gamma_dirichlet_transversal(domain, count)
    return _merge_smallest(_kappa(np.arange(1, count + 1), domain.L_x), trans, count)


def _count_at_most(x: float, a: float) -> int:
    """#{j >= 1 : (j pi / a)^2 <= x}."""
    if x <= 0:
        return 0
    return int(math.floor(math.sqrt(x) * a / math.pi * (1 + 1e-15)))


def k0_index(q: float, domain: DomainSpec) -> int:
    """Number of lambda_k^D that do not exceed q (ties are rejected).

    Counted directly on the lattice kappa_m + (j pi / a)^2 of both half rectangles.
    """
    if not (q > 0 and math.isfinite(q)):
        raise ValueError("k0 needs 0 < q < inf")
    _require_rectangle(domain)
    a, b = -domain.d_minus, domain.d_plus
    count, m = 0, 1
    while True:
        km = float(_kappa(m, domain.L_x))
        if km >= q * (1 + TIE_TOL):
            break
        for side in (a, b):
            j = _count_at_most(q - km, side)
            for jj in (j, j + 1):
                if jj >= 1 and abs(km + (jj * math.pi / side) ** 2 - q) <= TIE_TOL * max(1.0, q):
                    raise TieError(f"q = {q!r} coincides with a Gamma-Dirichlet eigenvalue")
            count += j
        m += 1
    return count


def _transversal_needed(dm: float, dp: float, cap: float) -> int:
    """Number of tau_j(mu) that can lie below ``cap`` for any mu."""
    n = 1
    for pole in iter_poles(dm, dp):
        if pole.value > cap:
            break
        n += 2 if pole.coincident else 1
    return n


def rect_lambda_k_mu(mu: float, domain: DomainSpec, k: int, *, _cap: float | None = None) -> float:
    """k-th eigenvalue lambda_k(mu) of the separated mu-problem on the rectangle."""
    _require_rectangle(domain)
    if k < 1:
        raise ValueError("k must be >= 1")
    # lambda_k(mu) < lambda_k^D for every mu, so larger tau_j never matter
    cap = rect_dirichlet_gamma_eigs(domain, k)[-1] if _cap is None else _cap
    kappa1 = _kappa(1, domain.L_x)
    J = _transversal_needed(domain.d_minus, domain.d_plus, cap - kappa1)
    tau = transversal_eigs(DispersionSpec(domain.d_minus, domain.d_plus, mu), J).eigenvalues
    if k <= HEAP_MAX_K:
        return float(_merge_smallest(_kappa(np.arange(1, k + 1), domain.L_x), tau, k)[k - 1])
    return _kth_lattice_value(tau, domain.L_x, k)


def _kth_lattice_value(tau: np.ndarray, L: float, k: int) -> float:
    """k-th smallest kappa_m + tau_j by bisection on the counting function."""
    def counts(x):
        return np.floor(np.sqrt(np.maximum(x - tau, 0.0)) * L / math.pi).astype(np.int64)

    lo = float(tau[0])  # count(lo) = 0 < k
    hi = float(tau[0] + _kappa(k, L))  # mode 1..k on tau_1 alone already gives k values
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if counts(mid).sum() >= k:
            hi = mid
        else:
            lo = mid
    c = counts(hi)
    mask = c > 0
    return float(np.max(_kappa(c[mask], L) + tau[mask]))


def _bracket_right_of(g, pole: float, scale: float):
    """(lo, hi) around the root of decreasing g on (pole, inf)."""
    step = scale
    lo = pole + step
    while g(lo) <= 0:
        step *= 0.5
        lo = pole + step
        if lo <= pole:
            raise BracketError("coupling-curve bracket collapsed on the pole")
    hi = pole + scale
    while g(hi) >= 0:
        hi = pole + 2 * (hi - pole)
        if hi > 1e300:
            raise BracketError("no sign change towards +inf")
    return lo, hi


def _bracket_left_of(g, pole: float, scale: float):
    """(lo, hi) around the root of decreasing g on (-inf, pole)."""
    step = scale
    hi = pole - step
    while g(hi) >= 0:
        step *= 0.5
        hi = pole - step
        if hi >= pole:
            raise BracketError("coupling-curve bracket collapsed on the pole")
    lo = pole - scale
    while g(lo) <= 0:
        lo = pole - 2 * (pole - lo)
        if lo < -1e300:
            raise BracketError("no sign change towards -inf")
    return lo, hi


def rect_point_spectrum(q: float, r: float, domain: DomainSpec, K: int, *,
                        xtol: float = 1e-15) -> CurveIntersectionResult:
    """lambda_k^+ and lambda_k^- (k = 1..K) as intersections with the coupling curve.

    The search runs in mu.  Close to the pole -q r the curve is steep,
    d lambda / d mu = (lambda - q)^2 / (q^2 r), so ``xtol`` (relative to
    1 + q r) is kept near machine precision to keep lambda accurate as well.
    """
    _require_rectangle(domain)
    if not (0 < q < math.inf and r > 0):
        raise ValueError("need 0 < q < inf and r > 0")
    k0 = k0_index(q, domain)
    pole = -q * r
    lamD = rect_dirichlet_gamma_eigs(domain, k0 + K)
    lam_p, mu_p, lam_m, mu_m = [], [], [], []
    for k in range(1, K + 1):
        g = lambda mu, k=k: rect_lambda_k_mu(mu, domain, k, _cap=lamD[k - 1]) - coupling_curve(mu, q, r)
        lo, hi = _bracket_right_of(g, pole, q * r)
        mu_k = brentq(g, lo, hi, xtol=xtol * (1 + abs(pole)), rtol=4 * np.finfo(float).eps)
        mu_p.append(mu_k)
        lam_p.append(coupling_curve(mu_k, q, r))
    for k in range(1, K + 1):
        kk = k0 + k
        g = lambda mu, kk=kk: rect_lambda_k_mu(mu, domain, kk, _cap=lamD[kk - 1]) - coupling_curve(mu, q, r)
        lo, hi = _bracket_left_of(g, pole, q * r)
        mu_k = brentq(g, lo, hi, xtol=xtol * (1 + abs(pole)), rtol=4 * np.finfo(float).eps)
        mu_m.append(mu_k)
        lam_m.append(coupling_curve(mu_k, q, r))
    return CurveIntersectionResult(np.array(lam_p), np.array(lam_m), k0, q, np.array(mu_p), np.array(mu_m))


# ---------------------------------------------------------------------------
# per-mode solver in lambda


def _singular_points(kappa: float, dm: float, dp: float, q: float | None):
    """Increasing singular points of F(lambda - kappa) - mu(lambda) with coincidence flags."""
    poles = iter_poles(dm, dp)
    nxt = next(poles)
    q_done = q is None or not math.isfinite(q)
    while True:
        pv = kappa + nxt.value
        if not q_done and q <= pv * (1 + COINCIDENCE_RTOL):
            q_done = True
            if abs(q - pv) <= COINCIDENCE_RTOL * pv:
                raise TieError(f"q = {q!r} coincides with a shifted pole {pv!r}")
            yield q, False
            continue
        yield pv, nxt.coincident
        nxt = next(poles)


def iter_mode_roots(kappa: float, mu_fn, q: float | None, dm: float, dp: float):
    """Ascending eigenvalues contributed by one longitudinal mode.

    Solves F(lambda - kappa) = mu_fn(lambda) where mu_fn is increasing and
    singular only at ``q`` (``None``/inf for none).  Coincident shifted poles
    are emitted as mu-independent eigenvalues.
    """
    def h(lam):
        return _dispersion_scalar(lam - kappa, dm, dp) - mu_fn(lam)

    left = None
    for s, coincident in _singular_points(kappa, dm, dp, q):
        if left is None:
            # h(0) = F(-kappa) - mu(0) > 0 because mu(0) = 0 and F > 0 on (-inf, 0]
            yield root_between_singularities(h, 0.0, s, left_value_positive=True)
        else:
            yield root_between_singularities(h, left, s)
        if coincident:
            yield s
        left = s


def _mode_roots_below(kappa, mu_fn, q, dm, dp, hi):
    out = []
    for lam in iter_mode_roots(kappa, mu_fn, q, dm, dp):
        if lam > hi:
            break
        out.append(lam)
    return out


def _coupled_mu(q: float, r: float):
    return lambda lam: math.inf if lam == q else lam * q * r / (q - lam)


def mode_roots(kappa: float, q: float, r: float, dm: float, dp: float, count: int) -> np.ndarray:
    """The ``count`` smallest roots of F(lambda - kappa) = lambda q r / (q - lambda)."""
    it = iter_mode_roots(kappa, _coupled_mu(q, r), q, dm, dp)
    return np.array([next(it) for _ in range(count)])


def _tail_roots(kappas, q, r, dm, dp):
    """Single root below q of the modes with kappa > q (vectorised)."""
    kappas = np.asarray(kappas, dtype=float)

    def h(lam):
        with np.errstate(divide="ignore"):
            mu = lam * q * r / (q - lam)
        return dispersion_array(lam - kappas, dm, dp) - mu

    lo = np.zeros_like(kappas)
    hi = np.full_like(kappas, q)
    return bisect_decreasing_vec(h, lo, hi, rtol=1e-15, max_iter=120)


def _accumulation_tail(m_start, q, r, domain, hi, tol):
    """Thinned list of lambda^+ from modes m >= m_start (all with kappa_m > q).

    lambda(m) increases to q.  Every mode value is kept while consecutive gaps
    exceed 2*tol; afterwards only a subset with consecutive gaps <= 2*tol is
    kept, which leaves the Hausdorff distance to the full tail below tol.
    Stops once q - lambda <= tol (q itself is kept as the essential point).
    """
    L, dm, dp = domain.L_x, domain.d_minus, domain.d_plus
    lam_of = lambda ms: _tail_roots(_kappa(ms, L), q, r, dm, dp)
    kept_m, kept = [], []
    m = m_start
    chunk = 256
    # dense phase
    while True:
        ms = np.arange(m, m + chunk)
        vals = lam_of(ms)
        stop = np.nonzero((vals > hi) | (q - vals <= tol))[0]
        last = len(ms) if len(stop) == 0 else stop[0] + 1
        gaps = np.diff(vals[:last])
        small = np.nonzero(gaps <= 2 * tol)[0]
        if len(small):
            last = small[0] + 1
        kept_m.extend(ms[:last])
        kept.extend(vals[:last])
        if len(stop) or len(small):
            break
        m += chunk
        chunk *= 2
    if kept and (kept[-1] > hi or q - kept[-1] <= tol):
        return np.array(kept), int(kept_m[-1])
    # thinned phase: lambda(m) ~ q - c/m, so predict the furthest index whose
    # value stays within 2 tol of the current one, evaluate a batch of such
    # predictions and accept the prefix that really satisfies the gap bound
    m, lam_m = int(kept_m[-1]), kept[-1]
    safety = 0.9
    thinned = []
    while True:
        c = (q - lam_m) * m
        cand, mm, lm = [], m, lam_m
        for _ in range(1024):
            inv = 1.0 / mm - safety * 2 * tol / c
            nxt = mm + 1 if inv <= 0 else max(mm + 1, int(1.0 / inv))
            cand.append(nxt)
            mm, lm = nxt, q - c / nxt
            if q - lm <= tol or lm > hi:
                break
        cand = np.array(cand, dtype=np.int64)
        vals = lam_of(cand)
        gaps = np.diff(np.concatenate([[lam_m], vals]))
        bad = np.nonzero(gaps > 2 * tol)[0]
        n_ok = len(cand) if len(bad) == 0 else bad[0]
        if n_ok == 0:
            if cand[0] == m + 1:  # genuine gap between neighbours; keep it anyway
                n_ok = 1
            else:
                safety *= 0.5
                continue
        thinned.extend(vals[:n_ok])
        m, lam_m = int(cand[n_ok - 1]), vals[n_ok - 1]
        if lam_m > hi or q - lam_m <= tol:
            return np.concatenate([kept, thinned]), m


# ---------------------------------------------------------------------------
# set-valued spectra on the rectangle


def rect_limit_points(q: float, r: float, domain: DomainSpec, window, *,
                      tol: float = ACCUMULATION_TOL):
    """Eigenvalues of the limit operator (0 < q < inf, r > 0) inside ``window``.

    Returns (values, note).  Values are repeated by multiplicity; the part of
    the lambda^+ sequence closer than ``tol`` to q is represented by q itself,
    and the tail is thinned where consecutive points are closer than 2*tol.
    """
    _require_rectangle(domain)
    lo, hi = window
    L, dm, dp = domain.L_x, domain.d_minus, domain.d_plus
    mu_fn = _coupled_mu(q, r)
    vals = []
    m = 1
    # modes with kappa_m <= max(q, hi) may carry several roots in the window
    while _kappa(m, L) <= max(q, hi):
        vals.extend(_mode_roots_below(float(_kappa(m, L)), mu_fn, q, dm, dp, hi))
        m += 1
    note = f"explicit modes 1..{m - 1}"
    # every further mode has exactly one root below q, increasing in m towards q
    tail, m_last = _accumulation_tail(m, q, r, domain, hi, tol)
    tail = tail[(tail <= hi) & (q - tail > tol)]
    vals.extend(tail)
    note += (f"; accumulation tail from mode {m} to {m_last} ({len(tail)} kept values), "
             f"thinned to spacing <= {2 * tol:g} and truncated at distance {tol:g} from q")
    vals = np.sort(np.array(vals, dtype=float))
    return vals[(vals >= lo) & (vals <= hi)], note


def steklov_spectrum(r: float, domain: DomainSpec, window) -> SpectralSet:
    """Spectrum for q = inf: F(lambda - kappa_m) = lambda r mode by mode."""
    _require_rectangle(domain)
    if not r > 0:
        raise ValueError("steklov_spectrum needs r > 0")
    lo, hi = window
    L, dm, dp = domain.L_x, domain.d_minus, domain.d_plus
    vals = []
    m = 1
    mu_fn = lambda lam: lam * r
    while True:
        km = float(_kappa(m, L))
        roots = _mode_roots_below(km, mu_fn, None, dm, dp, hi)
        if not roots:
            # the lowest root of a mode increases with kappa_m, so we are done
            break
        vals.extend(roots)
        m += 1
    return SpectralSet(group_multiplicities(vals), [], tuple(window),
                       f"all modes with a root below {hi:g}")


def limit_spectrum_cases(q: float, r: float, domain: DomainSpec, window, *,
                         tol: float = ACCUMULATION_TOL) -> SpectralSet:
    """sigma(A_{q,r}) inside ``window`` for every (q, r) case."""
    _require_rectangle(domain)
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise ValueError("window must be a bounded interval")
    if r < 0 or not math.isfinite(r) or q < 0:
        raise ValueError("need q in [0, inf], r in [0, inf)")
    if r == 0 or q == 0:
        vals = rect_full_dirichlet_window(domain, hi)
        ess = [] if math.isinf(q) else [q]
        note = "exact Dirichlet eigenvalues of the rectangle"
        return SpectralSet(group_multiplicities(vals), ess, tuple(window), note)
    if math.isinf(q):
        return steklov_spectrum(r, domain, window)
    vals, note = rect_limit_points(q, r, domain, window, tol=tol)
    return SpectralSet(group_multiplicities(vals), [q], tuple(window), note)


# ---------------------------------------------------------------------------
# waveguide


def waveguide_threshold(d_minus: float, d_plus: float) -> float:
    return alpha_limit_minus_infinity(d_minus, d_plus)


def waveguide_limit(q: float, r: float, d_minus: float, d_plus: float) -> WaveguideLimit:
    """mu1, mu2 and the limit spectrum [alpha(mu1), q] U [alpha(mu2), inf)."""
    if not (0 < q < math.inf and 0 < r < math.inf):
        raise ValueError("need 0 < q < inf and 0 < r < inf")
    thr = waveguide_threshold(d_minus, d_plus)
    if abs(q - thr) <= TIE_TOL * thr:
        raise TieError(f"q = {q!r} coincides with the gap threshold {thr!r}")
    pole = -q * r
    g = lambda mu: alpha_of_mu(mu, d_minus, d_plus) - q * mu / (q * r + mu)
    lo, hi = _bracket_right_of(g, pole, q * r)
    mu1 = brentq(g, lo, hi, xtol=1e-14 * (1 + abs(pole)), rtol=4 * np.finfo(float).eps)
    a1 = alpha_of_mu(mu1, d_minus, d_plus)
    if q < thr:
        lo, hi = _bracket_left_of(g, pole, q * r)
        mu2 = brentq(g, lo, hi, xtol=1e-14 * (1 + abs(pole)), rtol=4 * np.finfo(float).eps)
        a2 = alpha_of_mu(mu2, d_minus, d_plus)
        return WaveguideLimit(q, r, mu1, a1, mu2, a2, [(a1, q), (a2, math.inf)])
    return WaveguideLimit(q, r, mu1, a1, None, None, [(a1, math.inf)])


def waveguide_limit_bands(q: float, r: float, d_minus: float, d_plus: float, phi: float,
                          m_max: int, count: int) -> np.ndarray:
    """``count`` smallest eigenvalues of the limit cell operator at quasimomentum phi."""
    mu_fn = _coupled_mu(q, r)
    vals = []
    for m in range(-m_max, m_max + 1):
        kappa = (phi + 2 * math.pi * m) ** 2
        it = iter_mode_roots(kappa, mu_fn, q, d_minus, d_plus)
        vals.extend(next(it) for _ in range(count))
    return np.sort(np.array(vals))[:count]
