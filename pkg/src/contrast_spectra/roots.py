"""Small bracketed root finders shared by the 1D and limit-spectrum solvers.

The functions we need to solve are strictly monotone on a known bracket but
have poles at the bracket ends, so we stick to bisection and finish with a
single secant step that is only accepted if it stays inside the bracket.
"""

from __future__ import annotations

import numpy as np


class BracketError(RuntimeError):
    """Raised when a bracket that should contain a sign change does not."""


def bisect_decreasing(f, lo: float, hi: float, *, rtol: float = 1e-13, max_iter: int = 400) -> float:
    """Root of a strictly decreasing ``f`` with f(lo) > 0 > f(hi).

    Bisection until the bracket width is below ``rtol * (1 + |x|)``, then one
    secant polish on the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f = ({flo!r}, {fhi!r})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * (1.0 + abs(mid)) or mid in (lo, hi):
            break
        fm = f(mid)
        if fm > 0:
            lo, flo = mid, fm
        elif fm < 0:
            hi, fhi = mid, fm
        else:
            return mid
    if np.isfinite(flo) and np.isfinite(fhi) and flo != fhi:
        x = lo - flo * (hi - lo) / (fhi - flo)
        if lo <= x <= hi:
            return float(x)
    return 0.5 * (lo + hi)


def bisect_decreasing_vec(f, lo, hi, *, rtol: float = 1e-13, max_iter: int = 200):
    """Vectorised :func:`bisect_decreasing` over independent brackets.

    ``f`` maps an array of abscissae (one per bracket) to function values.
    Brackets are assumed valid; the caller checks the end values.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active = (hi - lo) > rtol * (1.0 + np.abs(mid))
        active &= (mid != lo) & (mid != hi)
        if not active.any():
            break
        fm = f(mid)
        pos = active & (fm > 0)
        neg = active & (fm <= 0)
        lo[pos] = mid[pos]
        hi[neg] = mid[neg]
    return 0.5 * (lo + hi)


def root_between_singularities(g, left: float, right: float, *, left_value_positive: bool = False,
                               rtol: float = 1e-13) -> float:
    """Root of a decreasing ``g`` on (left, right) where g -> +inf at ``left``
    and g -> -inf at ``right`` (finite singular points).

    The bracket is found by walking geometrically towards each singular end.
    With ``left_value_positive`` the caller guarantees g(left) > 0 already
    (``left`` is then a regular point, e.g. lambda = 0).
    """
    width = right - left
    if not width > 0:
        raise BracketError(f"empty interval ({left!r}, {right!r})")
    step = 0.5 * width
    hi = right - step
    while g(hi) >= 0:
        step *= 0.5
        hi = right - step
        if hi >= right:
            raise BracketError(f"g never negative below {right!r}")
    if left_value_positive:
        lo = left
    else:
        step = 0.5 * (hi - left)
        lo = left + step
        while g(lo) <= 0:
            step *= 0.5
            lo = left + step
            if lo <= left:
                raise BracketError(f"g never positive above {left!r}")
    return bisect_decreasing(g, lo, hi, rtol=rtol)
