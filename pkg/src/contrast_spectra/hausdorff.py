"""Hausdorff distances between finite sets and between finite unions of intervals."""

from __future__ import annotations

import numpy as np


class EmptySetError(ValueError):
    """The Hausdorff distance is only defined for nonempty compact sets."""


def _directed(X: np.ndarray, Y: np.ndarray) -> float:
    """sup_x inf_y |x - y| for sorted arrays via a single forward scan."""
    j = 0
    best = 0.0
    ny = len(Y)
    for x in X:
        while j + 1 < ny and Y[j + 1] <= x:
            j += 1
        d = abs(x - Y[j])
        if j + 1 < ny:
            d = min(d, abs(Y[j + 1] - x))
        if d > best:
            best = d
    return best


def hausdorff(X, Y) -> float:
    """Hausdorff distance of two finite nonempty real sets."""
    X = np.sort(np.asarray(X, dtype=float).ravel())
    Y = np.sort(np.asarray(Y, dtype=float).ravel())
    if len(X) == 0 or len(Y) == 0:
        raise EmptySetError("Hausdorff distance of an empty set")
    return max(_directed(X, Y), _directed(Y, X))


def merge_intervals(intervals, *, touch_merges: bool = True):
    """Sorted union of closed intervals as a list of disjoint (lo, hi)."""
    out = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if out and (lo <= out[-1][1] if touch_merges else lo < out[-1][1]):
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(v) for v in out]


def clip_intervals(intervals, window):
    lo, hi = window
    out = []
    for a, b in intervals:
        a2, b2 = max(a, lo), min(b, hi)
        if a2 <= b2:
            out.append((a2, b2))
    return out


def _dist_to_union(x: float, U) -> float:
    best = np.inf
    for a, b in U:
        if a <= x <= b:
            return 0.0
        best = min(best, abs(x - a), abs(x - b))
    return best


def _directed_intervals(A, B) -> float:
    # d(., B) restricted to an interval of A is piecewise linear with maxima at
    # the interval ends or at midpoints of the gaps of B
    cand = [p for a, b in A for p in (a, b)]
    for (_, b1), (a2, _) in zip(B[:-1], B[1:]):
        mid = 0.5 * (b1 + a2)
        if any(a <= mid <= b for a, b in A):
            cand.append(mid)
    return max(_dist_to_union(x, B) for x in cand)


def hausdorff_intervals(A, B) -> float:
    """Hausdorff distance of two finite unions of closed bounded intervals."""
    A = merge_intervals(A)
    B = merge_intervals(B)
    if not A or not B:
        raise EmptySetError("Hausdorff distance of an empty set")
    return max(_directed_intervals(A, B), _directed_intervals(B, A))
