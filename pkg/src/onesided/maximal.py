"""One-sided maximal operators on sampled functions.

The forward maximal value at a cell is the supremum of averages of ``|f|``
over windows opening to the right of the cell's left boundary; the backward
variant mirrors this, anchored at the cell's right boundary.  For
piecewise-constant data the running average is monotone between cell
boundaries, so restricting window lengths to whole numbers of cells attains
the continuous supremum exactly at the anchor points.  The anchor convention
(forward at left boundaries, backward at right boundaries) makes the
discrete operators agree with the continuous ones with zero discretization
error at ``delta = 1``, and gives ``backward_maximal(indicator(E)) == 1`` on
every cell of ``E``.

The sharp variant measures one-sided oscillation: the average of the
positive part of ``f`` minus the average over the *next* window of equal
length.  It vanishes identically on nondecreasing data and is dominated by
three times the plain maximal.  Window pairs that would leave the grid are
not admissible for the sharp variant — this keeps constants mapping to zero
and makes the statistic invariant under adding constants — whereas the plain
maximal simply reads zeros beyond the edge.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .grid import Grid, SampledFunction, prefix_cell_sums

__all__ = [
    "Direction",
    "WindowPolicy",
    "one_sided_maximal",
    "one_sided_maximal_fast",
    "sharp_maximal",
    "bmo_plus_norm",
    "bmo_norm",
    "indicator_maximal_closed_form",
    "dyadic_lengths",
]


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class WindowPolicy(enum.Enum):
    #: every whole-cell window length 1..n
    ALL = "all"
    #: powers of two only
    DYADIC = "dyadic"


def dyadic_lengths(n: int) -> list[int]:
    """Powers of two up to the first one covering ``n`` cells."""
    ks = []
    k = 1
    while True:
        ks.append(k)
        if k >= n:
            return ks
        k *= 2


def _window_lengths(n: int, policy: WindowPolicy) -> list[int]:
    if policy is WindowPolicy.ALL:
        return list(range(1, n + 1))
    if policy is WindowPolicy.DYADIC:
        return dyadic_lengths(n)
    raise TypeError(f"unknown window policy {policy!r}")


def _check_delta(delta: float) -> None:
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")


def _forward_max_means(values: np.ndarray, lengths: list[int]) -> np.ndarray:
    """max over k in lengths of the mean of ``values`` over cells i..i+k-1.

    Windows extend past the right edge with zeros (the mean keeps the full
    ``k`` denominator).
    """
    n = len(values)
    kmax = max(lengths)
    P = np.zeros(n + kmax + 1)
    np.cumsum(values, out=P[1 : n + 1])
    P[n + 1 :] = P[n]
    best = np.full(n, -np.inf)
    idx = np.arange(n)
    for k in lengths:
        np.maximum(best, (P[idx + k] - P[idx]) / k, out=best)
    return best


def one_sided_maximal(
    f: SampledFunction,
    direction: Direction = Direction.FORWARD,
    delta: float = 1.0,
    policy: WindowPolicy = WindowPolicy.ALL,
) -> SampledFunction:
    """Windowed maximal average of ``|f|**delta``, raised to ``1/delta``.

    This is the reference scan: it visits every admissible window length and
    costs ``O(n * len(lengths))``.  ``one_sided_maximal_fast`` produces the
    same values (delta = 1, all lengths) in linear time.
    """
    _check_delta(delta)
    g = np.abs(f.values)
    if delta != 1.0:
        g = g**delta
    lengths = _window_lengths(f.grid.count, policy)
    if direction is Direction.FORWARD:
        best = _forward_max_means(g, lengths)
    elif direction is Direction.BACKWARD:
        best = _forward_max_means(g[::-1], lengths)[::-1]
    else:
        raise TypeError(f"unknown direction {direction!r}")
    if delta != 1.0:
        best = best ** (1.0 / delta)
    return f.with_values(best)


def one_sided_maximal_fast(
    f: SampledFunction, direction: Direction = Direction.FORWARD
) -> SampledFunction:
    """Linear-time equivalent of ``one_sided_maximal`` at delta=1, all lengths.

    The maximal average over windows starting at cell ``i`` equals the
    largest slope from the prefix-sum point ``(i, P[i])`` to any later point
    ``(j, P[j])``.  Sweeping anchors right to left while maintaining the
    upper convex hull of the points seen so far, the optimal ``j`` for each
    anchor is the hull neighbor of the anchor itself once it is pushed, so
    the whole sweep is amortized O(n).
    """
    values = np.abs(f.values)
    if direction is Direction.BACKWARD:
        return f.with_values(_hull_sweep(values[::-1])[::-1])
    if direction is not Direction.FORWARD:
        raise TypeError(f"unknown direction {direction!r}")
    return f.with_values(_hull_sweep(values))


def _hull_sweep(values: np.ndarray) -> np.ndarray:
    n = len(values)
    P = np.empty(n + 1)
    P[0] = 0.0
    np.cumsum(values, out=P[1:])
    out = np.empty(n)
    stack = [n]  # hull vertex indices, leftmost on top
    for i in range(n - 1, -1, -1):
        Pi = P[i]
        # Pop while the current leftmost vertex falls on or under the chord
        # from (i, Pi) to the vertex beneath it; colinear vertices are
        # dominated by (i, Pi) itself for every later (more-left) anchor.
        while len(stack) >= 2:
            j1 = stack[-1]
            j2 = stack[-2]
            if (P[j1] - Pi) * (j2 - i) <= (P[j2] - Pi) * (j1 - i):
                stack.pop()
            else:
                break
        j = stack[-1]
        out[i] = (P[j] - Pi) / (j - i)
        stack.append(i)
    return out


def sharp_maximal(
    f: SampledFunction,
    delta: float = 1.0,
    policy: WindowPolicy = WindowPolicy.DYADIC,
) -> SampledFunction:
    """One-sided sharp maximal: oscillation of ``f`` against its next window.

    At cell ``i`` and window length ``k`` the candidate value is the mean
    over cells ``i..i+k-1`` of ``(f_j - c_k)^+``, with ``c_k`` the mean over
    the adjacent window ``i+k..i+2k-1``; the output is the max over
    admissible ``k``.  Only window pairs that fit inside the grid are
    admissible, so cells whose smallest pair already overruns the edge
    report 0.  For ``delta < 1`` the statistic is applied to ``|f|**delta``
    and the result raised to ``1/delta``.
    """
    _check_delta(delta)
    g = f.values if delta == 1.0 else np.abs(f.values) ** delta
    n = f.grid.count
    P = np.empty(n + 1)
    P[0] = 0.0
    np.cumsum(g, out=P[1:])
    best = np.zeros(n)
    for k in _window_lengths(n, policy):
        m = n - 2 * k + 1  # anchors whose both windows stay on the grid
        if m <= 0:
            break
        c = (P[2 * k : 2 * k + m] - P[k : k + m]) / k
        windows = np.lib.stride_tricks.sliding_window_view(g, k)[:m]
        vals = np.clip(windows - c[:, None], 0.0, None).mean(axis=1)
        np.maximum(best[:m], vals, out=best[:m])
    if delta != 1.0:
        best = best ** (1.0 / delta)
    return f.with_values(best)


def bmo_plus_norm(f: SampledFunction) -> float:
    """Supremum over cells of the one-sided sharp maximal (all window lengths)."""
    return float(sharp_maximal(f, 1.0, WindowPolicy.ALL).values.max())


def bmo_norm(f: SampledFunction, policy: WindowPolicy = WindowPolicy.ALL) -> float:
    """Two-sided mean-oscillation norm over whole-cell windows.

    ``sup_I mean_I |f - mean_I f|`` with ``I`` ranging over cell-aligned
    windows of the given policy.  Used as the coefficient scale in
    commutator estimates.
    """
    g = f.values
    n = f.grid.count
    P = np.empty(n + 1)
    P[0] = 0.0
    np.cumsum(g, out=P[1:])
    best = 0.0
    for k in _window_lengths(n, policy):
        if k > n:
            break
        m = n - k + 1
        means = (P[k : k + m] - P[:m]) / k
        windows = np.lib.stride_tricks.sliding_window_view(g, k)
        osc = np.abs(windows - means[:, None]).mean(axis=1)
        best = max(best, float(osc.max()))
    return best


def indicator_maximal_closed_form(a: float, c: float, x) -> np.ndarray | float:
    """Forward maximal of the indicator of ``(a, c)``, in closed form.

    ``(c - a) / (c - x)`` left of ``a`` (best window ends exactly at ``c``),
    ``1`` on ``[a, c)``, and ``0`` from ``c`` on.  Serves as the analytic
    oracle for every indicator-based check in the package.
    """
    if not (c > a):
        raise ValueError(f"need a < c, got ({a}, {c})")
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs)
    left = xs < a
    out[left] = (c - a) / (c - xs[left])
    out[(xs >= a) & (xs < c)] = 1.0
    if np.isscalar(x):
        return float(out)
    return out
