"""One-sided singular and fractional integral operators.

Two kernel families are built in.  The dyadic-difference kernel

    K(u) = sum_j v_j * (2**-j * 1{-2**j < u < 0}  -  2**-(j-1) * 1{-2**(j-1) < u < 0})

drives the transform ``T f = sum_j v_j (D_j f - D_{j-1} f)`` where ``D_j``
averages over ``(x, x + 2**j)``; it is supported on the negative half-line,
so ``T f (x)`` only sees ``f`` to the right of ``x``.  The forward
fractional kernel integrates ``f(y) / (y - x)**(1 - alpha)`` over ``y > x``
with the singular factor handled analytically on every cell, so indicator
fixtures are exact to rounding.

Outputs are anchored like the maximal module: forward operators at cell
left boundaries, backward at right boundaries.  For piecewise-constant data
all the computations below are exact quadratures, not approximations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .grid import Grid, SampledFunction
from .orlicz import YoungFunction, luxemburg_from_samples

__all__ = [
    "DifferentialTransformKernel",
    "FractionalKernel",
    "TabulatedKernel",
    "KernelSpec",
    "KernelReport",
    "parse_kernel_spec",
    "default_jrange",
    "dyadic_average",
    "differential_transform",
    "apply_kernel",
    "kernel_cell_integrals",
    "kernel_eval",
    "fractional_integral",
    "iterated_commutator",
    "fractional_commutator_closed_form",
    "truncated_apply",
    "maximal_truncated",
    "kernel_condition_report",
    "hormander_partial_sum",
]


@dataclass(frozen=True)
class DifferentialTransformKernel:
    """Coefficients ``v_j`` for ``j = j_min .. j_min + len(coeffs) - 1``."""

    coeffs: tuple[float, ...]
    j_min: int
    bound: float = math.inf

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))
        if not self.coeffs:
            raise ValueError("need at least one coefficient")
        if any(abs(v) > self.bound for v in self.coeffs):
            raise ValueError(f"coefficients exceed the declared bound {self.bound}")

    @property
    def j_max(self) -> int:
        return self.j_min + len(self.coeffs) - 1

    @property
    def support(self) -> float:
        """The kernel vanishes on ``(-inf, -support)``."""
        return 2.0**self.j_max


@dataclass(frozen=True)
class FractionalKernel:
    alpha: float
    side: str = "forward"

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.side not in ("forward", "backward"):
            raise ValueError(f"side must be forward or backward, got {self.side!r}")


@dataclass(frozen=True)
class TabulatedKernel:
    """Cell-aligned samples on the negative half-line.

    ``values[m]`` is the kernel value on ``(-(m+1)*spacing, -m*spacing]``.
    """

    spacing: float
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.spacing <= 0.0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("need at least one sample")

    @property
    def support(self) -> float:
        return len(self.values) * self.spacing


KernelSpec = Union[DifferentialTransformKernel, FractionalKernel, TabulatedKernel]


@dataclass(frozen=True)
class KernelReport:
    """Estimated size constants of a kernel."""

    b1_estimate: float  # sup over (eps, N) of |integral over eps < |u| < N|
    b2_estimate: float  # sup over samples of |u * K(u)|
    samples: tuple[tuple[float, float], ...]  # (u, K(u)) witness samples


def parse_kernel_spec(text: str) -> KernelSpec:
    """Colon grammar: ``difftrans:v0,v1,...:jmin | frac:alpha:side | table:<path>``."""
    head, _, rest = text.partition(":")
    try:
        if head == "difftrans":
            coeff_txt, _, jmin_txt = rest.rpartition(":")
            coeffs = tuple(float(v) for v in coeff_txt.split(","))
            return DifferentialTransformKernel(coeffs, int(jmin_txt))
        if head == "frac":
            alpha_txt, _, side = rest.partition(":")
            return FractionalKernel(float(alpha_txt), side or "forward")
        if head == "table":
            if not rest:
                raise ValueError("table needs a path")
            rows: list[tuple[float, float]] = []
            with Path(rest).open(newline="") as fh:
                for row in csv.reader(fh):
                    if not row or all(not c.strip() for c in row):
                        continue
                    try:
                        rows.append((float(row[0]), float(row[1])))
                    except ValueError:
                        continue  # header
            if not rows:
                raise ValueError("no samples in table")
            xs = [r[0] for r in rows]
            spacing = xs[1] - xs[0] if len(xs) > 1 else -xs[0]
            # rows are left boundaries -(m+1)*spacing, ascending toward 0
            return TabulatedKernel(spacing, tuple(r[1] for r in reversed(rows)))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad kernel spec {text!r}: {exc}") from None
    raise ValueError(f"unknown kernel kind {head!r}")


def default_jrange(grid: Grid) -> tuple[int, int]:
    """Dyadic window exponents from one cell up to the grid extent.

    Windows below one cell or beyond the grid carry no information for
    piecewise-constant data, so this is the natural full range.
    """
    lo = math.ceil(math.log2(grid.spacing) - 1e-9)
    hi = math.floor(math.log2(grid.extent) + 1e-9)
    if hi < lo:
        raise ValueError("grid too small for any dyadic window")
    return lo, hi


# ---------------------------------------------------------------------------
# Dyadic averages and the difference transform
# ---------------------------------------------------------------------------


def _whole_cells(h: float, spacing: float) -> int | None:
    m = h / spacing
    r = round(m)
    if r >= 1 and abs(m - r) <= 1e-9 * max(1.0, m):
        return int(r)
    return None


def _forward_mean(values: np.ndarray, m: int) -> np.ndarray:
    """Mean over cells i..i+m-1, zeros past the edge, full denominator."""
    n = len(values)
    P = np.empty(n + 1)
    P[0] = 0.0
    np.cumsum(values, out=P[1:])
    Pp = np.concatenate([P, np.full(max(m - 1, 0), P[n])])
    return (Pp[m : m + n] - P[:n]) / m


def dyadic_average(f: SampledFunction, j: int) -> SampledFunction:
    """Average over ``(x, x + 2**j)`` at every cell's left boundary.

    ``2**j`` must be a whole number of cells.
    """
    m = _whole_cells(2.0**j, f.grid.spacing)
    if m is None:
        raise ValueError(
            f"window 2**{j} = {2.0 ** j} is not a whole number of cells "
            f"(spacing {f.grid.spacing})"
        )
    return f.with_values(_forward_mean(f.values, m))


def differential_transform(
    f: SampledFunction,
    coeffs: Sequence[float],
    j_min: int,
) -> SampledFunction:
    """``sum_j v_j (D_j f - D_{j-1} f)`` over ``j = j_min .. j_min+len-1``.

    Windows of less than one cell average to the cell value itself at a left
    boundary, so sub-cell scales contribute exactly nothing new; window
    scales above one cell must be whole numbers of cells.
    """
    d = f.grid.spacing
    averages: dict[int, np.ndarray] = {}

    def level(j: int) -> np.ndarray:
        if j not in averages:
            h = 2.0**j
            if h <= d * (1.0 + 1e-9):
                m = _whole_cells(h, d)
                averages[j] = f.values.copy() if m is None else _forward_mean(f.values, m)
            else:
                m = _whole_cells(h, d)
                if m is None:
                    raise ValueError(
                        f"window 2**{j} is not a whole number of cells (spacing {d})"
                    )
                averages[j] = _forward_mean(f.values, m)
        return averages[j]

    out = np.zeros(f.grid.count)
    for offset, v in enumerate(coeffs):
        if v == 0.0:
            continue
        j = j_min + offset
        out += v * (level(j) - level(j - 1))
    return f.with_values(out)


# ---------------------------------------------------------------------------
# Kernel evaluation and exact convolution
# ---------------------------------------------------------------------------


def kernel_eval(K: KernelSpec, u) -> np.ndarray:
    """Pointwise kernel values (supported on the negative half-line)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    if isinstance(K, DifferentialTransformKernel):
        for offset, v in enumerate(K.coeffs):
            if v == 0.0:
                continue
            j = K.j_min + offset
            hj, hj1 = 2.0**j, 2.0 ** (j - 1)
            out += v * (
                np.where((-hj < u) & (u < 0.0), 1.0 / hj, 0.0)
                - np.where((-hj1 < u) & (u < 0.0), 2.0 / hj, 0.0)
            )
        return out
    if isinstance(K, TabulatedKernel):
        inside = (u < 0.0) & (u > -K.support)
        m = np.clip(np.floor(-u[inside] / K.spacing), 0, len(K.values) - 1).astype(int)
        vals = np.asarray(K.values)
        out[inside] = vals[m]
        return out
    if isinstance(K, FractionalKernel):
        raise TypeError("the fractional kernel is applied analytically, not sampled")
    raise TypeError(f"unsupported kernel {type(K).__name__}")


def _kernel_window_integral(K: KernelSpec, t: float) -> float:
    """Exact ``integral of K over (-t, 0)`` for ``t >= 0``."""
    if t <= 0.0:
        return 0.0
    if isinstance(K, DifferentialTransformKernel):
        total = 0.0
        for offset, v in enumerate(K.coeffs):
            if v == 0.0:
                continue
            j = K.j_min + offset
            hj, hj1 = 2.0**j, 2.0 ** (j - 1)
            total += v * (min(t, hj) / hj - min(t, hj1) / hj1)
        return total
    if isinstance(K, TabulatedKernel):
        d = K.spacing
        full = min(int(t / d + 1e-12), len(K.values))
        total = sum(K.values[:full]) * d
        rem = t - full * d
        if rem > 0 and full < len(K.values):
            total += K.values[full] * rem
        return total
    raise TypeError(f"unsupported kernel {type(K).__name__}")


def kernel_cell_integrals(K: KernelSpec, spacing: float, count: int) -> np.ndarray:
    """``G[m] = integral of K over (-(m+1)*spacing, -m*spacing)``, exact."""
    ts = spacing * np.arange(count + 1)
    vals = np.array([_kernel_window_integral(K, float(t)) for t in ts])
    return np.diff(vals)


def apply_kernel(f: SampledFunction, K: KernelSpec) -> SampledFunction:
    """``integral K(x - y) f(y) dy`` at cell left boundaries, exactly.

    For the dyadic-difference kernel this is an independent route to
    ``differential_transform`` (piece-by-piece integration of the explicit
    kernel instead of telescoping averages); the two agree to rounding.
    """
    if isinstance(K, FractionalKernel):
        return fractional_integral(f, K.alpha, K.side)
    n = f.grid.count
    G = kernel_cell_integrals(K, f.grid.spacing, n)
    # out[i] = sum_d f[i+d] * G[d]  (correlation)
    out = np.convolve(f.values[::-1], G)[: n][::-1]
    return f.with_values(out)


# ---------------------------------------------------------------------------
# Fractional integrals and commutators
# ---------------------------------------------------------------------------


def _fractional_weights(alpha: float, spacing: float, count: int) -> np.ndarray:
    m = np.arange(count + 1, dtype=float)
    return spacing**alpha * np.diff(m**alpha) / alpha


def fractional_integral(f: SampledFunction, alpha: float, side: str = "forward") -> SampledFunction:
    """Weyl-type fractional integral with the singularity handled exactly.

    Forward: ``integral_x^inf f(y) (y - x)**(alpha - 1) dy`` at cell left
    boundaries; each cell contributes ``value * ((y_b - x)**alpha -
    (y_a - x)**alpha) / alpha`` via the antiderivative, so no quadrature
    error enters.  Backward mirrors this at right boundaries.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if side not in ("forward", "backward"):
        raise ValueError(f"side must be forward or backward, got {side!r}")
    n = f.grid.count
    w = _fractional_weights(alpha, f.grid.spacing, n)
    v = f.values if side == "forward" else f.values[::-1]
    out = np.convolve(v[::-1], w)[:n][::-1]
    if side == "backward":
        out = out[::-1]
    return f.with_values(out)


def iterated_commutator(
    op: Callable[[SampledFunction], SampledFunction],
    b: SampledFunction,
    k: int,
    f: SampledFunction,
) -> SampledFunction:
    """Order-``k`` commutator by the recursion ``[b, .]`` applied ``k`` times.

    Order 0 is ``op(f)`` itself; order ``k`` is ``b * C_{k-1} f -
    C_{k-1}(b f)`` with cell-wise products.
    """
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if b.grid != f.grid:
        raise ValueError("symbol and function live on different grids")
    if k == 0:
        return op(f)
    prev_f = iterated_commutator(op, b, k - 1, f)
    prev_bf = iterated_commutator(op, b, k - 1, f.with_values(b.values * f.values))
    return f.with_values(b.values * prev_f.values - prev_bf.values)


def fractional_commutator_closed_form(
    f: SampledFunction, alpha: float, b: SampledFunction, k: int, side: str = "forward"
) -> SampledFunction:
    """``integral (b(x) - b(y))**k f(y) |y - x|**(alpha-1) dy`` done cell-by-cell.

    Independent O(n^2) route to the same values as ``iterated_commutator``
    over ``fractional_integral``; used as the oracle in tests.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = f.grid.count
    w = _fractional_weights(alpha, f.grid.spacing, n)
    v = f.values if side == "forward" else f.values[::-1]
    bb = b.values if side == "forward" else b.values[::-1]
    out = np.empty(n)
    for i in range(n):
        diff = bb[i] - bb[i:]
        out[i] = float(np.sum(diff**k * v[i:] * w[: n - i]))
    if side == "backward":
        out = out[::-1]
    return f.with_values(out)


# ---------------------------------------------------------------------------
# Truncations
# ---------------------------------------------------------------------------


def truncated_apply(f: SampledFunction, K: KernelSpec, eps: float) -> SampledFunction:
    """``integral_{x+eps}^inf K(x - y) f(y) dy`` with ``eps`` whole cells."""
    if isinstance(K, FractionalKernel):
        raise TypeError("truncations are for singular kernels; the fractional kernel is integrable")
    m = _whole_cells(eps, f.grid.spacing)
    if m is None:
        raise ValueError(f"eps = {eps} is not a whole number of cells")
    n = f.grid.count
    G = kernel_cell_integrals(K, f.grid.spacing, n)
    G = G.copy()
    G[:m] = 0.0
    out = np.convolve(f.values[::-1], G)[:n][::-1]
    return f.with_values(out)


def maximal_truncated(f: SampledFunction, K: KernelSpec) -> SampledFunction:
    """``sup over eps`` of ``|truncated_apply(f, K, eps)|``, eps from one cell up.

    Computed by accumulating cell contributions from far to near, so the
    whole family of truncations costs one O(n^2) sweep.
    """
    if isinstance(K, FractionalKernel):
        raise TypeError("truncations are for singular kernels; the fractional kernel is integrable")
    n = f.grid.count
    G = kernel_cell_integrals(K, f.grid.spacing, n)
    v = f.values
    acc = np.zeros(n)  # truncation at eps = (m+1) cells, built downward in m
    best = np.zeros(n)
    for m in range(n - 1, 0, -1):
        # add the contribution of cells at offset m: f[i+m] * G[m]
        if G[m] != 0.0:
            acc[: n - m] += v[m:] * G[m]
        np.maximum(best, np.abs(acc), out=best)
    return f.with_values(best)


# ---------------------------------------------------------------------------
# Kernel size conditions and annulus sums
# ---------------------------------------------------------------------------


def kernel_condition_report(
    K: KernelSpec,
    eps_grid: Sequence[float] | None = None,
    N_grid: Sequence[float] | None = None,
) -> KernelReport:
    """Estimate the two size constants of a singular kernel.

    ``b1`` bounds cancellation: the largest ``|integral over eps < |u| < N|``
    across the grids; ``b2`` bounds decay: the largest ``|u * K(u)|`` over a
    log-spaced sample refined with the kernel's own breakpoints.
    """
    if isinstance(K, FractionalKernel):
        raise TypeError("size conditions target singular kernels")
    support = K.support
    if eps_grid is None:
        eps_grid = np.geomspace(support * 1e-6, support, 40)
    if N_grid is None:
        N_grid = np.geomspace(support * 1e-5, support * 2.0, 40)
    b1 = 0.0
    for eps in eps_grid:
        Ieps = _kernel_window_integral(K, float(eps))
        for N in N_grid:
            if N <= eps:
                continue
            b1 = max(b1, abs(_kernel_window_integral(K, float(N)) - Ieps))
    us = list(-np.geomspace(support * 1e-6, support * 0.999999, 200))
    if isinstance(K, DifferentialTransformKernel):
        for j in range(K.j_min - 1, K.j_max + 1):
            h = 2.0**j
            if h < support:
                us.extend([-h * 0.999, -h * 1.001])
    vals = kernel_eval(K, np.array(us))
    prods = np.abs(np.array(us) * vals)
    order = np.argsort(prods)[::-1][:8]
    samples = tuple((float(us[i]), float(vals[i])) for i in order)
    return KernelReport(b1_estimate=float(b1), b2_estimate=float(prods.max()), samples=samples)


def _difference_breakpoints(K: KernelSpec, x: float) -> list[float]:
    """Candidate y-breakpoints of ``y -> K(x - y) - K(-y)`` on ``y > 0``."""
    pts: set[float] = {0.0, x}
    if isinstance(K, DifferentialTransformKernel):
        for j in range(K.j_min - 1, K.j_max + 1):
            h = 2.0**j
            pts.add(h)
            pts.add(h + x)
    elif isinstance(K, TabulatedKernel):
        for m in range(len(K.values) + 1):
            pts.add(m * K.spacing)
            pts.add(m * K.spacing + x)
    else:
        raise TypeError(f"unsupported kernel {type(K).__name__}")
    return sorted(pts)


def hormander_partial_sum(
    K: KernelSpec,
    A: YoungFunction,
    k: int,
    x: float,
    R: float,
    M: int,
    c: float = 2.0,
) -> np.ndarray:
    """Partial sums of weighted annulus norms of the shifted-kernel difference.

    Term ``m`` is ``2**m * R * m**k`` times the Luxemburg norm, over the ball
    ``(-2**(m+1) R, 2**(m+1) R)``, of ``(K(x-.) - K(-.))`` restricted to the
    annulus ``2**m R < |y| <= 2**(m+1) R``.  Requires ``R > c * |x|`` with
    ``c >= 1`` (default 2).  Once the annuli pass the kernel's support the
    difference vanishes and terms are exactly zero, so for compactly
    supported kernels the partial sums flatten identically.

    Returns the cumulative sums ``S_1 .. S_M``.
    """
    if c < 1.0:
        raise ValueError(f"annulus constant c must be >= 1, got {c}")
    if not R > c * abs(x):
        raise ValueError(f"need R > c*|x| = {c * abs(x)}, got R = {R}")
    if M < 1 or k < 0:
        raise ValueError("need M >= 1 and k >= 0")
    terms = np.zeros(M)
    for m in range(1, M + 1):
        lo, hi = 2.0**m * R, 2.0 ** (m + 1) * R
        pts = [lo] + [p for p in _difference_breakpoints(K, x) if lo < p < hi] + [hi]
        mids = np.array([(a + b) / 2.0 for a, b in zip(pts, pts[1:])])
        lens = np.diff(np.array(pts))
        diff = kernel_eval(K, x - mids) - kernel_eval(K, -mids)
        # negative half of the annulus: both terms vanish there for x >= 0
        if x < 0.0:
            diff_neg = kernel_eval(K, x + mids) - kernel_eval(K, mids)
            diff = np.concatenate([diff, diff_neg])
            mids = np.concatenate([mids, -mids])
            lens = np.concatenate([lens, lens])
        if not np.any(diff):
            continue
        ball = 2.0 * hi
        lam = luxemburg_from_samples(diff, lens, ball, A)
        terms[m - 1] = 2.0**m * R * float(m) ** k * lam
    return np.cumsum(terms)
