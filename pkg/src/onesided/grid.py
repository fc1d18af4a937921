"""Uniform-grid carriers for piecewise-constant functions on the line.

Every operator in this package acts on functions that are constant on the
cells of a uniform grid and identically zero outside it.  Cell ``i`` covers
the half-open interval ``[origin + i*spacing, origin + (i+1)*spacing)``.
Integrals of such functions are computed exactly (including partial-cell
overlap), so discretization error enters only through the sampling of a
continuous function onto the grid, never through quadrature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "Grid",
    "SampledFunction",
    "CellSet",
    "IntervalSpec",
    "IndicatorSpec",
    "PowerSpec",
    "ConstSpec",
    "StepsSpec",
    "RandomSpec",
    "CsvSpec",
    "FunctionSpec",
    "parse_function_spec",
    "sample_function",
    "integrate",
    "prefix_cell_sums",
    "level_components",
    "components_of_mask",
    "geometric_partition",
]

#: Relative tolerance (in units of one cell) for deciding that a coordinate
#: sits on a cell boundary.
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """A uniform partition of ``[origin, origin + count*spacing)`` into cells."""

    origin: float
    spacing: float
    count: int

    def __post_init__(self) -> None:
        if not (self.spacing > 0.0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive and finite, got {self.spacing}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if not math.isfinite(self.origin):
            raise ValueError(f"origin must be finite, got {self.origin}")

    @property
    def right(self) -> float:
        """Right edge of the grid."""
        return self.origin + self.count * self.spacing

    @property
    def extent(self) -> float:
        """Total length covered by the grid."""
        return self.count * self.spacing

    def boundary(self, i: int) -> float:
        """Coordinate of boundary ``i`` (boundary 0 is the origin)."""
        return self.origin + i * self.spacing

    def left_boundaries(self) -> np.ndarray:
        """Left boundary of every cell, shape ``(count,)``."""
        return self.origin + self.spacing * np.arange(self.count)

    def right_boundaries(self) -> np.ndarray:
        """Right boundary of every cell, shape ``(count,)``."""
        return self.origin + self.spacing * np.arange(1, self.count + 1)

    def to_unit(self, x: float) -> float:
        """Coordinate ``x`` expressed in cell units from the origin."""
        return (x - self.origin) / self.spacing

    def boundary_index(self, x: float, what: str = "coordinate") -> int:
        """Index of the boundary at ``x``; raises if ``x`` is off-boundary.

        The tolerance is ``BOUNDARY_TOL`` cells (scaled up for coordinates
        many cells from the origin, where float cancellation dominates).
        """
        u = self.to_unit(x)
        i = round(u)
        if abs(u - i) > BOUNDARY_TOL * max(1.0, abs(u)):
            raise ValueError(
                f"{what} {x!r} is not on a cell boundary "
                f"(offset {abs(u - i):.3g} cells, spacing {self.spacing})"
            )
        if i < 0 or i > self.count:
            raise ValueError(f"{what} {x!r} lies outside the grid [{self.origin}, {self.right}]")
        return int(i)

    def nearest_boundary_index(self, x: float) -> int:
        """Index of the boundary nearest to ``x`` (ties round up), clipped to the grid."""
        i = math.floor(self.to_unit(x) + 0.5)
        return int(min(max(i, 0), self.count))

    def refined(self, factor: int = 2) -> "Grid":
        """Same extent, ``factor`` times as many cells."""
        if factor < 1:
            raise ValueError("refinement factor must be >= 1")
        return Grid(self.origin, self.spacing / factor, self.count * factor)

    def constant(self, value: float) -> "SampledFunction":
        return SampledFunction(self, np.full(self.count, float(value)))

    def zero(self) -> "SampledFunction":
        return self.constant(0.0)


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SampledFunction:
    """A piecewise-constant function: one value per grid cell, zero outside.

    Instances are immutable; ``values`` is a read-only array so that sharing
    across threads is safe by construction.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.count,):
            raise ValueError(
                f"values shape {v.shape} does not match grid count {self.grid.count}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", _freeze(v))

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_same_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_same_grid(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> "SampledFunction":
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __abs__(self) -> "SampledFunction":
        return self.with_values(np.abs(self.values))

    def _check_same_grid(self, other: "SampledFunction") -> None:
        if other.grid != self.grid:
            raise ValueError("operands live on different grids")

    def resampled(self, grid: Grid) -> "SampledFunction":
        """Exact cell averages of this function on another uniform grid."""
        sums = prefix_cell_sums(self)
        edges = grid.origin + grid.spacing * np.arange(grid.count + 1)
        cum = _cumulative_at(self, sums, edges)
        return SampledFunction(grid, np.diff(cum) / grid.spacing)


@dataclass(frozen=True)
class CellSet:
    """A measurable union of whole cells of one grid."""

    grid: Grid
    mask: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != (self.grid.count,):
            raise ValueError("mask shape does not match grid")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @property
    def cell_count(self) -> int:
        return int(self.mask.sum())

    @property
    def measure(self) -> float:
        """Lebesgue measure of the set."""
        return self.cell_count * self.grid.spacing

    def components(self) -> list["IntervalSpec"]:
        """Maximal runs of member cells, as intervals."""
        return components_of_mask(self.grid, self.mask)

    @staticmethod
    def from_interval(grid: Grid, a: float, c: float) -> "CellSet":
        ia = grid.boundary_index(a, "interval endpoint")
        ic = grid.boundary_index(c, "interval endpoint")
        if ic <= ia:
            raise ValueError(f"empty interval ({a}, {c})")
        mask = np.zeros(grid.count, dtype=bool)
        mask[ia:ic] = True
        return CellSet(grid, mask)


@dataclass(frozen=True)
class IntervalSpec:
    """An interval ``(a, c)`` whose endpoints sit on cell boundaries."""

    a: float
    c: float

    def __post_init__(self) -> None:
        if not (self.c > self.a):
            raise ValueError(f"need a < c, got ({self.a}, {self.c})")

    @property
    def length(self) -> float:
        return self.c - self.a

    def indicator(self, grid: Grid) -> "SampledFunction":
        return sample_function(IndicatorSpec(self.a, self.c), grid)

    @staticmethod
    def snapped(grid: Grid, a: float, c: float) -> "IntervalSpec":
        ia = grid.nearest_boundary_index(a)
        ic = grid.nearest_boundary_index(c)
        if ic <= ia:
            raise ValueError(f"interval ({a}, {c}) collapses on this grid")
        return IntervalSpec(grid.boundary(ia), grid.boundary(ic))


# ---------------------------------------------------------------------------
# Function specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndicatorSpec:
    """Indicator of ``(a, c)``; endpoints must be cell boundaries."""

    a: float
    c: float


@dataclass(frozen=True)
class PowerSpec:
    """``|x|**gamma`` with ``gamma > -1``, sampled by exact cell averages."""

    gamma: float


@dataclass(frozen=True)
class ConstSpec:
    """Constant value on every cell of the grid."""

    value: float


@dataclass(frozen=True)
class StepsSpec:
    """Sum of aligned rectangular pieces ``(a, c, height)``."""

    pieces: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class RandomSpec:
    """Seeded i.i.d. uniform cell values in ``[low, high]``."""

    seed: int
    low: float = 0.0
    high: float = 1.0


@dataclass(frozen=True)
class CsvSpec:
    """Two-column ``x,value`` file; ``x`` must be consecutive cell left boundaries."""

    path: str


FunctionSpec = Union[IndicatorSpec, PowerSpec, ConstSpec, StepsSpec, RandomSpec, CsvSpec]


def parse_function_spec(text: str) -> FunctionSpec:
    """Parse the colon-delimited function grammar used by the CLI.

    ``indicator:a:c`` | ``power:gamma`` | ``const:v`` |
    ``steps:a:c:v[:a:c:v...]`` | ``random:seed[:low:high]`` | ``csv:path``
    """
    head, _, rest = text.partition(":")
    try:
        if head == "indicator":
            a, c = rest.split(":")
            return IndicatorSpec(float(a), float(c))
        if head == "power":
            return PowerSpec(float(rest))
        if head == "const":
            return ConstSpec(float(rest))
        if head == "steps":
            parts = [float(p) for p in rest.split(":")]
            if not parts or len(parts) % 3:
                raise ValueError("steps need triples a:c:v")
            pieces = tuple(
                (parts[i], parts[i + 1], parts[i + 2]) for i in range(0, len(parts), 3)
            )
            return StepsSpec(pieces)
        if head == "random":
            parts = rest.split(":")
            if len(parts) == 1:
                return RandomSpec(int(parts[0]))
            if len(parts) == 3:
                return RandomSpec(int(parts[0]), float(parts[1]), float(parts[2]))
            raise ValueError("random takes seed or seed:low:high")
        if head == "csv":
            if not rest:
                raise ValueError("csv needs a path")
            return CsvSpec(rest)
    except ValueError as exc:
        raise ValueError(f"bad function spec {text!r}: {exc}") from None
    raise ValueError(f"unknown function spec kind {head!r}")


def _power_antiderivative(x: np.ndarray, gamma: float) -> np.ndarray:
    # F with F' = |x|**gamma; continuous through 0 for gamma > -1.
    return np.sign(x) * np.abs(x) ** (gamma + 1.0) / (gamma + 1.0)


def sample_function(spec: FunctionSpec, grid: Grid) -> SampledFunction:
    """Realize a function spec as cell values on ``grid``.

    Indicators and step pieces must have boundary-aligned endpoints; the
    power family is sampled by exact cell averages of ``|x|**gamma``.
    """
    n = grid.count
    if isinstance(spec, IndicatorSpec):
        if not spec.c > spec.a:
            raise ValueError(f"indicator needs a < c, got ({spec.a}, {spec.c})")
        ia = grid.boundary_index(spec.a, "indicator endpoint")
        ic = grid.boundary_index(spec.c, "indicator endpoint")
        v = np.zeros(n)
        v[ia:ic] = 1.0
        return SampledFunction(grid, v)
    if isinstance(spec, PowerSpec):
        if spec.gamma <= -1.0:
            raise ValueError(f"power exponent must exceed -1, got {spec.gamma}")
        edges = grid.origin + grid.spacing * np.arange(n + 1)
        F = _power_antiderivative(edges, spec.gamma)
        return SampledFunction(grid, np.diff(F) / grid.spacing)
    if isinstance(spec, ConstSpec):
        return grid.constant(spec.value)
    if isinstance(spec, StepsSpec):
        v = np.zeros(n)
        for a, c, height in spec.pieces:
            if not c > a:
                raise ValueError(f"step piece needs a < c, got ({a}, {c})")
            ia = grid.boundary_index(a, "step endpoint")
            ic = grid.boundary_index(c, "step endpoint")
            v[ia:ic] += height
        return SampledFunction(grid, v)
    if isinstance(spec, RandomSpec):
        if not spec.high > spec.low:
            raise ValueError("random spec needs low < high")
        rng = np.random.default_rng(spec.seed)
        return SampledFunction(grid, rng.uniform(spec.low, spec.high, n))
    if isinstance(spec, CsvSpec):
        xs, vals = _read_csv_columns(spec.path)
        return _place_csv(grid, xs, vals)
    raise TypeError(f"unsupported function spec {type(spec).__name__}")


def _read_csv_columns(path: str) -> tuple[np.ndarray, np.ndarray]:
    rows: list[tuple[float, float]] = []
    with Path(path).open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: need two columns x,value")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if lineno == 1:  # header
                    continue
                raise ValueError(f"{path}:{lineno}: non-numeric row {row!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    xs = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    return xs, vals


def _place_csv(grid: Grid, xs: np.ndarray, vals: np.ndarray) -> SampledFunction:
    tol = BOUNDARY_TOL * grid.spacing
    if len(xs) > 1:
        steps = np.diff(xs)
        if np.any(np.abs(steps - grid.spacing) > tol * max(1.0, len(xs))):
            raise ValueError(
                "csv x column must advance by the grid spacing "
                f"({grid.spacing}); got steps in [{steps.min()}, {steps.max()}]"
            )
    i0 = grid.boundary_index(float(xs[0]), "csv start")
    if i0 + len(vals) > grid.count:
        raise ValueError("csv rows run past the right edge of the grid")
    v = np.zeros(grid.count)
    v[i0 : i0 + len(vals)] = vals
    return SampledFunction(grid, v)


# ---------------------------------------------------------------------------
# Exact integration
# ---------------------------------------------------------------------------


def prefix_cell_sums(f: SampledFunction) -> np.ndarray:
    """``P`` with ``P[j] = sum(values[:j])``; shape ``(count+1,)``."""
    out = np.empty(f.grid.count + 1)
    out[0] = 0.0
    np.cumsum(f.values, out=out[1:])
    return out


def _cumulative_at(f: SampledFunction, sums: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Integral of ``f`` from the grid origin to each coordinate in ``x`` (exact)."""
    g = f.grid
    t = np.clip((np.asarray(x, dtype=float) - g.origin) / g.spacing, 0.0, g.count)
    idx = np.minimum(np.floor(t).astype(int), g.count - 1)
    frac = t - idx
    return (sums[idx] + frac * f.values[idx]) * g.spacing


def integrate(f: SampledFunction, a: float, c: float) -> float:
    """Exact integral of ``f`` over ``(a, c)``, partial cells included.

    Both endpoints may be arbitrary reals; parts outside the grid contribute
    zero.  Computed as a difference of one fixed cumulative function, so the
    splitting identity ``integrate(a,m) + integrate(m,c) == integrate(a,c)``
    holds up to one rounding of the final additions (a few ulps), with no
    quadrature error on top.
    """
    if not (c >= a):
        raise ValueError(f"need a <= c, got ({a}, {c})")
    sums = prefix_cell_sums(f)
    lo, hi = _cumulative_at(f, sums, np.array([a, c]))
    return float(hi - lo)


# ---------------------------------------------------------------------------
# Level sets and partitions
# ---------------------------------------------------------------------------


def components_of_mask(grid: Grid, mask: np.ndarray) -> list[IntervalSpec]:
    """Maximal runs of True cells, left to right, as boundary-aligned intervals."""
    m = np.asarray(mask, dtype=bool)
    if m.shape != (grid.count,):
        raise ValueError("mask shape does not match grid")
    padded = np.concatenate([[False], m, [False]])
    flips = np.flatnonzero(padded[1:] != padded[:-1])
    starts, ends = flips[::2], flips[1::2]
    return [IntervalSpec(grid.boundary(int(s)), grid.boundary(int(e))) for s, e in zip(starts, ends)]


def level_components(f: SampledFunction, threshold: float) -> list[IntervalSpec]:
    """Connected components of the super-level set ``{f > threshold}`` at cell resolution."""
    return components_of_mask(f.grid, f.values > threshold)


def geometric_partition(a: float, b: float, grid: Grid) -> list[float]:
    """Points marching from ``a`` toward ``b`` with gaps that halve.

    Starting from ``a``, each next point is the midpoint of the remaining gap
    to ``b``, snapped to the nearest cell boundary (ties toward ``b``); the
    march stops once the unsnapped gap would drop below one cell.  Endpoints
    are snapped to boundaries on entry.  The returned points strictly
    increase and the final point sits exactly one cell short of ``b``
    whenever the initial gap is at least one cell; otherwise the result is
    just ``[a]``.
    """
    if not (b > a):
        raise ValueError(f"need a < b, got ({a}, {b})")
    ia = grid.nearest_boundary_index(a)
    ib = grid.nearest_boundary_index(b)
    if ib - ia < 1:
        return [grid.boundary(ia)]
    # Integer boundary indices keep the recursion exact: from gap g the next
    # snapped gap is g // 2 (midpoint rounded toward b), so the march ends at
    # gap 1 and every consecutive gap halves up to the one-cell rounding.
    points = [ia]
    cur = ia
    while ib - cur >= 2:
        cur = (cur + ib + 1) // 2  # midpoint, half-cells rounded toward b
        points.append(cur)
    return [grid.boundary(i) for i in points]
