"""Seeded families of test functions for the verification harness.

Every corpus item is a resolution-independent function spec whose geometry
(breakpoints, heights) is drawn once from a seeded generator and snapped to
the base grid.  Refining the grid keeps every base boundary, so the same
item resamples to an exact representation of the same underlying function
at finer resolutions — which is what makes refinement trends meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .grid import (
    FunctionSpec,
    Grid,
    IndicatorSpec,
    SampledFunction,
    StepsSpec,
    sample_function,
)

__all__ = ["CorpusItem", "Corpus", "standard_corpus", "ripple_plateau"]


@dataclass(frozen=True)
class CorpusItem:
    """One named, resolution-independent test function."""

    case_id: str
    spec: FunctionSpec


@dataclass(frozen=True)
class Corpus:
    """A grid plus the items to sample on it."""

    grid: Grid
    items: tuple[CorpusItem, ...]

    def functions(self) -> Iterator[tuple[str, SampledFunction]]:
        for item in self.items:
            yield item.case_id, sample_function(item.spec, self.grid)

    def refined(self, factor: int = 2) -> "Corpus":
        """The same items sampled on a ``factor``-times finer grid."""
        return Corpus(self.grid.refined(factor), self.items)

    def __len__(self) -> int:
        return len(self.items)


def _snap(grid: Grid, x: float) -> float:
    return grid.boundary(grid.nearest_boundary_index(x))


def standard_corpus(
    grid: Grid,
    seed: int,
    signed: bool = True,
    lead: float = 0.1,
    width: float = 0.8,
    random_steps: int = 3,
) -> Corpus:
    """Indicators, a dyadic comb, staircases, a spike, and random step
    functions, all supported in ``[origin + lead*extent, origin +
    (lead+width)*extent]``.

    ``signed=False`` draws only nonnegative heights (required by checks
    whose zero-threshold claims fail for signed functions).  Shrinking
    ``width`` leaves right-of-support headroom for operators that read
    values to the right.
    """
    if not (0.0 <= lead and lead + width <= 1.0 and width > 0.0):
        raise ValueError(f"need 0 <= lead, lead + width <= 1, got ({lead}, {width})")
    rng = np.random.default_rng(seed)
    lo = grid.origin + lead * grid.extent
    span = width * grid.extent
    items: list[CorpusItem] = []

    def snapped_piece(fa: float, fc: float, h: float) -> tuple[float, float, float] | None:
        a = _snap(grid, lo + fa * span)
        c = _snap(grid, lo + fc * span)
        if c <= a:
            return None
        return (a, c, h)

    # plain indicators: a wide one and a narrow one
    wide = snapped_piece(0.2, 0.65, 1.0)
    if wide:
        items.append(CorpusItem("ind-wide", IndicatorSpec(wide[0], wide[1])))
    narrow = snapped_piece(0.45, 0.5, 1.0)
    if narrow:
        items.append(CorpusItem("ind-narrow", IndicatorSpec(narrow[0], narrow[1])))

    # dyadic comb: teeth at halving offsets with halving widths
    comb = []
    for k in range(4):
        off = 1.0 - 2.0 ** -(k + 1)
        piece = snapped_piece(off, off + 2.0 ** -(k + 3), 1.0)
        if piece:
            comb.append(piece)
    if comb:
        items.append(CorpusItem("comb-dyadic", StepsSpec(tuple(comb))))

    # monotone staircases over the middle of the support
    for name, heights in (
        ("stairs-up", (0.25, 0.5, 1.0, 1.5, 2.0)),
        ("stairs-down", (2.0, 1.5, 1.0, 0.5, 0.25)),
    ):
        pieces = []
        step = 0.5 / len(heights)
        for i, h in enumerate(heights):
            piece = snapped_piece(0.25 + i * step, 0.25 + (i + 1) * step, h)
            if piece:
                pieces.append(piece)
        if pieces:
            items.append(CorpusItem(name, StepsSpec(tuple(pieces))))

    # one tall thin spike
    spike = snapped_piece(0.7, 0.7 + 1.0 / 64.0, 16.0)
    if spike:
        items.append(CorpusItem("spike", StepsSpec((spike,))))

    # random aligned step functions with seeded continuous breakpoints
    h_lo, h_hi = (-2.0, 2.0) if signed else (0.2, 2.0)
    for r in range(random_steps):
        pieces = []
        for _ in range(6):
            fa = float(rng.uniform(0.0, 0.92))
            fc = fa + float(rng.uniform(0.02, 0.08))
            h = float(rng.uniform(h_lo, h_hi))
            piece = snapped_piece(fa, min(fc, 1.0), h)
            if piece:
                pieces.append(piece)
        if pieces:
            items.append(CorpusItem(f"steps-rand-{r}", StepsSpec(tuple(pieces))))

    return Corpus(grid, tuple(items))


def ripple_plateau(
    grid: Grid, start_frac: float = 0.6, height: float = 1.0, ripple: float = 0.015625
) -> SampledFunction:
    """A high plateau running to the right grid edge with a per-cell ripple.

    Forward windows anchored inside the plateau never leave it, so the
    oscillation there is exactly the ripple scale: large maximal values
    coexist with strictly positive but tiny sharp-maximal values.  This is
    the geometry that puts mass into good-lambda exceptional sets while
    keeping their zero-threshold limit empty.
    """
    if not 0.0 < start_frac < 1.0:
        raise ValueError(f"start_frac must be in (0, 1), got {start_frac}")
    if not (height > 0.0 and 0.0 < ripple < height):
        raise ValueError("need 0 < ripple < height")
    values = np.zeros(grid.count)
    i0 = grid.nearest_boundary_index(grid.origin + start_frac * grid.extent)
    i0 = min(max(i0, 0), grid.count - 2)
    idx = np.arange(grid.count - i0)
    values[i0:] = height + ripple * np.where(idx % 2 == 0, 1.0, -1.0)
    return SampledFunction(grid, values)
