"""Weighted norms and one-sided weight-condition diagnostics.

The central quantity is the ratio

    w(E)  /  [ (|E| / (c-b))**eps * integral (forward_maximal 1_(a,c))**p w ]

for triples ``a < b < c`` and measurable ``E`` inside ``(a, b)``.  Because
the forward maximal of an interval indicator has the closed form
``(c-a)/(c-x)`` left of ``a``, the denominator integral is evaluated cell
by cell from the antiderivative — no operator discretization enters these
ratios at all.  A weight family satisfies the condition when the supremum
of these ratios over a rich family of triples and sets stays bounded.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import (
    CellSet,
    Grid,
    IntervalSpec,
    SampledFunction,
    components_of_mask,
    level_components,
    parse_function_spec,
    sample_function,
)
from .maximal import indicator_maximal_closed_form
from .reporting import RatioRecord, VerificationReport, make_record

__all__ = [
    "Weight",
    "TripleConfig",
    "parse_weight_spec",
    "weighted_lp_norm",
    "indicator_power_integral",
    "cp_plus_ratio",
    "cp_plus_scan",
    "generate_triple_configs",
    "log_condition_ratio",
    "m_pq_plus",
    "m_pq_tail_bound",
    "delta_sum",
]


@dataclass(frozen=True)
class Weight:
    """A nonnegative, not identically zero sampled function."""

    f: SampledFunction

    def __post_init__(self) -> None:
        if np.any(self.f.values < 0.0):
            raise ValueError("weights must be nonnegative")
        if not np.any(self.f.values > 0.0):
            raise ValueError("weights must not vanish identically")

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @property
    def values(self) -> np.ndarray:
        return self.f.values

    def mass(self, E: CellSet) -> float:
        """``w(E)``: integral of the weight over a cell set."""
        if E.grid != self.grid:
            raise ValueError("cell set lives on a different grid")
        return float(self.values[E.mask].sum()) * self.grid.spacing

    def on(self, grid: Grid, spec_text: str | None = None) -> "Weight":
        """Resample (via the defining spec when known) onto another grid."""
        if spec_text is not None:
            return weight_from_spec(spec_text, grid)
        return Weight(self.f.resampled(grid))


def weight_from_spec(text: str, grid: Grid) -> Weight:
    """Weight grammar: ``const:c | power:gamma | csv:<path>``."""
    head, _, rest = text.partition(":")
    if head == "const":
        return Weight(sample_function(parse_function_spec(f"const:{rest}"), grid))
    if head == "power":
        return Weight(sample_function(parse_function_spec(f"power:{rest}"), grid))
    if head == "csv":
        return Weight(sample_function(parse_function_spec(f"csv:{rest}"), grid))
    raise ValueError(f"unknown weight spec kind {head!r}")


parse_weight_spec = weight_from_spec


@dataclass(frozen=True)
class TripleConfig:
    """A triple ``a < b < c`` with a test set ``E`` inside ``(a, b)``."""

    case_id: str
    a: float
    b: float
    c: float
    E: CellSet

    def __post_init__(self) -> None:
        if not (self.a < self.b < self.c):
            raise ValueError(f"need a < b < c, got ({self.a}, {self.b}, {self.c})")
        grid = self.E.grid
        lo = grid.nearest_boundary_index(self.a)
        hi = grid.nearest_boundary_index(self.b)
        idx = np.flatnonzero(self.E.mask)
        if len(idx) == 0:
            raise ValueError("E must be nonempty")
        if idx[0] < lo or idx[-1] >= hi:
            raise ValueError("E must sit inside (a, b)")

    @property
    def restricted(self) -> bool:
        """Whether the gap layout satisfies ``c - b < b - a``."""
        return (self.c - self.b) < (self.b - self.a)


def weighted_lp_norm(f: SampledFunction, w: Weight, p: float) -> float:
    """``( integral |f|**p w )**(1/p)`` over the grid."""
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    if w.grid != f.grid:
        raise ValueError("weight lives on a different grid")
    total = float((np.abs(f.values) ** p * w.values).sum()) * f.grid.spacing
    return total ** (1.0 / p)


def _indicator_power_cell_integrals(
    grid: Grid, a: float, c: float, p: float
) -> np.ndarray:
    """Exact per-cell integrals of ``(forward_maximal 1_(a,c))**p``.

    Uses the closed form: ``((c-a)/(c-x))**p`` left of ``a``, ``1`` on
    ``(a, c)``, ``0`` beyond; each cell is integrated analytically.
    """
    if not (c > a):
        raise ValueError(f"need a < c, got ({a}, {c})")
    left = grid.left_boundaries()
    right = left + grid.spacing
    out = np.zeros(grid.count)
    # cells fully inside (a, c) region contribute their overlap with (a, c)
    overlap = np.clip(np.minimum(right, c) - np.maximum(left, a), 0.0, None)
    out += overlap
    # cells (partially) left of a: integrate ((c-a)/(c-x))**p up to min(right, a)
    lo = np.minimum(left, a)
    hi = np.minimum(right, a)
    has = hi > lo
    la, ha = lo[has], hi[has]
    if p == 1.0:
        piece = (c - a) * (np.log(c - la) - np.log(c - ha))
    else:
        piece = (c - a) ** p * ((c - la) ** (1.0 - p) - (c - ha) ** (1.0 - p)) / (p - 1.0)
    out[has] += piece
    return out


def indicator_power_integral(
    w: Weight, a: float, c: float, p: float
) -> tuple[float, float]:
    """``integral (forward_maximal 1_(a,c))**p w`` over the grid, plus the
    left-tail estimate below the grid (weight continued by its first cell).

    Returns ``(on_grid, tail)``.  The tail is infinite for ``p <= 1``.
    """
    cells = _indicator_power_cell_integrals(w.grid, a, c, p)
    on_grid = float((cells * w.values).sum())
    x0 = w.grid.origin
    if x0 >= c:
        return on_grid, 0.0
    if p > 1.0:
        tail = float(w.values[0]) * (c - a) ** p * (c - x0) ** (1.0 - p) / (p - 1.0)
    else:
        tail = math.inf
    return on_grid, tail


def cp_plus_ratio(
    w: Weight, p: float, eps: float, config: TripleConfig
) -> RatioRecord:
    """One weight-condition ratio for a single triple and test set.

    Flags the record when the analytic left tail of the denominator exceeds
    1% of the on-grid part (the grid is then too short for this triple).
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    a, b, c = config.a, config.b, config.c
    num = w.mass(config.E)
    on_grid, tail = indicator_power_integral(w, a, c, p)
    scale = (config.E.measure / (c - b)) ** eps
    flags = []
    if not (tail < 0.01 * on_grid):
        flags.append("denominator-tail")
    if not config.restricted:
        flags.append("wide-gap")
    return make_record(
        config.case_id,
        num,
        scale * on_grid,
        params={
            "a": a,
            "b": b,
            "c": c,
            "set_measure": config.E.measure,
            "p": p,
            "eps": eps,
            "tail_fraction": tail / on_grid if on_grid > 0 else math.inf,
            "restricted": config.restricted,
        },
        flags=tuple(flags),
    )


def generate_triple_configs(
    grid: Grid,
    seed: int,
    triples: int = 12,
    sets_per_triple: int = 4,
    span: tuple[float, float] | None = None,
) -> list[TripleConfig]:
    """Seeded family of triples with nested/shifted/dyadic-scaled geometry
    and several set shapes per triple.

    Geometry is drawn in continuous coordinates and snapped per grid, so the
    same seed yields comparable families across resolutions.  Set shapes:
    left sub-intervals of dyadic fractions, unions of random runs, and a
    sparse middle-thirds pattern.
    """
    rng = np.random.default_rng(seed)
    if span is None:
        span = (grid.origin + 0.55 * grid.extent, grid.right)
    lo, hi = span
    width = hi - lo
    configs: list[TripleConfig] = []
    count = 0
    for t in range(triples):
        scale = float(rng.choice([1.0, 0.5, 0.25]))
        base = width * scale * 0.5
        a = lo + float(rng.uniform(0.05, 0.3)) * width
        b = a + base * float(rng.uniform(0.4, 0.8))
        c = b + (b - a) * float(rng.uniform(0.3, 1.8))
        ia = grid.nearest_boundary_index(a)
        ib = grid.nearest_boundary_index(b)
        ic = grid.nearest_boundary_index(c)
        if not (ia < ib < ic <= grid.count):
            continue
        a, b, c = grid.boundary(ia), grid.boundary(ib), grid.boundary(ic)
        inner = ib - ia
        shapes: list[tuple[str, np.ndarray]] = []
        for m in range(sets_per_triple):
            kind = ("left", "runs", "thirds", "left")[m % 4]
            mask = np.zeros(grid.count, dtype=bool)
            if kind == "left":
                frac = 2.0 ** -(m // 4 * 2 + (1 if m % 4 == 3 else 0) + 1)
                end = ia + max(1, int(inner * frac))
                mask[ia:end] = True
            elif kind == "runs":
                starts = rng.uniform(0.0, 0.9, size=3)
                for s in starts:
                    s0 = ia + int(inner * s)
                    mask[s0 : min(s0 + max(1, inner // 8), ib)] = True
            else:  # sparse middle-thirds pattern
                segs = [(ia, ib)]
                for _ in range(3):
                    nxt = []
                    for s0, s1 in segs:
                        third = max((s1 - s0) // 3, 1)
                        nxt.append((s0, s0 + third))
                        if s1 - third > s0 + third:
                            nxt.append((s1 - third, s1))
                    segs = nxt
                for s0, s1 in segs:
                    mask[s0:s1] = True
                mask[ib:] = False
            mask[:ia] = False
            mask[ib:] = False
            if ib - ia >= 2:
                # one-cell clearance below b keeps every backward average of
                # the set's indicator strictly under |E|/(c-b) beyond c, so
                # witness constructions vanish there exactly, not just to
                # rounding
                mask[ib - 1] = False
            if not mask[ia:ib].any():
                continue
            shapes.append((kind, mask))
        for kind, mask in shapes:
            configs.append(
                TripleConfig(f"t{t:02d}-{kind}-{count:03d}", a, b, c, CellSet(grid, mask))
            )
            count += 1
    return configs


def cp_plus_scan(
    w: Weight,
    p: float,
    eps: float,
    grid: Grid,
    seed: int,
    triples: int = 12,
    sets_per_triple: int = 4,
) -> VerificationReport:
    """Seeded sweep of weight-condition ratios across triples and set shapes.

    Reports the overall supremum and, separately, the supremum over the
    triples with ``c - b < b - a`` (the narrow-gap layout).
    """
    t0 = time.perf_counter()
    configs = generate_triple_configs(grid, seed, triples, sets_per_triple)
    records = [cp_plus_ratio(w, p, eps, cfg) for cfg in configs]
    restricted = [r.ratio for r in records if r.params.get("restricted")]
    notes = {
        "configs": len(records),
        "sup_restricted": max(restricted) if restricted else 0.0,
        "p": p,
        "eps": eps,
    }
    return VerificationReport.from_records(
        "cp_scan", records, seed=seed, runtime_s=time.perf_counter() - t0, notes=notes
    )


def log_condition_ratio(
    w: Weight, p: float, config: TripleConfig
) -> RatioRecord:
    """Ratio against the logarithmically-damped indicator integral.

    The denominator replaces the power ``(|E|/(c-b))**eps`` of the plain
    condition by ``(1 + log+ ((c-b)/|E|))**(-p)``.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    a, b, c = config.a, config.b, config.c
    num = w.mass(config.E)
    on_grid, tail = indicator_power_integral(w, a, c, p)
    damp = (1.0 + max(0.0, math.log((c - b) / config.E.measure))) ** (-p)
    flags = []
    if not (tail < 0.01 * on_grid):
        flags.append("denominator-tail")
    return make_record(
        config.case_id,
        num,
        damp * on_grid,
        params={"a": a, "b": b, "c": c, "set_measure": config.E.measure, "p": p},
        flags=tuple(flags),
    )


def m_pq_plus(
    f: SampledFunction, p: float, q: float, k_min: int | None = None
) -> SampledFunction:
    """Level-set hybrid maximal: p-th root of the level sum

    ``sum_k 2**(p k) * sum_i (forward_maximal 1_{I_i^k})**q``

    where ``I_i^k`` are the components of ``{f > 2**k}`` and the component
    maximal is evaluated by its closed form at cell left boundaries.  Levels
    run from ``k_min`` (default: one below the smallest positive cell value)
    up to the top of ``f``; the discarded tail is bounded by
    ``m_pq_tail_bound``.
    """
    if p <= 0.0 or q <= 0.0:
        raise ValueError("p and q must be positive")
    if np.any(f.values < 0.0):
        raise ValueError("level-set maximal requires a nonnegative function")
    total, _ = _m_pq_sum(f, p, q, k_min)
    return f.with_values(total ** (1.0 / p))


def _m_pq_levels(f: SampledFunction, k_min: int | None) -> range:
    pos = f.values[f.values > 0.0]
    if len(pos) == 0:
        return range(0, 0)
    top = math.ceil(math.log2(float(pos.max())))
    if k_min is None:
        k_min = math.floor(math.log2(float(pos.min()))) - 1
    if k_min > top:
        return range(0, 0)
    return range(k_min, top + 1)


def _m_pq_sum(
    f: SampledFunction, p: float, q: float, k_min: int | None
) -> tuple[np.ndarray, float]:
    grid = f.grid
    x = grid.left_boundaries()
    total = np.zeros(grid.count)
    worst_level = 0.0
    for k in _m_pq_levels(f, k_min):
        level = np.zeros(grid.count)
        for comp in level_components(f, 2.0**k):
            level += indicator_maximal_closed_form(comp.a, comp.c, x) ** q
        if not level.any():
            continue
        total += 2.0 ** (p * k) * level
        worst_level = max(worst_level, float(level.max()))
    return total, worst_level


def m_pq_tail_bound(
    f: SampledFunction, p: float, q: float, k_min: int | None = None
) -> float:
    """Upper bound on the level sum discarded below ``k_min``.

    Geometric-series bound: levels below ``k_min`` contribute at most
    ``2**(p k_min) / (1 - 2**-p)`` times the largest per-level q-power sum.
    """
    levels = _m_pq_levels(f, k_min)
    if len(levels) == 0:
        return 0.0
    _, worst = _m_pq_sum(f, p, q, k_min)
    return 2.0 ** (p * levels.start) / (1.0 - 2.0**-p) * worst


def delta_sum(grid: Grid, intervals: Sequence[IntervalSpec], p: float) -> SampledFunction:
    """``sum_k (forward_maximal 1_{I_k})**p`` at cell left boundaries.

    The intervals must be pairwise disjoint.
    """
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    ordered = sorted(intervals, key=lambda I: I.a)
    for left, right in zip(ordered, ordered[1:]):
        if right.a < left.c - 1e-12 * grid.spacing:
            raise ValueError(
                f"intervals overlap: ({left.a}, {left.c}) and ({right.a}, {right.c})"
            )
    x = grid.left_boundaries()
    total = np.zeros(grid.count)
    for I in ordered:
        total += indicator_maximal_closed_form(I.a, I.c, x) ** p
    return SampledFunction(grid, total)
