"""The inequality harness.

Every check measures a family of ratios "left side / right side" over a
corpus of test functions and reports the supremum, anomaly flags, and —
when rerun on a refined grid — the trend of the supremum under resolution
doubling.  Constants in the target estimates are unspecified, so "bounded"
is operationalized as: the supremum is finite and moves by less than a
stated fraction when the resolution doubles on fixed extent.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .corpus import Corpus
from .grid import (
    CellSet,
    Grid,
    IntervalSpec,
    SampledFunction,
    components_of_mask,
    geometric_partition,
    sample_function,
    IndicatorSpec,
)
from .maximal import (
    Direction,
    WindowPolicy,
    bmo_plus_norm,
    indicator_maximal_closed_form,
    one_sided_maximal,
    sharp_maximal,
)
from .operators import KernelSpec, apply_kernel, maximal_truncated
from .orlicz import YoungFunction, orlicz_maximal, power
from .reporting import RatioRecord, VerificationReport, make_record
from .weights import (
    TripleConfig,
    Weight,
    delta_sum,
    indicator_power_integral,
    m_pq_plus,
    m_pq_tail_bound,
    weighted_lp_norm,
)

__all__ = [
    "Operator",
    "EstimateSpec",
    "pointwise_domination_report",
    "norm_ratio_report",
    "refinement_trend",
    "good_lambda_sets",
    "good_lambda_report",
    "good_lambda_sweep",
    "lemma_check",
    "necessity_construct_and_check",
    "cotlar_report",
    "iterated_maximal",
]

Operator = Callable[[SampledFunction], SampledFunction]

RATIO_FLOOR = 1e-12  # relative floor below which a denominator cell is not divided


@dataclass(frozen=True)
class EstimateSpec:
    """One domination statement: ``lhs <= C * sum(coeff * term)``.

    ``mode`` is ``"pointwise"`` (cell-wise ratios) or ``"norm"`` (weighted
    p-norm ratios).  Terms are callables on sampled functions so the same
    type expresses maximal-vs-sharp, operator-vs-maximal, and multi-term
    right sides.
    """

    name: str
    lhs: Operator
    rhs_terms: tuple[tuple[float, Operator], ...]
    mode: str = "pointwise"

    def __post_init__(self) -> None:
        if self.mode not in ("pointwise", "norm"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.rhs_terms:
            raise ValueError("right side needs at least one term")

    def rhs(self, f: SampledFunction) -> SampledFunction:
        total = np.zeros(f.grid.count)
        for coeff, term in self.rhs_terms:
            total += coeff * term(f).values
        return f.with_values(total)


CorpusLike = Corpus | Iterable[SampledFunction] | Iterable[tuple[str, SampledFunction]]


def _normalize_corpus(corpus: CorpusLike) -> list[tuple[str, SampledFunction]]:
    if isinstance(corpus, Corpus):
        return list(corpus.functions())
    out: list[tuple[str, SampledFunction]] = []
    for i, item in enumerate(corpus):
        if isinstance(item, SampledFunction):
            out.append((f"case-{i:03d}", item))
        else:
            cid, f = item
            out.append((str(cid), f))
    if not out:
        raise ValueError("corpus must be nonempty")
    return out


def _pointwise_record(
    case_id: str, lhs: np.ndarray, rhs: np.ndarray, grid: Grid
) -> RatioRecord:
    """Sup of cell-wise lhs/rhs above the denominator floor.

    Cells where the right side sits below its floor while the left side is
    genuinely positive are counted and flagged, never divided.
    """
    rhs_floor = RATIO_FLOOR * float(rhs.max(initial=0.0))
    lhs_floor = RATIO_FLOOR * float(np.abs(lhs).max(initial=0.0))
    valid = rhs > rhs_floor
    unbounded = int(np.count_nonzero(~valid & (lhs > max(lhs_floor, 0.0))))
    flags = ("unbounded-cell",) if unbounded else ()
    params: dict = {"unbounded_cells": unbounded}
    if not valid.any():
        worst = float(lhs.max(initial=0.0))
        return make_record(case_id, worst, 0.0, params=params, flags=flags)
    ratios = np.where(valid, lhs / np.where(valid, rhs, 1.0), -math.inf)
    i = int(np.argmax(ratios))
    params.update({"cell": i, "x": grid.boundary(i)})
    return make_record(
        case_id, float(lhs[i]), float(rhs[i]), params=params, flags=flags
    )


def pointwise_domination_report(
    spec: EstimateSpec, corpus: CorpusLike, seed: int | None = None
) -> VerificationReport:
    """Cell-wise ratio suprema of ``spec.lhs / spec.rhs`` over a corpus."""
    if spec.mode != "pointwise":
        raise ValueError("spec mode must be pointwise")
    t0 = time.perf_counter()
    records = [
        _pointwise_record(cid, spec.lhs(f).values, spec.rhs(f).values, f.grid)
        for cid, f in _normalize_corpus(corpus)
    ]
    return VerificationReport.from_records(
        spec.name, records, seed=seed, runtime_s=time.perf_counter() - t0
    )


def _weight_on(w: Weight | Callable[[Grid], Weight], grid: Grid) -> Weight:
    if callable(w):
        return w(grid)
    if w.grid == grid:
        return w
    return Weight(w.f.resampled(grid))


def norm_ratio_report(
    spec: EstimateSpec,
    corpus: CorpusLike,
    w: Weight | Callable[[Grid], Weight],
    p: float,
    seed: int | None = None,
) -> VerificationReport:
    """Weighted ``L^p``-norm ratio of ``spec.lhs`` against ``spec.rhs``."""
    if spec.mode != "norm":
        raise ValueError("spec mode must be norm")
    t0 = time.perf_counter()
    records = []
    for cid, f in _normalize_corpus(corpus):
        wg = _weight_on(w, f.grid)
        num = weighted_lp_norm(abs(spec.lhs(f)), wg, p)
        den = weighted_lp_norm(abs(spec.rhs(f)), wg, p)
        flags = () if math.isfinite(num) else ("infinite-lhs",)
        records.append(make_record(cid, num, den, params={"p": p}, flags=flags))
    return VerificationReport.from_records(
        spec.name, records, seed=seed, runtime_s=time.perf_counter() - t0
    )


def refinement_trend(
    make_report: Callable[[Corpus], VerificationReport],
    corpus: Corpus,
    factor: int = 2,
) -> VerificationReport:
    """Run a report on the corpus and on its refinement; attach the trend.

    The trend is ``sup(refined) / sup(base)``; a value near 1 is the
    boundedness surrogate.  A zero base supremum yields trend 0 when the
    refined supremum also vanishes and infinity otherwise.
    """
    base = make_report(corpus)
    fine = make_report(corpus.refined(factor))
    if base.sup_ratio > 0.0:
        trend = fine.sup_ratio / base.sup_ratio
    else:
        trend = 0.0 if fine.sup_ratio == 0.0 else math.inf
    notes = {**base.notes, "sup_refined": fine.sup_ratio, "refine_factor": factor}
    return dataclasses.replace(base, trend=trend, notes=notes)


def iterated_maximal(f: SampledFunction, times: int) -> SampledFunction:
    """``times``-fold composition of the forward maximal (capped at 4)."""
    if not (1 <= times <= 4):
        raise ValueError(f"composition depth must be in 1..4, got {times}")
    out = f
    for _ in range(times):
        out = one_sided_maximal(out, Direction.FORWARD, 1.0, WindowPolicy.ALL)
    return out


# ---------------------------------------------------------------------------
# good-lambda geometry


@dataclass(frozen=True)
class GoodLambdaCell:
    """One (component, partition-index) pair of the level-set geometry."""

    component: int
    index: int
    interval: tuple[float, float]
    next_interval: tuple[float, float]
    set_cells: CellSet


def good_lambda_sets(
    f: SampledFunction, gamma: float, k: int
) -> list[GoodLambdaCell]:
    """The small-sharp-maximal subsets of the partitioned level set.

    The super-level set of the forward maximal at height ``2**(k+1)`` is
    split into components; each component is partitioned by the
    gap-halving march; inside partition interval ``i`` the retained cells
    are those whose sharp maximal is at most ``gamma * 2**k``.  ``gamma``
    may be 0 here (the limit probe); the report operation restricts to
    (0, 1).
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    grid = f.grid
    M = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL)
    sharp = sharp_maximal(f, 1.0, WindowPolicy.ALL)
    above = M.values > 2.0 ** (k + 1)
    small = sharp.values <= gamma * 2.0**k
    out: list[GoodLambdaCell] = []
    for j, comp in enumerate(components_of_mask(grid, above)):
        points = geometric_partition(comp.a, comp.c, grid) + [comp.c]
        for i in range(len(points) - 2):
            lo = grid.nearest_boundary_index(points[i])
            hi = grid.nearest_boundary_index(points[i + 1])
            mask = np.zeros(grid.count, dtype=bool)
            mask[lo:hi] = True
            mask &= above & small
            out.append(
                GoodLambdaCell(
                    component=j,
                    index=i,
                    interval=(points[i], points[i + 1]),
                    next_interval=(points[i + 1], points[i + 2]),
                    set_cells=CellSet(grid, mask),
                )
            )
    return out


def good_lambda_report(
    f: SampledFunction,
    gamma: float,
    k: int,
    w: Weight | None = None,
    q: float = 3.0,
    eps: float = 1.0,
    seed: int | None = None,
) -> VerificationReport:
    """Measure ratios of the good-lambda geometry at one level.

    Unweighted records compare ``|E_i|`` to the length of the next
    partition interval; with a weight, additional records compare ``w(E_i)``
    to ``gamma**eps`` times the weighted ``q``-th power integral of the
    closed-form indicator maximal of the two adjacent intervals.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    t0 = time.perf_counter()
    cells = good_lambda_sets(f, gamma, k)
    records: list[RatioRecord] = []
    sup_unweighted = 0.0
    sup_weighted = 0.0
    for cell in cells:
        cid = f"J{cell.component}-I{cell.index}"
        next_len = cell.next_interval[1] - cell.next_interval[0]
        rec = make_record(
            cid,
            cell.set_cells.measure,
            next_len,
            params={"gamma": gamma, "k": k, "interval": list(cell.interval)},
        )
        sup_unweighted = max(sup_unweighted, rec.ratio)
        records.append(rec)
        if w is not None:
            a, c = cell.interval[0], cell.next_interval[1]
            on_grid, tail = indicator_power_integral(w, a, c, q)
            flags = () if tail < 0.01 * on_grid else ("denominator-tail",)
            wrec = make_record(
                f"{cid}-w",
                w.mass(cell.set_cells),
                gamma**eps * on_grid,
                params={"gamma": gamma, "k": k, "q": q, "eps": eps},
                flags=flags,
            )
            sup_weighted = max(sup_weighted, wrec.ratio)
            records.append(wrec)
    notes = {
        "gamma": gamma,
        "k": k,
        "sup_unweighted": sup_unweighted,
        "sup_weighted": sup_weighted if w is not None else None,
    }
    return VerificationReport.from_records(
        "good_lambda", records, seed=seed, runtime_s=time.perf_counter() - t0, notes=notes
    )


def _auto_level(f: SampledFunction) -> int | None:
    """A level index whose threshold sits well inside the maximal's range."""
    M = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL)
    top = float(M.values.max(initial=0.0))
    if top <= 0.0:
        return None
    return math.floor(math.log2(top)) - 2


def good_lambda_sweep(
    corpus: CorpusLike,
    gammas: Sequence[float],
    w: Weight | None = None,
    q: float = 3.0,
    eps: float = 1.0,
    seed: int | None = None,
) -> VerificationReport:
    """Per-gamma suprema of the unweighted good-lambda ratio over a corpus.

    The level for each function is chosen automatically two doublings below
    the top of its forward maximal; functions with vanishing maximal are
    skipped.  Records are one per (function, gamma); notes carry the
    per-gamma suprema in sweep order.
    """
    t0 = time.perf_counter()
    items = _normalize_corpus(corpus)
    records: list[RatioRecord] = []
    per_gamma: list[float] = []
    for gamma in gammas:
        sup_g = 0.0
        for cid, f in items:
            k = _auto_level(f)
            if k is None:
                continue
            rep = good_lambda_report(f, gamma, k, w=w, q=q, eps=eps)
            sup_g = max(sup_g, rep.notes["sup_unweighted"])
            records.append(
                make_record(
                    f"{cid}-g{gamma}",
                    rep.notes["sup_unweighted"],
                    1.0,
                    params={"gamma": gamma, "k": k},
                )
            )
        per_gamma.append(sup_g)
    notes = {"gammas": list(gammas), "per_gamma_sup": per_gamma}
    return VerificationReport.from_records(
        "good_lambda_sweep",
        records,
        seed=seed,
        runtime_s=time.perf_counter() - t0,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# named lemma-style checks


def _interval_cells(grid: Grid, I: IntervalSpec) -> CellSet:
    return CellSet.from_interval(grid, I.a, I.c)


def lemma_check(which: int, params: dict) -> VerificationReport:
    """Dispatch the three named integral comparisons (12, 13, 15).

    ``which=12``: minimal additive constant against a delta grid, plus the
    global two-integral ratio, for one interval and a disjoint subfamily.
    ``which=13``: level-set hybrid maximal of the forward maximal against
    the plain weighted power integral, per corpus function.
    ``which=15``: the disjoint-subfamily power sum against the
    log-damped interval integral as the family's total measure halves.
    """
    if which == 12:
        return _check_12(**params)
    if which == 13:
        return _check_13(**params)
    if which == 15:
        return _check_15(**params)
    raise ValueError(f"unknown check id {which}")


def _check_12(
    w: Weight,
    q: float,
    interval: IntervalSpec,
    subintervals: Sequence[IntervalSpec],
    delta_grid: Sequence[float] = (0.125, 0.25, 0.5),
) -> VerificationReport:
    t0 = time.perf_counter()
    grid = w.grid
    S = delta_sum(grid, list(subintervals), q)
    inside = _interval_cells(grid, interval)
    lhs_inside = float((S.values[inside.mask] * w.values[inside.mask]).sum()) * grid.spacing
    w_of_I = w.mass(inside)
    D_on, D_tail = indicator_power_integral(w, interval.a, interval.c, q)
    tail_flags = () if D_tail < 0.01 * D_on else ("denominator-tail",)
    records = []
    for delta in delta_grid:
        if not (0.0 < delta < 1.0):
            raise ValueError(f"delta must lie in (0,1), got {delta}")
        residual = lhs_inside - delta * D_on
        records.append(
            make_record(
                f"delta={delta}",
                max(residual, 0.0),
                w_of_I,
                params={"q": q, "delta": delta, "lhs_inside": lhs_inside},
                flags=tail_flags,
            )
        )
    # global comparison: the full-line subfamily sum against the interval term
    lhs_global = float((S.values * w.values).sum()) * grid.spacing
    num_tail = sum(
        indicator_power_integral(w, J.a, J.c, q)[1] for J in subintervals
    )
    records.append(
        make_record(
            "global",
            lhs_global,
            D_on,
            params={"q": q, "numerator_tail": num_tail, "denominator_tail": D_tail},
            flags=tail_flags,
        )
    )
    return VerificationReport.from_records(
        "split_interval_power_sum",
        records,
        runtime_s=time.perf_counter() - t0,
        notes={"q": q, "subintervals": len(subintervals)},
    )


def _check_13(
    w: Weight,
    p: float,
    q: float,
    corpus: CorpusLike,
    k_min: int | None = None,
) -> VerificationReport:
    if p >= q:
        raise ValueError(f"need p < q, got p={p}, q={q}")
    t0 = time.perf_counter()
    records = []
    for cid, f in _normalize_corpus(corpus):
        if np.any(f.values < 0.0):
            raise ValueError("corpus functions must be nonnegative here")
        wg = _weight_on(w, f.grid)
        Mf = one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL)
        hybrid = m_pq_plus(Mf, p, q, k_min)
        lhs = weighted_lp_norm(hybrid, wg, p) ** p
        rhs = weighted_lp_norm(Mf, wg, p) ** p
        tail = m_pq_tail_bound(Mf, p, q, k_min)
        records.append(
            make_record(
                cid,
                lhs,
                rhs,
                params={"p": p, "q": q, "k_min": k_min, "level_tail_bound": tail},
            )
        )
    return VerificationReport.from_records(
        "hybrid_maximal_power_bound",
        records,
        runtime_s=time.perf_counter() - t0,
        notes={"p": p, "q": q},
    )


def _check_15(
    w: Weight,
    p: float,
    interval: IntervalSpec,
    m_max: int = 8,
    pieces: int = 8,
) -> VerificationReport:
    t0 = time.perf_counter()
    grid = w.grid
    total_len = interval.c - interval.a
    D_on, D_tail = indicator_power_integral(w, interval.a, interval.c, p)
    tail_flags = () if D_tail < 0.01 * D_on else ("denominator-tail",)
    records = []
    for m in range(m_max + 1):
        # pieces equally spaced slots, each keeping its left 2^-m fraction
        slot = total_len / pieces
        want = slot * 2.0**-m
        subs: list[IntervalSpec] = []
        measure = 0.0
        for j in range(pieces):
            a = interval.a + j * slot
            ia = grid.nearest_boundary_index(a)
            ic = grid.nearest_boundary_index(a + want)
            if ic <= ia:
                continue
            J = IntervalSpec(grid.boundary(ia), grid.boundary(ic))
            subs.append(J)
            measure += J.c - J.a
        if not subs:
            break
        S = delta_sum(grid, subs, p)
        lhs = float((S.values * w.values).sum()) * grid.spacing
        damp = (1.0 + math.log(total_len / measure)) ** (1.0 - p)
        records.append(
            make_record(
                f"m={m}",
                lhs,
                damp * D_on,
                params={"p": p, "fraction": measure / total_len, "pieces": len(subs)},
                flags=tail_flags,
            )
        )
    return VerificationReport.from_records(
        "sparse_family_log_damping",
        records,
        runtime_s=time.perf_counter() - t0,
        notes={"p": p, "m_max": m_max},
    )


# ---------------------------------------------------------------------------
# the witness construction


def necessity_construct_and_check(
    config: TripleConfig,
) -> tuple[SampledFunction, VerificationReport]:
    """Build the log-of-backward-maximal witness for a triple and verify
    its structural properties.

    The function is ``log+((c-b)/|E| * backward_maximal(1_E)) + 1_(a,c)``.
    Checked: exact vanishing of the log part outside ``(a, c)``; the exact
    closed value on the cells of ``E``; the interval average of the log
    part; the one-sided oscillation norm; and the cell-wise ratio of the
    sharp maximal against the closed-form indicator maximal.
    """
    t0 = time.perf_counter()
    grid = config.E.grid
    a, b, c = config.a, config.b, config.c
    scale = (c - b) / config.E.measure
    chi_E = SampledFunction(grid, config.E.mask.astype(float))
    m_minus = one_sided_maximal(chi_E, Direction.BACKWARD, 1.0, WindowPolicy.ALL)
    g = np.log(np.clip(scale * m_minus.values, 1.0, None))
    chi_ac = sample_function(IndicatorSpec(a, c), grid).values
    f = SampledFunction(grid, g + chi_ac)

    records: list[RatioRecord] = []
    x = grid.left_boundaries()
    outside = (x >= c) | (x + grid.spacing <= a)
    worst_outside = float(np.abs(g[outside]).max(initial=0.0))
    records.append(
        make_record("outside-zeros", worst_outside, 1.0, params={"cells": int(outside.sum())})
    )
    expected_on_E = max(0.0, math.log(scale)) + 1.0
    on_E = np.abs(f.values[config.E.mask] - expected_on_E)
    records.append(
        make_record(
            "on-set-value",
            float(on_E.max(initial=0.0)),
            1.0,
            params={"expected": expected_on_E, "cells": config.E.cell_count},
        )
    )
    inside = _interval_cells(grid, IntervalSpec(a, c))
    avg = float(g[inside.mask].sum()) * grid.spacing / (c - a)
    records.append(make_record("interval-average", avg, 1.0))
    sharp = sharp_maximal(f, 1.0, WindowPolicy.ALL)
    # the oscillation norm is the supremum of the same sharp-maximal array
    records.append(
        make_record("oscillation-norm", float(sharp.values.max(initial=0.0)), 1.0)
    )
    closed = indicator_maximal_closed_form(a, c, x)
    records.append(_pointwise_record("sharp-vs-indicator", sharp.values, closed, grid))
    report = VerificationReport.from_records(
        "witness_construction",
        records,
        runtime_s=time.perf_counter() - t0,
        notes={"a": a, "b": b, "c": c, "set_measure": config.E.measure},
    )
    return f, report


# ---------------------------------------------------------------------------
# truncation maximal domination


def cotlar_report(
    K: KernelSpec,
    A: YoungFunction,
    delta: float,
    corpus: CorpusLike,
    lambda_points: int = 12,
    seed: int | None = None,
) -> VerificationReport:
    """Domination of the truncation maximal by the delta-maximal of the
    transform plus the Orlicz maximal of the input, with a weak-type side
    sweep of the transform itself.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    t0 = time.perf_counter()
    records: list[RatioRecord] = []
    for cid, f in _normalize_corpus(corpus):
        Tf = apply_kernel(f, K)
        lhs = maximal_truncated(f, K).values
        rhs = (
            one_sided_maximal(Tf, Direction.FORWARD, delta, WindowPolicy.ALL).values
            + orlicz_maximal(f, A).values
        )
        records.append(_pointwise_record(cid, lhs, rhs, f.grid))
        # weak-type sweep: lambda * |{|Tf| > lambda}| / ||f||_1
        l1 = float(np.abs(f.values).sum()) * f.grid.spacing
        top = float(np.abs(Tf.values).max(initial=0.0))
        if l1 > 0.0 and top > 0.0:
            lambdas = np.geomspace(top * 1e-3, top, lambda_points)
            measures = np.array(
                [(np.abs(Tf.values) > lam).sum() * f.grid.spacing for lam in lambdas]
            )
            weak = lambdas * measures
            i = int(np.argmax(weak))
            records.append(
                make_record(
                    f"{cid}-weak11",
                    float(weak[i]),
                    l1,
                    params={"lambda": float(lambdas[i]), "delta": delta},
                )
            )
        else:
            records.append(
                make_record(f"{cid}-weak11", 0.0, l1, params={"delta": delta})
            )
    return VerificationReport.from_records(
        "truncation_maximal_domination",
        records,
        seed=seed,
        runtime_s=time.perf_counter() - t0,
        notes={"delta": delta, "young": A.family},
    )
