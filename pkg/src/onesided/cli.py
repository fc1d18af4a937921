"""Command-line surface: sample functions, apply operators, scan weight
conditions, and run verification suites.

Subcommands
-----------
``sample``       sample a function spec onto a grid, write ``x,value`` CSV
``apply``        apply a named operator to a sampled function, write CSV
``weight-scan``  sweep the weight-condition ratio over seeded geometry
``verify``       run a JSON-configured suite of named checks

The ``weight-scan`` and ``verify`` report paths write ``report.json``,
``summary.csv``, and (unless ``--no-figures``) PNG figures alongside.  Exit
codes: 0 success, 1 a check exceeded its threshold or raised unexpected
flags, 2 invalid configuration or specs.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, CorpusItem, ripple_plateau, standard_corpus
from .grid import (
    Grid,
    IndicatorSpec,
    IntervalSpec,
    SampledFunction,
    parse_function_spec,
    sample_function,
)
from .maximal import (
    Direction,
    WindowPolicy,
    indicator_maximal_closed_form,
    one_sided_maximal,
    one_sided_maximal_fast,
    sharp_maximal,
)
from .operators import (
    apply_kernel,
    fractional_integral,
    hormander_partial_sum,
    iterated_commutator,
    maximal_truncated,
    parse_kernel_spec,
)
from .orlicz import (
    default_conjugate_pairs,
    conjugate_check,
    fractional_orlicz_maximal,
    orlicz_maximal,
    parse_young_spec,
)
from .maximal import bmo_norm
from .reporting import VerificationReport, make_record, report_to_dict
from .squarefn import DyadicRange, default_range, oscillation_operator, square_function
from .verify import (
    EstimateSpec,
    cotlar_report,
    good_lambda_sweep,
    iterated_maximal,
    lemma_check,
    necessity_construct_and_check,
    norm_ratio_report,
    pointwise_domination_report,
)
from .weights import (
    TripleConfig,
    Weight,
    cp_plus_scan,
    generate_triple_configs,
    log_condition_ratio,
    m_pq_plus,
    weight_from_spec,
)

__all__ = ["main", "run_suite", "ConfigError", "REGISTRY"]

DEFAULT_KERNEL = "difftrans:1,-0.5,0.25,-0.125:-5"
DEFAULT_YOUNG = "powerlog:1:1"


class ConfigError(ValueError):
    """A human-readable configuration problem (exit code 2)."""


# ---------------------------------------------------------------------------
# spec grammars


def parse_grid_spec(text: str) -> Grid:
    """``origin:spacing:count`` with spacing > 0 and count >= 1."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid spec must be origin:spacing:count, got {text!r}")
    try:
        origin, spacing, count = float(parts[0]), float(parts[1]), int(parts[2])
        return Grid(origin, spacing, count)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {text!r}: {exc}") from exc


def _grid_from_config(cfg: dict, resolution: int | None) -> Grid:
    _require_keys(cfg, {"origin", "spacing", "count"}, "grid")
    try:
        origin = float(cfg["origin"])
        spacing = float(cfg["spacing"])
        count = int(cfg["count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc
    if resolution is not None:
        extent = spacing * count
        spacing, count = extent / resolution, resolution
    try:
        return Grid(origin, spacing, count)
    except ValueError as exc:
        raise ConfigError(f"bad grid: {exc}") from exc


def apply_operator(op_text: str, f: SampledFunction) -> SampledFunction:
    """Named-operator grammar for the ``apply`` subcommand.

    ``m_plus[:delta]`` | ``m_minus[:delta]`` | ``sharp[:delta]`` |
    ``orlicz:<young>`` | ``fracorlicz:alpha:<young>`` | ``frac:alpha:side`` |
    ``s_plus`` | ``o_plus`` | ``conv:<kernel>`` | ``truncmax:<kernel>`` |
    ``mpq:p:q[:kmin]``
    """
    head, _, rest = op_text.partition(":")
    try:
        if head in ("m_plus", "m_minus"):
            delta = float(rest) if rest else 1.0
            direction = Direction.FORWARD if head == "m_plus" else Direction.BACKWARD
            return one_sided_maximal(f, direction, delta, WindowPolicy.ALL)
        if head == "sharp":
            delta = float(rest) if rest else 1.0
            return sharp_maximal(f, delta, WindowPolicy.ALL)
        if head == "orlicz":
            return orlicz_maximal(f, parse_young_spec(rest))
        if head == "fracorlicz":
            alpha_text, _, young_text = rest.partition(":")
            return fractional_orlicz_maximal(f, float(alpha_text), parse_young_spec(young_text))
        if head == "frac":
            alpha_text, _, side = rest.partition(":")
            return fractional_integral(f, float(alpha_text), side or "forward")
        if head == "s_plus":
            return square_function(f, default_range(f.grid))
        if head == "o_plus":
            return oscillation_operator(f, default_range(f.grid))
        if head == "conv":
            return apply_kernel(f, parse_kernel_spec(rest))
        if head == "truncmax":
            return maximal_truncated(f, parse_kernel_spec(rest))
        if head == "mpq":
            parts = rest.split(":")
            if len(parts) not in (2, 3):
                raise ValueError("mpq takes p:q or p:q:kmin")
            k_min = int(parts[2]) if len(parts) == 3 else None
            return m_pq_plus(f, float(parts[0]), float(parts[1]), k_min)
    except ValueError as exc:
        raise ConfigError(f"bad operator spec {op_text!r}: {exc}") from exc
    raise ConfigError(f"unknown operator {head!r}")


def _float_text(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return repr(v)


def write_xy_csv(path: Path, xs: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for x, v in zip(xs, values):
            writer.writerow([_float_text(x), _float_text(v)])


# ---------------------------------------------------------------------------
# suite configuration


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} section must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


@dataclass
class SuiteContext:
    """Everything a registry check needs, resolvable per grid."""

    grid: Grid
    seed: int
    corpus: Corpus
    weight_specs: dict[str, str]
    operator_specs: dict[str, str]

    def weight(self, key: str) -> Weight:
        spec = self.weight_specs.get(key, key)
        try:
            return weight_from_spec(spec, self.grid)
        except ValueError as exc:
            raise ConfigError(f"bad weight spec {spec!r}: {exc}") from exc

    def kernel(self, key: str):
        text = self.operator_specs.get(key, key)
        try:
            return parse_kernel_spec(text)
        except ValueError as exc:
            raise ConfigError(f"bad kernel spec {text!r}: {exc}") from exc

    def young(self, key: str):
        text = self.operator_specs.get(key, key)
        try:
            return parse_young_spec(text)
        except ValueError as exc:
            raise ConfigError(f"bad Young spec {text!r}: {exc}") from exc

    def symbol(self, key: str | None) -> SampledFunction:
        """A BMO-type multiplier; default is a four-step staircase."""
        if key is not None:
            text = self.operator_specs.get(key, key)
            try:
                return sample_function(parse_function_spec(text), self.grid)
            except ValueError as exc:
                raise ConfigError(f"bad symbol spec {text!r}: {exc}") from exc
        g = self.grid
        values = np.zeros(g.count)
        for i, h in enumerate((0.0, 0.5, 1.0, 1.5)):
            lo = (g.count * i) // 4
            hi = (g.count * (i + 1)) // 4
            values[lo:hi] = h
        return SampledFunction(g, values)

    def snapped(self, frac: float) -> float:
        """Grid boundary at the given fraction of the span."""
        return self.grid.boundary(
            self.grid.nearest_boundary_index(self.grid.origin + frac * self.grid.extent)
        )

    def refined(self, factor: int = 2) -> "SuiteContext":
        return SuiteContext(
            grid=self.grid.refined(factor),
            seed=self.seed,
            corpus=self.corpus.refined(factor),
            weight_specs=self.weight_specs,
            operator_specs=self.operator_specs,
        )


def _corpus_from_config(cfg: dict, grid: Grid, seed: int) -> Corpus:
    _require_keys(cfg, {"functions", "generate"}, "corpus")
    items: list[CorpusItem] = []
    for text in cfg.get("functions", []):
        try:
            items.append(CorpusItem(text, parse_function_spec(text)))
        except ValueError as exc:
            raise ConfigError(f"bad function spec {text!r}: {exc}") from exc
    gen = cfg.get("generate")
    if gen is None and not items:
        gen = {}
    if gen is not None:
        _require_keys(gen, {"signed", "lead", "width", "random_steps"}, "corpus.generate")
        try:
            items.extend(standard_corpus(grid, seed, **gen).items)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad corpus.generate section: {exc}") from exc
    if not items:
        raise ConfigError("corpus is empty")
    return Corpus(grid, tuple(items))


def build_context(
    config: dict, seed_override: int | None = None, resolution: int | None = None
) -> SuiteContext:
    _require_keys(
        config,
        {"grid", "seed", "corpus", "weights", "operators", "checks", "output"},
        "suite",
    )
    if "grid" not in config:
        raise ConfigError("suite config needs a grid section")
    grid = _grid_from_config(config["grid"], resolution)
    seed = seed_override if seed_override is not None else int(config.get("seed", 0))
    corpus = _corpus_from_config(config.get("corpus", {}), grid, seed)
    weights = dict(config.get("weights", {}))
    operators = dict(config.get("operators", {}))
    for table, where in ((weights, "weights"), (operators, "operators")):
        for k, v in table.items():
            if not isinstance(v, str):
                raise ConfigError(f"{where}[{k!r}] must be a grammar string")
    return SuiteContext(grid, seed, corpus, weights, operators)


# ---------------------------------------------------------------------------
# the check registry (behavior-named)


def _maximal_op(f: SampledFunction) -> SampledFunction:
    return one_sided_maximal(f, Direction.FORWARD, 1.0, WindowPolicy.ALL)


def _sharp_op(delta: float = 1.0):
    return lambda f: sharp_maximal(f, delta, WindowPolicy.ALL)


def _rk_fast_naive(ctx: SuiteContext, p: dict) -> VerificationReport:
    records = []
    for cid, f in ctx.corpus.functions():
        naive = one_sided_maximal(f).values
        fast = one_sided_maximal_fast(f).values
        scale = max(float(np.abs(naive).max(initial=0.0)), 1e-300)
        records.append(
            make_record(cid, float(np.abs(fast - naive).max(initial=0.0)), scale)
        )
    return VerificationReport.from_records("fast_naive_equivalence", records, seed=ctx.seed)


def _rk_indicator_closed_form(ctx: SuiteContext, p: dict) -> VerificationReport:
    a = float(p.get("a", ctx.snapped(0.45)))
    c = float(p.get("c", ctx.snapped(0.65)))
    chi = sample_function(IndicatorSpec(a, c), ctx.grid)
    disc = one_sided_maximal(chi).values
    closed = indicator_maximal_closed_form(a, c, ctx.grid.left_boundaries())
    rec = make_record(
        "indicator", float(np.abs(disc - closed).max(initial=0.0)), 1.0, params={"a": a, "c": c}
    )
    return VerificationReport.from_records("indicator_closed_form", [rec], seed=ctx.seed)


def _rk_sharp_zero_monotone(ctx: SuiteContext, p: dict) -> VerificationReport:
    # nondecreasing staircases with dyadic heights keep prefix sums exact,
    # so the positive parts cancel to exactly zero
    g = ctx.grid
    records = []
    cases: list[tuple[str, np.ndarray]] = [("const", np.ones(g.count))]
    steps = np.repeat(np.arange(8) * 0.25, max(1, g.count // 8))[: g.count]
    cases.append(("stairs8", np.concatenate([steps, np.full(g.count - len(steps), steps[-1])])))
    fine = np.repeat(np.arange(64) / 64.0, max(1, g.count // 64))[: g.count]
    cases.append(("stairs64", np.concatenate([fine, np.full(g.count - len(fine), fine[-1])])))
    for cid, values in cases:
        f = SampledFunction(g, values)
        worst = float(sharp_maximal(f, 1.0, WindowPolicy.ALL).values.max(initial=0.0))
        records.append(make_record(cid, worst, 1.0))
    return VerificationReport.from_records("sharp_zero_monotone", records, seed=ctx.seed)


def _rk_sharp_le_three(ctx: SuiteContext, p: dict) -> VerificationReport:
    spec = EstimateSpec(
        "sharp_le_three_maximal", _sharp_op(), ((3.0, _maximal_op),), mode="pointwise"
    )
    return pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)


def _rk_transform_sharp(ctx: SuiteContext, p: dict) -> VerificationReport:
    K = ctx.kernel(p.get("kernel", DEFAULT_KERNEL))
    delta = float(p.get("delta", 0.5))
    spec = EstimateSpec(
        "transform_sharp_vs_maximal",
        lambda f: sharp_maximal(apply_kernel(f, K), delta, WindowPolicy.ALL),
        ((1.0, _maximal_op),),
    )
    return pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)


def _rk_commutator_sharp(ctx: SuiteContext, p: dict) -> VerificationReport:
    K = ctx.kernel(p.get("kernel", DEFAULT_KERNEL))
    k = int(p.get("k", 1))
    delta = float(p.get("delta", 0.25))
    gamma = float(p.get("gamma", 0.5))
    b = ctx.symbol(p.get("symbol"))
    bnorm = bmo_norm(b)
    op = lambda f: apply_kernel(f, K)  # noqa: E731

    def commutator_term(j: int):
        return lambda f: one_sided_maximal(
            iterated_commutator(op, b, j, f), Direction.FORWARD, gamma, WindowPolicy.ALL
        )

    terms: list[tuple[float, object]] = [
        (bnorm ** (k - j), commutator_term(j)) for j in range(k)
    ]
    terms.append((bnorm**k, lambda f: iterated_maximal(f, k + 1)))
    spec = EstimateSpec(
        "commutator_sharp_bound",
        lambda f: sharp_maximal(iterated_commutator(op, b, k, f), delta, WindowPolicy.ALL),
        tuple(terms),
    )
    rep = pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)
    return dataclasses.replace(rep, notes={**rep.notes, "bmo_norm": bnorm, "k": k})


def _rk_oscillation_sharp(ctx: SuiteContext, p: dict) -> VerificationReport:
    delta = float(p.get("delta", 0.5))
    A = ctx.young(p.get("young", DEFAULT_YOUNG))
    samples = int(p.get("samples", 8))
    scales = default_range(ctx.grid)
    spec = EstimateSpec(
        "oscillation_sharp_vs_orlicz",
        lambda f: sharp_maximal(
            oscillation_operator(f, scales, samples), delta, WindowPolicy.ALL
        ),
        ((1.0, lambda f: orlicz_maximal(f, A)),),
    )
    return pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)


def _rk_fractional_sharp(ctx: SuiteContext, p: dict) -> VerificationReport:
    alpha = float(p.get("alpha", 0.5))
    delta = float(p.get("delta", 0.5))
    A = ctx.young(p.get("young", "power:1"))
    spec = EstimateSpec(
        "fractional_sharp_vs_fractional_maximal",
        lambda f: sharp_maximal(fractional_integral(f, alpha), delta, WindowPolicy.ALL),
        ((1.0, lambda f: fractional_orlicz_maximal(f, alpha, A)),),
    )
    return pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)


def _rk_maximal_vs_sharp_norm(ctx: SuiteContext, p: dict) -> VerificationReport:
    spec = EstimateSpec(
        "maximal_vs_sharp_norm", _maximal_op, ((1.0, _sharp_op()),), mode="norm"
    )
    return norm_ratio_report(
        spec, ctx.corpus, ctx.weight(p.get("weight", "const:1")), float(p.get("p", 2.0)),
        seed=ctx.seed,
    )


def _rk_transform_vs_maximal_norm(ctx: SuiteContext, p: dict) -> VerificationReport:
    K = ctx.kernel(p.get("kernel", DEFAULT_KERNEL))
    spec = EstimateSpec(
        "transform_vs_maximal_norm",
        lambda f: apply_kernel(f, K),
        ((1.0, _maximal_op),),
        mode="norm",
    )
    return norm_ratio_report(
        spec, ctx.corpus, ctx.weight(p.get("weight", "const:1")), float(p.get("p", 2.0)),
        seed=ctx.seed,
    )


def _rk_commutator_vs_iterated_norm(ctx: SuiteContext, p: dict) -> VerificationReport:
    K = ctx.kernel(p.get("kernel", DEFAULT_KERNEL))
    k = int(p.get("k", 1))
    b = ctx.symbol(p.get("symbol"))
    op = lambda f: apply_kernel(f, K)  # noqa: E731
    spec = EstimateSpec(
        "commutator_vs_iterated_maximal_norm",
        lambda f: iterated_commutator(op, b, k, f),
        ((1.0, lambda f: iterated_maximal(f, k + 1)),),
        mode="norm",
    )
    return norm_ratio_report(
        spec, ctx.corpus, ctx.weight(p.get("weight", "const:1")), float(p.get("p", 2.0)),
        seed=ctx.seed,
    )


def _rk_square_vs_orlicz_norm(ctx: SuiteContext, p: dict) -> VerificationReport:
    A = ctx.young(p.get("young", DEFAULT_YOUNG))
    scales = default_range(ctx.grid)
    spec = EstimateSpec(
        "square_vs_orlicz_norm",
        lambda f: square_function(f, scales),
        ((1.0, lambda f: orlicz_maximal(f, A)),),
        mode="norm",
    )
    return norm_ratio_report(
        spec, ctx.corpus, ctx.weight(p.get("weight", "const:1")), float(p.get("p", 2.0)),
        seed=ctx.seed,
    )


def _rk_square_le_oscillation(ctx: SuiteContext, p: dict) -> VerificationReport:
    samples = int(p.get("samples", 8))
    d = default_range(ctx.grid)
    if d.n_max - 1 < d.n_min:
        raise ConfigError("grid too small for the square/oscillation comparison")
    r = DyadicRange(d.n_min, d.n_max - 1)
    spec = EstimateSpec(
        "square_le_oscillation",
        lambda f: square_function(f, r.shifted(1)),
        ((1.0, lambda f: oscillation_operator(f, r, samples)),),
    )
    return pointwise_domination_report(spec, ctx.corpus, seed=ctx.seed)


def _rk_good_lambda_trend(ctx: SuiteContext, p: dict) -> VerificationReport:
    gammas = [float(g) for g in p.get("gammas", (0.5, 0.25, 0.125))]
    w = ctx.weight(p["weight"]) if "weight" in p else None
    corpus = standard_corpus(ctx.grid, ctx.seed, signed=False, lead=0.05, width=0.2)
    cases = list(corpus.functions())
    # flat-but-rippled mass against the right edge populates the sets
    cases.append(("ripple-plateau", ripple_plateau(ctx.grid)))
    rep = good_lambda_sweep(
        cases,
        gammas,
        w=w,
        q=float(p.get("q", 3.0)),
        eps=float(p.get("eps", 1.0)),
        seed=ctx.seed,
    )
    sups = rep.notes["per_gamma_sup"]
    ordered = sorted(range(len(gammas)), key=lambda i: -gammas[i])
    seq = [sups[i] for i in ordered]
    if any(b > a + 1e-15 for a, b in zip(seq, seq[1:])):
        rep = dataclasses.replace(rep, flags=rep.flags + ("sweep:non-monotone",))
    return rep


def _rk_cp_scan(ctx: SuiteContext, p: dict) -> VerificationReport:
    return cp_plus_scan(
        ctx.weight(p.get("weight", "const:1")),
        float(p.get("p", 2.0)),
        float(p.get("eps", 1.0)),
        ctx.grid,
        ctx.seed,
        triples=int(p.get("triples", 12)),
        sets_per_triple=int(p.get("sets", 4)),
    )


def _rk_log_condition(ctx: SuiteContext, p: dict) -> VerificationReport:
    w = ctx.weight(p.get("weight", "const:1"))
    pexp = float(p.get("p", 2.0))
    m_max = int(p.get("m_max", 10))
    grid = ctx.grid
    a, b, c = ctx.snapped(0.6), ctx.snapped(0.8), ctx.snapped(0.9)
    ia, ib = grid.nearest_boundary_index(a), grid.nearest_boundary_index(b)
    records = []
    for m in range(m_max + 1):
        end = ia + max(1, int((ib - ia) * 2.0**-m))
        if m > 0 and end - ia == max(1, int((ib - ia) * 2.0 ** -(m - 1))):
            break  # resolution exhausted, set no longer shrinks
        mask = np.zeros(grid.count, dtype=bool)
        mask[ia:end] = True
        from .grid import CellSet

        cfg = TripleConfig(f"m={m}", a, b, c, CellSet(grid, mask))
        records.append(log_condition_ratio(w, pexp, cfg))
    return VerificationReport.from_records(
        "log_condition_sweep", records, seed=ctx.seed, notes={"p": pexp}
    )


def _default_interval(ctx: SuiteContext) -> IntervalSpec:
    return IntervalSpec(ctx.snapped(0.55), ctx.snapped(0.9))


def _rk_split_interval(ctx: SuiteContext, p: dict) -> VerificationReport:
    w = ctx.weight(p.get("weight", "const:1"))
    q = float(p.get("q", 3.0))
    pieces = int(p.get("pieces", 8))
    delta_grid = [float(d) for d in p.get("delta_grid", (0.125, 0.25, 0.5))]
    I = _default_interval(ctx)
    grid = ctx.grid
    slot = (I.c - I.a) / pieces
    subs = []
    for j in range(pieces):
        lo = grid.nearest_boundary_index(I.a + j * slot)
        hi = grid.nearest_boundary_index(I.a + (j + 0.5) * slot)
        if hi > lo:
            subs.append(IntervalSpec(grid.boundary(lo), grid.boundary(hi)))
    return lemma_check(
        12, {"w": w, "q": q, "interval": I, "subintervals": subs, "delta_grid": delta_grid}
    )


def _rk_hybrid_power_bound(ctx: SuiteContext, p: dict) -> VerificationReport:
    corpus = standard_corpus(ctx.grid, ctx.seed, signed=False)
    return lemma_check(
        13,
        {
            "w": ctx.weight(p.get("weight", "const:1")),
            "p": float(p.get("p", 2.0)),
            "q": float(p.get("q", 3.0)),
            "corpus": corpus,
            "k_min": int(p["k_min"]) if "k_min" in p else None,
        },
    )


def _rk_sparse_log_damping(ctx: SuiteContext, p: dict) -> VerificationReport:
    return lemma_check(
        15,
        {
            "w": ctx.weight(p.get("weight", "const:1")),
            "p": float(p.get("p", 2.0)),
            "interval": _default_interval(ctx),
            "m_max": int(p.get("m_max", 8)),
            "pieces": int(p.get("pieces", 8)),
        },
    )


def _rk_necessity(ctx: SuiteContext, p: dict) -> VerificationReport:
    count = int(p.get("configs", 8))
    configs = generate_triple_configs(
        ctx.grid, ctx.seed, triples=max(3, (count + 3) // 4), sets_per_triple=4
    )[:count]
    if not configs:
        raise ConfigError("no valid triples on this grid")
    merged = []
    for cfg in configs:
        _, rep = necessity_construct_and_check(cfg)
        for rec in rep.records:
            merged.append(dataclasses.replace(rec, case_id=f"{cfg.case_id}/{rec.case_id}"))
    return VerificationReport.from_records(
        "witness_construction", merged, seed=ctx.seed, notes={"configs": len(configs)}
    )


def _rk_cotlar(ctx: SuiteContext, p: dict) -> VerificationReport:
    return cotlar_report(
        ctx.kernel(p.get("kernel", DEFAULT_KERNEL)),
        ctx.young(p.get("young", "power:1")),
        float(p.get("delta", 0.5)),
        ctx.corpus,
        lambda_points=int(p.get("lambda_points", 12)),
        seed=ctx.seed,
    )


def _rk_conjugate_sandwich(ctx: SuiteContext, p: dict) -> VerificationReport:
    tgrid = np.geomspace(1.0, 1e6, int(p.get("points", 200)))
    records = []
    for pair in default_conjugate_pairs():
        res = conjugate_check(pair, tgrid)
        records.append(
            make_record(
                f"{res['pair']}/upper", res["max_ratio"], 2.0, params={"bound": "2t"}
            )
        )
        records.append(
            make_record(
                f"{res['pair']}/lower", 1.0, res["min_ratio"], params={"bound": "t"}
            )
        )
    return VerificationReport.from_records("conjugate_sandwich", records, seed=ctx.seed)


def _rk_hormander_flatten(ctx: SuiteContext, p: dict) -> VerificationReport:
    K = ctx.kernel(p.get("kernel", DEFAULT_KERNEL))
    A = ctx.young(p.get("young", DEFAULT_YOUNG))
    x = float(p.get("x", 2.0**-6))
    R = float(p.get("R", 2.0**-4))
    M = int(p.get("annuli", 20))
    k = int(p.get("k", 1))
    sums = hormander_partial_sum(K, A, k, x, R, M)
    if sums[-1] > 0.0:
        increment = (sums[-1] - sums[-2]) / sums[-1]
    else:
        increment = 0.0
    rec = make_record(
        "flatten",
        increment,
        1.0,
        params={"x": x, "R": R, "annuli": M, "partial_sums": [float(s) for s in sums]},
    )
    return VerificationReport.from_records("hormander_flatten", [rec], seed=ctx.seed)


REGISTRY: dict[str, tuple] = {
    "fast-naive-equivalence": (_rk_fast_naive, set()),
    "indicator-closed-form": (_rk_indicator_closed_form, {"a", "c"}),
    "sharp-zero-monotone": (_rk_sharp_zero_monotone, set()),
    "sharp-le-three-maximal": (_rk_sharp_le_three, set()),
    "transform-sharp-vs-maximal": (_rk_transform_sharp, {"kernel", "delta"}),
    "commutator-sharp-bound": (
        _rk_commutator_sharp,
        {"kernel", "symbol", "k", "delta", "gamma"},
    ),
    "oscillation-sharp-vs-orlicz": (_rk_oscillation_sharp, {"delta", "young", "samples"}),
    "fractional-sharp-vs-fractional-maximal": (
        _rk_fractional_sharp,
        {"alpha", "delta", "young"},
    ),
    "maximal-vs-sharp-norm": (_rk_maximal_vs_sharp_norm, {"weight", "p"}),
    "transform-vs-maximal-norm": (_rk_transform_vs_maximal_norm, {"kernel", "weight", "p"}),
    "commutator-vs-iterated-maximal-norm": (
        _rk_commutator_vs_iterated_norm,
        {"kernel", "symbol", "k", "weight", "p"},
    ),
    "square-vs-orlicz-norm": (_rk_square_vs_orlicz_norm, {"weight", "p", "young"}),
    "square-le-oscillation": (_rk_square_le_oscillation, {"samples"}),
    "good-lambda-trend": (_rk_good_lambda_trend, {"gammas", "q", "eps", "weight"}),
    "cp-scan": (_rk_cp_scan, {"weight", "p", "eps", "triples", "sets"}),
    "log-condition-sweep": (_rk_log_condition, {"weight", "p", "m_max"}),
    "split-interval-power-sum": (_rk_split_interval, {"weight", "q", "delta_grid", "pieces"}),
    "hybrid-maximal-power-bound": (_rk_hybrid_power_bound, {"weight", "p", "q", "k_min"}),
    "sparse-family-log-damping": (
        _rk_sparse_log_damping,
        {"weight", "p", "m_max", "pieces"},
    ),
    "necessity": (_rk_necessity, {"configs"}),
    "cotlar": (_rk_cotlar, {"kernel", "young", "delta", "lambda_points"}),
    "conjugate-sandwich": (_rk_conjugate_sandwich, {"points"}),
    "hormander-flatten": (_rk_hormander_flatten, {"kernel", "young", "x", "R", "annuli", "k"}),
}

COMMON_CHECK_KEYS = {"name", "id", "threshold", "allow_flags", "refine"}


def _thread_count() -> int:
    raw = os.environ.get("ONESIDED_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as exc:
            raise ConfigError(f"ONESIDED_THREADS must be an integer, got {raw!r}") from exc
    return min(4, os.cpu_count() or 1)


def _run_one_check(ctx: SuiteContext, check: dict) -> VerificationReport:
    name = check["name"]
    builder, allowed = REGISTRY[name]
    params = {k: v for k, v in check.items() if k not in COMMON_CHECK_KEYS}
    report = builder(ctx, params)
    if check.get("refine"):
        fine = builder(ctx.refined(2), params)
        if report.sup_ratio > 0.0:
            trend = fine.sup_ratio / report.sup_ratio
        else:
            trend = 0.0 if fine.sup_ratio == 0.0 else math.inf
        report = dataclasses.replace(
            report, trend=trend, notes={**report.notes, "sup_refined": fine.sup_ratio}
        )
    return report


def _check_failed(check: dict, report: VerificationReport) -> bool:
    threshold = check.get("threshold")
    if threshold is not None and report.sup_ratio > float(threshold):
        return True
    allowed = {"trivially-satisfied"} | set(check.get("allow_flags", []))
    for flag in report.flags:
        suffix = flag.rsplit(":", 1)[-1]
        if suffix not in allowed:
            return True
    return False


def _validate_checks(checks: list) -> None:
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list")
    for check in checks:
        if not isinstance(check, dict) or "name" not in check:
            raise ConfigError(f"each check needs a name: {check!r}")
        name = check["name"]
        if name not in REGISTRY:
            known = ", ".join(sorted(REGISTRY))
            raise ConfigError(f"unknown check {name!r}; known checks: {known}")
        allowed = COMMON_CHECK_KEYS | REGISTRY[name][1]
        unknown = set(check) - allowed
        if unknown:
            raise ConfigError(f"unknown key(s) for check {name!r}: {sorted(unknown)}")


def _unique_labels(checks: list) -> list[str]:
    labels: list[str] = []
    seen: dict[str, int] = {}
    for check in checks:
        base = str(check.get("id", check["name"]))
        seen[base] = seen.get(base, 0) + 1
        labels.append(base if seen[base] == 1 else f"{base}-{seen[base]}")
    return labels


def write_summary_csv(path: Path, rows: list[tuple[str, float, float | None, tuple]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "sup_ratio", "trend", "flags"])
        for label, sup, trend, flags in rows:
            writer.writerow([label, _float_text(sup), _float_text(trend), "|".join(flags)])


def run_suite(
    config: dict,
    outdir: Path,
    seed_override: int | None = None,
    resolution: int | None = None,
    figures: bool = True,
) -> int:
    """Execute a suite config; write report.json, summary.csv, figures."""
    t0 = time.perf_counter()
    checks = config.get("checks", [])
    _validate_checks(checks)
    ctx = build_context(config, seed_override, resolution)
    labels = _unique_labels(checks)
    outdir.mkdir(parents=True, exist_ok=True)

    threads = min(_thread_count(), max(1, len(checks)))
    reports: list[VerificationReport]
    if threads > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda c: _run_one_check(ctx, c), checks))
    else:
        reports = [_run_one_check(ctx, c) for c in checks]

    failed = [
        label
        for label, check, report in zip(labels, checks, reports)
        if _check_failed(check, report)
    ]
    payload = {
        "suite": {
            "grid": {
                "origin": ctx.grid.origin,
                "spacing": ctx.grid.spacing,
                "count": ctx.grid.count,
            },
            "seed": ctx.seed,
            "runtime_s": time.perf_counter() - t0,
            "threads": threads,
        },
        "checks": [
            {
                "label": label,
                "name": check["name"],
                "threshold": check.get("threshold"),
                "failed": label in failed,
                "report": report_to_dict(report),
            }
            for label, check, report in zip(labels, checks, reports)
        ],
    }
    (outdir / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    write_summary_csv(
        outdir / "summary.csv",
        [
            (label, rep.sup_ratio, rep.trend, rep.flags)
            for label, rep in zip(labels, reports)
        ],
    )
    if figures:
        from . import figures as figmod

        figdir = outdir / "figures"
        figdir.mkdir(exist_ok=True)
        for label, rep in zip(labels, reports):
            figmod.figure_for_report(label, rep, figdir)
        if reports:
            figmod.render_overview_figure(list(zip(labels, reports)), figdir / "overview.png")
    if failed:
        print(f"FAILED checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_sample(args: argparse.Namespace) -> int:
    grid = parse_grid_spec(args.grid)
    try:
        f = sample_function(parse_function_spec(args.function), grid)
    except ValueError as exc:
        raise ConfigError(f"bad function spec {args.function!r}: {exc}") from exc
    write_xy_csv(Path(args.out), grid.left_boundaries(), f.values)
    return 0


def cmd_apply(args: argparse.Namespace) -> int:
    grid = parse_grid_spec(args.grid)
    try:
        f = sample_function(parse_function_spec(args.function), grid)
    except ValueError as exc:
        raise ConfigError(f"bad function spec {args.function!r}: {exc}") from exc
    try:
        out = apply_operator(args.op, f)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_xy_csv(Path(args.out), grid.left_boundaries(), out.values)
    return 0


def cmd_weight_scan(args: argparse.Namespace) -> int:
    grid = parse_grid_spec(args.grid)
    try:
        w = weight_from_spec(args.weight, grid)
    except ValueError as exc:
        raise ConfigError(f"bad weight spec {args.weight!r}: {exc}") from exc
    eps_values = [float(e) for e in args.eps.split(",") if e]
    if not eps_values:
        raise ConfigError("need at least one eps value")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = []
    for eps in eps_values:
        rep = cp_plus_scan(
            w, args.p, eps, grid, args.seed, triples=args.triples, sets_per_triple=args.sets
        )
        reports.append((f"cp-scan-eps={eps}", rep))
    payload = {
        "weight": args.weight,
        "p": args.p,
        "scans": [
            {"label": label, "report": report_to_dict(rep)} for label, rep in reports
        ],
    }
    (outdir / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    write_summary_csv(
        outdir / "summary.csv",
        [(label, rep.sup_ratio, rep.trend, rep.flags) for label, rep in reports],
    )
    if not args.no_figures:
        from . import figures as figmod

        for label, rep in reports:
            figmod.render_scan_figure(rep, outdir / f"{label}.png")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    path = Path(args.config)
    try:
        config = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    out = args.out
    if out is None:
        out = (config.get("output") or {}).get("dir", "out")
    return run_suite(
        config,
        Path(out),
        seed_override=args.seed,
        resolution=args.resolution,
        figures=not args.no_figures,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onesided",
        description="Numerical laboratory for one-sided maximal operators and weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sample", help="sample a function spec to CSV")
    ps.add_argument("--function", required=True, help="function grammar, e.g. indicator:0:1")
    ps.add_argument("--grid", required=True, help="origin:spacing:count")
    ps.add_argument("--out", required=True, help="output CSV path")
    ps.set_defaults(func=cmd_sample)

    pa = sub.add_parser("apply", help="apply an operator to a sampled function")
    pa.add_argument("--op", required=True, help="operator grammar, e.g. m_plus or frac:0.5:forward")
    pa.add_argument("--function", required=True)
    pa.add_argument("--grid", required=True)
    pa.add_argument("--out", required=True)
    pa.set_defaults(func=cmd_apply)

    pw = sub.add_parser("weight-scan", help="sweep the weight-condition ratios")
    pw.add_argument("--weight", required=True, help="weight grammar, e.g. const:1 or power:0.5")
    pw.add_argument("--p", type=float, default=2.0)
    pw.add_argument("--eps", default="0.25,0.5,1", help="comma-separated eps values")
    pw.add_argument("--grid", required=True)
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--triples", type=int, default=12)
    pw.add_argument("--sets", type=int, default=4)
    pw.add_argument("--out", required=True, help="output directory")
    pw.add_argument("--no-figures", action="store_true")
    pw.set_defaults(func=cmd_weight_scan)

    pv = sub.add_parser("verify", help="run a verification suite from JSON config")
    pv.add_argument("--config", required=True)
    pv.add_argument("--out", default=None, help="output directory (default from config)")
    pv.add_argument("--seed", type=int, default=None, help="override the config seed")
    pv.add_argument("--resolution", type=int, default=None, help="override the grid count")
    pv.add_argument("--no-figures", action="store_true")
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
