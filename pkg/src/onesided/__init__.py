"""Numerical laboratory for one-sided maximal operators, singular
integrals, square functions, and one-sided weight conditions on uniform
grids over the real line.

The package samples piecewise-constant functions on a :class:`Grid`,
applies discrete one-sided operators to them, and checks pointwise and
weighted-norm inequalities over seeded corpora, reporting worst-case
ratios with full provenance of where they occurred.
"""

from .grid import (
    CellSet,
    ConstSpec,
    CsvSpec,
    Grid,
    IndicatorSpec,
    IntervalSpec,
    PowerSpec,
    RandomSpec,
    SampledFunction,
    StepsSpec,
    components_of_mask,
    geometric_partition,
    integrate,
    parse_function_spec,
    prefix_cell_sums,
    sample_function,
)
from .maximal import (
    Direction,
    WindowPolicy,
    bmo_norm,
    bmo_plus_norm,
    dyadic_lengths,
    indicator_maximal_closed_form,
    one_sided_maximal,
    one_sided_maximal_fast,
    sharp_maximal,
)
from .orlicz import (
    ConjugatePair,
    YoungFunction,
    conjugate_check,
    default_conjugate_pairs,
    exp_root,
    fractional_orlicz_maximal,
    generalized_holder_check,
    luxemburg_from_samples,
    orlicz_average,
    orlicz_maximal,
    parse_young_spec,
    power,
    power_log,
)
from .operators import (
    DifferentialTransformKernel,
    FractionalKernel,
    TabulatedKernel,
    apply_kernel,
    dyadic_average,
    differential_transform,
    fractional_commutator_closed_form,
    fractional_integral,
    hormander_partial_sum,
    iterated_commutator,
    kernel_condition_report,
    maximal_truncated,
    parse_kernel_spec,
    truncated_apply,
)
from .squarefn import (
    DyadicRange,
    default_range,
    oscillation_operator,
    rolling_average,
    square_function,
)
from .weights import (
    TripleConfig,
    Weight,
    cp_plus_ratio,
    cp_plus_scan,
    delta_sum,
    generate_triple_configs,
    indicator_power_integral,
    log_condition_ratio,
    m_pq_plus,
    m_pq_tail_bound,
    weight_from_spec,
    weighted_lp_norm,
)
from .corpus import Corpus, CorpusItem, ripple_plateau, standard_corpus
from .reporting import RatioRecord, VerificationReport, make_record, report_to_dict
from .verify import (
    EstimateSpec,
    cotlar_report,
    good_lambda_report,
    good_lambda_sets,
    good_lambda_sweep,
    iterated_maximal,
    lemma_check,
    necessity_construct_and_check,
    norm_ratio_report,
    pointwise_domination_report,
    refinement_trend,
)

__version__ = "0.1.0"

__all__ = [
    "CellSet",
    "ConjugatePair",
    "ConstSpec",
    "Corpus",
    "CorpusItem",
    "CsvSpec",
    "DifferentialTransformKernel",
    "Direction",
    "DyadicRange",
    "EstimateSpec",
    "FractionalKernel",
    "Grid",
    "IndicatorSpec",
    "IntervalSpec",
    "PowerSpec",
    "RandomSpec",
    "RatioRecord",
    "SampledFunction",
    "StepsSpec",
    "TabulatedKernel",
    "TripleConfig",
    "VerificationReport",
    "Weight",
    "WindowPolicy",
    "YoungFunction",
    "apply_kernel",
    "bmo_norm",
    "bmo_plus_norm",
    "components_of_mask",
    "conjugate_check",
    "cotlar_report",
    "cp_plus_ratio",
    "cp_plus_scan",
    "default_conjugate_pairs",
    "default_range",
    "delta_sum",
    "differential_transform",
    "dyadic_average",
    "dyadic_lengths",
    "exp_root",
    "fractional_commutator_closed_form",
    "fractional_integral",
    "fractional_orlicz_maximal",
    "generalized_holder_check",
    "generate_triple_configs",
    "geometric_partition",
    "good_lambda_report",
    "good_lambda_sets",
    "good_lambda_sweep",
    "hormander_partial_sum",
    "indicator_maximal_closed_form",
    "indicator_power_integral",
    "integrate",
    "iterated_commutator",
    "iterated_maximal",
    "kernel_condition_report",
    "lemma_check",
    "log_condition_ratio",
    "luxemburg_from_samples",
    "m_pq_plus",
    "m_pq_tail_bound",
    "make_record",
    "maximal_truncated",
    "necessity_construct_and_check",
    "norm_ratio_report",
    "one_sided_maximal",
    "one_sided_maximal_fast",
    "orlicz_average",
    "orlicz_maximal",
    "oscillation_operator",
    "parse_function_spec",
    "parse_kernel_spec",
    "parse_young_spec",
    "pointwise_domination_report",
    "power",
    "power_log",
    "prefix_cell_sums",
    "refinement_trend",
    "report_to_dict",
    "ripple_plateau",
    "rolling_average",
    "sample_function",
    "sharp_maximal",
    "square_function",
    "standard_corpus",
    "truncated_apply",
    "weight_from_spec",
    "weighted_lp_norm",
]
