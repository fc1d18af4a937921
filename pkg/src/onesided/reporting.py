"""Ratio records and verification reports shared by the checking layers.

Every empirical check in this package reduces to a family of nonnegative
ratios ``numerator / denominator`` whose supremum is reported together with
a refinement trend (the sup recomputed on a doubled grid, divided by the
base sup).  A finite, refinement-stable supremum is the numerical signature
of an inequality holding with some constant; records carry enough context
to locate the extremal case.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = ["RatioRecord", "VerificationReport", "make_record", "report_to_dict"]


@dataclass(frozen=True)
class RatioRecord:
    """One measured ratio with its ingredients and any anomaly flags."""

    case_id: str
    numerator: float
    denominator: float
    ratio: float
    params: dict[str, Any] = field(default_factory=dict)
    flags: tuple[str, ...] = ()


def make_record(
    case_id: str,
    numerator: float,
    denominator: float,
    params: dict[str, Any] | None = None,
    flags: tuple[str, ...] = (),
) -> RatioRecord:
    """Build a record, flagging degenerate denominators instead of dividing."""
    flags = tuple(flags)
    if denominator > 0.0:
        ratio = numerator / denominator
    elif numerator <= 0.0:
        ratio = 0.0
        flags += ("trivially-satisfied",)
    else:
        ratio = math.inf
        flags += ("degenerate-denominator",)
    return RatioRecord(case_id, float(numerator), float(denominator), float(ratio), params or {}, flags)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one named check over a case family."""

    name: str
    records: tuple[RatioRecord, ...]
    sup_ratio: float
    sup_case: str
    trend: float | None = None  # refined sup / base sup, when refinement ran
    flags: tuple[str, ...] = ()
    seed: int | None = None
    runtime_s: float = 0.0
    notes: dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def from_records(
        name: str,
        records: list[RatioRecord],
        trend: float | None = None,
        seed: int | None = None,
        runtime_s: float = 0.0,
        notes: dict[str, Any] | None = None,
    ) -> "VerificationReport":
        flags = tuple(
            sorted({f"{r.case_id}:{flag}" for r in records for flag in r.flags})
        )
        if records:
            top = max(records, key=lambda r: r.ratio)
            sup, case = top.ratio, top.case_id
        else:
            sup, case = 0.0, "<empty>"
        return VerificationReport(
            name=name,
            records=tuple(records),
            sup_ratio=float(sup),
            sup_case=case,
            trend=trend,
            flags=flags,
            seed=seed,
            runtime_s=runtime_s,
            notes=notes or {},
        )


def _jsonable(value: Any) -> Any:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    return value


def report_to_dict(report: VerificationReport) -> dict[str, Any]:
    """JSON-ready dictionary (infinities encoded as strings)."""
    return _jsonable(dataclasses.asdict(report))
