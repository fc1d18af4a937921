"""Young functions, Luxemburg averages, and Orlicz-type maximal operators.

A Young function here is a nonnegative increasing function with ``A(0)=0``
and ``A(1)=1`` (families are normalized by their raw value at 1) growing to
infinity.  The Luxemburg average of ``f`` over a set ``E`` is

    inf { lam > 0 : (1/|E|) * integral_E A(|f|/lam) <= 1 },

computed by monotone bisection.  Exponential families are evaluated in log
space so that inversion never overflows, and the rapidly-growing
``exp_root_log`` family (exponent ``t**(1/(1+k)) / (log t)**((1+eps)/(1+k))``)
is continued linearly below a safe threshold ``t0`` so it is defined, zero at
zero, and increasing on all of ``[0, inf)``; the threshold and normalization
constant are recorded on the instance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import CellSet, Grid, IntervalSpec, SampledFunction
from .maximal import WindowPolicy, dyadic_lengths, one_sided_maximal, Direction

__all__ = [
    "YoungFunction",
    "ConjugatePair",
    "power",
    "power_log",
    "log_log_power",
    "exp_root",
    "exp_root_log",
    "tabulated",
    "parse_young_spec",
    "default_conjugate_pairs",
    "young_eval",
    "young_inverse",
    "orlicz_average",
    "orlicz_maximal",
    "fractional_orlicz_maximal",
    "conjugate_check",
    "generalized_holder_check",
    "luxemburg_from_samples",
]

_LUX_RTOL = 1e-10
_E = math.e


@dataclass(frozen=True)
class YoungFunction:
    """A normalized Young function from one of the built-in families.

    ``family`` is one of ``power | power_log | log_log_power | exp_root |
    exp_root_log | table``; ``params`` are the family parameters; ``norm`` is
    the raw value at 1 that the family was divided by; ``ramp_at`` is the
    linear-continuation threshold (only the ``exp_root_log`` family has one).
    """

    family: str
    params: tuple[float, ...]
    norm: float
    ramp_at: float = 0.0
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    # -- evaluation -----------------------------------------------------

    def eval(self, t) -> np.ndarray:
        """A(t), vectorized; overflows to inf harmlessly for huge arguments."""
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return self._raw(t) / self.norm

    def log_eval(self, t: float) -> float:
        """log A(t) for scalar t > 0, stable for arguments far beyond overflow."""
        if t <= 0.0:
            return -math.inf
        return self._log_raw(t) - math.log(self.norm)

    def inverse(self, s: float) -> float:
        """The unique ``u >= 0`` with ``A(u) = s``, by monotone bisection.

        Converges to relative tolerance 1e-10.
        """
        if s < 0.0 or not math.isfinite(s):
            raise ValueError(f"inverse needs finite s >= 0, got {s}")
        if s == 0.0:
            return 0.0
        target = math.log(s)
        lo, hi = 1.0, 1.0
        for _ in range(4000):
            if self.log_eval(hi) >= target:
                break
            hi *= 2.0
        else:
            raise ArithmeticError("inverse bracket search failed (upper)")
        for _ in range(4000):
            if self.log_eval(lo) <= target:
                break
            lo *= 0.5
        else:
            raise ArithmeticError("inverse bracket search failed (lower)")
        while hi - lo > _LUX_RTOL * hi:
            mid = 0.5 * (lo + hi)
            if self.log_eval(mid) >= target:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    # -- family internals ----------------------------------------------

    def _raw(self, t: np.ndarray) -> np.ndarray:
        fam, p = self.family, self.params
        if fam == "power":
            return t ** p[0]
        if fam == "power_log":
            r, s = p
            return t**r * np.log(_E + t) ** s
        if fam == "log_log_power":
            k, eps = p
            return (
                t
                * np.log(_E + t) ** (1.0 + k)
                * np.log(np.log(math.exp(_E) + t)) ** (1.0 + eps)
            )
        if fam == "exp_root":
            return np.expm1(t ** (1.0 / p[0]))
        if fam == "exp_root_log":
            return self._raw_exp_root_log(t)
        if fam == "table":
            return self._raw_table(t)
        raise TypeError(f"unknown family {fam!r}")

    def _raw_exp_root_log(self, t: np.ndarray) -> np.ndarray:
        k, eps = self.params
        a = 1.0 / (1.0 + k)
        b = (1.0 + eps) / (1.0 + k)
        t0 = self.ramp_at
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        low = t < t0
        ramp_slope = math.exp(t0**a / math.log(t0) ** b) / t0
        out[low] = ramp_slope * t[low]
        hi = ~low
        th = t[hi]
        out[hi] = np.exp(th**a / np.log(th) ** b)
        return out

    def _raw_table(self, t: np.ndarray) -> np.ndarray:
        ts, vs = self.table  # log-linear interpolation, linear ends
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        zero = t <= 0.0
        out[zero] = 0.0
        pos = ~zero
        lt = np.log(t[pos])
        lts = np.log(np.array(ts))
        lvs = np.log(np.array(vs))
        out[pos] = np.exp(np.interp(lt, lts, lvs))
        # below the first sample, continue linearly down to (0, 0)
        below = pos.copy()
        below[pos] = t[pos] < ts[0]
        out[below] = vs[0] * t[below] / ts[0]
        return out

    def _log_raw(self, t: float) -> float:
        fam, p = self.family, self.params
        if fam == "power":
            return p[0] * math.log(t)
        if fam == "power_log":
            r, s = p
            return r * math.log(t) + s * math.log(math.log(_E + t))
        if fam == "log_log_power":
            k, eps = p
            return (
                math.log(t)
                + (1.0 + k) * math.log(math.log(_E + t))
                + (1.0 + eps) * math.log(math.log(math.log(math.exp(_E) + t)))
            )
        if fam == "exp_root":
            u = t ** (1.0 / p[0])
            if u > 30.0:
                return u + math.log1p(-math.exp(-u))
            return math.log(math.expm1(u))
        if fam == "exp_root_log":
            k, eps = p
            a = 1.0 / (1.0 + k)
            b = (1.0 + eps) / (1.0 + k)
            if t < self.ramp_at:
                t0 = self.ramp_at
                return t0**a / math.log(t0) ** b - math.log(t0) + math.log(t)
            return t**a / math.log(t) ** b
        if fam == "table":
            return float(np.log(self._raw_table(np.array([t]))[0]))
        raise TypeError(f"unknown family {fam!r}")

    def describe(self) -> str:
        inner = ":".join(f"{p:g}" for p in self.params)
        return f"{self.family}:{inner}" if inner else self.family


def _normalized(family: str, params: tuple[float, ...], **extra) -> YoungFunction:
    probe = YoungFunction(family, params, norm=1.0, **extra)
    norm = float(probe._raw(np.array([1.0]))[0])
    if not (norm > 0.0 and math.isfinite(norm)):
        raise ValueError(f"family {family}{params} has unusable value {norm} at t=1")
    return YoungFunction(family, params, norm=norm, **extra)


def power(r: float) -> YoungFunction:
    """``t**r`` with ``r >= 1``."""
    if r < 1.0:
        raise ValueError(f"power exponent must be >= 1, got {r}")
    return _normalized("power", (float(r),))


def power_log(r: float, s: float) -> YoungFunction:
    """``t**r * log(e+t)**s``, normalized to 1 at t=1."""
    if r < 1.0 or s < 0.0:
        raise ValueError(f"need r >= 1 and s >= 0, got ({r}, {s})")
    return _normalized("power_log", (float(r), float(s)))


def log_log_power(k: float, eps: float) -> YoungFunction:
    """``t * log(e+t)**(1+k) * loglog(e^e+t)**(1+eps)``, normalized at t=1."""
    if k < 0.0 or eps < 0.0:
        raise ValueError(f"need k >= 0 and eps >= 0, got ({k}, {eps})")
    return _normalized("log_log_power", (float(k), float(eps)))


def exp_root(k: float) -> YoungFunction:
    """``exp(t**(1/k)) - 1``, normalized by ``e - 1``."""
    if k < 1.0:
        raise ValueError(f"exp_root order must be >= 1, got {k}")
    return _normalized("exp_root", (float(k),))


def exp_root_log(k: float, eps: float) -> YoungFunction:
    """``exp(t**(1/(1+k)) / (log t)**((1+eps)/(1+k)))`` with a linear ramp.

    The exponential form only makes sense for ``t`` comfortably above ``e``;
    below ``t0 = exp(max(2, 2*(1+eps)))`` it is continued linearly through
    the origin (the choice of ``t0`` keeps the exponent increasing there).
    Normalized so ``A(1) = 1``.
    """
    if k < 0.0 or eps < 0.0:
        raise ValueError(f"need k >= 0 and eps >= 0, got ({k}, {eps})")
    t0 = math.exp(max(2.0, 2.0 * (1.0 + eps)))
    return _normalized("exp_root_log", (float(k), float(eps)), ramp_at=t0)


def tabulated(ts, vs) -> YoungFunction:
    """Monotone sample table ``(t_i, A(t_i))`` with log-linear interpolation."""
    ts = [float(t) for t in ts]
    vs = [float(v) for v in vs]
    if len(ts) != len(vs) or len(ts) < 64:
        raise ValueError(f"need at least 64 matched samples, got {len(ts)}/{len(vs)}")
    if any(t <= 0 for t in ts) or any(v <= 0 for v in vs):
        raise ValueError("table samples must be strictly positive")
    if any(b <= a for a, b in zip(ts, ts[1:])) or any(b < a for a, b in zip(vs, vs[1:])):
        raise ValueError("table samples must be increasing")
    return _normalized("table", (), table=(tuple(ts), tuple(vs)))


def parse_young_spec(text: str) -> YoungFunction:
    """Colon grammar: ``power:r | powerlog:r:s | loglog:k:eps | exproot:k |
    exprootlog:k:eps | table:<path>``."""
    head, _, rest = text.partition(":")
    try:
        if head == "power":
            return power(float(rest))
        if head == "powerlog":
            r, s = rest.split(":")
            return power_log(float(r), float(s))
        if head == "loglog":
            k, eps = rest.split(":")
            return log_log_power(float(k), float(eps))
        if head == "exproot":
            return exp_root(float(rest))
        if head == "exprootlog":
            k, eps = rest.split(":")
            return exp_root_log(float(k), float(eps))
        if head == "table":
            if not rest:
                raise ValueError("table needs a path")
            rows = []
            with Path(rest).open(newline="") as fh:
                for row in csv.reader(fh):
                    if not row or all(not c.strip() for c in row):
                        continue
                    try:
                        rows.append((float(row[0]), float(row[1])))
                    except ValueError:
                        continue  # header
            return tabulated([r[0] for r in rows], [r[1] for r in rows])
    except ValueError as exc:
        raise ValueError(f"bad young spec {text!r}: {exc}") from None
    raise ValueError(f"unknown young family {head!r}")


def young_eval(A: YoungFunction, t) -> np.ndarray:
    return A.eval(t)


def young_inverse(A: YoungFunction, s: float) -> float:
    return A.inverse(s)


# ---------------------------------------------------------------------------
# Luxemburg averages
# ---------------------------------------------------------------------------


def luxemburg_from_samples(
    values: np.ndarray,
    weights: np.ndarray,
    measure: float,
    A: YoungFunction,
    rtol: float = _LUX_RTOL,
) -> float:
    """Luxemburg average of piecewise data over a set of total ``measure``.

    ``values[i]`` holds on a piece of length ``weights[i]``; the pieces need
    not fill the set (the gap contributes ``A(0) = 0``).
    """
    av = np.abs(np.asarray(values, dtype=float))
    w = np.asarray(weights, dtype=float)
    if measure <= 0.0:
        raise ValueError(f"measure must be positive, got {measure}")
    mass = av > 0.0
    if not mass.any():
        return 0.0
    av, w = av[mass], w[mass]

    def constraint(lam: float) -> float:
        with np.errstate(over="ignore"):
            return float((A.eval(av / lam) * w).sum()) / measure

    hi = float(av.max())  # A(|f|/max) <= A(1) = 1 pointwise
    lo = max(float((av * w).sum()) / measure, hi * 1e-18)
    for _ in range(200):
        if constraint(lo) > 1.0:
            break
        if lo >= hi * (1.0 - 1e-15):
            return hi
        lo = max(lo * 0.5, hi * 1e-300)
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi)
        if constraint(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def orlicz_average(f: SampledFunction, E, A: YoungFunction) -> float:
    """Luxemburg average of ``f`` over ``E`` (an interval or cell set)."""
    grid = f.grid
    if isinstance(E, IntervalSpec):
        E = CellSet.from_interval(grid, E.a, E.c)
    if not isinstance(E, CellSet):
        raise TypeError(f"E must be an IntervalSpec or CellSet, got {type(E).__name__}")
    if E.grid != grid:
        raise ValueError("E lives on a different grid")
    if E.cell_count == 0:
        raise ValueError("E must have positive measure")
    vals = f.values[E.mask]
    if A.family == "power" and A.params[0] == 1.0:
        return float(np.abs(vals).mean())
    d = grid.spacing
    return luxemburg_from_samples(vals, np.full(len(vals), d), E.measure, A)


def _luxemburg_rows(W: np.ndarray, A: YoungFunction, rtol: float = _LUX_RTOL) -> np.ndarray:
    """Row-wise Luxemburg average of a window matrix (uniform piece lengths)."""
    av = np.abs(W)
    k = av.shape[1]
    rowmax = av.max(axis=1)
    out = np.zeros(av.shape[0])
    act = rowmax > 0.0
    if not act.any():
        return out
    av = av[act]
    hi = rowmax[act].copy()
    lo = np.maximum(av.mean(axis=1), hi * 1e-18)

    def constraint(lam: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return A.eval(av / lam[:, None]).sum(axis=1) / k

    for _ in range(80):
        bad = constraint(lo) <= 1.0
        if not bad.any():
            break
        lo[bad] = np.maximum(lo[bad] * 0.5, hi[bad] * 1e-300)
    lo = np.minimum(lo, hi)
    # Geometric bisection; ~70 rounds push hi/lo below 1e-10 relative even
    # from a bracket spanning many decades.
    for _ in range(75):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = np.sqrt(lo * hi)
        viol = constraint(mid) > 1.0
        lo = np.where(viol, mid, lo)
        hi = np.where(viol, hi, mid)
    out[act] = 0.5 * (lo + hi)
    return out


def _padded_windows(values: np.ndarray, k: int) -> np.ndarray:
    n = len(values)
    padded = np.concatenate([values, np.zeros(k)])
    return np.lib.stride_tricks.sliding_window_view(padded, k)[:n]


def orlicz_maximal(
    f: SampledFunction,
    A: YoungFunction,
    policy: WindowPolicy = WindowPolicy.DYADIC,
) -> SampledFunction:
    """Forward maximal of Luxemburg averages over dyadic cell windows.

    Windows extend past the right edge reading zeros.  With ``A = power(1)``
    this is exactly the plain one-sided maximal under the same policy.
    """
    if A.family == "power" and A.params[0] == 1.0:
        return one_sided_maximal(f, Direction.FORWARD, 1.0, policy)
    n = f.grid.count
    lengths = dyadic_lengths(n) if policy is WindowPolicy.DYADIC else range(1, n + 1)
    best = np.zeros(n)
    for k in lengths:
        np.maximum(best, _luxemburg_rows(_padded_windows(f.values, k), A), out=best)
    return f.with_values(best)


def fractional_orlicz_maximal(
    f: SampledFunction, alpha: float, A: YoungFunction
) -> SampledFunction:
    """Forward maximal of ``(k*spacing)**alpha * Luxemburg average`` over dyadic windows."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = f.grid.count
    d = f.grid.spacing
    plain = A.family == "power" and A.params[0] == 1.0
    if plain:
        Q = np.concatenate([[0.0], np.cumsum(np.abs(f.values))])
    best = np.zeros(n)
    for k in dyadic_lengths(n):
        h = (k * d) ** alpha
        if plain:
            Qp = np.concatenate([Q, np.full(k, Q[-1])])
            avg = (Qp[k : k + n] - Q[:n]) / k
            np.maximum(best, h * avg, out=best)
        else:
            np.maximum(best, h * _luxemburg_rows(_padded_windows(f.values, k), A), out=best)
    return f.with_values(best)


# ---------------------------------------------------------------------------
# Conjugate pairs and Hoelder
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugatePair:
    """A Young function together with its (normalized) conjugate partner."""

    A: YoungFunction
    conj: YoungFunction

    def describe(self) -> str:
        return f"{self.A.describe()} ~ {self.conj.describe()}"


def default_conjugate_pairs() -> list[ConjugatePair]:
    """Built-in pairs: power duals and the (t log t, exp t) pair."""
    pairs = [ConjugatePair(power(p), power(p / (p - 1.0))) for p in (1.5, 2.0, 3.0, 4.0)]
    pairs.append(ConjugatePair(power_log(1.0, 1.0), exp_root(1.0)))
    return pairs


def conjugate_check(pair: ConjugatePair, tgrid: np.ndarray) -> dict:
    """Ratio ``conj^{-1}(t) * A^{-1}(t) / t`` over a t-grid.

    For a true conjugate pair the product lies between ``t`` and ``2t``.
    """
    tgrid = np.asarray(tgrid, dtype=float)
    if np.any(tgrid <= 0.0):
        raise ValueError("t-grid must be positive")
    ratios = np.array(
        [pair.A.inverse(t) * pair.conj.inverse(t) / t for t in tgrid]
    )
    return {
        "pair": pair.describe(),
        "min_ratio": float(ratios.min()),
        "max_ratio": float(ratios.max()),
        "ratios": ratios,
    }


def generalized_holder_check(
    fs: list[SampledFunction],
    As: list[YoungFunction],
    E,
    sweep: np.ndarray | None = None,
) -> dict:
    """Ratio of the product's plain average to the product of Luxemburg averages.

    Requires ``prod_i A_i^{-1}(t) <= const * t`` on a sweep (the usual
    compatibility for a multi-factor Hoelder inequality); specs whose
    inverse product grows superlinearly are rejected.
    """
    if len(fs) != len(As) or len(fs) < 2:
        raise ValueError("need matching lists of at least two functions")
    if sweep is None:
        sweep = np.logspace(0.0, 6.0, 25)
    prod_ratio = np.array(
        [math.prod(A.inverse(t) for A in As) / t for t in sweep]
    )
    # reject if the log-log slope on the top decade is clearly positive
    top = sweep >= sweep.max() / 10.0
    if top.sum() >= 2:
        lt = np.log(sweep[top])
        lr = np.log(prod_ratio[top])
        slope = np.polyfit(lt, lr, 1)[0]
        if slope > 0.01:
            raise ValueError(
                f"inverse product grows like t**{1 + slope:.3f}; "
                "families are not Hoelder-compatible"
            )
    grid = fs[0].grid
    if isinstance(E, IntervalSpec):
        E = CellSet.from_interval(grid, E.a, E.c)
    prod_vals = np.prod([np.abs(f.values) for f in fs], axis=0)
    lhs = float(prod_vals[E.mask].mean())
    rhs = math.prod(orlicz_average(f, E, A) for f, A in zip(fs, As))
    return {
        "plain_average": lhs,
        "norm_product": rhs,
        "ratio": lhs / rhs if rhs > 0 else math.inf if lhs > 0 else 0.0,
        "sweep_max": float(prod_ratio.max()),
    }
