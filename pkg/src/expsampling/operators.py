"""The four exponential sampling operators with explicit truncation policies.

All operators consume samples on the exponential lattice e^{k/w} and evaluate
in the log domain, where the kernel argument chi(e^{-k} x^w) becomes the
lattice offset w log x - k.  Two domain modes exist:

* interval mode: a compact [a, b] fixes the index set J_w = {ceil(w log a),
  ..., floor(w log b)}, the same set at every evaluation point;
* window mode: the index set is a truncation window |k - w log x| <= W around
  the evaluation point, approximating the bi-infinite lattice.

In window mode the truncated join/sum of a compactly supported kernel is
exact; for the rest the diagnostics variants report a truncation tail bound.

Configurations and sample sets are immutable after construction; operator
evaluation is pure, so concurrent use is safe and results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateDenominatorError,
    EvaluationError,
)
from .kernels import Kernel, eta_lower_bound, sinc
from .spaces import LogGrid, WeightedFunction

__all__ = [
    "SamplingConfig",
    "ExpSamples",
    "GridPoint",
    "OperatorDiagnostics",
    "index_set",
    "take_samples",
    "default_half_width",
    "max_product_series",
    "max_product_series_on_grid",
    "max_product_series_with_diagnostics",
    "generalized_series",
    "generalized_series_with_diagnostics",
    "kantorovich_series",
    "kantorovich_series_with_diagnostics",
    "classical_exponential_formula",
    "classical_exponential_formula_with_diagnostics",
    "evaluate_on_grid",
    "OPERATOR_TAGS",
]

_DENOMINATOR_FLOOR = 1e-300
_NONCOMPACT_HALF_WIDTH = 64


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling rate, domain mode and truncation/quadrature policy.

    `interval` switches on interval mode; `window_half_width` pins the
    truncation half-width in window mode (None defers to the per-kernel
    default, see `default_half_width`).  `quadrature_points` is the number of
    Gauss-Legendre nodes per lattice cell in the Kantorovich series.
    """

    w: float
    interval: Optional[tuple[float, float]] = None
    window_half_width: Optional[int] = None
    quadrature_points: int = 8

    def __post_init__(self):
        if not self.w > 0.0:
            raise ConfigurationError(f"sampling rate w must be positive, got {self.w!r}")
        if self.interval is not None:
            a, b = self.interval
            if not (0.0 < a < b):
                raise ConfigurationError(f"interval must satisfy 0 < a < b, got {self.interval!r}")
            if math.ceil(self.w * math.log(a)) > math.floor(self.w * math.log(b)):
                raise ConfigurationError(
                    f"empty index set for interval {self.interval!r} at w={self.w:g}; "
                    "need w >= 1/(log b - log a)"
                )
        if self.window_half_width is not None and self.window_half_width < 1:
            raise ConfigurationError("window_half_width must be a positive integer")
        if self.quadrature_points < 1:
            raise ConfigurationError("quadrature_points must be a positive integer")


def index_set(config: SamplingConfig) -> range:
    """J_w = {ceil(w log a), ..., floor(w log b)} for interval mode."""
    if config.interval is None:
        raise ConfigurationError("index_set requires a config with an interval")
    a, b = config.interval
    lo = math.ceil(config.w * math.log(a))
    hi = math.floor(config.w * math.log(b))
    return range(lo, hi + 1)


def default_half_width(kernel: Kernel, w: float) -> int:
    """Default truncation half-width: exact for compact supports, 64 otherwise."""
    r = kernel.log_support_radius
    return int(math.ceil(r * w)) + 2 if r is not None else _NONCOMPACT_HALF_WIDTH


@dataclass(frozen=True)
class ExpSamples:
    """Sample values f(e^{k/w}) on a contiguous range of lattice indices."""

    w: float
    entries: Mapping[int, float]

    def __post_init__(self):
        if not self.w > 0.0:
            raise ConfigurationError("sample rate w must be positive")
        if not self.entries:
            raise ConfigurationError("ExpSamples requires at least one entry")
        ks = sorted(self.entries)
        if ks != list(range(ks[0], ks[-1] + 1)):
            raise ConfigurationError("sample keys must form a contiguous integer range")
        for k in ks:
            if not math.isfinite(self.entries[k]):
                raise EvaluationError(f"non-finite sample at k={k}", where=k)

    @cached_property
    def k_min(self) -> int:
        return min(self.entries)

    @cached_property
    def value_array(self) -> np.ndarray:
        ks = sorted(self.entries)
        return np.array([self.entries[k] for k in ks], dtype=float)


def take_samples(f: WeightedFunction, config: SamplingConfig, center_log: float = 0.0) -> ExpSamples:
    """Materialise f(e^{k/w}) over J_w or over |k - w center_log| <= half-width."""
    if config.interval is not None:
        j = index_set(config)
        ks = np.arange(j.start, j.stop)
    else:
        if config.window_half_width is None:
            raise ConfigurationError("window-mode sampling requires window_half_width")
        c = config.w * center_log
        h = config.window_half_width
        ks = np.arange(math.ceil(c - h), math.floor(c + h) + 1)
    vals = np.asarray(f.evaluate_log(ks / config.w), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(ks[bad][0])
        raise EvaluationError(f"'{f.name}' non-finite at sample k={k}", where=k)
    return ExpSamples(config.w, dict(zip((int(k) for k in ks), vals.tolist())))


# --------------------------------------------------------------------------
# lattice geometry shared by the operators
# --------------------------------------------------------------------------


def _lattice(kernel: Kernel, config: SamplingConfig, vs: np.ndarray):
    """Index span, kernel values and active-set mask for evaluation points vs.

    Returns (ks, chi, mask, half_width): chi[i, j] = chi(e^{w vs[i] - ks[j]}),
    mask[i, j] marks membership of ks[j] in the active index set at vs[i].
    """
    w = config.w
    if config.interval is not None:
        j = index_set(config)
        ks = np.arange(j.start, j.stop)
        mask = np.ones((len(vs), len(ks)), dtype=bool)
        half = None
    else:
        half = config.window_half_width or default_half_width(kernel, w)
        lo = math.ceil(w * float(np.min(vs)) - half)
        hi = math.floor(w * float(np.max(vs)) + half)
        ks = np.arange(lo, hi + 1)
        mask = np.abs(ks[None, :] - w * vs[:, None]) <= half
    t = w * vs[:, None] - ks[None, :]
    chi = kernel.log_profile(t)
    return ks, chi, mask, half


def _lookup(samples: ExpSamples, ks: np.ndarray, chi: np.ndarray, mask: np.ndarray):
    """Sample values over ks; lattice indices with vanishing kernel may be absent."""
    idx = ks - samples.k_min
    vals = samples.value_array
    inside = (idx >= 0) & (idx < len(vals))
    fv = np.where(inside, vals[np.clip(idx, 0, len(vals) - 1)], 0.0)
    missing = mask & ~inside[None, :] & (chi != 0.0)
    if missing.any():
        k = int(ks[np.nonzero(missing)[1][0]])
        raise EvaluationError(
            f"samples do not cover required lattice index k={k}", where=k
        )
    return fv


def _as_log_values(grid: Union[LogGrid, Sequence[float]]) -> np.ndarray:
    if isinstance(grid, LogGrid):
        return grid.log_values()
    xs = np.asarray(grid, dtype=float)
    if np.any(xs <= 0.0):
        raise ValueError("evaluation points must be positive")
    return np.log(xs)


# --------------------------------------------------------------------------
# max-product series
# --------------------------------------------------------------------------


def _max_product_joins(kernel, samples, vs, config):
    ks, chi, mask, half = _lattice(kernel, config, vs)
    fv = _lookup(samples, ks, chi, mask)
    num = np.where(mask, chi * fv[None, :], -np.inf).max(axis=1)
    den = np.where(mask, chi, -np.inf).max(axis=1)
    return num, den, ks, chi, mask, half


def max_product_series_on_grid(
    kernel: Kernel,
    samples: ExpSamples,
    grid: Union[LogGrid, Sequence[float]],
    config: SamplingConfig,
) -> np.ndarray:
    """Max-product values over a whole grid; raises on the first degenerate point."""
    vs = _as_log_values(grid)
    num, den, ks, _, mask, _ = _max_product_joins(kernel, samples, vs, config)
    bad = ~(den > _DENOMINATOR_FLOOR)
    if bad.any():
        i = int(np.nonzero(bad)[0][0])
        raise DegenerateDenominatorError(
            f"max-product denominator {den[i]:.3g} at x={math.exp(vs[i]):.6g}",
            x=float(math.exp(vs[i])),
            w=config.w,
            index_set=[int(k) for k in ks[mask[i]]],
        )
    return num / den


def max_product_series(
    kernel: Kernel, samples: ExpSamples, x: float, config: SamplingConfig
) -> float:
    """The max-product ratio of joins at a single point x.

    Both joins are taken of the signed products over the active index set;
    the denominator must stay positive (guaranteed at the eta lower bound for
    kernels whose infimum over [1, e] is positive).
    """
    if not x > 0.0:
        raise ValueError("x must be positive")
    return float(max_product_series_on_grid(kernel, samples, [x], config)[0])


@dataclass(frozen=True)
class OperatorDiagnostics:
    """Truncation bookkeeping for one operator evaluation."""

    mode: str
    half_width: Optional[int]
    index_min: int
    index_max: int
    tail_bound: float
    note: str = ""


def _ring(kernel: Kernel, config: SamplingConfig, v: float, half: int):
    """Lattice offsets in the ring (half, 2*half] on both sides of w v."""
    w = config.w
    c = w * v
    right = np.arange(math.floor(c + half) + 1, math.floor(c + 2 * half) + 1)
    left = np.arange(math.ceil(c - 2 * half), math.ceil(c - half))
    ks = np.concatenate([left, right])
    chi = kernel.log_profile(w * v - ks)
    return ks, chi


def _tail_caps(ks: np.ndarray, w: float, f_bound: Optional[float], fallback: float) -> np.ndarray:
    if f_bound is None:
        return np.full(len(ks), fallback)
    return f_bound * (1.0 + np.square(ks / w))


def max_product_series_with_diagnostics(
    kernel: Kernel,
    samples: ExpSamples,
    x: float,
    config: SamplingConfig,
    f_bound: Optional[float] = None,
) -> tuple[float, OperatorDiagnostics]:
    """Max-product value plus a truncation tail bound for window mode.

    `f_bound` is a weighted-boundedness certificate M for the sampled
    function; without it the bound falls back to the largest sampled |f|.
    """
    if not x > 0.0:
        raise ValueError("x must be positive")
    vs = np.array([math.log(x)])
    num, den, ks, chi, mask, half = _max_product_joins(kernel, samples, vs, config)
    if not den[0] > _DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"max-product denominator {den[0]:.3g} at x={x:.6g}",
            x=x,
            w=config.w,
            index_set=[int(k) for k in ks[mask[0]]],
        )
    value = float(num[0] / den[0])
    if config.interval is not None:
        diag = OperatorDiagnostics("interval", None, int(ks[0]), int(ks[-1]), 0.0)
        return value, diag
    rks, rchi = _ring(kernel, config, math.log(x), half)
    caps = _tail_caps(rks, config.w, f_bound, float(np.max(np.abs(samples.value_array))))
    ring_num = float(np.max(np.abs(rchi) * caps, initial=0.0))
    ring_den = float(np.max(np.abs(rchi), initial=0.0))
    tail = (ring_num + abs(value) * ring_den) / float(den[0])
    note = ""
    if eta_lower_bound(kernel) <= 0.0:
        note = "kernel infimum over [1,e] is not positive; convergence guarantees do not apply"
    return value, OperatorDiagnostics("window", half, int(ks[0]), int(ks[-1]), tail, note)


# --------------------------------------------------------------------------
# generalized series
# --------------------------------------------------------------------------


def _generalized_values(kernel, samples, vs, config):
    ks, chi, mask, half = _lattice(kernel, config, vs)
    fv = _lookup(samples, ks, chi, mask)
    out = np.where(mask, chi * fv[None, :], 0.0).sum(axis=1)
    return out, ks, half


def generalized_series(
    kernel: Kernel, samples: ExpSamples, x: float, config: SamplingConfig
) -> float:
    """Truncated sum over k of chi(e^{-k} x^w) f(e^{k/w})."""
    if not x > 0.0:
        raise ValueError("x must be positive")
    out, _, _ = _generalized_values(kernel, samples, np.array([math.log(x)]), config)
    if not math.isfinite(out[0]):
        raise EvaluationError(f"non-finite partial sum at x={x:.6g}", where=x)
    return float(out[0])


def generalized_series_with_diagnostics(
    kernel: Kernel,
    samples: ExpSamples,
    x: float,
    config: SamplingConfig,
    f_bound: Optional[float] = None,
) -> tuple[float, OperatorDiagnostics]:
    """Truncated sum plus a tail bound from the kernel decay beyond the window."""
    value = generalized_series(kernel, samples, x, config)
    if config.interval is not None:
        j = index_set(config)
        return value, OperatorDiagnostics("interval", None, j.start, j.stop - 1, 0.0)
    half = config.window_half_width or default_half_width(kernel, config.w)
    rks, rchi = _ring(kernel, config, math.log(x), half)
    caps = _tail_caps(rks, config.w, f_bound, float(np.max(np.abs(samples.value_array))))
    tail = float(np.sum(np.abs(rchi) * caps))
    c = config.w * math.log(x)
    return value, OperatorDiagnostics(
        "window", half, math.ceil(c - half), math.floor(c + half), tail
    )


# --------------------------------------------------------------------------
# Kantorovich series
# --------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _gauss_rule(points: int):
    nodes, weights = np.polynomial.legendre.leggauss(points)
    return nodes, weights


def _cell_means(f: WeightedFunction, ks: np.ndarray, w: float, points: int) -> np.ndarray:
    """w * integral of f(e^u) over [k/w, (k+1)/w] per k, by Gauss-Legendre."""
    nodes, weights = _gauss_rule(points)
    us = (ks[:, None] + (nodes[None, :] + 1.0) / 2.0) / w
    fvals = np.asarray(f.evaluate_log(us), dtype=float)
    if not np.all(np.isfinite(fvals)):
        k = int(ks[np.nonzero(~np.isfinite(fvals).all(axis=1))[0][0]])
        raise EvaluationError(f"quadrature non-finite on cell k={k}", where=k)
    return fvals @ weights / 2.0


def kantorovich_series(
    kernel: Kernel, f: WeightedFunction, x: float, config: SamplingConfig
) -> float:
    """Sampling series with point samples replaced by lattice-cell means of f(e^u)."""
    if not x > 0.0:
        raise ValueError("x must be positive")
    vs = np.array([math.log(x)])
    ks, chi, mask, _ = _lattice(kernel, config, vs)
    means = _cell_means(f, ks, config.w, config.quadrature_points)
    out = float(np.where(mask, chi * means[None, :], 0.0).sum(axis=1)[0])
    if not math.isfinite(out):
        raise EvaluationError(f"non-finite Kantorovich sum at x={x:.6g}", where=x)
    return out


def kantorovich_series_with_diagnostics(
    kernel: Kernel,
    f: WeightedFunction,
    x: float,
    config: SamplingConfig,
    f_bound: Optional[float] = None,
) -> tuple[float, OperatorDiagnostics]:
    """Kantorovich value plus a window-mode truncation tail bound.

    Cell means of a weighted-bounded f are capped by M * max of the
    reciprocal weight over the cell; without a certificate the cap falls back
    to the largest in-window cell mean.
    """
    value = kantorovich_series(kernel, f, x, config)
    if config.interval is not None:
        j = index_set(config)
        return value, OperatorDiagnostics("interval", None, j.start, j.stop - 1, 0.0)
    half = config.window_half_width or default_half_width(kernel, config.w)
    rks, rchi = _ring(kernel, config, math.log(x), half)
    w = config.w
    if f_bound is None:
        c = w * math.log(x)
        inner = np.arange(math.ceil(c - half), math.floor(c + half) + 1)
        fallback = float(np.max(np.abs(_cell_means(f, inner, w, config.quadrature_points))))
        caps = np.full(len(rks), fallback)
    else:
        edge = np.maximum(np.abs(rks), np.abs(rks + 1)) / w
        caps = f_bound * (1.0 + edge * edge)
    tail = float(np.sum(np.abs(rchi) * caps))
    c = w * math.log(x)
    return value, OperatorDiagnostics(
        "window", half, math.ceil(c - half), math.floor(c + half), tail
    )


# --------------------------------------------------------------------------
# classical exponential sampling formula
# --------------------------------------------------------------------------


def _snap_to_integers(s: np.ndarray) -> np.ndarray:
    n = np.round(s)
    return np.where(np.abs(s - n) <= 1e-12 * np.maximum(1.0, np.abs(s)), n, s)


def _classical_values(f, c, T, vs, window):
    ks_lo = math.ceil(T * float(np.min(vs)) - window)
    ks_hi = math.floor(T * float(np.max(vs)) + window)
    ks = np.arange(ks_lo, ks_hi + 1)
    s = _snap_to_integers(T * vs[:, None] - ks[None, :])
    sc = sinc(s)
    damp = np.exp(-(c / T) * np.where(sc == 0.0, 0.0, s))
    lin = damp * sc
    mask = np.abs(ks[None, :] - T * vs[:, None]) <= window
    fv = np.asarray(f.evaluate_log(ks / T), dtype=float)
    return np.where(mask, lin * fv[None, :], 0.0).sum(axis=1)


def classical_exponential_formula(
    f: WeightedFunction, c: float, T: float, x: float, window: int
) -> float:
    """Truncated classical series with the damped sinc kernel at rate T.

    Signals whose log-frequency content is band-limited to [-T, T] are
    reproduced by the untruncated series; at lattice points e^{m/T} the sum
    reduces to the single sample f(e^{m/T}) because the sinc factor vanishes
    at every other index.
    """
    if not T > 0.0:
        raise ValueError("T must be positive")
    if window < 1:
        raise ValueError("window must be a positive integer")
    if not x > 0.0:
        raise ValueError("x must be positive")
    out = _classical_values(f, c, T, np.array([math.log(x)]), window)
    if not math.isfinite(out[0]):
        raise EvaluationError(f"non-finite term in classical series at x={x:.6g}", where=x)
    return float(out[0])


def classical_exponential_formula_with_diagnostics(
    f: WeightedFunction, c: float, T: float, x: float, window: int
) -> tuple[float, OperatorDiagnostics]:
    """Classical series value plus the doubling residual as a tail indicator.

    The sinc tails decay like 1/|k|, so convergence of the truncated series is
    conditional and slow; the reported tail is |value(2*window) - value(window)|.
    """
    value = classical_exponential_formula(f, c, T, x, window)
    wide = classical_exponential_formula(f, c, T, x, 2 * window)
    c0 = T * math.log(x)
    return value, OperatorDiagnostics(
        "window",
        window,
        math.ceil(c0 - window),
        math.floor(c0 + window),
        abs(wide - value),
        "doubling residual; conditional convergence",
    )


# --------------------------------------------------------------------------
# grid evaluation
# --------------------------------------------------------------------------

OPERATOR_TAGS = ("S", "I", "MG", "E")


@dataclass(frozen=True)
class GridPoint:
    """One grid evaluation row: value, error against f, and weighted error."""

    x: float
    log_x: float
    value: float
    error_vs_f: float
    weighted_error: float
    note: str = ""


def evaluate_on_grid(
    operator: str,
    f: WeightedFunction,
    kernel: Kernel,
    config: SamplingConfig,
    grid: Union[LogGrid, Sequence[float]],
    c: float = 0.0,
) -> list[GridPoint]:
    """Apply one operator ("S", "I", "MG" or "E") to f across a grid.

    Per-point failures (degenerate denominators, non-finite values) are
    recorded in the row note with NaN values rather than raised.  For "E" the
    rate T is config.w and `c` is the damping exponent of the sinc kernel.
    """
    if operator not in OPERATOR_TAGS:
        raise ValueError(f"unknown operator tag {operator!r}; expected one of {OPERATOR_TAGS}")
    vs = _as_log_values(grid)
    w = config.w
    notes = [""] * len(vs)
    values = np.full(len(vs), np.nan)

    if operator == "E":
        half = config.window_half_width or _NONCOMPACT_HALF_WIDTH
        values = _classical_values(f, c, w, vs, half)
        for i in np.nonzero(~np.isfinite(values))[0]:
            values[int(i)] = np.nan
            notes[int(i)] = "non-finite term in classical series window"
    elif operator == "I":
        ks, chi, mask, _ = _lattice(kernel, config, vs)
        nodes, weights = _gauss_rule(config.quadrature_points)
        us = (ks[:, None] + (nodes[None, :] + 1.0) / 2.0) / w
        fvals = np.asarray(f.evaluate_log(us), dtype=float)
        with np.errstate(invalid="ignore"):
            means = fvals @ weights / 2.0  # non-finite cells poison only their rows
            values = np.where(mask & (chi != 0.0), chi * means[None, :], 0.0).sum(axis=1)
        for i in np.nonzero(~np.isfinite(values))[0]:
            values[int(i)] = np.nan
            notes[int(i)] = "non-finite quadrature cell in active window"
    else:
        ks, chi, mask, _ = _lattice(kernel, config, vs)
        fv = np.asarray(f.evaluate_log(ks / w), dtype=float)
        bad_samples = ~np.isfinite(fv)
        if bad_samples.any():
            fv = np.where(bad_samples, 0.0, fv)
        if operator == "S":
            values = np.where(mask, chi * fv[None, :], 0.0).sum(axis=1)
        else:
            num = np.where(mask, chi * fv[None, :], -np.inf).max(axis=1)
            den = np.where(mask, chi, -np.inf).max(axis=1)
            ok = den > _DENOMINATOR_FLOOR
            values = np.where(ok, num / np.where(ok, den, 1.0), np.nan)
            for i in np.nonzero(~ok)[0]:
                notes[int(i)] = f"degenerate denominator {den[int(i)]:.3g}"
        if bad_samples.any():
            affected = (mask & (chi != 0.0) & bad_samples[None, :]).any(axis=1)
            for i in np.nonzero(affected)[0]:
                values[int(i)] = np.nan
                notes[int(i)] = "non-finite sample in active window"

    fx = np.asarray(f.evaluate_log(vs), dtype=float)
    rows = []
    for i, v in enumerate(vs):
        val = float(values[i])
        err = abs(val - float(fx[i])) if math.isfinite(val) and math.isfinite(fx[i]) else math.nan
        werr = err / (1.0 + v * v) if math.isfinite(err) else math.nan
        if not math.isfinite(val) and not notes[i]:
            notes[i] = "non-finite value"
        rows.append(GridPoint(float(math.exp(v)), float(v), val, err, werr, notes[i]))
    return rows
