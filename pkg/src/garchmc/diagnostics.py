"""Chain analysis: autocorrelation function, integrated autocorrelation time,
jackknife errors, and per-parameter posterior summaries.

The autocorrelation time tau enters the statistical error of a correlated
mean as sigma * sqrt(2*tau / k), so tau is the efficiency figure of merit
when comparing samplers on the same posterior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BlockCountError, DegenerateSeriesError
from .model import PARAM_NAMES
from .samplers import Chain

#: starting lag cap for the automatic window search; grown geometrically
#: until the positive initial ACF sequence closes
_AUTO_LAG_START = 64
_AUTO_LAG_GROWTH = 4

#: default number of contiguous jackknife blocks
DEFAULT_BLOCKS = 20


@dataclass(frozen=True)
class AcfSeries:
    """Autocorrelation values at lags 0..t_max for one scalar series;
    ACF(0) is exactly 1."""

    values: np.ndarray

    @property
    def t_max(self) -> int:
        return self.values.size - 1


def acf(x, t_max: int) -> AcfSeries:
    """Autocorrelation function of ``x`` up to lag ``t_max``.

    Lag-t covariances are summed over the N - t available products but
    divided by the full length N (the biased convention), then normalized by
    the full-series variance; under that convention ACF(0) = 1 exactly.
    """
    x = np.ascontiguousarray(x, dtype=float)
    n = x.size
    if not 0 <= t_max < n:
        raise ValueError(f"need 0 <= t_max < len(x), got t_max={t_max}, len={n}")
    d = x - x.mean()
    denom = float(d @ d)  # n * variance
    if denom == 0.0:
        raise DegenerateSeriesError("zero-variance series has no autocorrelation")
    vals = np.empty(t_max + 1)
    vals[0] = 1.0
    for t in range(1, t_max + 1):
        vals[t] = float(d[: n - t] @ d[t:]) / denom
    return AcfSeries(vals)


def _positive_window(vals: np.ndarray) -> int:
    """Length of the initial run of strictly positive ACF values after lag 0."""
    for i in range(1, vals.size):
        if vals[i] <= 0.0:
            return i - 1
    return vals.size - 1


def integrated_autocorrelation_time(a: AcfSeries) -> float:
    """tau = 1/2 + sum of ACF over the initial positive sequence.

    The infinite sum is truncated at the first non-positive ACF value (or at
    t_max when the sequence never closes); iid data gives tau ~ 1/2.
    """
    w = _positive_window(a.values)
    return 0.5 + float(a.values[1 : w + 1].sum())


def autocorrelation_time(x, t_max: int | None = None) -> float:
    """tau of a scalar series, growing the lag cap until the positive ACF
    window closes when ``t_max`` is not given."""
    x = np.ascontiguousarray(x, dtype=float)
    n = x.size
    if t_max is not None:
        return integrated_autocorrelation_time(acf(x, t_max))
    cap = min(_AUTO_LAG_START, n - 1)
    while True:
        series = acf(x, cap)
        if _positive_window(series.values) < cap or cap == n - 1:
            return integrated_autocorrelation_time(series)
        cap = min(cap * _AUTO_LAG_GROWTH, n - 1)


def _resolve_statistic(statistic) -> Callable[[np.ndarray], float]:
    if statistic == "mean":
        return lambda x: float(np.mean(x))
    if statistic == "tau":
        return autocorrelation_time
    if callable(statistic):
        return statistic
    raise ValueError(f"statistic must be 'mean', 'tau' or a callable, got {statistic!r}")


def jackknife_error(x, statistic, blocks: int = DEFAULT_BLOCKS) -> tuple[float, float]:
    """Delete-one-block jackknife estimate and error of a series statistic.

    The series is cut into ``blocks`` contiguous equal blocks (any remainder
    is truncated); the statistic is recomputed on each leave-one-block-out
    subseries. Returns (statistic on the truncated series, jackknife error).
    """
    x = np.ascontiguousarray(x, dtype=float)
    stat = _resolve_statistic(statistic)
    if blocks < 2:
        raise BlockCountError(f"need at least 2 blocks, got {blocks}")
    if x.size < 2 * blocks:
        raise BlockCountError(
            f"need a series of length >= 2*blocks = {2 * blocks}, got {x.size}"
        )
    block_len = x.size // blocks
    trunc = x[: blocks * block_len]
    estimate = stat(trunc)
    loo = np.empty(blocks)
    for b in range(blocks):
        loo[b] = stat(np.concatenate([trunc[: b * block_len], trunc[(b + 1) * block_len :]]))
    err = math.sqrt((blocks - 1) / blocks * float(((loo - loo.mean()) ** 2).sum()))
    return float(estimate), err


@dataclass(frozen=True)
class ParamSummary:
    """Posterior summary of one parameter.

    ``stat_error`` is the correlated-sample error std * sqrt(2*tau / k);
    ``two_tau`` carries a jackknife error bar. A zero-variance chain
    component is reported with ``degenerate=True`` and the tau fields unset.
    """

    mean: float
    std: float
    stat_error: float | None = None
    two_tau: float | None = None
    two_tau_error: float | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class ChainSummary:
    """Per-parameter posterior summaries, keyed by parameter name."""

    params: dict[str, ParamSummary] = field(default_factory=dict)

    def __getitem__(self, name: str) -> ParamSummary:
        return self.params[name]

    def items(self):
        return self.params.items()


def _component_names(dim: int, names=None) -> tuple[str, ...]:
    if names is not None:
        if len(names) != dim:
            raise ValueError(f"got {len(names)} names for {dim} components")
        return tuple(names)
    if dim == len(PARAM_NAMES):
        return PARAM_NAMES
    return tuple(f"theta{i}" for i in range(dim))


def summarize(chain: Chain, blocks: int = DEFAULT_BLOCKS, names=None) -> ChainSummary:
    """Posterior mean, standard deviation, statistical error and 2*tau (with
    jackknife error, tau recomputed per leave-one-block-out subseries) for
    every chain component."""
    if len(chain) == 0:
        raise ValueError("empty chain")
    out: dict[str, ParamSummary] = {}
    for i, name in enumerate(_component_names(chain.dim, names)):
        xs = chain.draws[:, i]
        mean = float(xs.mean())
        std = float(xs.std())
        try:
            tau, tau_err = jackknife_error(xs, "tau", blocks)
        except DegenerateSeriesError:
            out[name] = ParamSummary(mean=mean, std=std, degenerate=True)
            continue
        out[name] = ParamSummary(
            mean=mean,
            std=std,
            stat_error=std * math.sqrt(2.0 * tau / xs.size),
            two_tau=2.0 * tau,
            two_tau_error=2.0 * tau_err,
        )
    return ChainSummary(out)
