"""Markov chain drivers.

Three layers:

* single transitions: ``metropolis_step`` (random-walk, uniform offsets) and
  ``mh_independence_step`` (candidate from a fixed proposal density);
* chain drivers over a generic log-target callable, used directly in tests
  with analytically tractable targets;
* GARCH front ends (``run_metropolis``, ``run_adaptive``,
  ``tune_step_widths``) that bind a return series to the log posterior.

The adaptive driver alternates sampling and refitting: a Metropolis pilot
seeds a moment pool, a Student-t proposal is fitted to the pool, and after
every full window of independence-MH draws the proposal is refitted to the
pool extended with the new draws (rejected steps contribute the repeated
value). Adaptation never stops; the refresh schedule is fixed.

A single chain is strictly sequential. Distinct chains with distinct seeds
share no mutable state and may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidParamsError, NuRangeError
from .model import log_posterior_fn, validate_returns
from .proposal import MomentAccumulator, proposal_from_moments

LogTarget = Callable[[np.ndarray], float]

#: window width (in draws) used for acceptance traces of plain Metropolis runs
METROPOLIS_TRACE_WINDOW = 1000


@dataclass(frozen=True)
class MetropolisConfig:
    """Random-walk step widths, one per coordinate, plus the tuning floor on
    the acceptance rate."""

    step_widths: tuple[float, ...]
    accept_floor: float = 0.5

    def __post_init__(self):
        if len(self.step_widths) == 0 or any(d <= 0 for d in self.step_widths):
            raise InvalidParamsError(f"step widths must be positive, got {self.step_widths}")
        if not 0.0 < self.accept_floor < 1.0:
            raise InvalidParamsError(f"accept floor must be in (0, 1), got {self.accept_floor}")

    def widths(self) -> np.ndarray:
        return np.asarray(self.step_widths, dtype=float)


@dataclass(frozen=True)
class AdaptiveConfig:
    """Schedule of the adaptive run: Metropolis burn-in and pilot, then
    independence MH with a proposal refit every ``refresh_interval`` draws
    until ``analysis_draws`` have been recorded."""

    burn_in: int = 3000
    pilot: int = 1000
    refresh_interval: int = 1000
    analysis_draws: int = 199000
    nu: float = 10.0
    seed: int = 0

    def __post_init__(self):
        for name in ("burn_in", "pilot", "refresh_interval", "analysis_draws"):
            if getattr(self, name) < 1:
                raise InvalidParamsError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.nu > 2:
            raise NuRangeError(f"need nu > 2, got {self.nu}")


@dataclass(frozen=True)
class ChainState:
    """Current chain position with its cached log posterior."""

    theta: np.ndarray
    log_post: float


@dataclass
class Chain:
    """Recorded draws with per-step accept flags and schedule bookkeeping.

    ``phase_marks`` holds the draw counts at which the proposal was refitted;
    ``acceptance_trace`` has one acceptance fraction per window of ``window``
    flags (a trailing partial window contributes a final entry). For adaptive
    runs ``final_mean``/``final_cov`` echo the moment pool after the last
    refresh, i.e. the converged fit.
    """

    draws: np.ndarray
    accept_flags: np.ndarray
    phase_marks: list[int] = field(default_factory=list)
    acceptance_trace: list[float] = field(default_factory=list)
    window: int = METROPOLIS_TRACE_WINDOW
    final_mean: np.ndarray | None = None
    final_cov: np.ndarray | None = None

    def __len__(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]

    @property
    def acceptance_rate(self) -> float:
        if len(self) == 0:
            return math.nan
        return float(self.accept_flags.mean())


def metropolis_step(
    state: ChainState, cfg: MetropolisConfig, log_target: LogTarget, rng: np.random.Generator
) -> tuple[ChainState, bool]:
    """One random-walk update: add d_i*(r_i - 0.5) per coordinate with r_i
    uniform, accept with probability min(1, target ratio), keep the previous
    value on rejection."""
    widths = cfg.widths()
    cand = state.theta + widths * (rng.random(widths.size) - 0.5)
    cand_lp = log_target(cand)
    u = rng.random()
    log_ratio = cand_lp - state.log_post
    if log_ratio >= 0.0 or u < math.exp(log_ratio):
        return ChainState(cand, cand_lp), True
    return state, False


def mh_independence_step(
    state: ChainState, proposal, log_target: LogTarget, rng: np.random.Generator
) -> tuple[ChainState, bool]:
    """One independence update: candidate drawn from ``proposal`` regardless
    of the current state, accepted with probability
    min(1, target ratio * reverse/forward proposal density ratio)."""
    cand = proposal.sample(rng)
    cand_lp = log_target(cand)
    u = rng.random()
    if cand_lp == -math.inf:
        return state, False
    log_ratio = (cand_lp - state.log_post) + (
        proposal.log_density(state.theta) - proposal.log_density(cand)
    )
    if log_ratio >= 0.0 or u < math.exp(log_ratio):
        return ChainState(cand, cand_lp), True
    return state, False


def _require_supported_start(start: np.ndarray, log_target: LogTarget) -> ChainState:
    start = np.asarray(start, dtype=float)
    lp = log_target(start)
    if not math.isfinite(lp):
        raise InvalidParamsError(f"chain start {start} has zero posterior density")
    return ChainState(start, lp)


def _windowed_trace(flags: np.ndarray, window: int) -> list[float]:
    return [
        float(flags[lo : lo + window].mean())
        for lo in range(0, flags.size, window)
    ]


def run_metropolis_target(
    log_target: LogTarget,
    start,
    cfg: MetropolisConfig,
    burn_in: int,
    draws: int,
    rng: np.random.Generator,
) -> Chain:
    """Random-walk Metropolis over a generic target: discard ``burn_in``
    steps, then record ``draws`` states with fixed step widths."""
    if burn_in < 0 or draws < 0:
        raise InvalidParamsError("burn_in and draws must be >= 0")
    state = _require_supported_start(start, log_target)
    for _ in range(burn_in):
        state, _ = metropolis_step(state, cfg, log_target, rng)
    out = np.empty((draws, state.theta.size))
    flags = np.zeros(draws, dtype=bool)
    for i in range(draws):
        state, accepted = metropolis_step(state, cfg, log_target, rng)
        out[i] = state.theta
        flags[i] = accepted
    return Chain(
        draws=out,
        accept_flags=flags,
        acceptance_trace=_windowed_trace(flags, METROPOLIS_TRACE_WINDOW),
        window=METROPOLIS_TRACE_WINDOW,
    )


def run_adaptive_target(
    log_target: LogTarget,
    start,
    acfg: AdaptiveConfig,
    mcfg: MetropolisConfig,
) -> Chain:
    """Adaptive independence-MH over a generic target.

    Schedule: ``burn_in`` Metropolis steps are discarded; ``pilot`` Metropolis
    draws seed the moment pool; a Student-t proposal is fitted; then windows
    of ``refresh_interval`` independence-MH draws are recorded, every draw is
    absorbed into the pool, and the proposal is refitted after each full
    window, until ``analysis_draws`` draws are recorded. A trailing partial
    window is sampled without a subsequent refit.
    """
    rng = np.random.default_rng(acfg.seed)
    state = _require_supported_start(start, log_target)
    dim = state.theta.size

    for _ in range(acfg.burn_in):
        state, _ = metropolis_step(state, mcfg, log_target, rng)

    pool = MomentAccumulator(dim)
    for _ in range(acfg.pilot):
        state, _ = metropolis_step(state, mcfg, log_target, rng)
        pool.add(state.theta)

    proposal = proposal_from_moments(pool.mean, pool.covariance, acfg.nu)

    total = acfg.analysis_draws
    out = np.empty((total, dim))
    flags = np.zeros(total, dtype=bool)
    trace: list[float] = []
    marks: list[int] = []
    done = 0
    while done < total:
        window = min(acfg.refresh_interval, total - done)
        accepted_in_window = 0
        for _ in range(window):
            state, accepted = mh_independence_step(state, proposal, log_target, rng)
            out[done] = state.theta
            flags[done] = accepted
            pool.add(state.theta)
            accepted_in_window += accepted
            done += 1
        trace.append(accepted_in_window / window)
        if window == acfg.refresh_interval:
            proposal = proposal_from_moments(pool.mean, pool.covariance, acfg.nu)
            marks.append(done)

    return Chain(
        draws=out,
        accept_flags=flags,
        phase_marks=marks,
        acceptance_trace=trace,
        window=acfg.refresh_interval,
        final_mean=pool.mean,
        final_cov=pool.covariance,
    )


def default_start(y) -> np.ndarray:
    """Moment-consistent interior start (alpha, beta, omega): persistence is
    set near its typical posterior location and omega matches the sample
    variance through the stationarity relation."""
    alpha, beta = 0.05, 0.90
    return np.array([alpha, beta, (1.0 - alpha - beta) * float(np.var(y))])


def run_metropolis(y, mcfg: MetropolisConfig, burn_in: int, draws: int, seed) -> Chain:
    """Random-walk Metropolis on the GARCH posterior of ``y``."""
    y = validate_returns(y)
    rng = np.random.default_rng(seed)
    return run_metropolis_target(
        log_posterior_fn(y), default_start(y), mcfg, burn_in, draws, rng
    )


def run_adaptive(y, acfg: AdaptiveConfig, mcfg: MetropolisConfig) -> Chain:
    """Adaptive independence-MH fit of the GARCH posterior of ``y``."""
    y = validate_returns(y)
    return run_adaptive_target(log_posterior_fn(y), default_start(y), acfg, mcfg)


class TuneResult(NamedTuple):
    config: MetropolisConfig
    converged: bool
    acceptance: float


def tune_step_widths(
    y,
    initial: MetropolisConfig,
    seed,
    *,
    pilot_steps: int = 500,
    max_rounds: int = 20,
) -> TuneResult:
    """Scale Metropolis step widths until the measured acceptance rate sits
    in [accept_floor, 0.9].

    Runs short pilot chains, halving all widths when acceptance falls below
    the floor and doubling them when it exceeds 0.9. Returns the best
    configuration seen (converged=False) if the band is not reached within
    ``max_rounds``.
    """
    if pilot_steps < 1 or max_rounds < 1:
        raise InvalidParamsError("pilot_steps and max_rounds must be >= 1")
    y = validate_returns(y)
    log_target = log_posterior_fn(y)
    rng = np.random.default_rng(seed)
    state = _require_supported_start(default_start(y), log_target)

    # move off the start point before the first measurement, so a cold start
    # does not depress the measured acceptance
    for _ in range(pilot_steps // 2):
        state, _ = metropolis_step(state, initial, log_target, rng)

    lo, hi = initial.accept_floor, 0.9
    widths = initial.widths()
    best: TuneResult | None = None
    best_dist = math.inf
    for _ in range(max_rounds):
        cfg = MetropolisConfig(tuple(float(w) for w in widths), initial.accept_floor)
        accepted = 0
        for _ in range(pilot_steps):
            state, ok = metropolis_step(state, cfg, log_target, rng)
            accepted += ok
        rate = accepted / pilot_steps
        if lo <= rate <= hi:
            return TuneResult(cfg, True, rate)
        dist = (lo - rate) if rate < lo else (rate - hi)
        if dist < best_dist:
            best, best_dist = TuneResult(cfg, False, rate), dist
        widths = widths / 2.0 if rate < lo else widths * 2.0
    return best
