"""Bayesian GARCH(1,1) inference by MCMC.

The package fits the three GARCH(1,1) parameters under a flat prior with two
samplers: a random-walk Metropolis baseline, and an independence
Metropolis-Hastings sampler whose multivariate Student-t proposal is
periodically refitted to the running moments of the chain itself. The
adaptive sampler cuts the chain autocorrelation time by orders of magnitude
on typical volatility data. Diagnostics (autocorrelation time, jackknife
errors) quantify the comparison.
"""

from .diagnostics import (
    AcfSeries,
    ChainSummary,
    ParamSummary,
    acf,
    autocorrelation_time,
    integrated_autocorrelation_time,
    jackknife_error,
    summarize,
)
from .model import (
    PARAM_NAMES,
    GarchParams,
    log_likelihood,
    log_posterior,
    log_posterior_fn,
    simulate,
    unconditional_variance,
    validate_returns,
    volatility_filter,
)
from .proposal import MomentAccumulator, StudentTProposal, proposal_from_moments
from .report import (
    FitReport,
    parse_report,
    read_chain_csv,
    read_returns,
    serialize_report,
    write_chain_csv,
    write_returns,
)
from .samplers import (
    AdaptiveConfig,
    Chain,
    ChainState,
    MetropolisConfig,
    TuneResult,
    default_start,
    metropolis_step,
    mh_independence_step,
    run_adaptive,
    run_adaptive_target,
    run_metropolis,
    run_metropolis_target,
    tune_step_widths,
)

__version__ = "0.1.0"

__all__ = [
    "AcfSeries",
    "AdaptiveConfig",
    "Chain",
    "ChainState",
    "ChainSummary",
    "FitReport",
    "GarchParams",
    "MetropolisConfig",
    "MomentAccumulator",
    "PARAM_NAMES",
    "ParamSummary",
    "StudentTProposal",
    "TuneResult",
    "acf",
    "autocorrelation_time",
    "default_start",
    "integrated_autocorrelation_time",
    "jackknife_error",
    "log_likelihood",
    "log_posterior",
    "log_posterior_fn",
    "metropolis_step",
    "mh_independence_step",
    "parse_report",
    "proposal_from_moments",
    "read_chain_csv",
    "read_returns",
    "run_adaptive",
    "run_adaptive_target",
    "run_metropolis",
    "run_metropolis_target",
    "serialize_report",
    "simulate",
    "summarize",
    "tune_step_widths",
    "unconditional_variance",
    "validate_returns",
    "volatility_filter",
    "write_chain_csv",
    "write_returns",
    "__version__",
]
