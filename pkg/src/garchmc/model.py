"""GARCH(1,1) model core: constraints, volatility recursion, likelihood,
flat-prior posterior, and synthetic data generation.

Returns follow y_t = sigma_t * eps_t with eps_t iid standard normal and

    sigma_t^2 = omega + alpha * y_{t-1}^2 + beta * sigma_{t-1}^2,

where omega, alpha, beta > 0 and alpha + beta < 1 (stationarity). Parameter
vectors are ordered (alpha, beta, omega) throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, InvalidParamsError
from .kernels import gaussian_loglik, volatility_recursion

PARAM_NAMES = ("alpha", "beta", "omega")

#: steps discarded before recording simulated returns, so the recorded
#: segment does not remember the deterministic variance start
SIM_WARMUP = 1000


@dataclass(frozen=True)
class GarchParams:
    """Parameter triple: omega is the variance offset, alpha weights the
    previous squared return, beta the previous variance."""

    omega: float
    alpha: float
    beta: float

    def is_valid(self) -> bool:
        """True exactly when all parameters are finite and positive and
        alpha + beta < 1."""
        o, a, b = self.omega, self.alpha, self.beta
        return (
            math.isfinite(o)
            and math.isfinite(a)
            and math.isfinite(b)
            and o > 0.0
            and a > 0.0
            and b > 0.0
            and a + b < 1.0
        )

    def to_vector(self) -> np.ndarray:
        """(alpha, beta, omega) array, the sampling-space ordering."""
        return np.array([self.alpha, self.beta, self.omega])

    @classmethod
    def from_vector(cls, theta) -> "GarchParams":
        """Build from an (alpha, beta, omega) vector."""
        return cls(omega=float(theta[2]), alpha=float(theta[0]), beta=float(theta[1]))


def _require_valid(params: GarchParams) -> None:
    if not params.is_valid():
        raise InvalidParamsError(
            f"require omega, alpha, beta > 0 and alpha + beta < 1, got {params}"
        )


def validate_returns(values) -> np.ndarray:
    """Ingestion gate for observed return series.

    Rejects (rather than silently cleans) series that are too short, contain
    non-finite entries, or are identically zero, since any of those make the
    likelihood degenerate.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise DataError(f"expected a 1-d series, got shape {y.shape}")
    if y.size < 2:
        raise DataError(f"need at least 2 observations, got {y.size}")
    bad = np.flatnonzero(~np.isfinite(y))
    if bad.size:
        raise DataError(f"non-finite return at position {bad[0]}")
    if not np.any(y != 0.0):
        raise DataError("all-zero return series")
    return y


def unconditional_variance(params: GarchParams) -> float:
    """Stationary variance omega / (1 - alpha - beta); also the recursion start."""
    _require_valid(params)
    return params.omega / (1.0 - params.alpha - params.beta)


def volatility_filter(params: GarchParams, y) -> np.ndarray:
    """Conditional variance series implied by ``y`` under ``params``.

    The first variance is set to the stationary value; every later one
    follows the recursion. Output is strictly positive.
    """
    _require_valid(params)
    y = np.ascontiguousarray(y, dtype=float)
    if y.size == 0:
        raise DataError("empty return series")
    s1 = params.omega / (1.0 - params.alpha - params.beta)
    return volatility_recursion(y * y, params.alpha, params.beta, params.omega, s1)


def log_likelihood(params: GarchParams, y) -> float:
    """Gaussian log likelihood sum_t [-0.5*log(2*pi*s_t) - y_t^2/(2*s_t)]
    with s_t from the volatility filter."""
    _require_valid(params)
    y = np.ascontiguousarray(y, dtype=float)
    if y.size == 0:
        raise DataError("empty return series")
    s1 = params.omega / (1.0 - params.alpha - params.beta)
    return gaussian_loglik(y * y, params.alpha, params.beta, params.omega, s1)


def log_posterior(params: GarchParams, y) -> float:
    """Flat-prior log posterior: the log likelihood on the constraint region
    and -inf outside it (a sentinel that guarantees rejection in MCMC).

    The posterior normalization constant is irrelevant to MCMC and omitted.
    """
    if not params.is_valid():
        return -math.inf
    ll = log_likelihood(params, y)
    # guard against float pathologies at extreme corners of the region
    return ll if not math.isnan(ll) else -math.inf


def log_posterior_fn(y):
    """Bind a return series into a fast log-posterior callable over
    (alpha, beta, omega) vectors, for use as a sampler target."""
    y = np.ascontiguousarray(y, dtype=float)
    if y.size == 0:
        raise DataError("empty return series")
    ysq = y * y

    def logp(theta) -> float:
        a = theta[0]
        b = theta[1]
        o = theta[2]
        # comparisons are False for nan, so invalid candidates fall through
        if not (o > 0.0 and a > 0.0 and b > 0.0 and a + b < 1.0):
            return -math.inf
        ll = gaussian_loglik(ysq, a, b, o, o / (1.0 - a - b))
        return ll if not math.isnan(ll) else -math.inf

    return logp


def simulate(params: GarchParams, n: int, seed, warmup: int = SIM_WARMUP) -> np.ndarray:
    """Generate ``n`` returns from the model, deterministically for a fixed seed.

    Runs the recursion for ``n + warmup`` steps starting at the stationary
    variance and returns the last ``n`` values.
    """
    _require_valid(params)
    if n < 1:
        raise DataError(f"need n >= 1, got {n}")
    if warmup < 0:
        raise DataError(f"need warmup >= 0, got {warmup}")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(n + warmup)
    y = np.empty(n + warmup)
    s = params.omega / (1.0 - params.alpha - params.beta)
    for t in range(n + warmup):
        if t > 0:
            s = params.omega + params.alpha * y[t - 1] ** 2 + params.beta * s
        y[t] = math.sqrt(s) * eps[t]
    return y[warmup:]
