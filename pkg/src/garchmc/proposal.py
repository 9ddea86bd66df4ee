"""Multivariate Student-t proposal density and running chain moments.

A proposal with scale matrix Sigma and nu > 2 degrees of freedom has draw
covariance nu * Sigma / (nu - 2). Fitting the proposal to a chain therefore
sets Sigma = (nu - 2) / nu * V, where V is the sample second central moment
of the draws absorbed so far.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, FactorizationError, NuRangeError

#: diagonal jitter, relative to the largest scale-matrix diagonal, added when
#: a degenerate moment pool makes the scale matrix non positive definite
JITTER_REL = 1e-10


class MomentAccumulator:
    """Streaming sample mean and central second-moment matrix.

    Single pass, O(1) per draw, population divisor (divide by count). Repeated
    values (rejected moves in a chain) are absorbed as separate draws.
    """

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.count = 0
        self._mean = np.zeros(self.dim)
        self._m2 = np.zeros((self.dim, self.dim))

    def add(self, draw) -> None:
        """Absorb one draw."""
        draw = np.asarray(draw, dtype=float)
        if draw.shape != (self.dim,):
            raise DimensionError(
                f"expected a length-{self.dim} vector, got shape {draw.shape}"
            )
        self.count += 1
        delta = draw - self._mean
        self._mean += delta / self.count
        # symmetric rank-1 update; equal to Welford's delta*delta2 form
        self._m2 += np.outer(delta, delta) * ((self.count - 1) / self.count)

    @property
    def mean(self) -> np.ndarray:
        if self.count == 0:
            raise ValueError("no draws absorbed yet")
        return self._mean.copy()

    @property
    def covariance(self) -> np.ndarray:
        """Central second-moment matrix of all absorbed draws."""
        if self.count == 0:
            raise ValueError("no draws absorbed yet")
        return self._m2 / self.count


class StudentTProposal:
    """Multivariate Student-t density; immutable after construction.

    The scale matrix is factorized once here and the factor, inverse and log
    determinant are reused by every density evaluation and draw, since a
    proposal is evaluated thousands of times between refreshes.
    """

    def __init__(self, mean, sigma, nu: float):
        if not nu > 0:
            raise NuRangeError(f"need nu > 0, got {nu}")
        mean = np.array(mean, dtype=float, copy=True).reshape(-1)
        sigma = np.array(sigma, dtype=float, copy=True)
        p = mean.size
        if sigma.shape != (p, p):
            raise DimensionError(
                f"scale matrix shape {sigma.shape} does not match dimension {p}"
            )
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError("scale matrix is not positive definite") from exc
        self.mean = mean
        self.sigma = sigma
        self.nu = float(nu)
        self.dim = p
        self._chol = chol
        self._sigma_inv = np.linalg.inv(sigma)
        log_det = 2.0 * np.log(np.diag(chol)).sum()
        self._log_norm = (
            math.lgamma(0.5 * (self.nu + p))
            - math.lgamma(0.5 * self.nu)
            - 0.5 * log_det
            - 0.5 * p * math.log(self.nu * math.pi)
        )

    def log_density(self, theta) -> float:
        """Log density at ``theta``; maximal at the location vector."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise DimensionError(
                f"expected a length-{self.dim} vector, got shape {theta.shape}"
            )
        d = theta - self.mean
        q = float(d @ self._sigma_inv @ d)
        return self._log_norm - 0.5 * (self.nu + self.dim) * math.log1p(q / self.nu)

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw from the density: location + L z sqrt(nu / w) with L the
        Cholesky factor, z standard normal and w chi-square(nu).

        Returns one vector, or a (size, dim) array when ``size`` is given.
        """
        if size is None:
            z = rng.standard_normal(self.dim)
            w = rng.chisquare(self.nu)
            return self.mean + (self._chol @ z) * math.sqrt(self.nu / w)
        z = rng.standard_normal((size, self.dim))
        w = rng.chisquare(self.nu, size)
        return self.mean + (z @ self._chol.T) * np.sqrt(self.nu / w)[:, None]


def proposal_from_moments(mean, v, nu: float) -> StudentTProposal:
    """Fit a proposal whose draw covariance matches the moment matrix ``v``.

    Requires nu > 2, where the covariance relation is well defined. When ``v``
    is singular (a degenerate pilot pool), an escalating diagonal jitter keeps
    the construction alive; the adaptive scheme only needs rough moments.
    """
    if not nu > 2:
        raise NuRangeError(f"need nu > 2 for a moment-matched proposal, got {nu}")
    v = np.asarray(v, dtype=float)
    mean = np.asarray(mean, dtype=float).reshape(-1)
    p = mean.size
    if v.shape != (p, p):
        raise DimensionError(f"moment matrix shape {v.shape} does not match dimension {p}")
    if np.any(np.diag(v) < 0):
        raise ValueError("moment matrix has a negative diagonal entry")
    sigma = ((nu - 2.0) / nu) * 0.5 * (v + v.T)
    largest = float(np.diag(sigma).max())
    eps = JITTER_REL * (largest if largest > 0 else 1.0)
    last_exc = None
    for jitter in (0.0, eps, 10 * eps, 100 * eps, 1000 * eps):
        try:
            return StudentTProposal(mean, sigma + jitter * np.eye(p), nu)
        except FactorizationError as exc:
            last_exc = exc
    raise FactorizationError(
        f"scale matrix not positive definite after jitter up to {1000 * eps:g}"
    ) from last_exc
