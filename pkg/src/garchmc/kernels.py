"""Compiled inner loops for the volatility recursion.

These are the only hot paths in the package: a posterior fit evaluates the
recursion a few hundred thousand times on a ~2000-point series.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def volatility_recursion(ysq, alpha, beta, omega, s1):
    """Conditional variances s_t = omega + alpha*y_{t-1}^2 + beta*s_{t-1}, s_1 = s1."""
    n = ysq.shape[0]
    s = np.empty(n)
    s[0] = s1
    for t in range(1, n):
        s[t] = omega + alpha * ysq[t - 1] + beta * s[t - 1]
    return s


@njit(cache=True)
def gaussian_loglik(ysq, alpha, beta, omega, s1):
    """Sum of centered-normal log densities along the recursion, single pass."""
    n = ysq.shape[0]
    s = s1
    acc = 0.0
    for t in range(n):
        if t > 0:
            s = omega + alpha * ysq[t - 1] + beta * s
        acc += math.log(2.0 * math.pi * s) + ysq[t] / s
    return -0.5 * acc
