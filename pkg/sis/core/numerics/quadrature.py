"""
Double-exponential quadrature on finite and semi-infinite ranges.

Both rules start from a step of 1/2 and halve it each level, evaluating only
the new odd nodes, until consecutive estimates agree to the requested
relative tolerance.
"""
from __future__ import annotations

import math
from typing import Callable
from typing import NamedTuple

import numpy as np
from numpy import ndarray

from sis.core.exception.exception import DomainException

''' Truncation of the tanh-sinh variable on a finite interval '''
TANH_SINH_TMAX = 3.15

''' Truncation of the exp-sinh variable on a half line '''
EXP_SINH_TMAX = 4.5

''' Step of the first level '''
INITIAL_STEP = 0.5

''' Refinement caps '''
MAX_LEVELS = 8
MIN_LEVELS = 3


class QuadResult(NamedTuple):
    value: float
    abs_err_estimate: float
    evaluations: int
    converged: bool


Integrand = Callable[[ndarray], ndarray]
Transform = Callable[[ndarray], tuple[ndarray, ndarray]]


def _tanh_sinh_01(t: ndarray) -> tuple[ndarray, ndarray]:
    s = math.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-s))
    one_minus_x = 1.0 / (1.0 + np.exp(s))
    w = math.pi * np.cosh(t) * x * one_minus_x
    keep = (x > 0.0) & (one_minus_x > 0.0) & (x < 1.0)
    return x[keep], w[keep]


def _exp_sinh(lower: float) -> Transform:
    def transform(t: ndarray) -> tuple[ndarray, ndarray]:
        e = np.exp(0.5 * math.pi * np.sinh(t))
        w = 0.5 * math.pi * np.cosh(t) * e
        keep = np.isfinite(e) & (e > 0.0)
        return lower + e[keep], w[keep]
    return transform


def _level_sum(f: Integrand, transform: Transform, t: ndarray) -> tuple[float, int]:
    x, w = transform(t)
    if x.size == 0:
        return 0.0, 0
    values = np.asarray(f(x), dtype=float)
    return float(np.sum(w * values)), int(x.size)


def _refine(f: Integrand, transform: Transform, tmax: float, tol: float) -> QuadResult:
    if tol <= 0:
        raise DomainException(f'\nError: Quadrature tolerance must be > 0, got {tol}.')
    h = INITIAL_STEP
    k = math.floor(tmax / h)
    total, evaluations = _level_sum(f, transform, h * np.arange(-k, k + 1))
    estimate = h * total
    delta = math.inf
    converged = False
    for level in range(1, MAX_LEVELS):
        h *= 0.5
        k = math.floor((tmax / h - 1) / 2)
        odd = h * (2 * np.arange(-k - 1, k + 1) + 1)
        added, count = _level_sum(f, transform, odd)
        total += added
        evaluations += count
        refined = h * total
        delta = abs(refined - estimate)
        estimate = refined
        if level + 1 >= MIN_LEVELS and delta <= tol * max(1.0, abs(estimate)):
            converged = True
            break
    if not math.isfinite(estimate):
        converged = False
    return QuadResult(estimate, delta, evaluations, converged)


def quad_01(f: Integrand, tol: float = 1e-10) -> QuadResult:
    """
    Tanh-sinh rule on [0, 1]. Integrable endpoint singularities are allowed;
    nodes that round onto an endpoint are dropped.

    :param f: Vectorized integrand
    :type f: Callable[[ndarray], ndarray]
    :param tol: Relative tolerance between successive levels
    :type tol: float
    :return: Estimate with convergence flag
    :rtype: QuadResult
    """
    return _refine(f, _tanh_sinh_01, TANH_SINH_TMAX, tol)


def quad_interval(f: Integrand, a: float, b: float, tol: float = 1e-10) -> QuadResult:
    """
    Tanh-sinh rule on [a, b].

    :param f: Vectorized integrand
    :type f: Callable[[ndarray], ndarray]
    :param a: Lower limit
    :type a: float
    :param b: Upper limit, b > a
    :type b: float
    :param tol: Relative tolerance between successive levels
    :type tol: float
    :return: Estimate with convergence flag
    :rtype: QuadResult
    """
    if not b > a:
        raise DomainException(f'\nError: Interval needs b > a, got [{a}, {b}].')
    width = b - a
    result = quad_01(lambda x: f(a + width * x), tol)
    return result._replace(
        value=width * result.value,
        abs_err_estimate=width * result.abs_err_estimate
    )


def quad_semiinf(f: Integrand, tol: float = 1e-10, lower: float = 0.0) -> QuadResult:
    """
    Exp-sinh rule on [lower, inf) for integrands with a decaying tail.

    :param f: Vectorized integrand
    :type f: Callable[[ndarray], ndarray]
    :param tol: Relative tolerance between successive levels
    :type tol: float
    :param lower: Left end of the half line
    :type lower: float
    :return: Estimate with convergence flag
    :rtype: QuadResult
    """
    return _refine(f, _exp_sinh(lower), EXP_SINH_TMAX, tol)
