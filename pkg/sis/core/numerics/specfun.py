"""
Scalar and vectorized special functions used by every closed form: log-Gamma,
the confluent hypergeometric function, modified Bessel functions, the
Whittaker function and the q-series family.
"""
from __future__ import annotations

import logging
import math
from typing import Any

import mpmath
import numpy as np
from numpy import ndarray
from scipy import special

from sis.core.exception.exception import DivergenceException
from sis.core.exception.exception import DomainException

logger = logging.getLogger(__name__)

''' Distance from an integer below which a Bessel order counts as integer '''
INTEGER_ORDER_TOL = 1e-6

''' Order offset used when an integer Bessel order is evaluated '''
INTEGER_ORDER_SHIFT = 1e-5

''' Largest argument for which K is taken from the I-combination '''
K_COMBINATION_XMAX = 2.0

''' Arguments above which ln K comes from its large-x expansion '''
K_ASYMPTOTIC_XMIN = 1e8

''' A series term below this multiple of the partial sum is negligible '''
SERIES_EPS = 1e-16

''' Consecutive negligible terms required before a series stops '''
SERIES_QUIET_TERMS = 3

''' Term cap for power series '''
SERIES_MAX_TERMS = 1_000_000

''' Infinite q-products stop once |p|q^j drops below this '''
QPOCH_INF_EPS = 1e-17


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def ln_gamma(x: float) -> tuple[float, float]:
    """
    Natural log of |Gamma(x)| together with the sign of Gamma(x).

    :param x: Argument, not a non-positive integer
    :type x: float
    :return: (log|Gamma(x)|, sign of Gamma(x))
    :rtype: tuple[float, float]
    """
    if _is_nonpositive_integer(x):
        raise DomainException(f'\nError: Gamma has a pole at x = {x}.')
    return float(special.gammaln(x)), float(special.gammasgn(x))


def ln_pochhammer(b: float, n: int) -> tuple[float, float]:
    """
    Log-modulus and sign of the rising factorial (b)_n = Gamma(b+n)/Gamma(b).

    Falls back to the finite product whenever b is a non-positive integer, in
    which case the value is exactly zero once n > -b.

    :param b: Base of the rising factorial
    :type b: float
    :param n: Number of factors
    :type n: int
    :return: (log|(b)_n|, sign), the log is -inf for a vanishing product
    :rtype: tuple[float, float]
    """
    if n < 0:
        raise DomainException(f'\nError: Rising factorial needs n >= 0, got {n}.')
    if n == 0:
        return 0.0, 1.0
    if _is_nonpositive_integer(b):
        factors = b + np.arange(n, dtype=float)
        if np.any(factors == 0):
            return -math.inf, 0.0
        return (
            float(np.sum(np.log(np.abs(factors)))),
            float(np.prod(np.sign(factors)))
        )
    top, top_sign = ln_gamma(b + n)
    bottom, bottom_sign = ln_gamma(b)
    return top - bottom, top_sign * bottom_sign


def confluent_1f1(a: float, b: float, x: complex) -> Any:
    """
    Kummer's confluent hypergeometric function 1F1(a; b; x).

    :param a: Numerator parameter
    :type a: float
    :param b: Denominator parameter, not a non-positive integer
    :type b: float
    :param x: Argument, x >= 0 when real
    :type x: complex
    :return: 1F1(a; b; x), real for real x
    :rtype: float | complex
    """
    if _is_nonpositive_integer(b):
        raise DomainException(
            f'\nError: 1F1 is undefined for non-positive integer b = {b}.'
        )
    if isinstance(x, complex):
        return complex(mpmath.hyp1f1(a, b, x))
    if x < 0:
        raise DomainException(f'\nError: 1F1 is evaluated for x >= 0, got {x}.')
    value = float(special.hyp1f1(a, b, x))
    if not math.isfinite(value):
        value = float(mpmath.hyp1f1(a, b, x))
    if not math.isfinite(value):
        raise DivergenceException(
            f'\nError: 1F1({a}; {b}; {x}) did not converge to a finite value.'
        )
    return value


def bessel_i(nu: float, x: Any) -> Any:
    """
    Modified Bessel function of the first kind I_nu(x).

    :param nu: Order, nu >= 0
    :type nu: float
    :param x: Argument, real x >= 0 or complex
    :type x: float | ndarray | complex
    :return: I_nu(x)
    :rtype: float | ndarray | complex
    """
    if nu < 0:
        raise DomainException(f'\nError: I_nu is evaluated for nu >= 0, got {nu}.')
    if not np.iscomplexobj(x) and np.any(np.asarray(x) < 0):
        raise DomainException('\nError: I_nu is evaluated for x >= 0.')
    value = special.iv(nu, x)
    return value if np.ndim(value) else value.item()


def _k_combination(nu: float, x: ndarray) -> ndarray:
    # pi (I_-nu - I_nu) / (2 sin(pi nu)) cancels catastrophically past x ~ 2
    values = np.empty_like(x)
    small = x <= K_COMBINATION_XMAX
    xs = x[small]
    values[small] = (
        math.pi * (special.iv(-nu, xs) - special.iv(nu, xs))
        / (2.0 * math.sin(math.pi * nu))
    )
    values[~small] = special.kv(nu, x[~small])
    return values


def _ln_k_asymptotic(nu: float, x: ndarray) -> ndarray:
    mu = 4.0 * nu * nu
    u = 1.0 / (8.0 * x)
    series = (
        (mu - 1.0) * u
        + (mu - 1.0) * (mu - 9.0) * u ** 2 / 2.0
        + (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * u ** 3 / 6.0
    )
    return 0.5 * np.log(math.pi / (2.0 * x)) - x + np.log1p(series)


def _ln_k_combination(nu: float, x: ndarray) -> ndarray:
    values = np.empty_like(x)
    small = x <= K_COMBINATION_XMAX
    values[small] = np.log(_k_combination(nu, x[small]))
    # kve returns nan well before its exponent overflows
    far = x > K_ASYMPTOTIC_XMIN
    middle = ~small & ~far
    values[middle] = np.log(special.kve(nu, x[middle])) - x[middle]
    values[far] = _ln_k_asymptotic(nu, x[far])
    return values


def _k_dispatch(nu: float, x: Any, allow_integer: bool, func: Any) -> Any:
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise DomainException('\nError: K_nu is evaluated for x > 0.')
    flat = np.atleast_1d(xs).ravel()
    if abs(nu - round(nu)) <= INTEGER_ORDER_TOL:
        if not allow_integer:
            raise DomainException(
                f'\nError: K_nu from the I-combination needs a non-integer'
                f' order (nu not in Z), got nu = {nu}.'
            )
        logger.warning(
            'Integer Bessel order %s evaluated as the mean of nu -/+ %s',
            nu, INTEGER_ORDER_SHIFT
        )
        values = 0.5 * (
            func(round(nu) - INTEGER_ORDER_SHIFT, flat)
            + func(round(nu) + INTEGER_ORDER_SHIFT, flat)
        )
    else:
        values = func(nu, flat)
    values = values.reshape(xs.shape)
    return values if values.ndim else float(values)


def bessel_k(nu: float, x: Any, allow_integer: bool = False) -> Any:
    """
    Modified Bessel function of the second kind K_nu(x).

    :param nu: Non-integer order (see allow_integer)
    :type nu: float
    :param x: Argument, x > 0
    :type x: float | ndarray
    :param allow_integer: Evaluate an integer order by perturbing it
    :type allow_integer: bool
    :return: K_nu(x)
    :rtype: float | ndarray
    """
    return _k_dispatch(nu, x, allow_integer, _k_combination)


def ln_bessel_k(nu: float, x: Any, allow_integer: bool = False) -> Any:
    """
    Natural log of K_nu(x), free of underflow at large x.

    :param nu: Non-integer order (see allow_integer)
    :type nu: float
    :param x: Argument, x > 0
    :type x: float | ndarray
    :param allow_integer: Evaluate an integer order by perturbing it
    :type allow_integer: bool
    :return: log K_nu(x)
    :rtype: float | ndarray
    """
    if abs(nu - round(nu)) <= INTEGER_ORDER_TOL and allow_integer:
        return np.log(bessel_k(nu, x, allow_integer=True))
    return _k_dispatch(nu, x, allow_integer, _ln_k_combination)


def _check_whittaker(sigma: float, mu: float, x: Any) -> None:
    if sigma >= 2:
        raise DomainException(
            f'\nError: Whittaker W is used for sigma < 2, got {sigma}.'
        )
    if _is_nonpositive_integer(mu - sigma + 0.5):
        raise DomainException(
            f'\nError: Whittaker W degenerates when mu - sigma + 1/2 = '
            f'{mu - sigma + 0.5} is a non-positive integer.'
        )
    if np.any(np.asarray(x) <= 0):
        raise DomainException('\nError: Whittaker W is evaluated for x > 0.')


def whittaker_w(sigma: float, mu: float, x: Any) -> Any:
    """
    Whittaker function W_{sigma,mu}(x).

    :param sigma: First index, sigma < 2
    :type sigma: float
    :param mu: Second index
    :type mu: float
    :param x: Argument, x > 0
    :type x: float | ndarray
    :return: W_{sigma,mu}(x)
    :rtype: float | ndarray
    """
    _check_whittaker(sigma, mu, x)
    evaluate = np.frompyfunc(
        lambda t: float(mpmath.whitw(sigma, mu, t)), 1, 1
    )
    values = np.asarray(evaluate(np.asarray(x, dtype=float)), dtype=float)
    return values if values.ndim else float(values)


def ln_whittaker_w(sigma: float, mu: float, x: Any) -> tuple[Any, Any]:
    """
    Log-modulus and sign of W_{sigma,mu}(x), usable far past float underflow.

    :param sigma: First index, sigma < 2
    :type sigma: float
    :param mu: Second index
    :type mu: float
    :param x: Argument, x > 0
    :type x: float | ndarray
    :return: (log|W|, sign of W)
    :rtype: tuple[float | ndarray, float | ndarray]
    """
    _check_whittaker(sigma, mu, x)

    def evaluate(t: float) -> tuple[float, float]:
        w = mpmath.whitw(sigma, mu, t)
        if w == 0:
            return -math.inf, 0.0
        return float(mpmath.log(abs(w))), float(mpmath.sign(w))

    pairs = np.frompyfunc(evaluate, 1, 2)(np.asarray(x, dtype=float))
    logs = np.asarray(pairs[0], dtype=float)
    signs = np.asarray(pairs[1], dtype=float)
    if logs.ndim:
        return logs, signs
    return float(logs), float(signs)


def ln_q_poch(p: float, q: float, n: int) -> tuple[float, float]:
    """
    Log-modulus and sign of the finite q-Pochhammer symbol (p;q)_n.

    :param p: Base argument
    :type p: float
    :param q: Nome, any positive value (q > 1 gives (p;1/q)-type products)
    :type q: float
    :param n: Number of factors, n >= 0
    :type n: int
    :return: (log|(p;q)_n|, sign), the log is -inf for a vanishing product
    :rtype: tuple[float, float]
    """
    if n < 0:
        raise DomainException(f'\nError: (p;q)_n needs n >= 0, got {n}.')
    factors = 1.0 - p * q ** np.arange(n, dtype=float)
    if np.any(factors == 0):
        return -math.inf, 0.0
    return (
        float(np.sum(np.log(np.abs(factors)))),
        float(np.prod(np.sign(factors)))
    )


def q_poch(p: float, q: float, n: int) -> float:
    """
    Finite q-Pochhammer symbol (p;q)_n = prod_{j<n} (1 - p q^j).

    :param p: Base argument
    :type p: float
    :param q: Nome
    :type q: float
    :param n: Number of factors, n >= 0
    :type n: int
    :return: (p;q)_n
    :rtype: float
    """
    log_value, sign = ln_q_poch(p, q, n)
    return sign * math.exp(log_value) if sign else 0.0


def _check_nome(q: float) -> None:
    if not 0 < q < 1:
        raise DomainException(f'\nError: The nome must lie in (0, 1), got {q}.')


def _inf_terms(pmax: float, q: float) -> int:
    return max(1, math.ceil(math.log(QPOCH_INF_EPS / pmax) / math.log(q)) + 1)


def ln_q_poch_inf(p: Any, q: float) -> tuple[Any, Any]:
    """
    Log-modulus and sign of the infinite q-Pochhammer symbol (p;q)_inf,
    vectorized over p.

    :param p: Base argument(s), real
    :type p: float | ndarray
    :param q: Nome in (0, 1)
    :type q: float
    :return: (log|(p;q)_inf|, sign)
    :rtype: tuple[float | ndarray, float | ndarray]
    """
    _check_nome(q)
    ps = np.asarray(p, dtype=float)
    pmax = float(np.max(np.abs(ps))) if ps.size else 0.0
    if pmax == 0.0:
        zeros = np.zeros_like(ps)
        return (zeros, zeros + 1.0) if ps.ndim else (0.0, 1.0)
    powers = q ** np.arange(_inf_terms(pmax, q), dtype=float)
    steps = -np.multiply.outer(ps, powers)
    with np.errstate(divide='ignore', invalid='ignore'):
        logs = np.where(
            np.abs(steps) < 0.5,
            np.log1p(np.clip(steps, -0.5, None)),
            np.log(np.abs(1.0 + steps))
        ).sum(axis=-1)
    signs = np.prod(np.sign(1.0 + steps), axis=-1)
    if ps.ndim:
        return logs, signs
    return float(logs), float(signs)


def q_poch_inf(p: Any, q: float) -> Any:
    """
    Infinite q-Pochhammer symbol (p;q)_inf, truncated once |p|q^j < 1e-17.

    :param p: Base argument(s), real or complex
    :type p: float | complex | ndarray
    :param q: Nome in (0, 1)
    :type q: float
    :return: (p;q)_inf
    :rtype: float | complex | ndarray
    """
    if np.iscomplexobj(p):
        _check_nome(q)
        ps = np.asarray(p, dtype=complex)
        pmax = float(np.max(np.abs(ps)))
        if pmax == 0.0:
            return np.ones_like(ps) if ps.ndim else 1.0 + 0j
        powers = q ** np.arange(_inf_terms(pmax, q), dtype=float)
        values = np.prod(1.0 - np.multiply.outer(ps, powers), axis=-1)
        return values if ps.ndim else complex(values)
    logs, signs = ln_q_poch_inf(p, q)
    return signs * np.exp(logs)


def q_exp(mu: float, q: float, x: complex) -> Any:
    """
    q-exponential E_q^(mu)(x) = sum_n q^(mu n^2) x^n / (q;q)_n.

    :param mu: Quadratic exponent; mu > 0 gives an entire function
    :type mu: float
    :param q: Nome in (0, 1)
    :type q: float
    :param x: Argument, real or complex
    :type x: complex
    :return: E_q^(mu)(x)
    :rtype: float | complex
    """
    _check_nome(q)
    if x == 0:
        return 1.0
    if mu < 0:
        raise DivergenceException(
            f'\nError: E_q^({mu}) has zero radius of convergence; cannot '
            f'evaluate at x = {x}.'
        )
    if mu == 0 and abs(x) >= 1:
        raise DivergenceException(
            f'\nError: E_q^(0) converges only for |x| < 1, got x = {x}.'
        )
    total = 1.0 + 0.0 * x
    term = 1.0 + 0.0 * x
    quiet = 0
    for n in range(SERIES_MAX_TERMS):
        term *= x * q ** (mu * (2 * n + 1)) / (1.0 - q ** (n + 1))
        total += term
        if abs(term) <= SERIES_EPS * abs(total) or term == 0:
            quiet += 1
            if quiet >= SERIES_QUIET_TERMS:
                return total
        else:
            quiet = 0
    raise DivergenceException(
        f'\nError: E_q^({mu})({x}) did not converge within '
        f'{SERIES_MAX_TERMS} terms.'
    )
