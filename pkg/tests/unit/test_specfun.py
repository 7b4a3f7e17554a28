import logging
import math

import mpmath
import numpy as np
import pytest
from scipy import special

from sis.core.exception.exception import DivergenceException
from sis.core.exception.exception import DomainException
from sis.core.numerics import specfun

'''LnGamma Tests'''


def test_ln_gamma_integer():
    """Ensures proper function when Gamma is a factorial"""
    expected_log = math.log(24.0)
    actual_log, actual_sign = specfun.ln_gamma(5.0)
    assert actual_log == pytest.approx(expected_log, rel=1e-14)
    assert actual_sign == 1.0


def test_ln_gamma_half():
    """Ensures proper function when x = 1/2 gives sqrt(pi)"""
    expected_log = 0.5 * math.log(math.pi)
    actual_log, _ = specfun.ln_gamma(0.5)
    assert actual_log == pytest.approx(expected_log, rel=1e-14)


def test_ln_gamma_negative():
    """Ensures proper function when x is negative and Gamma(x) < 0"""
    actual_log, actual_sign = specfun.ln_gamma(-2.5)
    assert actual_log == pytest.approx(-0.0562437164, abs=1e-9)
    assert actual_sign == -1.0


@pytest.mark.parametrize('x', [0.0, -1.0, -7.0])
def test_ln_gamma_pole(x):
    """Ensures proper function when x is a pole of Gamma"""
    with pytest.raises(DomainException):
        specfun.ln_gamma(x)


@pytest.mark.parametrize('x', [0.5, 1.3, 2.7])
def test_gamma_duplication(x):
    """Ensures proper function when checked against the duplication formula"""
    expected = (
        specfun.ln_gamma(x)[0] + specfun.ln_gamma(x + 0.5)[0]
        + (2 * x - 1) * math.log(2.0) - 0.5 * math.log(math.pi)
    )
    actual, _ = specfun.ln_gamma(2 * x)
    assert math.exp(actual) == pytest.approx(math.exp(expected), rel=1e-12)


'''LnPochhammer Tests'''


def test_ln_pochhammer_positive():
    """Ensures proper function when b > 0"""
    expected_value = 1.5 * 2.5 * 3.5
    log_value, sign = specfun.ln_pochhammer(1.5, 3)
    assert sign * math.exp(log_value) == pytest.approx(expected_value, rel=1e-13)


def test_ln_pochhammer_vanishing():
    """Ensures proper function when a factor of the product is zero"""
    assert specfun.ln_pochhammer(-2.0, 4) == (-math.inf, 0.0)


def test_ln_pochhammer_negative_integer_base():
    """Ensures proper function when b is a negative integer but no factor
    vanishes"""
    log_value, sign = specfun.ln_pochhammer(-2.0, 2)
    assert sign == 1.0
    assert log_value == pytest.approx(math.log(2.0), rel=1e-14)


def test_ln_pochhammer_empty():
    """Ensures proper function when the product is empty"""
    assert specfun.ln_pochhammer(-3.5, 0) == (0.0, 1.0)


'''Confluent1F1 Tests'''


def test_confluent_at_zero():
    """Ensures proper function when x = 0"""
    assert specfun.confluent_1f1(0.7, 1.9, 0.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize('a, b', [(1.0, 1.0), (2.0, 2.0)])
def test_confluent_exponential(a, b):
    """Ensures proper function when a = b reduces 1F1 to exp(x)"""
    assert specfun.confluent_1f1(a, b, 1.0) == pytest.approx(math.e, rel=1e-12)


def test_confluent_complex():
    """Ensures proper function when x is complex"""
    expected_value = complex(math.cos(1.0), math.sin(1.0))
    actual_value = specfun.confluent_1f1(1.0, 1.0, 1j)
    assert abs(actual_value - expected_value) < 1e-12


def test_confluent_negative_x():
    """Ensures proper function when x is real and negative"""
    with pytest.raises(DomainException):
        specfun.confluent_1f1(1.0, 2.0, -1.0)


def test_confluent_bad_b():
    """Ensures proper function when b is a non-positive integer"""
    with pytest.raises(DomainException):
        specfun.confluent_1f1(1.0, -1.0, 0.5)


'''Bessel Tests'''


def test_bessel_i_zero():
    """Ensures proper function when I_0(0) = 1"""
    assert specfun.bessel_i(0.0, 0.0) == 1.0


def test_bessel_i_one():
    """Ensures proper function when evaluating I_1(2)"""
    assert specfun.bessel_i(1.0, 2.0) == pytest.approx(1.590636854637329, rel=1e-12)


def test_bessel_i_half_integer():
    """Ensures proper function when I_1/2(x) = sqrt(2/(pi x)) sinh x"""
    expected_value = math.sqrt(2.0 / math.pi) * math.sinh(1.0)
    assert specfun.bessel_i(0.5, 1.0) == pytest.approx(expected_value, rel=1e-12)


def test_bessel_i_negative_order():
    """Ensures proper function when nu < 0"""
    with pytest.raises(DomainException):
        specfun.bessel_i(-0.5, 1.0)


def test_bessel_k_half():
    """Ensures proper function when K_1/2(1) = sqrt(pi/2) e^-1"""
    expected_value = math.sqrt(math.pi / 2.0) * math.exp(-1.0)
    assert specfun.bessel_k(0.5, 1.0) == pytest.approx(expected_value, rel=1e-9)


def test_bessel_k_three_halves():
    """Ensures proper function when K_3/2(2) follows from the recurrence"""
    expected_value = math.sqrt(math.pi / 4.0) * math.exp(-2.0) * 1.5
    assert specfun.bessel_k(1.5, 2.0) == pytest.approx(expected_value, rel=1e-9)
    assert specfun.bessel_k(1.5, 2.0) == pytest.approx(0.179906, abs=1e-6)


@pytest.mark.parametrize('x', [0.3, 1.9, 2.1, 10.0, 30.0])
def test_bessel_k_half_integer_forms(x):
    """Ensures proper function when K_nu matches half-integer closed forms on
    both sides of the evaluation switch"""
    base = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
    assert specfun.bessel_k(0.5, x) == pytest.approx(base, rel=1e-9)
    assert specfun.bessel_k(1.5, x) == pytest.approx(base * (1 + 1 / x), rel=1e-9)


def test_bessel_k_vectorized():
    """Ensures proper function when x is an array"""
    x = np.array([0.5, 1.0, 5.0])
    expected_values = special.kv(0.3, x)
    np.testing.assert_allclose(specfun.bessel_k(0.3, x), expected_values, rtol=1e-9)


def test_bessel_k_integer_order():
    """Ensures proper function when nu is an integer"""
    with pytest.raises(DomainException):
        specfun.bessel_k(1.0, 1.0)


def test_bessel_k_integer_order_allowed(caplog):
    """Ensures proper function when an integer order is allowed"""
    with caplog.at_level(logging.WARNING):
        actual_value = specfun.bessel_k(1.0, 1.0, allow_integer=True)
    assert actual_value == pytest.approx(special.kv(1, 1.0), rel=1e-8)
    assert 'Integer Bessel order' in caplog.text


def test_ln_bessel_k_large_argument():
    """Ensures proper function when K_nu(x) underflows"""
    expected_log = 0.5 * math.log(math.pi / 1600.0) - 800.0
    assert specfun.ln_bessel_k(0.5, 800.0) == pytest.approx(expected_log, rel=1e-12)


def test_ln_bessel_k_huge_argument():
    """Ensures proper function when the scaled Bessel function is no longer
    available"""
    x = 1e12
    expected_log = 0.5 * math.log(math.pi / (2.0 * x)) - x + math.log1p(1.0 / x)
    actual_log = specfun.ln_bessel_k(1.5, x)
    assert math.isfinite(actual_log)
    assert actual_log == pytest.approx(expected_log, rel=1e-14)


def test_ln_bessel_k_expansion_switch():
    """Ensures proper function on both sides of the large-x switch"""
    x = np.array([0.99, 1.01]) * specfun.K_ASYMPTOTIC_XMIN
    expected_log = (
        0.5 * np.log(math.pi / (2.0 * x)) - x + np.log1p(3.0 / x + 3.0 / x ** 2)
    )
    np.testing.assert_allclose(specfun.ln_bessel_k(2.5, x), expected_log, rtol=1e-14)


def test_bessel_k_non_positive_x():
    """Ensures proper function when x <= 0"""
    with pytest.raises(DomainException):
        specfun.bessel_k(0.5, 0.0)


'''Whittaker Tests'''


def test_whittaker_exponential():
    """Ensures proper function when W_0,1/2(x) = exp(-x/2)"""
    assert specfun.whittaker_w(0.0, 0.5, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-10)


def test_whittaker_vectorized():
    """Ensures proper function when x is an array"""
    x = np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(
        specfun.whittaker_w(0.0, 0.5, x), np.exp(-x / 2), rtol=1e-10
    )


def test_ln_whittaker_underflow():
    """Ensures proper function when W underflows a double"""
    log_value, sign = specfun.ln_whittaker_w(0.0, 0.5, 2000.0)
    assert log_value == pytest.approx(-1000.0, rel=1e-12)
    assert sign == 1.0


@pytest.mark.parametrize('sigma, mu, x', [(2.0, 0.5, 1.0), (1.0, 0.5, 1.0), (0.5, 0.5, 0.0)])
def test_whittaker_domain(sigma, mu, x):
    """Ensures proper function when parameters are degenerate or x <= 0"""
    with pytest.raises(DomainException):
        specfun.whittaker_w(sigma, mu, x)


'''QPochhammer Tests'''


def test_q_poch_empty():
    """Ensures proper function when (p;q)_0 = 1"""
    assert specfun.q_poch(0.7, 0.5, 0) == 1.0


def test_q_poch_finite():
    """Ensures proper function when (0.5;0.5)_3 = 0.328125"""
    assert specfun.q_poch(0.5, 0.5, 3) == pytest.approx(0.328125, rel=1e-14)


def test_q_poch_vanishing():
    """Ensures proper function when p = 1 zeroes the first factor"""
    assert specfun.q_poch(1.0, 0.5, 4) == 0.0


def test_q_poch_large_nome():
    """Ensures proper function when q > 1"""
    expected_value = (1 - 0.01) * (1 - 0.01 / 0.9) * (1 - 0.01 / 0.81)
    assert specfun.q_poch(0.01, 1 / 0.9, 3) == pytest.approx(expected_value, rel=1e-13)


def test_q_poch_inf_zero():
    """Ensures proper function when (0;q)_inf = 1"""
    assert specfun.q_poch_inf(0.0, 0.5) == pytest.approx(1.0)


@pytest.mark.parametrize('p, q', [(0.5, 0.5), (-1.0, 0.5), (0.3, 0.9), (-4.0, 0.8)])
def test_q_poch_inf_oracle(p, q):
    """Ensures proper function when compared against mpmath.qp"""
    expected_value = float(mpmath.qp(p, q))
    assert specfun.q_poch_inf(p, q) == pytest.approx(expected_value, rel=1e-12)


def test_q_poch_inf_reference_values():
    """Ensures proper function when evaluating tabulated products"""
    assert specfun.q_poch_inf(0.5, 0.5) == pytest.approx(0.2887880951, rel=1e-9)
    assert specfun.q_poch_inf(-1.0, 0.5) == pytest.approx(4.768462058, rel=1e-9)


def test_q_poch_inf_vectorized():
    """Ensures proper function when p is an array"""
    p = np.array([-2.0, 0.0, 0.25])
    expected_values = [float(mpmath.qp(v, 0.6)) for v in p]
    np.testing.assert_allclose(specfun.q_poch_inf(p, 0.6), expected_values, rtol=1e-12)


def test_q_poch_inf_complex():
    """Ensures proper function when p is complex"""
    expected_value = complex(mpmath.qp(0.3 + 0.4j, 0.5))
    assert abs(specfun.q_poch_inf(0.3 + 0.4j, 0.5) - expected_value) < 1e-12


def test_q_poch_inf_bad_nome():
    """Ensures proper function when q is outside (0, 1)"""
    with pytest.raises(DomainException):
        specfun.q_poch_inf(0.5, 1.0)


'''QExp Tests'''


def test_q_exp_at_zero():
    """Ensures proper function when x = 0"""
    assert specfun.q_exp(0.5, 0.5, 0.0) == 1.0


@pytest.mark.parametrize('q', [0.3, 0.5, 0.8])
def test_q_exp_euler_identity(q):
    """Ensures proper function when E_q^(1/2)(x) = (-sqrt(q) x; q)_inf"""
    for x in np.linspace(0.0, 4.0, 9):
        expected_value = specfun.q_poch_inf(-math.sqrt(q) * x, q)
        assert specfun.q_exp(0.5, q, x) == pytest.approx(expected_value, rel=1e-10)


def test_q_exp_root():
    """Ensures proper function when x = -q^(-1/2) is a root of E_q^(1/2)"""
    q = 0.5
    assert abs(specfun.q_exp(0.5, q, -1 / math.sqrt(q))) < 1e-12


def test_q_exp_binomial():
    """Ensures proper function when mu = 0 sums to 1/(x;q)_inf"""
    expected_value = 1.0 / specfun.q_poch_inf(0.5, 0.5)
    assert specfun.q_exp(0.0, 0.5, 0.5) == pytest.approx(expected_value, rel=1e-12)


def test_q_exp_complex():
    """Ensures proper function when x is complex"""
    x = 0.5 - 1.5j
    expected_value = specfun.q_poch_inf(-math.sqrt(0.5) * x, 0.5)
    assert abs(specfun.q_exp(0.5, 0.5, x) - expected_value) < 1e-10 * abs(expected_value)


def test_q_exp_negative_mu():
    """Ensures proper function when mu < 0 has zero radius"""
    with pytest.raises(DivergenceException):
        specfun.q_exp(-0.5, 0.5, 0.1)


def test_q_exp_outside_radius():
    """Ensures proper function when mu = 0 and |x| >= 1"""
    with pytest.raises(DivergenceException):
        specfun.q_exp(0.0, 0.5, 1.0)
