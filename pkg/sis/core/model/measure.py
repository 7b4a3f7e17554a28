"""
Resolution of unity: closed-form solutions W(rho) of the moment problem
int rho^n W(rho) d rho = |h_n|^2, the weight w = W/(pi N^2) and quadrature
verification of the moments.
"""
from __future__ import annotations

import cmath
import logging
import math
from enum import Enum
from typing import Any
from typing import NamedTuple

import numpy as np
from numpy import ndarray

from sis.core.exception.exception import DomainException
from sis.core.model.coherent import ln_hn_sq
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.functional import ZSpec
from sis.core.model.functional import valid_order
from sis.core.numerics.quadrature import QuadResult
from sis.core.numerics.quadrature import quad_01
from sis.core.numerics.quadrature import quad_interval
from sis.core.numerics.quadrature import quad_semiinf
from sis.core.numerics.specfun import ln_bessel_k
from sis.core.numerics.specfun import ln_gamma
from sis.core.numerics.specfun import ln_q_poch_inf
from sis.core.numerics.specfun import ln_whittaker_w

logger = logging.getLogger(__name__)

''' Log-spaced scan used to locate the peak of rho^n W(rho) '''
PEAK_SCAN = np.logspace(-12, 12, 481)

''' Quadrature tolerance for moments '''
MOMENT_QUAD_TOL = 1e-11


class MeasureKind(Enum):
    HO_FLAT = 'hoflat'
    DISK_TYPE_C = 'disk_typeC'
    DISK_PT = 'disk_pt'
    SECH_TYPE_A = 'sech_typeA'
    BESSEL_BG = 'bessel_bg'
    WHITTAKER_PT = 'whittaker_pt'
    RAMANUJAN_Q = 'ramanujan_q'
    RAMANUJAN_GENERAL_Q = 'ramanujan_general_q'


''' Parameters of each case with their reference values '''
REFERENCE_PARAMS: dict[MeasureKind, dict[str, float]] = {
    MeasureKind.HO_FLAT: {'gamma': 1.0, 'c': 1.0},
    MeasureKind.DISK_TYPE_C: {'rho_c': -3.0},
    MeasureKind.DISK_PT: {'nu': 1.0},
    MeasureKind.SECH_TYPE_A: {},
    MeasureKind.BESSEL_BG: {'nu': 1.5},
    MeasureKind.WHITTAKER_PT: {'sigma': 0.5},
    MeasureKind.RAMANUJAN_Q: {'r1': 1.0, 'q': 0.5},
    MeasureKind.RAMANUJAN_GENERAL_Q: {'r1': 1.0, 'q': 0.9, 'c': 0.01},
}

DISK_KINDS = (MeasureKind.DISK_TYPE_C, MeasureKind.DISK_PT)


class MeasureCase:
    """
    A closed-form moment distribution W(rho) with its parameters and domain.
    """

    def __init__(self, kind: str | MeasureKind, params: dict[str, float] | None = None):
        """
        Initialize an instance of MeasureCase.

        :param kind: Catalog case
        :type kind: str | MeasureKind
        :param params: Case parameters; missing ones take reference values
        :type params: dict[str, float] | None
        """
        try:
            self._kind: MeasureKind = MeasureKind(kind)
        except ValueError:
            raise DomainException(
                f'\nError: Unknown measure case {kind}. Expected one of'
                f' {[k.value for k in MeasureKind]}.'
            )
        reference = REFERENCE_PARAMS[self._kind]
        params = dict(params or {})
        unknown = set(params) - set(reference)
        if unknown:
            raise DomainException(
                f'\nError: Measure case {self._kind.value} takes parameters'
                f' {sorted(reference)}, got unknown {sorted(unknown)}.'
            )
        self._params: dict[str, float] = {
            key: float(params.get(key, value)) for key, value in reference.items()
        }
        self._validate()

    def _validate(self) -> None:
        p = self._params
        kind = self._kind
        problems = []
        if kind is MeasureKind.HO_FLAT and not (p['gamma'] > 0 and p['c'] > 0):
            problems.append('gamma > 0 and c > 0')
        if kind is MeasureKind.DISK_TYPE_C and not p['rho_c'] < -1:
            problems.append('rho_c < -1')
        if kind is MeasureKind.DISK_PT and not p['nu'] > 0:
            problems.append('nu > 0')
        if kind is MeasureKind.BESSEL_BG and (
                not p['nu'] > -1 or float(p['nu']).is_integer()
        ):
            problems.append('nu > -1 and nu not an integer')
        if kind is MeasureKind.WHITTAKER_PT and (
                not p['sigma'] < 2 or p['sigma'] == 1
        ):
            problems.append('sigma < 2 and sigma != 1')
        if kind in (MeasureKind.RAMANUJAN_Q, MeasureKind.RAMANUJAN_GENERAL_Q):
            if not (p['r1'] > 0 and 0 < p['q'] < 1):
                problems.append('r1 > 0 and 0 < q < 1')
            if not 0 <= p.get('c', 0.0) < 1:
                problems.append('0 <= c < 1')
        if problems:
            raise DomainException(
                f'\nError: Measure case {kind.value} requires'
                f' {"; ".join(problems)}, got {p}.'
            )

    @classmethod
    def ho_flat(cls, gamma: float = 1.0, c: float = 1.0) -> MeasureCase:
        return MeasureCase(MeasureKind.HO_FLAT, {'gamma': gamma, 'c': c})

    @classmethod
    def disk_type_c(cls, rho_c: float = -3.0) -> MeasureCase:
        return MeasureCase(MeasureKind.DISK_TYPE_C, {'rho_c': rho_c})

    @classmethod
    def disk_pt(cls, nu: float = 1.0) -> MeasureCase:
        return MeasureCase(MeasureKind.DISK_PT, {'nu': nu})

    @classmethod
    def sech_type_a(cls) -> MeasureCase:
        return MeasureCase(MeasureKind.SECH_TYPE_A)

    @classmethod
    def bessel_bg(cls, nu: float = 1.5) -> MeasureCase:
        return MeasureCase(MeasureKind.BESSEL_BG, {'nu': nu})

    @classmethod
    def whittaker_pt(cls, sigma: float = 0.5) -> MeasureCase:
        return MeasureCase(MeasureKind.WHITTAKER_PT, {'sigma': sigma})

    @classmethod
    def ramanujan_q(cls, r1: float = 1.0, q: float = 0.5) -> MeasureCase:
        return MeasureCase(MeasureKind.RAMANUJAN_Q, {'r1': r1, 'q': q})

    @classmethod
    def ramanujan_general_q(
            cls, r1: float = 1.0, q: float = 0.9, c: float = 0.01
    ) -> MeasureCase:
        return MeasureCase(
            MeasureKind.RAMANUJAN_GENERAL_Q, {'r1': r1, 'q': q, 'c': c}
        )

    @property
    def kind(self) -> MeasureKind:
        return self._kind

    @property
    def params(self) -> dict[str, float]:
        return dict(self._params)

    @property
    def domain(self) -> tuple[float, float]:
        """
        Get the support of W: [0, 1) for disk cases, [0, inf) otherwise.

        :return: (lower, upper)
        :rtype: tuple[float, float]
        """
        return (0.0, 1.0) if self._kind in DISK_KINDS else (0.0, math.inf)

    def paired_state(self) -> tuple[FamilyConfig, ZSpec]:
        """
        Family and functional whose |h_n|^2 are the moments of this case.

        :return: (family, functional)
        :rtype: tuple[FamilyConfig, ZSpec]
        """
        p = self._params
        kind = self._kind
        if kind is MeasureKind.HO_FLAT:
            return (
                FamilyConfig('typeD', beta=p['gamma'] / math.sqrt(2.0)),
                ZSpec('const', c=p['c'])
            )
        if kind is MeasureKind.DISK_TYPE_C:
            return FamilyConfig('typeC', a1=p['rho_c'] * ETA, beta=ETA), ZSpec('typeC_G')
        if kind in (MeasureKind.DISK_PT, MeasureKind.BESSEL_BG):
            cfg = FamilyConfig('typeA', a1=p['nu'] * ETA / 2, beta=1.0, gamma=ETA / 2)
            variant = 'typeA_PT1' if kind is MeasureKind.DISK_PT else 'typeA_BG'
            return cfg, ZSpec(variant)
        if kind is MeasureKind.SECH_TYPE_A:
            return FamilyConfig('typeA', a1=ETA / 2, beta=1.0), ZSpec('const', c=ETA)
        if kind is MeasureKind.WHITTAKER_PT:
            return (
                FamilyConfig('typeA', a1=ETA, beta=1.0),
                ZSpec('typeA_whittaker', sigma=p['sigma'])
            )
        cfg = FamilyConfig('selfSimilar', a1=1.0, q=p['q'], r_scale=p['r1'])
        if kind is MeasureKind.RAMANUJAN_Q:
            return cfg, ZSpec('ss_R')
        return cfg, ZSpec('ss_ramanujan', c=p['c'])

    def moment_exists(self, n: int) -> bool:
        """
        Whether int rho^n W(rho) d rho is finite; only the general Ramanujan
         case is limited, needing c < q^n.

        :param n: Moment order
        :type n: int
        :return: Existence of the moment
        :rtype: bool
        """
        if self._kind is not MeasureKind.RAMANUJAN_GENERAL_Q:
            return True
        return self._params['c'] < self._params['q'] ** n

    def __repr__(self) -> str:
        return f'MeasureCase({self._kind.value}, {self._params})'


def _ln_distribution(mc: MeasureCase, rho: ndarray) -> tuple[ndarray, ndarray]:
    p = mc.params
    kind = mc.kind
    ones = np.ones_like(rho)
    if kind is MeasureKind.HO_FLAT:
        scale = p['c'] ** 2 / p['gamma']
        return math.log(scale) - scale * rho, ones
    if kind is MeasureKind.DISK_TYPE_C:
        m = -p['rho_c']
        return math.log(m - 1.0) + (m - 2.0) * np.log1p(-rho), ones
    if kind is MeasureKind.DISK_PT:
        nu = p['nu']
        return math.log(nu) + (nu - 1.0) * np.log1p(-rho), ones
    if kind is MeasureKind.SECH_TYPE_A:
        root = np.sqrt(rho)
        return -root - np.log(2.0 * root), ones
    if kind is MeasureKind.BESSEL_BG:
        nu = p['nu']
        return (
            math.log(2.0) + 0.5 * nu * np.log(rho)
            + ln_bessel_k(nu, 2.0 * np.sqrt(rho)) - ln_gamma(nu + 1.0)[0]
        ), ones
    if kind is MeasureKind.WHITTAKER_PT:
        sigma = p['sigma']
        log_gamma, sign_gamma = ln_gamma(2.0 - sigma)
        log_w, sign_w = ln_whittaker_w(sigma, 0.5, rho)
        return log_gamma - 0.5 * rho + log_w, sign_gamma * sign_w
    q = p['q']
    c = p.get('c', 0.0)
    r1 = p['r1']
    s = rho * r1 * (1.0 - q)
    log_front = math.log(r1 * (1.0 - q) * (1.0 - c) / (q * math.log(1.0 / q)))
    log_bottom, _ = ln_q_poch_inf(-s / q, q)
    if c == 0:
        return log_front - log_bottom, ones
    log_top, _ = ln_q_poch_inf(-c * s, q)
    return log_front + log_top - log_bottom, ones


def _check_domain(mc: MeasureCase, rho: ndarray) -> None:
    lower, upper = mc.domain
    open_at_zero = mc.kind in (
        MeasureKind.SECH_TYPE_A, MeasureKind.BESSEL_BG, MeasureKind.WHITTAKER_PT
    )
    outside = (rho < lower) | (rho >= upper) | ~np.isfinite(rho)
    if open_at_zero:
        outside |= rho == 0
    if np.any(outside):
        interval = f'({lower}, {upper})' if open_at_zero else f'[{lower}, {upper})'
        raise DomainException(
            f'\nError: Measure case {mc.kind.value} is defined for rho in'
            f' {interval}.'
        )


def distribution_W(mc: MeasureCase, rho: Any) -> Any:
    """
    Moment distribution W(rho), with int rho^n W(rho) d rho = |h_n|^2.

    :param mc: Measure case
    :type mc: MeasureCase
    :param rho: Moment variable(s) |z|^2 inside the domain
    :type rho: float | ndarray
    :return: W(rho)
    :rtype: float | ndarray
    """
    rhos = np.asarray(rho, dtype=float)
    _check_domain(mc, rhos)
    log_value, sign = _ln_distribution(mc, np.atleast_1d(rhos))
    values = (sign * np.exp(log_value)).reshape(rhos.shape)
    return values if values.ndim else float(values)


def weight_w(mc: MeasureCase, rho: Any, n_sq: Any) -> Any:
    """
    Weight w = W/(pi N^2) of the resolution of unity over d^2 z.

    :param mc: Measure case
    :type mc: MeasureCase
    :param rho: Moment variable(s) |z|^2
    :type rho: float | ndarray
    :param n_sq: Squared normalization N^2(rho) of the paired state
    :type n_sq: float | ndarray
    :return: w(rho)
    :rtype: float | ndarray
    """
    return distribution_W(mc, rho) / (math.pi * np.asarray(n_sq))


def moment(mc: MeasureCase, n: int, tol: float = MOMENT_QUAD_TOL) -> QuadResult:
    """
    Quadrature of int rho^n W(rho) d rho.

    Half-line cases are split at the peak of rho^n W(rho): tanh-sinh below
    the peak, exp-sinh above it.

    :param mc: Measure case
    :type mc: MeasureCase
    :param n: Moment order, n >= 0
    :type n: int
    :param tol: Relative quadrature tolerance
    :type tol: float
    :return: Quadrature result
    :rtype: QuadResult
    """
    if n < 0:
        raise DomainException(f'\nError: Moment order must be >= 0, got {n}.')

    def log_integrand(rho: ndarray) -> tuple[ndarray, ndarray]:
        log_value, sign = _ln_distribution(mc, rho)
        return n * np.log(rho) + log_value, sign

    def integrand(rho: ndarray) -> ndarray:
        inside = rho > 0
        if mc.kind in DISK_KINDS:
            inside &= rho < 1
        values = np.zeros_like(rho)
        if np.any(inside):
            log_value, sign = log_integrand(rho[inside])
            with np.errstate(over='ignore', invalid='ignore'):
                values[inside] = np.where(
                    np.isfinite(log_value), sign * np.exp(log_value), 0.0
                )
        return values

    if mc.kind in DISK_KINDS:
        return quad_01(integrand, tol)
    log_scan, _ = log_integrand(PEAK_SCAN)
    index = int(np.nanargmax(log_scan))
    # An endpoint maximum is a singularity or a tail, not a peak
    peak = float(PEAK_SCAN[index]) if 0 < index < PEAK_SCAN.size - 1 else 1.0
    below = quad_interval(integrand, 0.0, peak, tol)
    above = quad_semiinf(integrand, tol, lower=peak)
    total = below.value + above.value
    abs_err = below.abs_err_estimate + above.abs_err_estimate
    return QuadResult(
        total, abs_err, below.evaluations + above.evaluations,
        (below.converged and above.converged) or abs_err <= tol * max(1.0, abs(total))
    )


class MomentRow(NamedTuple):
    n: int
    moment: float | None
    target: float
    rel_err: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            'n': self.n,
            'moment': self.moment,
            'target': self.target if math.isfinite(self.target) else None,
            'rel_err': self.rel_err if math.isfinite(self.rel_err) else None,
            'pass': self.passed,
        }


class MomentReport:
    """
    Moments of one measure case against the squared coefficients |h_n|^2.
    """

    def __init__(self, mc: MeasureCase, rows: list[MomentRow]):
        self._mc: MeasureCase = mc
        self._rows: list[MomentRow] = rows

    @property
    def case(self) -> MeasureCase:
        return self._mc

    @property
    def rows(self) -> list[MomentRow]:
        return list(self._rows)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self._rows)

    def failed_rows(self) -> list[MomentRow]:
        return [row for row in self._rows if not row.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            'case': self._mc.kind.value,
            'params': self._mc.params,
            'rows': [row.to_dict() for row in self._rows],
            'pass': self.passed,
        }


def verify_moments(
        mc: MeasureCase, cfg: FamilyConfig, zs: ZSpec, n_max: int, tol: float
) -> MomentReport:
    """
    Compare int rho^n W(rho) d rho with |h_n|^2 for n = 0 ... n_max.

    Rows whose moment does not exist, or whose quadrature did not converge,
    are marked failed; the report is always complete.

    :param mc: Measure case
    :type mc: MeasureCase
    :param cfg: Family of the state the moments belong to
    :type cfg: FamilyConfig
    :param zs: Functional of the state the moments belong to
    :type zs: ZSpec
    :param n_max: Highest moment order
    :type n_max: int
    :param tol: Relative tolerance for a row to pass
    :type tol: float
    :return: Moment report
    :rtype: MomentReport
    """
    if n_max < 0:
        raise DomainException(f'\nError: n_max must be >= 0, got {n_max}.')
    order = valid_order(zs, cfg)
    reach = n_max if order is None else min(n_max, order)
    targets = np.exp(ln_hn_sq(cfg, zs, max(1, reach)))
    rows = []
    for n in range(n_max + 1):
        target = float(targets[n]) if n <= reach else math.nan
        if not mc.moment_exists(n) or n > reach:
            logger.warning(
                'Moment %d of %s does not exist at %s', n, mc.kind.value, mc.params
            )
            rows.append(MomentRow(n, None, target, math.inf, False))
            continue
        result = moment(mc, n)
        rel_err = abs(result.value - target) / abs(target)
        passed = result.converged and rel_err <= tol
        if not passed:
            logger.warning(
                'Moment %d of %s failed: %.17g vs %.17g (rel. err %.3e,'
                ' converged %s)', n, mc.kind.value, result.value, target,
                rel_err, result.converged
            )
        rows.append(MomentRow(n, result.value, target, rel_err, passed))
    return MomentReport(mc, rows)


def ho_phi(gamma: float, c: float, xi: Any) -> Any:
    """
    Characteristic function of the oscillator distribution,
     int exp(i xi rho) W(rho) d rho = 1/(1 - i gamma xi/c^2).

    :param gamma: Constant remainder
    :type gamma: float
    :param c: Constant functional
    :type c: float
    :param xi: Fourier variable(s)
    :type xi: float | ndarray
    :return: Phi(xi)
    :rtype: complex | ndarray
    """
    return 1.0 / (1.0 - 1j * gamma * np.asarray(xi) / c ** 2)


def ho_phi_reconstruct(gamma: float, c: float, rho: float) -> float:
    """
    Oscillator distribution recovered by inverting ho_phi: the Fourier
     integral closes in the lower half plane around the single pole
     xi = -i c^2/gamma.

    :param gamma: Constant remainder, gamma > 0
    :type gamma: float
    :param c: Constant functional, c > 0
    :type c: float
    :param rho: Moment variable, rho >= 0
    :type rho: float
    :return: W(rho) = (c^2/gamma) exp(-c^2 rho/gamma)
    :rtype: float
    """
    if not (gamma > 0 and c > 0):
        raise DomainException(
            f'\nError: Reconstruction needs gamma > 0 and c > 0, got'
            f' gamma = {gamma}, c = {c}.'
        )
    if rho < 0:
        raise DomainException(f'\nError: Reconstruction needs rho >= 0, got {rho}.')
    pole = -1j * c ** 2 / gamma
    slope = -1j * gamma / c ** 2
    residue = cmath.exp(-1j * pole * rho) / slope
    return (-2j * math.pi * residue / (2.0 * math.pi)).real
