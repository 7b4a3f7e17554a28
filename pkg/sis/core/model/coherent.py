from __future__ import annotations

import cmath
import logging
import math
from typing import Any

import numpy as np
from numpy import ndarray
from scipy import special

from sis.core.exception.exception import DivergenceException
from sis.core.exception.exception import DomainException
from sis.core.exception.exception import StateMismatchException
from sis.core.exception.exception import TruncationException
from sis.core.exception.exception import UnsupportedConfigurationException
from sis.core.model.algebra import build_spectral_table
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.family import FamilyKind
from sis.core.model.family import remainder
from sis.core.model.functional import ZSpec
from sis.core.model.functional import ZVariant
from sis.core.model.functional import check_compatible
from sis.core.model.functional import eval_z
from sis.core.model.functional import log_z_factors
from sis.core.model.functional import valid_order
from sis.core.numerics.specfun import bessel_i
from sis.core.numerics.specfun import confluent_1f1
from sis.core.numerics.specfun import q_exp
from sis.core.numerics.specfun import q_poch_inf

logger = logging.getLogger(__name__)

''' Relative probability mass allowed beyond the truncation '''
TAIL_TOL = 1e-12

''' Initial truncation of the coefficient vector '''
DEFAULT_NMAX = 64

''' Truncation never grows beyond this level '''
NMAX_CAP = 4096

''' Radius estimates above this value are reported as infinite '''
RADIUS_INFINITE = 1e6

''' Growth of |h_n|^(1/n) across the probe window that signals an infinite radius '''
RADIUS_GROWTH = 1.2

''' Trailing coefficients below this relative mass are dropped '''
NEGLIGIBLE_MASS = 1e-32


class CoherentState:
    """
    Generalized coherent state |z, alpha; a_1> expanded over the energy
     eigenstates, c_n = N z^n exp(-i alpha e_n)/|h_n|.
    """

    def __init__(
            self, cfg: FamilyConfig, zs: ZSpec, z: complex, c: ndarray,
            norm_factor: float, tail: float, energies: ndarray
    ):
        """
        Initialize an instance of CoherentState.

        :param cfg: Family of the underlying ladder
        :type cfg: FamilyConfig
        :param zs: Orbit functional with phase constant
        :type zs: ZSpec
        :param z: Label of the state
        :type z: complex
        :param c: Coefficients c_0 ... c_nmax
        :type c: ndarray
        :param norm_factor: Normalization factor N
        :type norm_factor: float
        :param tail: Probability mass estimated beyond nmax
        :type tail: float
        :param energies: Energy levels e_0 ... e_nmax
        :type energies: ndarray
        """
        self._cfg: FamilyConfig = cfg
        self._zs: ZSpec = zs
        self._z: complex = complex(z)
        self._c: ndarray = c
        self._norm_factor: float = norm_factor
        self._tail: float = tail
        self._energies: ndarray = energies
        self._c.setflags(write=False)
        self._energies.setflags(write=False)

    @property
    def cfg(self) -> FamilyConfig:
        return self._cfg

    @property
    def zs(self) -> ZSpec:
        return self._zs

    @property
    def z(self) -> complex:
        return self._z

    @property
    def nmax(self) -> int:
        """
        Get the highest level kept in the expansion.

        :return: Truncation level
        :rtype: int
        """
        return len(self._c) - 1

    @property
    def c(self) -> ndarray:
        """
        Get the expansion coefficients over the eigenstates.

        :return: Coefficients c_0 ... c_nmax
        :rtype: ndarray
        """
        return self._c

    @property
    def norm_factor(self) -> float:
        return self._norm_factor

    @property
    def tail(self) -> float:
        """
        Get the probability mass estimated beyond the truncation.

        :return: Tail mass, so that sum |c_n|^2 = 1 - tail
        :rtype: float
        """
        return self._tail

    @property
    def energies(self) -> ndarray:
        return self._energies

    def to_dict(self) -> dict[str, Any]:
        return {
            'family': self._cfg.to_dict(),
            'zspec': self._zs.to_dict(),
            'alpha': self._zs.alpha,
            'z': [self._z.real, self._z.imag],
            'nmax': self.nmax,
            'norm_factor': self._norm_factor,
            'tail': self._tail,
            'c': [[value.real, value.imag] for value in self._c],
        }


def ln_hn_sq(cfg: FamilyConfig, zs: ZSpec, nmax: int) -> ndarray:
    """
    ln|h_n|^2 = ln P_n - 2 ln|Z_1 ... Z_n| for n = 0 ... nmax.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param nmax: Highest level, nmax >= 1
    :type nmax: int
    :return: Log squared moduli of h_0 ... h_nmax
    :rtype: ndarray
    """
    check_compatible(zs, cfg)
    table = build_spectral_table(cfg, nmax)
    log_z = np.concatenate(([0.0], np.cumsum(log_z_factors(zs, cfg, 1, nmax))))
    return table.ln_p - 2.0 * log_z


def hn(cfg: FamilyConfig, zs: ZSpec, n: int) -> complex:
    """
    Expansion coefficient h_n = sqrt(P_n)/(Z_1 ... Z_n), with h_0 = 1.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param n: Level, n >= 0
    :type n: int
    :return: h_n
    :rtype: complex
    """
    if n < 0:
        raise DomainException(f'\nError: Level must be >= 0, got {n}.')
    if n == 0:
        return 1.0 + 0.0j
    log_sq = ln_hn_sq(cfg, zs, n)[n]
    energy = build_spectral_table(cfg, n).e[n]
    return cmath.exp(complex(0.5 * log_sq, zs.alpha * energy))


def _cap(cfg: FamilyConfig, zs: ZSpec) -> int:
    order = valid_order(zs, cfg)
    return NMAX_CAP if order is None else min(NMAX_CAP, order)


def _truncate(
        cfg: FamilyConfig, zs: ZSpec, x: float, nmax: int, tail_tol: float
) -> tuple[ndarray, float, float]:
    """
    Grow the truncation until the geometric tail bound of sum x^n/|h_n|^2
    falls below tail_tol relative to the partial sum.

    :return: (ln|h_n|^2 up to the truncation, log of the partial sum,
     relative tail estimate)
    """
    cap = _cap(cfg, zs)
    if cap < 1:
        raise DomainException(
            f'\nError: {zs.variant.value} admits no excited level on this'
            f' orbit.'
        )
    n = max(1, min(nmax, cap))
    log_x = math.log(x)
    while True:
        log_h = ln_hn_sq(cfg, zs, n)
        log_terms = np.arange(n + 1) * log_x - log_h
        log_total = float(special.logsumexp(log_terms))
        log_ratio = float(log_terms[n] - log_terms[n - 1])
        if log_ratio < 0:
            ratio = math.exp(log_ratio)
            tail = math.exp(log_terms[n] - log_total) * ratio / (1.0 - ratio)
        else:
            tail = math.inf
        if tail <= tail_tol:
            return log_h, log_total, tail
        if n >= cap:
            if log_ratio >= 0:
                raise DivergenceException(
                    f'\nError: The normalization series diverges at'
                    f' |z|^2 = {x}; terms still grow at n = {n}.'
                )
            raise TruncationException(
                f'\nError: Tail {tail:.3e} still exceeds {tail_tol:.1e} at'
                f' the truncation cap n = {n}.'
            )
        extended = min(2 * n, cap)
        logger.warning('Truncation auto-extended from %d to %d', n, extended)
        n = extended


def build_state(
        cfg: FamilyConfig, zs: ZSpec, z: complex, nmax: int = DEFAULT_NMAX,
        tail_tol: float = TAIL_TOL
) -> CoherentState:
    """
    Build the truncated coefficient vector of |z, alpha; a_1>.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional with phase constant
    :type zs: ZSpec
    :param z: Label, inside the convergence disk
    :type z: complex
    :param nmax: Initial truncation, extended until the tail is negligible
    :type nmax: int
    :param tail_tol: Relative tail mass allowed
    :type tail_tol: float
    :return: The coherent state
    :rtype: CoherentState
    """
    check_compatible(zs, cfg)
    z = complex(z)
    if z == 0:
        return CoherentState(
            cfg, zs, z, np.array([1.0 + 0.0j]), 1.0, 0.0, np.array([0.0])
        )
    x = abs(z) ** 2
    log_h, log_total, tail_rel = _truncate(cfg, zs, x, nmax, tail_tol)
    n = len(log_h) - 1
    energies = build_spectral_table(cfg, n).e
    log_norm = -0.5 * (log_total + math.log1p(tail_rel))
    levels = np.arange(n + 1)
    log_c = log_norm + levels * math.log(abs(z)) - 0.5 * log_h
    phase = levels * cmath.phase(z) - zs.alpha * energies
    c = np.exp(log_c + 1j * phase)
    mass = np.abs(c) ** 2
    suffix = np.cumsum(mass[::-1])[::-1]
    keep = int(np.nonzero(suffix > NEGLIGIBLE_MASS * suffix[0])[0][-1]) + 1
    return CoherentState(
        cfg, zs, z, c[:keep].copy(), math.exp(log_norm),
        tail_rel / (1.0 + tail_rel), energies[:keep].copy()
    )


def normalization(
        cfg: FamilyConfig, zs: ZSpec, x: float, nmax: int = DEFAULT_NMAX,
        tail_tol: float = TAIL_TOL
) -> float:
    """
    Normalization factor N(x) = [sum_n x^n/|h_n|^2]^(-1/2) from the series.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param x: |z|^2, below the squared radius of convergence
    :type x: float
    :param nmax: Initial truncation
    :type nmax: int
    :param tail_tol: Relative tail mass allowed
    :type tail_tol: float
    :return: N(x)
    :rtype: float
    """
    if x < 0:
        raise DomainException(f'\nError: Normalization needs x >= 0, got {x}.')
    check_compatible(zs, cfg)
    if x == 0:
        return 1.0
    _, log_total, tail_rel = _truncate(cfg, zs, x, nmax, tail_tol)
    return math.exp(-0.5 * (log_total + math.log1p(tail_rel)))


def radius_of_convergence(cfg: FamilyConfig, zs: ZSpec, nprobe: int = 200) -> float:
    """
    Estimate of the radius in |z| as the sup of |h_n|^(1/n) over the window
     [nprobe/2, nprobe]; inf when the window still grows or exceeds 1e6.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param nprobe: Highest probed level, nprobe >= 16
    :type nprobe: int
    :return: Radius of convergence in |z|
    :rtype: float
    """
    if nprobe < 16:
        raise DomainException(f'\nError: Radius probe needs nprobe >= 16, got {nprobe}.')
    n = min(nprobe, _cap(cfg, zs))
    if n < 2:
        return 0.0
    log_h = ln_hn_sq(cfg, zs, n)
    window = np.arange(max(1, n // 2), n + 1)
    roots = np.exp(log_h[window] / (2.0 * window))
    estimate = float(np.max(roots))
    if estimate > RADIUS_INFINITE or roots[-1] > RADIUS_GROWTH * roots[0]:
        return math.inf
    return estimate


def overlap(s1: CoherentState, s2: CoherentState) -> complex:
    """
    Overlap <s1|s2> of two states on the same family and functional.

    :param s1: Bra state
    :type s1: CoherentState
    :param s2: Ket state
    :type s2: CoherentState
    :return: sum conj(c_n(s1)) c_n(s2)
    :rtype: complex
    """
    if s1.cfg != s2.cfg or not s1.zs.same_functional(s2.zs):
        raise StateMismatchException(
            '\nError: Overlaps need states on the same family and functional.'
        )
    n = min(len(s1.c), len(s2.c))
    return complex(np.vdot(s1.c[:n], s2.c[:n]))


def _divergent(x: complex, label: str) -> complex:
    if x != 0:
        raise DivergenceException(
            f'\nError: The {label} normalization series has zero radius of'
            f' convergence; cannot evaluate at x = {x}.'
        )
    return 1.0 + 0.0j


def _inside_disk(x: complex, label: str) -> None:
    if abs(x) >= 1:
        raise DivergenceException(
            f'\nError: The {label} normalization series converges only for'
            f' |x| < 1, got x = {x}.'
        )


def series_closed(cfg: FamilyConfig, zs: ZSpec, x: complex) -> complex | None:
    """
    Closed form of S(x) = sum_n x^n/|h_n|^2, or None when the catalog has none.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param x: Argument, real or complex
    :type x: complex
    :return: S(x)
    :rtype: complex | None
    """
    check_compatible(zs, cfg)
    x = complex(x)
    variant = zs.variant
    if variant is ZVariant.CONST:
        if cfg.kind in (FamilyKind.TYPE_C, FamilyKind.TYPE_D):
            return cmath.exp(zs.c ** 2 * x / cfg.gamma_const)
        if cfg.kind is FamilyKind.TYPE_A:
            if abs(cfg.rho - 0.5) > 1e-12:
                return None
            return cmath.cosh(zs.c * cmath.sqrt(x) / cfg.kappa)
        return _divergent(x, 'selfSimilar const')
    if variant is ZVariant.TYPE_C_G:
        _inside_disk(x, 'typeC_G')
        return (1.0 - x) ** (cfg.a1 / ETA)
    nu = 2.0 * cfg.a1 / ETA
    if variant is ZVariant.TYPE_A_PT1:
        _inside_disk(x, 'typeA_PT1')
        return (1.0 - x) ** (-(nu + 1.0))
    if variant is ZVariant.TYPE_A_BG:
        if x == 0:
            return 1.0 + 0.0j
        root = cmath.sqrt(x)
        return complex(
            math.gamma(nu + 1.0) * root ** -nu * bessel_i(nu, 2.0 * root)
        )
    if variant is ZVariant.TYPE_A_WHITTAKER:
        argument = x if x.imag or x.real < 0 else x.real
        return complex(confluent_1f1(2.0 - zs.sigma, 2.0, argument))
    q = cfg.q
    r1 = remainder(cfg, 1)
    if variant is ZVariant.SS_R:
        argument = x * r1 * (1.0 - q) / math.sqrt(q)
        return complex(q_exp(0.5, q, argument if argument.imag else argument.real))
    if variant is ZVariant.SS_RAMANUJAN:
        s = x * r1 * (1.0 - q)
        return complex(q_poch_inf(-s, q) / q_poch_inf(-zs.c * s / q, q))
    return _divergent(x, 'ss_unit')


def normalization_closed(cfg: FamilyConfig, zs: ZSpec, x: float) -> float | None:
    """
    Closed-form normalization factor S(x)^(-1/2), or None.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :param x: |z|^2 >= 0
    :type x: float
    :return: N(x)
    :rtype: float | None
    """
    if x < 0:
        raise DomainException(f'\nError: Normalization needs x >= 0, got {x}.')
    value = series_closed(cfg, zs, x)
    if value is None:
        return None
    return value.real ** -0.5


def overlap_closed(s1: CoherentState, s2: CoherentState) -> complex | None:
    """
    Closed-form overlap N_1 N_2 S(conj(z_1) z_2) for states sharing alpha.

    :param s1: Bra state
    :type s1: CoherentState
    :param s2: Ket state
    :type s2: CoherentState
    :return: <s1|s2>, or None when S has no closed form
    :rtype: complex | None
    """
    if s1.cfg != s2.cfg or s1.zs != s2.zs:
        raise StateMismatchException(
            '\nError: Closed-form overlaps need equal families, functionals'
            ' and phase constants.'
        )
    value = series_closed(s1.cfg, s1.zs, s1.z.conjugate() * s2.z)
    if value is None:
        return None
    return s1.norm_factor * s2.norm_factor * value


def evolve(s: CoherentState, t: float, omega: float = 1.0) -> CoherentState:
    """
    Time evolution, which maps |z, alpha> to |z, alpha + omega t>.

    :param s: State at time 0
    :type s: CoherentState
    :param t: Elapsed time
    :type t: float
    :param omega: Frequency scale
    :type omega: float
    :return: State at time t
    :rtype: CoherentState
    """
    c = s.c * np.exp(-1j * omega * t * s.energies)
    return CoherentState(
        s.cfg, s.zs.with_alpha(s.zs.alpha + omega * t), s.z, c,
        s.norm_factor, s.tail, s.energies.copy()
    )


def is_scalar_exact(cfg: FamilyConfig, zs: ZSpec) -> bool:
    """
    Whether R and Z are constant on the orbit, so that the annihilation
     eigenvalue and the action identity hold as scalar relations.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param zs: Orbit functional
    :type zs: ZSpec
    :return: True for const on typeC or typeD
    :rtype: bool
    """
    return zs.variant is ZVariant.CONST and cfg.kind in (
        FamilyKind.TYPE_C, FamilyKind.TYPE_D
    )


def energy_expectation(s: CoherentState) -> tuple[float, float | None]:
    """
    <H> as sum |c_n|^2 e_n, with the scalar closed form |z Z_0|^2 where it
     is exact.

    :param s: State
    :type s: CoherentState
    :return: (series value, closed value or None)
    :rtype: tuple[float, float | None]
    """
    series = float(np.sum(np.abs(s.c) ** 2 * s.energies))
    if s.z == 0:
        return series, 0.0
    if is_scalar_exact(s.cfg, s.zs):
        return series, abs(s.z * s.zs.c) ** 2
    try:
        shifted = abs(s.z * eval_z(s.zs, s.cfg, 0)) ** 2
        logger.warning(
            'Scalar energy form suppressed for %s on %s; shifted-orbit value'
            ' |z Z_0|^2 = %.12g', s.zs.variant.value, s.cfg.kind.value, shifted
        )
    except DomainException:
        logger.warning(
            'Scalar energy form suppressed for %s on %s; Z_0 is undefined',
            s.zs.variant.value, s.cfg.kind.value
        )
    return series, None


def _require_scalar_exact(s: CoherentState, operation: str) -> None:
    if not is_scalar_exact(s.cfg, s.zs):
        raise UnsupportedConfigurationException(
            f'\nError: {operation} holds as a scalar relation only for const'
            f' functionals on typeC or typeD; {s.zs.variant.value} on'
            f' {s.cfg.kind.value} has an operator-valued eigenvalue.'
        )


def action_variable(s: CoherentState, omega: float = 1.0) -> float:
    """
    Canonical action J with <H> = omega J.

    :param s: State on a scalar-exact configuration
    :type s: CoherentState
    :param omega: Frequency scale
    :type omega: float
    :return: J
    :rtype: float
    """
    if s.z == 0:
        return 0.0
    _require_scalar_exact(s, 'The action identity')
    _, closed = energy_expectation(s)
    return closed / omega


def annihilation_check(s: CoherentState) -> float:
    """
    Residual max_n |sqrt(e_{n+1}) c_{n+1} - lambda c_n| of the annihilation
     eigenvalue relation, with lambda = z Z_0.

    :param s: State on a scalar-exact configuration
    :type s: CoherentState
    :return: Largest residual over the kept levels
    :rtype: float
    """
    if s.z == 0 or s.nmax == 0:
        return 0.0
    _require_scalar_exact(s, 'The annihilation eigenvalue')
    eigenvalue = s.z * eval_z(s.zs, s.cfg, 0)
    lowered = np.sqrt(s.energies[1:]) * s.c[1:]
    return float(np.max(np.abs(lowered - eigenvalue * s.c[:-1])))
