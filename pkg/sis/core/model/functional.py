"""
Catalog of the orbit functionals Z_j that weight each ladder step of a
generalized coherent state, with direct and closed-form orbit products.

Every value is carried as a log-modulus plus an accumulated phase; a product
over thirty orbit points leaves double range otherwise.
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
from sis.core.exception.exception import IncompatibleZSpecException
from sis.core.exception.exception import UnsupportedConfigurationException
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.family import FamilyKind
from sis.core.model.family import orbit_point
from sis.core.model.family import remainder_at
from sis.core.model.family import remainder_sum
from sis.core.numerics.specfun import ln_pochhammer
from sis.core.numerics.specfun import ln_q_poch

logger = logging.getLogger(__name__)

''' Absolute tolerance on the gamma = eta/2 constraint of PT1 and BG '''
GAMMA_CONSTRAINT_TOL = 1e-12


class ZVariant(Enum):
    CONST = 'const'
    TYPE_C_G = 'typeC_G'
    TYPE_A_PT1 = 'typeA_PT1'
    TYPE_A_BG = 'typeA_BG'
    TYPE_A_WHITTAKER = 'typeA_whittaker'
    SS_R = 'ss_R'
    SS_RAMANUJAN = 'ss_ramanujan'
    SS_UNIT = 'ss_unit'

    @classmethod
    def parse(cls, name: str | ZVariant) -> ZVariant:
        if isinstance(name, ZVariant):
            return name
        try:
            return cls(name)
        except ValueError:
            raise IncompatibleZSpecException(
                f'\nError: Unknown functional variant {name}. Expected one'
                f' of {[variant.value for variant in cls]}.'
            )


''' Family kind each variant is built on; None means any kind '''
VARIANT_KINDS: dict[ZVariant, FamilyKind | None] = {
    ZVariant.CONST: None,
    ZVariant.TYPE_C_G: FamilyKind.TYPE_C,
    ZVariant.TYPE_A_PT1: FamilyKind.TYPE_A,
    ZVariant.TYPE_A_BG: FamilyKind.TYPE_A,
    ZVariant.TYPE_A_WHITTAKER: FamilyKind.TYPE_A,
    ZVariant.SS_R: FamilyKind.SELF_SIMILAR,
    ZVariant.SS_RAMANUJAN: FamilyKind.SELF_SIMILAR,
    ZVariant.SS_UNIT: FamilyKind.SELF_SIMILAR,
}


class GFunction(NamedTuple):
    """Affine auxiliary map g(a; c, d) = c a + d"""
    c: float
    d: float


def g_aux(a: float, g: GFunction) -> float:
    """
    Evaluate g(a; c, d) = c a + d.

    :param a: Orbit parameter
    :type a: float
    :param g: Affine coefficients
    :type g: GFunction
    :return: c a + d
    :rtype: float
    """
    return g.c * a + g.d


class ZSpec:
    """
    A catalog functional Z_j together with its temporal-stability phase
     constant alpha.
    """

    def __init__(
            self, variant: str | ZVariant, alpha: float = 0.0,
            c: float | None = None, sigma: float | None = None
    ):
        """
        Initialize an instance of ZSpec.

        :param variant: Catalog variant
        :type variant: str | ZVariant
        :param alpha: Phase constant; Z_j carries exp(-i alpha R(a_j))
        :type alpha: float
        :param c: Constant of const (default 1) or ss_ramanujan (default 0)
        :type c: float | None
        :param sigma: Whittaker index of typeA_whittaker
        :type sigma: float | None
        """
        self._variant: ZVariant = ZVariant.parse(variant)
        self._alpha: float = float(alpha)
        if c is None:
            c = {ZVariant.CONST: 1.0, ZVariant.SS_RAMANUJAN: 0.0}.get(
                self._variant
            )
        self._c: float | None = None if c is None else float(c)
        self._sigma: float | None = None if sigma is None else float(sigma)
        self._validate()

    def _validate(self) -> None:
        if self._variant is ZVariant.CONST and not self._c > 0:
            raise IncompatibleZSpecException(
                f'\nError: const requires c > 0, got c = {self._c}.'
            )
        if self._variant is ZVariant.SS_RAMANUJAN and not 0 <= self._c < 1:
            raise IncompatibleZSpecException(
                f'\nError: ss_ramanujan requires 0 <= c < 1, got c = {self._c}.'
            )
        if self._variant is ZVariant.TYPE_A_WHITTAKER:
            if self._sigma is None:
                raise IncompatibleZSpecException(
                    '\nError: typeA_whittaker needs sigma.'
                )
            if not self._sigma < 2 or self._sigma == 1:
                raise IncompatibleZSpecException(
                    f'\nError: typeA_whittaker requires sigma < 2 and'
                    f' sigma != 1, got sigma = {self._sigma}.'
                )

    @property
    def variant(self) -> ZVariant:
        return self._variant

    @property
    def alpha(self) -> float:
        return self._alpha

    @property
    def c(self) -> float | None:
        return self._c

    @property
    def sigma(self) -> float | None:
        return self._sigma

    def with_alpha(self, alpha: float) -> ZSpec:
        """
        Copy of this functional with another phase constant.

        :param alpha: New phase constant
        :type alpha: float
        :return: Functional with the new alpha
        :rtype: ZSpec
        """
        return ZSpec(self._variant, alpha, self._c, self._sigma)

    def same_functional(self, other: ZSpec) -> bool:
        """
        Whether two specs share variant and constants, ignoring alpha.

        :param other: Spec to compare against
        :type other: ZSpec
        :return: Equality up to alpha
        :rtype: bool
        """
        return self.with_alpha(0.0) == other.with_alpha(0.0)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {'variant': self._variant.value}
        if self._c is not None:
            data['c'] = self._c
        if self._sigma is not None:
            data['sigma'] = self._sigma
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any], alpha: float = 0.0) -> ZSpec:
        return ZSpec(data['variant'], alpha, data.get('c'), data.get('sigma'))

    def _key(self) -> tuple:
        return self._variant, self._alpha, self._c, self._sigma

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZSpec):
            return False
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f'ZSpec({self.to_dict()}, alpha={self._alpha})'


def check_compatible(zs: ZSpec, cfg: FamilyConfig) -> None:
    """
    Raise unless the functional can be evaluated on the family.

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    """
    kind = VARIANT_KINDS[zs.variant]
    if kind is not None and kind is not cfg.kind:
        raise IncompatibleZSpecException(
            f'\nError: Functional {zs.variant.value} is built on {kind.value}'
            f' families, not on {cfg.kind.value}.'
        )
    if zs.variant is ZVariant.TYPE_C_G and not cfg.a1 / ETA < 0:
        raise IncompatibleZSpecException(
            f'\nError: typeC_G requires rho_C = a1/eta < 0, got'
            f' {cfg.a1 / ETA}.'
        )
    if zs.variant in (ZVariant.TYPE_A_PT1, ZVariant.TYPE_A_BG):
        if abs(cfg.gamma - 0.5 * ETA) > GAMMA_CONSTRAINT_TOL:
            raise IncompatibleZSpecException(
                f'\nError: {zs.variant.value} requires gamma = eta/2 ='
                f' {0.5 * ETA}, got gamma = {cfg.gamma}.'
            )


def _nu(cfg: FamilyConfig) -> float:
    return 2.0 * cfg.a1 / ETA


def _g_terms(zs: ZSpec, cfg: FamilyConfig) -> tuple[list, list]:
    """
    Affine factors of a translation-orbit variant as (numerator, denominator)
    lists of (g, index offset, power); Z_j is prod g(a_{j+offset})^power.
    """
    kappa = cfg.kappa
    nu = _nu(cfg)
    if zs.variant is ZVariant.TYPE_C_G:
        return [(GFunction(-cfg.gamma_const / ETA, 0.0), 0, 0.5)], []
    if zs.variant is ZVariant.TYPE_A_PT1:
        return [
            (GFunction(2 * kappa / ETA, kappa), 0, 0.5),
            (GFunction(2 * kappa / ETA, 2 * kappa), 0, 0.5),
        ], []
    if zs.variant is ZVariant.TYPE_A_BG:
        return [
            (GFunction(2 / ETA, 1.0), 0, 0.5),
            (GFunction(2 / ETA, 2.0), 0, 0.5),
        ], [(GFunction(1 / (kappa * ETA), (1 + nu / 2) / kappa), 0, 1.0)]
    sigma = zs.sigma
    beta = cfg.beta
    return [
        (GFunction(beta, beta * cfg.gamma), 0, 0.5),
        (GFunction(beta, beta * cfg.gamma + kappa / 2), 0, 0.5),
        (GFunction(4 / ETA, -2 * nu - 4 * sigma), 2, 0.5),
    ], [
        (GFunction(1 / ETA, cfg.rho + cfg.gamma / ETA), 0, 0.5),
        (GFunction(1 / ETA, -nu / 2), 2, 0.5),
    ]


def _sqrt_checked(radicand: float, j: int, zs: ZSpec) -> float:
    if radicand < 0:
        raise DomainException(
            f'\nError: {zs.variant.value} has a negative radicand'
            f' {radicand} at orbit index j = {j}.'
        )
    return math.sqrt(radicand)


def z_modulus(zs: ZSpec, cfg: FamilyConfig, j: int) -> float:
    """
    Modulus |Z_j| at orbit index j (j = 0 is the backward point a_0).

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param j: Orbit index, j >= 0
    :type j: int
    :return: |Z_j|
    :rtype: float
    """
    check_compatible(zs, cfg)
    if j < 0:
        raise DomainException(f'\nError: Orbit index must be >= 0, got {j}.')
    variant = zs.variant
    if variant is ZVariant.CONST:
        modulus = zs.c
    elif variant is ZVariant.SS_R:
        modulus = remainder_at(cfg, orbit_point(cfg, j))
    elif variant is ZVariant.SS_RAMANUJAN:
        ratio = cfg.a1 / orbit_point(cfg, j + 1)
        modulus = remainder_at(cfg, orbit_point(cfg, j)) * _sqrt_checked(
            1.0 - zs.c * ratio, j, zs
        )
    elif variant is ZVariant.SS_UNIT:
        modulus = 1.0
    else:
        numerator, denominator = _g_terms(zs, cfg)
        radicand = math.prod(
            g_aux(orbit_point(cfg, j + s), g) for g, s, _ in numerator
        )
        plain = 1.0
        for g, s, power in denominator:
            value = g_aux(orbit_point(cfg, j + s), g)
            if value == 0:
                raise DomainException(
                    f'\nError: {variant.value} divides by zero at orbit'
                    f' index j = {j}.'
                )
            if power == 0.5:
                radicand /= value
            else:
                plain *= value
        modulus = _sqrt_checked(radicand, j, zs) / plain
    if not modulus > 0 or not math.isfinite(modulus):
        raise DomainException(
            f'\nError: {variant.value} has modulus {modulus} at orbit index'
            f' j = {j}; a functional must be finite and nonzero.'
        )
    return modulus


def eval_z(zs: ZSpec, cfg: FamilyConfig, j: int) -> complex:
    """
    Functional value Z_j = |Z_j| exp(-i alpha R(a_j)).

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param j: Orbit index, j >= 0
    :type j: int
    :return: Z_j
    :rtype: complex
    """
    modulus = z_modulus(zs, cfg, j)
    return modulus * cmath.exp(-1j * zs.alpha * remainder_at(cfg, orbit_point(cfg, j)))


def log_z_factors(zs: ZSpec, cfg: FamilyConfig, j: int, n: int) -> ndarray:
    """
    Log-moduli ln|Z_j| ... ln|Z_{j+n-1}|.

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param j: First orbit index
    :type j: int
    :param n: Number of factors
    :type n: int
    :return: Log-moduli
    :rtype: ndarray
    """
    return np.array([math.log(z_modulus(zs, cfg, j + k)) for k in range(n)])


def _check_length(n: int) -> None:
    if n < 0:
        raise DomainException(f'\nError: Product length must be >= 0, got {n}.')


def z_product_direct(
        zs: ZSpec, cfg: FamilyConfig, n: int, j: int = 1
) -> complex:
    """
    Orbit product Z_j Z_{j+1} ... Z_{j+n-1} by direct multiplication.

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param n: Number of factors, n >= 0
    :type n: int
    :param j: First orbit index
    :type j: int
    :return: The product, 1 for n = 0
    :rtype: complex
    """
    _check_length(n)
    log_modulus = float(np.sum(log_z_factors(zs, cfg, j, n)))
    phase = -zs.alpha * sum(
        remainder_at(cfg, orbit_point(cfg, j + k)) for k in range(n)
    )
    return cmath.exp(complex(log_modulus, phase))


def ln_g_product(
        g: GFunction, cfg: FamilyConfig, j: int, n: int
) -> tuple[float, float]:
    """
    Closed form of g(a_j) g(a_{j+1}) ... g(a_{j+n-1}) on a translation orbit.

    With step s = +eta (typeA) or -eta (typeC) the factors are c s (b + k)
    for b = j - 1 + (c a_1 + d)/(c s), so the product is (c s)^n (b)_n.

    :param g: Affine map
    :type g: GFunction
    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param j: First orbit index
    :type j: int
    :param n: Number of factors, n >= 0
    :type n: int
    :return: (log|product|, sign), the log is -inf for a vanishing product
    :rtype: tuple[float, float]
    """
    _check_length(n)
    if n == 0:
        return 0.0, 1.0
    if not cfg.kind.is_translation:
        raise UnsupportedConfigurationException(
            f'\nError: g-products are defined on translation orbits, not on'
            f' {cfg.kind.value}.'
        )
    step = {FamilyKind.TYPE_A: ETA, FamilyKind.TYPE_C: -ETA}.get(cfg.kind, 0.0)
    if g.c == 0 or step == 0:
        value = g_aux(orbit_point(cfg, j), g)
        if value == 0:
            return -math.inf, 0.0
        return n * math.log(abs(value)), math.copysign(1.0, value) ** n
    scale = g.c * step
    b = j - 1 + g_aux(cfg.a1, g) / scale
    log_poch, sign_poch = ln_pochhammer(b, n)
    return n * math.log(abs(scale)) + log_poch, math.copysign(1.0, scale) ** n * sign_poch


def _ln_sqrt_g_closed(zs: ZSpec, cfg: FamilyConfig, j: int, n: int) -> float:
    numerator, denominator = _g_terms(zs, cfg)
    radicand_log = 0.0
    radicand_sign = 1.0
    plain_log = 0.0
    for terms, direction in ((numerator, 1.0), (denominator, -1.0)):
        for g, s, power in terms:
            log_value, sign = ln_g_product(g, cfg, j + s, n)
            if power == 0.5:
                radicand_log += direction * log_value
                radicand_sign *= sign
            else:
                if sign <= 0:
                    raise DomainException(
                        f'\nError: {zs.variant.value} has a non-positive'
                        f' factor within orbit indices {j}..{j + n - 1}.'
                    )
                plain_log += direction * log_value
    if radicand_sign <= 0 or math.isnan(radicand_log):
        raise DomainException(
            f'\nError: {zs.variant.value} has a negative radicand within'
            f' orbit indices {j}..{j + n - 1}.'
        )
    return 0.5 * radicand_log + plain_log


def ln_z_product_closed_modulus(
        zs: ZSpec, cfg: FamilyConfig, n: int, j: int = 1
) -> float:
    """
    Log-modulus of the orbit product from Gamma and q-Pochhammer closed forms.

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param n: Number of factors, n >= 0
    :type n: int
    :param j: First orbit index
    :type j: int
    :return: log|Z_j ... Z_{j+n-1}|
    :rtype: float
    """
    check_compatible(zs, cfg)
    _check_length(n)
    if n == 0:
        return 0.0
    variant = zs.variant
    if variant is ZVariant.CONST:
        return n * math.log(zs.c)
    if variant is ZVariant.SS_UNIT:
        return 0.0
    if variant in (ZVariant.SS_R, ZVariant.SS_RAMANUJAN):
        q = cfg.q
        log_modulus = (
            n * math.log(remainder_at(cfg, orbit_point(cfg, j)))
            + 0.5 * n * (n - 1) * math.log(q)
        )
        if variant is ZVariant.SS_RAMANUJAN:
            log_poch, sign = ln_q_poch(zs.c * q ** -j, 1.0 / q, n)
            if sign <= 0:
                raise DomainException(
                    f'\nError: ss_ramanujan has a negative radicand within'
                    f' orbit indices {j}..{j + n - 1}.'
                )
            log_modulus += 0.5 * log_poch
        return log_modulus
    return _ln_sqrt_g_closed(zs, cfg, j, n)


def z_product_closed(
        zs: ZSpec, cfg: FamilyConfig, n: int, j: int = 1
) -> complex:
    """
    Orbit product Z_j ... Z_{j+n-1} from its closed form, with phase
     exp(-i alpha (R(a_j) + ... + R(a_{j+n-1}))).

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :param n: Number of factors, n >= 0
    :type n: int
    :param j: First orbit index
    :type j: int
    :return: The product, 1 for n = 0
    :rtype: complex
    """
    log_modulus = ln_z_product_closed_modulus(zs, cfg, n, j)
    phase = -zs.alpha * remainder_sum(cfg, j, n)
    return cmath.exp(complex(log_modulus, phase))


def valid_order(zs: ZSpec, cfg: FamilyConfig) -> int | None:
    """
    Largest n for which Z_1 ... Z_n all exist, or None when unbounded.

    Only ss_ramanujan with c > 0 is bounded: its factor 1 - c q^{-j} turns
    negative once q^j <= c.

    :param zs: Functional
    :type zs: ZSpec
    :param cfg: Family
    :type cfg: FamilyConfig
    :return: Highest valid orbit index, or None
    :rtype: int | None
    """
    if zs.variant is not ZVariant.SS_RAMANUJAN or zs.c == 0:
        return None
    q = cfg.q
    n = max(0, math.floor(math.log(zs.c) / math.log(q)))
    while n > 0 and 1.0 - zs.c * q ** -n <= 0:
        n -= 1
    while 1.0 - zs.c * q ** -(n + 1) > 0:
        n += 1
    return n
