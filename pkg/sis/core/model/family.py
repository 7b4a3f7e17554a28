from __future__ import annotations

import math
from enum import Enum
from typing import Any

import numpy as np

from sis.core.exception.exception import DeferredFamilyException
from sis.core.exception.exception import DomainException
from sis.core.exception.exception import InvalidFamilyConfigException
from sis.core.exception.exception import UnsupportedConfigurationException

''' Translation step of the parameter orbit, sqrt(hbar / 2 m Omega) = 1/sqrt(2) '''
ETA = 1.0 / math.sqrt(2.0)

''' Kinds that are recognised but whose coherent states are not built '''
DEFERRED_KINDS = {
    'typeB': 'Morse-like systems have a finite number of bound states',
    'typeE': 'type E systems have energy-degenerate eigenstates',
    'typeF': 'type F systems have energy-degenerate eigenstates',
}


class FamilyKind(Enum):
    """
    Shape-invariant family kinds with closed-form coherent states.
    """
    TYPE_A = 'typeA'
    TYPE_C = 'typeC'
    TYPE_D = 'typeD'
    SELF_SIMILAR = 'selfSimilar'

    @classmethod
    def parse(cls, name: str | FamilyKind) -> FamilyKind:
        """
        Resolve a kind from its config name.

        :param name: Config name such as 'typeA', or a FamilyKind
        :type name: str | FamilyKind
        :return: The matching kind
        :rtype: FamilyKind
        """
        if isinstance(name, FamilyKind):
            return name
        if name in DEFERRED_KINDS:
            raise DeferredFamilyException(
                f'\nError: Family {name} is deferred: {DEFERRED_KINDS[name]},'
                f' so no coherent-state construction is given for it.'
            )
        try:
            return cls(name)
        except ValueError:
            raise InvalidFamilyConfigException(
                f'\nError: Unknown family kind {name}. Expected one of'
                f' {[kind.value for kind in cls]}.'
            )

    @property
    def is_translation(self) -> bool:
        return self in (FamilyKind.TYPE_A, FamilyKind.TYPE_C, FamilyKind.TYPE_D)


class FamilyConfig:
    """
    A shape-invariant family: its kind and constants, which fix the
     parameter orbit, the remainders and the superpotential. Natural units
     hbar = m = Omega = 1 are used throughout.
    """

    def __init__(
            self, kind: str | FamilyKind, a1: float = 0.0, beta: float = ETA,
            gamma: float = 0.0, delta: float = 0.0, lam: float = 0.0,
            q: float | None = None, r_scale: float | None = None
    ):
        """
        Initialize an instance of FamilyConfig.

        :param kind: Family kind
        :type kind: str | FamilyKind
        :param a1: Initial orbit parameter (ignored by typeD)
        :type a1: float
        :param beta: Family constant beta
        :type beta: float
        :param gamma: Family constant gamma
        :type gamma: float
        :param delta: Family constant delta
        :type delta: float
        :param lam: Family constant lambda (coordinate offset of typeA)
        :type lam: float
        :param q: Scaling ratio of a selfSimilar orbit, 0 < q < 1
        :type q: float | None
        :param r_scale: Remainder coefficient of a selfSimilar orbit,
         R(a) = r_scale * a
        :type r_scale: float | None
        """
        self._kind: FamilyKind = FamilyKind.parse(kind)
        self._a1: float = float(a1)
        self._beta: float = float(beta)
        self._gamma: float = float(gamma)
        self._delta: float = float(delta)
        self._lam: float = float(lam)
        self._q: float | None = None if q is None else float(q)
        self._r_scale: float | None = (
            None if r_scale is None else float(r_scale)
        )
        self._validate()

    def _validate(self) -> None:
        values = [self._a1, self._beta, self._gamma, self._delta, self._lam]
        if not all(math.isfinite(v) for v in values):
            raise InvalidFamilyConfigException(
                '\nError: Family constants must all be finite.'
            )
        if self._kind is FamilyKind.SELF_SIMILAR:
            if self._q is None or self._r_scale is None:
                raise InvalidFamilyConfigException(
                    '\nError: A selfSimilar family needs both q and r_scale.'
                )
            if not 0 < self._q < 1:
                raise InvalidFamilyConfigException(
                    f'\nError: selfSimilar requires 0 < q < 1, got q = {self._q}.'
                )
            if not self._r_scale > 0 or not self._r_scale * self._a1 > 0:
                raise InvalidFamilyConfigException(
                    f'\nError: selfSimilar requires r_scale > 0 and'
                    f' r_scale * a1 > 0, got r_scale = {self._r_scale},'
                    f' a1 = {self._a1}.'
                )
            return
        if not self._beta > 0:
            raise InvalidFamilyConfigException(
                f'\nError: {self._kind.value} requires beta > 0, got'
                f' beta = {self._beta}.'
            )
        if self._kind is FamilyKind.TYPE_A and not self.rho > 0:
            raise InvalidFamilyConfigException(
                f'\nError: typeA requires rho = (a1 + gamma)/eta > 0, got'
                f' rho = {self.rho}.'
            )

    @property
    def kind(self) -> FamilyKind:
        """
        Get the family kind.

        :return: Family kind
        :rtype: FamilyKind
        """
        return self._kind

    @property
    def a1(self) -> float:
        return self._a1

    @property
    def beta(self) -> float:
        return self._beta

    @property
    def gamma(self) -> float:
        return self._gamma

    @property
    def delta(self) -> float:
        return self._delta

    @property
    def lam(self) -> float:
        return self._lam

    @property
    def q(self) -> float | None:
        return self._q

    @property
    def r_scale(self) -> float | None:
        return self._r_scale

    @property
    def eta(self) -> float:
        """
        Get the orbit translation step, derived and never configured.

        :return: 1/sqrt(2)
        :rtype: float
        """
        return ETA

    @property
    def kappa(self) -> float:
        """
        Get kappa = eta * beta, the typeA energy scale.

        :return: eta * beta
        :rtype: float
        """
        return ETA * self._beta

    @property
    def rho(self) -> float:
        """
        Get rho = (a1 + gamma)/eta, the typeA orbit offset.

        :return: (a1 + gamma)/eta
        :rtype: float
        """
        return (self._a1 + self._gamma) / ETA

    @property
    def gamma_const(self) -> float:
        """
        Get the constant remainder sqrt(2) * beta of typeC and typeD.

        :return: sqrt(2) * beta
        :rtype: float
        """
        return math.sqrt(2.0) * self._beta

    def shifted(self, k: int) -> FamilyConfig:
        """
        Re-base the family on the orbit point a_{1+k}.

        :param k: Number of orbit steps to move forward, k >= 0
        :type k: int
        :return: Family whose a1 is a_{1+k} of this family
        :rtype: FamilyConfig
        """
        if k < 0:
            raise DomainException(f'\nError: Orbit shift needs k >= 0, got {k}.')
        return FamilyConfig(
            self._kind, orbit_point(self, 1 + k), self._beta, self._gamma,
            self._delta, self._lam, self._q, self._r_scale
        )

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            'kind': self._kind.value,
            'a1': self._a1,
            'beta': self._beta,
            'gamma': self._gamma,
            'delta': self._delta,
            'lambda': self._lam,
        }
        if self._kind is FamilyKind.SELF_SIMILAR:
            data['q'] = self._q
            data['r_scale'] = self._r_scale
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FamilyConfig:
        """
        Instantiate a family from its JSON block.

        :param data: Family block with 'kind' and optional constants
        :type data: dict[str, Any]
        :return: The family
        :rtype: FamilyConfig
        """
        return FamilyConfig(
            data['kind'], data.get('a1', 0.0), data.get('beta', ETA),
            data.get('gamma', 0.0), data.get('delta', 0.0),
            data.get('lambda', 0.0), data.get('q'), data.get('r_scale')
        )

    def _key(self) -> tuple:
        return (
            self._kind, self._a1, self._beta, self._gamma, self._delta,
            self._lam, self._q, self._r_scale
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FamilyConfig):
            return False
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f'FamilyConfig({self.to_dict()})'


def orbit_point(cfg: FamilyConfig, k: int) -> float:
    """
    Orbit parameter a_k; k = 0 is the point one step before a1.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param k: Orbit index, k >= 0
    :type k: int
    :return: a_k
    :rtype: float
    """
    if k < 0:
        raise DomainException(f'\nError: Orbit index must be >= 0, got {k}.')
    if cfg.kind is FamilyKind.TYPE_A:
        return cfg.a1 + (k - 1) * ETA
    if cfg.kind is FamilyKind.TYPE_C:
        return cfg.a1 - (k - 1) * ETA
    if cfg.kind is FamilyKind.TYPE_D:
        return cfg.beta
    return cfg.a1 * cfg.q ** (k - 1)


def parameter_orbit(
        cfg: FamilyConfig, count: int, include_a0: bool = False
) -> list[float]:
    """
    Orbit parameters a_1 ... a_count, optionally preceded by a_0.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param count: Number of forward orbit points, count >= 1
    :type count: int
    :param include_a0: Prepend the backward point a_0
    :type include_a0: bool
    :return: Orbit parameters
    :rtype: list[float]
    """
    if count < 1:
        raise DomainException(f'\nError: Orbit count must be >= 1, got {count}.')
    start = 0 if include_a0 else 1
    return [orbit_point(cfg, k) for k in range(start, count + 1)]


def remainder_at(cfg: FamilyConfig, a: float) -> float:
    """
    Remainder R(a) of the shape-invariance condition at parameter a.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param a: Orbit parameter
    :type a: float
    :return: R(a)
    :rtype: float
    """
    if cfg.kind is FamilyKind.TYPE_A:
        return cfg.beta ** 2 * ETA * (2.0 * (a + cfg.gamma) + ETA)
    if cfg.kind in (FamilyKind.TYPE_C, FamilyKind.TYPE_D):
        return cfg.gamma_const
    return cfg.r_scale * a


def remainder(cfg: FamilyConfig, k: int) -> float:
    """
    Remainder R(a_k) at the k-th orbit point.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param k: Orbit index, k >= 1 (k = 0 gives R(a_0))
    :type k: int
    :return: R(a_k)
    :rtype: float
    """
    return remainder_at(cfg, orbit_point(cfg, k))


def remainder_sum(cfg: FamilyConfig, start: int, count: int) -> float:
    """
    Closed form of R(a_start) + ... + R(a_{start+count-1}).

    :param cfg: Family
    :type cfg: FamilyConfig
    :param start: First orbit index, start >= 0
    :type start: int
    :param count: Number of terms, count >= 0
    :type count: int
    :return: Sum of remainders
    :rtype: float
    """
    if count < 0:
        raise DomainException(f'\nError: Sum length must be >= 0, got {count}.')
    if count == 0:
        return 0.0
    if cfg.kind is FamilyKind.TYPE_A:
        m = start - 1
        return cfg.kappa ** 2 * count * (2 * m + count + 2.0 * cfg.rho)
    if cfg.kind in (FamilyKind.TYPE_C, FamilyKind.TYPE_D):
        return count * cfg.gamma_const
    return remainder(cfg, start) * (1.0 - cfg.q ** count) / (1.0 - cfg.q)


def _typeA_angle(cfg: FamilyConfig, x: Any) -> Any:
    u = cfg.beta * (np.asarray(x, dtype=float) + cfg.lam)
    if np.any(u <= 0) or np.any(u >= math.pi):
        raise DomainException(
            f'\nError: typeA needs beta (x + lambda) in (0, pi), i.e. x in'
            f' ({-cfg.lam}, {math.pi / cfg.beta - cfg.lam}).'
        )
    return u


def _check_typeC(x: Any) -> None:
    if np.any(np.asarray(x) <= 0):
        raise DomainException('\nError: typeC is defined for x > 0.')


def _unsupported(cfg: FamilyConfig) -> UnsupportedConfigurationException:
    return UnsupportedConfigurationException(
        f'\nError: {cfg.kind.value} has no closed-form superpotential in'
        f' position space.'
    )


def _scalar(value: Any) -> Any:
    return float(value) if np.ndim(value) == 0 else value


def superpotential(cfg: FamilyConfig, x: Any, a: float | None = None) -> Any:
    """
    Superpotential W(x, a).

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param x: Position(s)
    :type x: float | ndarray
    :param a: Orbit parameter, defaults to a1
    :type a: float | None
    :return: W(x, a)
    :rtype: float | ndarray
    """
    a = cfg.a1 if a is None else a
    if cfg.kind is FamilyKind.TYPE_D:
        return _scalar(cfg.beta * np.asarray(x, dtype=float) + cfg.delta)
    if cfg.kind is FamilyKind.TYPE_C:
        _check_typeC(x)
        xs = np.asarray(x, dtype=float)
        return _scalar((a + cfg.delta) / xs + 0.5 * cfg.beta * xs)
    if cfg.kind is FamilyKind.TYPE_A:
        u = _typeA_angle(cfg, x)
        return _scalar(
            -cfg.beta * (a + cfg.gamma) / np.tan(u) - cfg.delta / np.sin(u)
        )
    raise _unsupported(cfg)


def superpotential_derivative(
        cfg: FamilyConfig, x: Any, a: float | None = None
) -> Any:
    """
    Analytic dW/dx.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param x: Position(s)
    :type x: float | ndarray
    :param a: Orbit parameter, defaults to a1
    :type a: float | None
    :return: dW/dx at (x, a)
    :rtype: float | ndarray
    """
    a = cfg.a1 if a is None else a
    if cfg.kind is FamilyKind.TYPE_D:
        return _scalar(np.full(np.shape(x), cfg.beta))
    if cfg.kind is FamilyKind.TYPE_C:
        _check_typeC(x)
        xs = np.asarray(x, dtype=float)
        return _scalar(-(a + cfg.delta) / xs ** 2 + 0.5 * cfg.beta)
    if cfg.kind is FamilyKind.TYPE_A:
        u = _typeA_angle(cfg, x)
        csc = 1.0 / np.sin(u)
        return _scalar(
            cfg.beta ** 2 * (a + cfg.gamma) * csc ** 2
            + cfg.beta * cfg.delta * csc / np.tan(u)
        )
    raise _unsupported(cfg)


def superpotential_integral(
        cfg: FamilyConfig, x: Any, a: float | None = None
) -> Any:
    """
    Analytic antiderivative of W in x, up to an additive constant.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param x: Position(s)
    :type x: float | ndarray
    :param a: Orbit parameter, defaults to a1
    :type a: float | None
    :return: Antiderivative of W at (x, a)
    :rtype: float | ndarray
    """
    a = cfg.a1 if a is None else a
    if cfg.kind is FamilyKind.TYPE_D:
        xs = np.asarray(x, dtype=float)
        return _scalar(0.5 * cfg.beta * xs ** 2 + cfg.delta * xs)
    if cfg.kind is FamilyKind.TYPE_C:
        _check_typeC(x)
        xs = np.asarray(x, dtype=float)
        return _scalar((a + cfg.delta) * np.log(xs) + 0.25 * cfg.beta * xs ** 2)
    if cfg.kind is FamilyKind.TYPE_A:
        u = _typeA_angle(cfg, x)
        return _scalar(
            -(a + cfg.gamma) * np.log(np.sin(u))
            - cfg.delta / cfg.beta * np.log(np.tan(0.5 * u))
        )
    raise _unsupported(cfg)


def partner_potentials(
        cfg: FamilyConfig, x: Any, a: float | None = None
) -> tuple[Any, Any]:
    """
    SUSY partner potentials V- = W^2 - eta W' and V+ = W^2 + eta W'.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param x: Position(s)
    :type x: float | ndarray
    :param a: Orbit parameter, defaults to a1
    :type a: float | None
    :return: (V-, V+)
    :rtype: tuple[float | ndarray, float | ndarray]
    """
    w = superpotential(cfg, x, a)
    dw = superpotential_derivative(cfg, x, a)
    return w ** 2 - ETA * dw, w ** 2 + ETA * dw


def shape_invariance_residual(cfg: FamilyConfig, x: Any, k: int = 1) -> Any:
    """
    V+(x, a_k) - V-(x, a_{k+1}) - R(a_k), zero for a shape-invariant family.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param x: Position(s)
    :type x: float | ndarray
    :param k: Orbit index, k >= 1
    :type k: int
    :return: Residual of the shape-invariance condition
    :rtype: float | ndarray
    """
    _, v_plus = partner_potentials(cfg, x, orbit_point(cfg, k))
    v_minus, _ = partner_potentials(cfg, x, orbit_point(cfg, k + 1))
    return v_plus - v_minus - remainder(cfg, k)
