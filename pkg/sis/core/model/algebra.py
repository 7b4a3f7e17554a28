from __future__ import annotations

import math

import numpy as np
from numpy import ndarray
from scipy import special

from sis.core.exception.exception import DomainException
from sis.core.exception.exception import IndexOutOfRangeException
from sis.core.model.family import FamilyConfig
from sis.core.model.family import FamilyKind
from sis.core.model.family import remainder
from sis.core.numerics.specfun import ln_q_poch


class SpectralTable:
    """
    Remainders R(a_1..a_nmax), energy levels e_0..e_nmax and the log nested
     products ln P_0..ln P_nmax of one parameter orbit.
    """

    def __init__(
            self, cfg: FamilyConfig, nmax: int, r_seq: ndarray, e: ndarray,
            ln_p: ndarray
    ):
        """
        Initialize an instance of SpectralTable.

        :param cfg: Family the orbit belongs to
        :type cfg: FamilyConfig
        :param nmax: Highest level in the table
        :type nmax: int
        :param r_seq: Remainders R(a_1) ... R(a_nmax)
        :type r_seq: ndarray
        :param e: Energy levels e_0 = 0, e_1 ... e_nmax
        :type e: ndarray
        :param ln_p: Log nested products ln P_0 = 0 ... ln P_nmax
        :type ln_p: ndarray
        """
        self._cfg: FamilyConfig = cfg
        self._nmax: int = nmax
        self._r_seq: ndarray = r_seq
        self._e: ndarray = e
        self._ln_p: ndarray = ln_p
        for array in (self._r_seq, self._e, self._ln_p):
            array.setflags(write=False)

    @property
    def cfg(self) -> FamilyConfig:
        return self._cfg

    @property
    def nmax(self) -> int:
        return self._nmax

    @property
    def r_seq(self) -> ndarray:
        """
        Get the remainder sequence, index k-1 holding R(a_k).

        :return: Remainders
        :rtype: ndarray
        """
        return self._r_seq

    @property
    def e(self) -> ndarray:
        """
        Get the energy levels, index n holding e_n.

        :return: Energy levels
        :rtype: ndarray
        """
        return self._e

    @property
    def ln_p(self) -> ndarray:
        """
        Get the log nested products, index n holding ln P_n.

        :return: Log nested products
        :rtype: ndarray
        """
        return self._ln_p

    def check_index(self, n: int) -> None:
        if not 0 <= n <= self._nmax:
            raise IndexOutOfRangeException(
                f'\nError: Level {n} lies outside the table range'
                f' [0, {self._nmax}].'
            )


def build_spectral_table(cfg: FamilyConfig, nmax: int) -> SpectralTable:
    """
    Build the spectral table of the orbit starting at cfg.a1.

    P_n is the product over k = 1..n of R(a_k) + ... + R(a_n), accumulated in
    log space.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param nmax: Highest level, nmax >= 1
    :type nmax: int
    :return: Spectral table
    :rtype: SpectralTable
    """
    if nmax < 1:
        raise DomainException(f'\nError: Table needs nmax >= 1, got {nmax}.')
    r_seq = np.array([remainder(cfg, k) for k in range(1, nmax + 1)])
    e = np.concatenate(([0.0], np.cumsum(r_seq)))
    ln_p = np.zeros(nmax + 1)
    for n in range(1, nmax + 1):
        ln_p[n] = np.sum(np.log(np.cumsum(r_seq[n - 1::-1])))
    return SpectralTable(cfg, nmax, r_seq, e, ln_p)


def nested_product(table: SpectralTable, n: int) -> float:
    """
    Nested remainder product P_n, with P_0 = 1.

    :param table: Spectral table
    :type table: SpectralTable
    :param n: Level, 0 <= n <= nmax
    :type n: int
    :return: P_n
    :rtype: float
    """
    table.check_index(n)
    return math.exp(table.ln_p[n])


def nested_product_from_levels(table: SpectralTable, n: int) -> float:
    """
    P_n as the product of level gaps (e_n - e_0)(e_n - e_1)...(e_n - e_{n-1}).

    :param table: Spectral table
    :type table: SpectralTable
    :param n: Level, 0 <= n <= nmax
    :type n: int
    :return: P_n
    :rtype: float
    """
    table.check_index(n)
    gaps = table.e[n] - table.e[:n]
    return math.exp(float(np.sum(np.log(gaps))))


def ln_closed_form_nested_product(cfg: FamilyConfig, n: int) -> float:
    """
    Log of the family's closed form for P_n.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param n: Level, n >= 0
    :type n: int
    :return: ln P_n
    :rtype: float
    """
    if n < 0:
        raise DomainException(f'\nError: Level must be >= 0, got {n}.')
    if n == 0:
        return 0.0
    if cfg.kind is FamilyKind.TYPE_A:
        two_rho = 2.0 * cfg.rho
        return (
            2 * n * math.log(cfg.kappa) + special.gammaln(n + 1)
            + special.gammaln(two_rho + 2 * n) - special.gammaln(two_rho + n)
        )
    if cfg.kind in (FamilyKind.TYPE_C, FamilyKind.TYPE_D):
        return n * math.log(cfg.gamma_const) + special.gammaln(n + 1)
    q = cfg.q
    ln_qq, _ = ln_q_poch(q, q, n)
    return (
        n * math.log(remainder(cfg, 1) / (1.0 - q))
        + 0.5 * n * (n - 1) * math.log(q) + ln_qq
    )


def closed_form_nested_product(cfg: FamilyConfig, n: int) -> float:
    """
    Closed form for P_n: kappa^2n Gamma(n+1) Gamma(2rho+2n)/Gamma(2rho+n) for
     typeA, gamma^n n! for typeC/typeD and [R_1/(1-q)]^n q^{n(n-1)/2} (q;q)_n
     for selfSimilar.

    :param cfg: Family
    :type cfg: FamilyConfig
    :param n: Level, n >= 0
    :type n: int
    :return: P_n
    :rtype: float
    """
    return math.exp(ln_closed_form_nested_product(cfg, n))


def cn_normalizer(table: SpectralTable, n: int) -> float:
    """
    Ladder normalizer C_n = P_n^(-1/2), with C_0 = 1.

    On scaling orbits P_n and prod_k e_k differ by q^(n(n-1)/2); C_n always
     follows P_n.

    :param table: Spectral table
    :type table: SpectralTable
    :param n: Level, 0 <= n <= nmax
    :type n: int
    :return: C_n
    :rtype: float
    """
    table.check_index(n)
    return math.exp(-0.5 * table.ln_p[n])
