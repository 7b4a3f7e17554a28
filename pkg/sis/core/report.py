from __future__ import annotations

import logging
import math
from typing import Any
from typing import Callable
from typing import NamedTuple

import numpy as np
from scipy.special import eval_hermite

from sis.core.exception.exception import AbstractShapeInvariantStatesException
from sis.core.exception.exception import DomainException
from sis.core.model.coherent import annihilation_check
from sis.core.model.coherent import action_variable
from sis.core.model.coherent import build_state
from sis.core.model.coherent import energy_expectation
from sis.core.model.coherent import evolve
from sis.core.model.coherent import hn
from sis.core.model.coherent import normalization
from sis.core.model.coherent import normalization_closed
from sis.core.model.coherent import overlap
from sis.core.model.coherent import radius_of_convergence
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.family import FamilyKind
from sis.core.model.functional import ZSpec
from sis.core.model.functional import ZVariant
from sis.core.model.functional import z_product_closed
from sis.core.model.functional import z_product_direct
from sis.core.model.measure import REFERENCE_PARAMS
from sis.core.model.measure import MeasureCase
from sis.core.model.measure import MeasureKind
from sis.core.model.measure import distribution_W
from sis.core.model.measure import verify_moments
from sis.core.model.position import default_grid
from sis.core.model.position import eigenfunctions
from sis.core.model.position import energy_mean
from sis.core.model.position import evolve_grid
from sis.core.model.position import gram_matrix
from sis.core.model.position import hamiltonian_residual
from sis.core.model.position import uncertainty
from sis.core.model.position import wavepacket

logger = logging.getLogger(__name__)

''' Relative size of the fault injected into a measure constant '''
FAULT_SCALE = 1.1

''' Moment orders checked per measure case '''
MOMENT_ORDERS = 8

''' Labels of the oscillator checks '''
OSCILLATOR_LABELS = (0.3, 0.7, 0.5 + 0.5j)

''' |x|^2 sample points for disk-bounded and entire normalization series '''
DISK_POINTS = (0.05, 0.2, 0.36, 0.5, 0.7)
ENTIRE_POINTS = (0.1, 0.5, 1.0, 2.0, 4.0)

DISK_VARIANTS = (ZVariant.TYPE_C_G, ZVariant.TYPE_A_PT1)


class Criterion(NamedTuple):
    criterion: str
    status: str
    metric: float | None
    threshold: float | None
    detail: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == 'pass'

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            'criterion': self.criterion,
            'status': self.status,
            'metric': _finite_or_none(self.metric),
            'threshold': _finite_or_none(self.threshold),
        }
        if self.detail is not None:
            data['detail'] = self.detail
        return data


class AcceptanceReport:
    """
    Outcome of the acceptance suite, one Criterion per check.
    """

    def __init__(self, criteria: list[Criterion]):
        self._criteria: list[Criterion] = criteria

    @property
    def criteria(self) -> list[Criterion]:
        return list(self._criteria)

    @property
    def passed(self) -> bool:
        return all(criterion.passed for criterion in self._criteria)

    def failed(self) -> list[Criterion]:
        return [criterion for criterion in self._criteria if not criterion.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            'criteria': [criterion.to_dict() for criterion in self._criteria],
            'pass': self.passed,
        }


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _at_most(name: str, metric: float, threshold: float, detail: str | None = None) -> Criterion:
    status = 'pass' if metric <= threshold else 'fail'
    return Criterion(name, status, float(metric), threshold, detail)


def _at_least(name: str, metric: float, threshold: float) -> Criterion:
    status = 'pass' if metric >= threshold else 'fail'
    return Criterion(name, status, float(metric), threshold)


def _rel_err(value: complex, expected: complex) -> float:
    return abs(value - expected) / abs(expected)


def _oscillator() -> tuple[FamilyConfig, ZSpec]:
    return FamilyConfig('typeD'), ZSpec('const', c=1.0)


def _reference_states() -> dict[ZVariant, tuple[FamilyConfig, ZSpec]]:
    """
    One reference (family, functional) per variant, taken from the measure
     catalog at its reference parameters.
    """
    states: dict[ZVariant, tuple[FamilyConfig, ZSpec]] = {}
    for kind in MeasureKind:
        cfg, zs = MeasureCase(kind).paired_state()
        states.setdefault(zs.variant, (cfg, zs))
    return states


def _inner(f: Any, g: Any) -> complex:
    gram = gram_matrix([f, g])
    return complex(gram[0, 1] / math.sqrt(gram[0, 0].real * gram[1, 1].real))


'''Criteria Groups'''


def check_oscillator() -> list[Criterion]:
    cfg, zs = _oscillator()
    norm_err = max(
        _rel_err(normalization(cfg, zs, abs(z) ** 2), math.exp(-abs(z) ** 2 / 2))
        for z in OSCILLATOR_LABELS
    )
    coeff_err = max(
        _rel_err(hn(cfg, zs, n), math.sqrt(math.factorial(n))) for n in range(21)
    )
    overlap_err = 0.0
    for z1 in OSCILLATOR_LABELS:
        for z2 in OSCILLATOR_LABELS:
            expected = np.exp(
                -0.5 * (abs(z1) ** 2 + abs(z2) ** 2) + complex(z1).conjugate() * z2
            )
            value = overlap(build_state(cfg, zs, z1), build_state(cfg, zs, z2))
            overlap_err = max(overlap_err, _rel_err(value, expected))
    return [
        _at_most('oscillator.normalization', norm_err, 1e-10),
        _at_most('oscillator.coefficients', coeff_err, 1e-10),
        _at_most('oscillator.overlap', overlap_err, 1e-10),
    ]


def check_products() -> list[Criterion]:
    criteria = []
    for variant, (cfg, zs) in _reference_states().items():
        err = max(
            _rel_err(abs(z_product_direct(zs, cfg, n)), abs(z_product_closed(zs, cfg, n)))
            for n in range(31)
        )
        criteria.append(_at_most(f'products.{variant.value}', err, 1e-10))
    return criteria


def check_normalization() -> list[Criterion]:
    criteria = []
    for kind in MeasureKind:
        cfg, zs = MeasureCase(kind).paired_state()
        points = DISK_POINTS if zs.variant in DISK_VARIANTS else ENTIRE_POINTS
        err = max(
            _rel_err(normalization(cfg, zs, x), normalization_closed(cfg, zs, x))
            for x in points
        )
        criteria.append(_at_most(f'normalization.{kind.value}', err, 1e-9))
    return criteria


def _faulty(mc: MeasureCase) -> MeasureCase:
    params = mc.params
    if not params:
        raise DomainException(
            f'\nError: Measure case {mc.kind.value} has no constant to perturb.'
        )
    key = next(iter(REFERENCE_PARAMS[mc.kind]))
    params[key] *= FAULT_SCALE
    logger.info('Injecting fault: %s %s -> %.6g', mc.kind.value, key, params[key])
    return MeasureCase(mc.kind, params)


def check_measures(faulty_case: str | None = None) -> list[Criterion]:
    if faulty_case is not None:
        MeasureCase(faulty_case)
    criteria = []
    for kind in MeasureKind:
        mc = MeasureCase(kind)
        cfg, zs = mc.paired_state()
        if faulty_case == kind.value:
            mc = _faulty(mc)
        tol = 1e-5 if cfg.kind is FamilyKind.SELF_SIMILAR else 1e-6
        report = verify_moments(mc, cfg, zs, MOMENT_ORDERS, tol)
        worst = max(row.rel_err for row in report.rows)
        detail = None
        if not report.passed:
            detail = 'failed moments ' + ', '.join(
                str(row.n) for row in report.failed_rows()
            )
        criteria.append(_at_most(f'measures.{kind.value}', worst, tol, detail))
    return criteria


def check_ramanujan() -> list[Criterion]:
    q = REFERENCE_PARAMS[MeasureKind.RAMANUJAN_GENERAL_Q]['q']
    c = 1e-6
    limit = MeasureCase.ramanujan_q(q=q)
    general = MeasureCase.ramanujan_general_q(q=q, c=c)
    cfg, zs = limit.paired_state()
    report = verify_moments(general, cfg, zs, 6, 1e-5)
    worst = max(row.rel_err for row in report.rows)
    rho = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
    pointwise = float(np.max(
        np.abs(distribution_W(general, rho) / distribution_W(limit, rho) - 1.0)
    ))
    return [
        _at_most('ramanujan.moments', worst, 1e-5),
        _at_most('ramanujan.pointwise', pointwise, 100 * c),
    ]


def check_temporal() -> list[Criterion]:
    cfg, zs = _oscillator()
    s = build_state(cfg, zs, 0.5)
    stepped = evolve(evolve(s, 0.3), 0.4)
    direct = evolve(s, 0.7)
    additivity = float(np.max(np.abs(stepped.c - direct.c)))
    grid = default_grid(cfg)
    t = 0.5
    on_grid = evolve_grid(cfg, wavepacket(s, grid), t, 1e-3)
    by_phase = wavepacket(evolve(s, t), grid)
    fidelity = abs(_inner(on_grid, by_phase)) ** 2
    return [
        _at_most('temporal.additivity', additivity, 1e-13),
        _at_least('temporal.grid_fidelity', fidelity, 0.9999),
    ]


def check_action() -> list[Criterion]:
    cfg, zs = _oscillator()
    s = build_state(cfg, zs, 0.7)
    expected = abs(0.7 * zs.c) ** 2
    series, _ = energy_expectation(s)
    action = action_variable(s, 1.0)
    later, _ = energy_expectation(evolve(s, 1.3))
    return [
        _at_most(
            'action.identity',
            max(_rel_err(series, expected), _rel_err(action, expected)), 1e-12
        ),
        _at_most('action.conservation', abs(later - series), 1e-12),
    ]


def check_annihilation() -> list[Criterion]:
    configs = [
        FamilyConfig('typeC', a1=-3 * ETA, beta=ETA),
        FamilyConfig('typeD'),
    ]
    zs = ZSpec('const', c=1.0)
    residual = max(
        annihilation_check(build_state(cfg, zs, z))
        for cfg in configs for z in (0.3, 0.8)
    )
    return [_at_most('annihilation.residual', residual, 1e-12)]


def _hermite_function(n: int, x: Any) -> Any:
    scale = math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
    return eval_hermite(n, x) * np.exp(-x ** 2 / 2) / scale


def check_ladder() -> list[Criterion]:
    cfg, _ = _oscillator()
    grid = default_grid(cfg)
    levels = eigenfunctions(cfg, grid, 4)
    energies = [float(n) for n in range(5)]
    hermite = min(
        abs(np.sum(np.conj(f.values) * _hermite_function(n, grid.x)) * grid.dx) / f.norm()
        for n, f in enumerate(levels)
    )
    residual = max(
        hamiltonian_residual(cfg, f, energies[n]) for n, f in enumerate(levels)
    )
    gram = gram_matrix(levels)
    off_diagonal = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
    type_a = FamilyConfig('typeA', a1=ETA, beta=1.0)
    kappa_sq = type_a.kappa ** 2
    ladder_a = eigenfunctions(type_a, default_grid(type_a), 2)
    level_err = max(
        abs(energy_mean(type_a, ladder_a[n]) - kappa_sq * n * (n + 2)) for n in (1, 2)
    )
    return [
        _at_most('ladder.hermite', 1.0 - hermite, 1e-6),
        _at_most('ladder.residual', residual, 1e-5),
        _at_most('ladder.gram', off_diagonal, 1e-5),
        _at_most('ladder.typeA_levels', level_err, 1e-4),
    ]


def check_uncertainty() -> list[Criterion]:
    cfg, zs = _oscillator()
    grid = default_grid(cfg)
    product_err = max(
        abs(uncertainty(wavepacket(build_state(cfg, zs, z), grid))[2] - 0.5)
        for z in (0.0, 0.5, 1.0, 0.7j)
    )
    packet = wavepacket(build_state(cfg, zs, 0.7), grid)
    start = uncertainty(packet)[2]
    later = uncertainty(evolve_grid(cfg, packet, 0.5, 1e-3))[2]
    return [
        _at_most('uncertainty.minimum', product_err, 1e-3),
        _at_most('uncertainty.evolution', abs(later - start), 2e-3),
    ]


def check_radius() -> list[Criterion]:
    states = _reference_states()
    disk_cfg, disk_zs = states[ZVariant.TYPE_C_G]
    disk = radius_of_convergence(disk_cfg, disk_zs, 200)
    osc_cfg, osc_zs = _oscillator()
    ss_cfg, ss_zs = states[ZVariant.SS_R]
    infinite = min(
        radius_of_convergence(osc_cfg, osc_zs, 200),
        radius_of_convergence(ss_cfg, ss_zs, 200),
    )
    return [
        _at_most('radius.disk', abs(disk - 1.0), 0.05),
        Criterion(
            'radius.entire', 'pass' if math.isinf(infinite) else 'fail',
            infinite, math.inf
        ),
    ]


GROUPS: dict[str, Callable[[], list[Criterion]]] = {
    'oscillator': check_oscillator,
    'products': check_products,
    'normalization': check_normalization,
    'measures': check_measures,
    'ramanujan': check_ramanujan,
    'temporal': check_temporal,
    'action': check_action,
    'annihilation': check_annihilation,
    'ladder': check_ladder,
    'uncertainty': check_uncertainty,
    'radius': check_radius,
}


def report(only: list[str] | None = None, faulty_case: str | None = None) -> AcceptanceReport:
    """
    Run the acceptance suite.

    A group that raises is recorded as a single errored criterion and the
    remaining groups still run.

    :param only: Names of the groups to run, all when None
    :type only: list[str] | None
    :param faulty_case: Measure case whose first constant is perturbed by
     10 percent
    :type faulty_case: str | None
    :return: Criteria of the selected groups
    :rtype: AcceptanceReport
    """
    names = list(GROUPS) if not only else list(only)
    unknown = [name for name in names if name not in GROUPS]
    if unknown:
        raise DomainException(
            f'\nError: Unknown report groups {unknown}. Expected some of {list(GROUPS)}.'
        )
    if faulty_case is not None:
        MeasureCase(faulty_case)
    criteria: list[Criterion] = []
    for name in names:
        logger.info('Running %s checks', name)
        try:
            if name == 'measures':
                criteria.extend(check_measures(faulty_case))
            else:
                criteria.extend(GROUPS[name]())
        except AbstractShapeInvariantStatesException as error:
            logger.error('Group %s aborted: %s', name, str(error).strip())
            criteria.append(
                Criterion(name, 'error', None, None, str(error).strip())
            )
    for criterion in criteria:
        if not criterion.passed:
            logger.warning('Criterion %s %s', criterion.criterion, criterion.status)
    return AcceptanceReport(criteria)
