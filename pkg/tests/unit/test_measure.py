import logging
import math

import numpy as np
import pytest

from sis.core.exception.exception import DomainException
from sis.core.model.coherent import normalization
from sis.core.model.family import FamilyKind
from sis.core.model.functional import ZSpec
from sis.core.model.functional import ZVariant
from sis.core.model.measure import MeasureCase
from sis.core.model.measure import MeasureKind
from sis.core.model.measure import MomentRow
from sis.core.model.measure import distribution_W
from sis.core.model.measure import ho_phi
from sis.core.model.measure import ho_phi_reconstruct
from sis.core.model.measure import moment
from sis.core.model.measure import verify_moments
from sis.core.model.measure import weight_w

'''MeasureCase Tests'''


def test_reference_params():
    """Ensures proper function when parameters are left out"""
    assert MeasureCase('bessel_bg').params == {'nu': 1.5}
    assert MeasureCase.ramanujan_general_q().params == {'r1': 1.0, 'q': 0.9, 'c': 0.01}
    assert MeasureCase.sech_type_a().params == {}


def test_params_copy():
    """Ensures proper function when a caller modifies the returned params"""
    mc = MeasureCase.ho_flat()
    params = mc.params
    params['gamma'] = 7.0
    assert mc.params['gamma'] == 1.0


def test_unknown_case():
    """Ensures proper function when the case is unknown"""
    with pytest.raises(DomainException):
        MeasureCase('gaussian')


def test_unknown_param():
    """Ensures proper function when a parameter does not belong to the case"""
    with pytest.raises(DomainException):
        MeasureCase('disk_pt', {'sigma': 0.5})


@pytest.mark.parametrize('kind, params', [
    ('hoflat', {'gamma': 0.0}),
    ('disk_typeC', {'rho_c': -1.0}),
    ('disk_pt', {'nu': -0.5}),
    ('bessel_bg', {'nu': 2.0}),
    ('whittaker_pt', {'sigma': 1.0}),
    ('ramanujan_q', {'q': 1.0}),
    ('ramanujan_general_q', {'c': 1.0}),
])
def test_invalid_params(kind, params):
    """Ensures proper function when a parameter is outside its range"""
    with pytest.raises(DomainException):
        MeasureCase(kind, params)


def test_domain():
    """Ensures proper function when disk cases live on [0, 1)"""
    assert MeasureCase.disk_pt().domain == (0.0, 1.0)
    assert MeasureCase.bessel_bg().domain == (0.0, math.inf)


@pytest.mark.parametrize('kind', list(MeasureKind))
def test_paired_state(kind):
    """Ensures proper function when every case pairs with a valid state"""
    cfg, zs = MeasureCase(kind).paired_state()
    assert isinstance(zs, ZSpec)
    assert normalization(cfg, zs, 0.04) > 0


def test_paired_state_oscillator():
    """Ensures proper function when hoflat pairs with a typeD family"""
    cfg, zs = MeasureCase.ho_flat(gamma=2.0, c=0.5).paired_state()
    assert cfg.kind is FamilyKind.TYPE_D
    assert cfg.gamma_const == pytest.approx(2.0)
    assert zs.variant is ZVariant.CONST
    assert zs.c == 0.5


def test_moment_exists():
    """Ensures proper function when the general Ramanujan case needs
    c < q^n"""
    mc = MeasureCase.ramanujan_general_q(q=0.5, c=0.3)
    assert mc.moment_exists(0)
    assert mc.moment_exists(1)
    assert not mc.moment_exists(2)
    assert MeasureCase.ho_flat().moment_exists(50)


'''Distribution Tests'''


def test_distribution_hoflat():
    """Ensures proper function when W is an exponential"""
    assert distribution_W(MeasureCase.ho_flat(), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_distribution_disks():
    """Ensures proper function when evaluating the disk polynomials"""
    assert distribution_W(MeasureCase.disk_type_c(), 0.5) == pytest.approx(1.0, rel=1e-14)
    np.testing.assert_allclose(
        distribution_W(MeasureCase.disk_pt(), np.array([0.0, 0.3, 0.9])), 1.0, rtol=1e-14
    )


def test_distribution_sech():
    """Ensures proper function when W = exp(-sqrt(rho))/(2 sqrt(rho))"""
    expected_value = math.exp(-2.0) / 4.0
    assert distribution_W(MeasureCase.sech_type_a(), 4.0) == pytest.approx(expected_value, rel=1e-14)


def test_distribution_ramanujan_normalized():
    """Ensures proper function when the q-distribution integrates to one"""
    mc = MeasureCase.ramanujan_q()
    assert moment(mc, 0).value == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize('kind, rho', [
    ('disk_typeC', 1.0),
    ('hoflat', -1.0),
    ('sech_typeA', 0.0),
    ('bessel_bg', 0.0),
])
def test_distribution_domain(kind, rho):
    """Ensures proper function when rho lies outside the support"""
    with pytest.raises(DomainException):
        distribution_W(MeasureCase(kind), rho)


def test_weight_w():
    """Ensures proper function when w = W/(pi N^2)"""
    mc = MeasureCase.ho_flat()
    expected_value = math.exp(-0.5) / (math.pi * math.exp(-0.5))
    assert weight_w(mc, 0.5, math.exp(-0.5)) == pytest.approx(expected_value, rel=1e-14)


'''Moment Tests'''


def test_moment_hoflat():
    """Ensures proper function when the moments are n!"""
    result = moment(MeasureCase.ho_flat(), 3)
    assert result.value == pytest.approx(6.0, rel=1e-9)
    assert result.converged


def test_moment_disk():
    """Ensures proper function when the disk moments are 2/((n+1)(n+2))"""
    assert moment(MeasureCase.disk_type_c(), 2).value == pytest.approx(1.0 / 6.0, rel=1e-10)


def test_moment_sech_vacuum():
    """Ensures proper function when rho^0 W peaks at the left end of the scan"""
    result = moment(MeasureCase.sech_type_a(), 0)
    assert result.converged
    assert result.value == pytest.approx(1.0, rel=1e-9)


def test_moment_bessel_tail():
    """Ensures proper function when K_nu is needed far beyond the overflow
    range of the scaled Bessel function"""
    expected_value = 2.0 * math.gamma(4.5) / math.gamma(2.5)
    result = moment(MeasureCase.bessel_bg(1.5), 2)
    assert result.converged
    assert math.isfinite(result.value)
    assert result.value == pytest.approx(expected_value, rel=1e-8)


def test_moment_general_q_normalized():
    """Ensures proper function when the general q-distribution integrates to
    one away from c = 0"""
    mc = MeasureCase.ramanujan_general_q(q=0.8, c=0.05)
    assert moment(mc, 0).value == pytest.approx(1.0, rel=1e-8)


def test_moment_negative_order():
    """Ensures proper function when n < 0"""
    with pytest.raises(DomainException):
        moment(MeasureCase.ho_flat(), -1)


@pytest.mark.parametrize('kind', list(MeasureKind))
def test_verify_moments(kind):
    """Ensures proper function when every case reproduces the moments of its
    paired state"""
    mc = MeasureCase(kind)
    cfg, zs = mc.paired_state()
    tol = 1e-5 if cfg.kind is FamilyKind.SELF_SIMILAR else 1e-6
    report = verify_moments(mc, cfg, zs, 6, tol)
    assert report.passed, report.failed_rows()
    assert [row.n for row in report.rows] == list(range(7))


@pytest.mark.parametrize('q, c', [(0.9, 0.01), (0.8, 0.05), (0.7, 0.1)])
def test_verify_moments_general_q(q, c):
    """Ensures proper function when the general q-distribution reproduces
    |h_n|^2 for c > 0"""
    mc = MeasureCase.ramanujan_general_q(q=q, c=c)
    cfg, zs = mc.paired_state()
    report = verify_moments(mc, cfg, zs, 4, 1e-5)
    assert report.passed, report.failed_rows()


def test_verify_moments_faulty(caplog):
    """Ensures proper function when the distribution does not match the state"""
    cfg, zs = MeasureCase.ho_flat().paired_state()
    with caplog.at_level(logging.WARNING):
        report = verify_moments(MeasureCase.ho_flat(gamma=1.1), cfg, zs, 4, 1e-6)
    assert not report.passed
    assert report.failed_rows()[0].n == 1
    assert 'failed' in caplog.text


def test_verify_moments_missing():
    """Ensures proper function when higher moments do not exist"""
    mc = MeasureCase.ramanujan_general_q(q=0.5, c=0.3)
    cfg, zs = mc.paired_state()
    report = verify_moments(mc, cfg, zs, 3, 1e-5)
    assert len(report.rows) == 4
    assert report.rows[2].moment is None
    assert not report.passed
    data = report.to_dict()
    assert data['case'] == 'ramanujan_general_q'
    assert data['rows'][3]['target'] is None
    assert data['rows'][2]['rel_err'] is None


def test_moment_row_dict():
    """Ensures proper function when serializing a passing row"""
    row = MomentRow(2, 2.0, 2.0, 0.0, True)
    assert row.to_dict() == {'n': 2, 'moment': 2.0, 'target': 2.0, 'rel_err': 0.0, 'pass': True}


'''CharacteristicFunction Tests'''


def test_ho_phi():
    """Ensures proper function when Phi(xi) = 1/(1 - i gamma xi/c^2)"""
    assert ho_phi(1.0, 1.0, 0.0) == 1
    assert abs(ho_phi(1.0, 1.0, 1.0) - (0.5 + 0.5j)) < 1e-15


@pytest.mark.parametrize('gamma, c', [(1.0, 1.0), (2.0, 1.0), (0.7, 1.3)])
def test_ho_phi_reconstruct(gamma, c):
    """Ensures proper function when inverting Phi recovers W"""
    mc = MeasureCase.ho_flat(gamma=gamma, c=c)
    for rho in (0.0, 0.5, 3.0):
        assert ho_phi_reconstruct(gamma, c, rho) == pytest.approx(distribution_W(mc, rho), rel=1e-13)


def test_ho_phi_reconstruct_domain():
    """Ensures proper function when the constants or rho are invalid"""
    with pytest.raises(DomainException):
        ho_phi_reconstruct(0.0, 1.0, 1.0)
    with pytest.raises(DomainException):
        ho_phi_reconstruct(1.0, 1.0, -1.0)
