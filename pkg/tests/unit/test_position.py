import math

import numpy as np
import pytest
from scipy.special import eval_hermite

from sis.core.exception.exception import DomainException
from sis.core.exception.exception import GridMismatchException
from sis.core.exception.exception import NonNormalizableException
from sis.core.exception.exception import TruncationException
from sis.core.exception.exception import UnsupportedConfigurationException
from sis.core.model.coherent import build_state
from sis.core.model.coherent import evolve
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.functional import ZSpec
from sis.core.model.position import Grid
from sis.core.model.position import GridFn
from sis.core.model.position import default_grid
from sis.core.model.position import derivative
from sis.core.model.position import eigenfunctions
from sis.core.model.position import energy_mean
from sis.core.model.position import evolve_grid
from sis.core.model.position import excited_state
from sis.core.model.position import gram_matrix
from sis.core.model.position import ground_state
from sis.core.model.position import hamiltonian_residual
from sis.core.model.position import interior_mask
from sis.core.model.position import momentum_mean
from sis.core.model.position import position_mean
from sis.core.model.position import second_derivative
from sis.core.model.position import uncertainty
from sis.core.model.position import wavepacket

OSCILLATOR = FamilyConfig('typeD')
RADIAL = FamilyConfig('typeC', a1=-3 * ETA)
WELL = FamilyConfig('typeA', a1=ETA, beta=1.0)
CONST = ZSpec('const')

'''Grid Tests'''


def test_grid_spacing():
    """Ensures proper function when building a uniform grid"""
    grid = Grid(-1.0, 1.0, 101)
    assert grid.dx == pytest.approx(0.02)
    assert grid.x[0] == -1.0
    assert grid.x[-1] == 1.0
    assert grid == Grid(-1, 1, 101)
    assert grid != Grid(-1, 1, 102)


@pytest.mark.parametrize('xmin, xmax, npoints', [(0.0, 1.0, 63), (1.0, 1.0, 100), (2.0, 1.0, 100)])
def test_grid_invalid(xmin, xmax, npoints):
    """Ensures proper function when the grid is empty or too coarse"""
    with pytest.raises(DomainException):
        Grid(xmin, xmax, npoints)


def test_grid_fn_shape():
    """Ensures proper function when values do not fit the grid"""
    with pytest.raises(GridMismatchException):
        GridFn(Grid(0.0, 1.0, 64), np.zeros(65))


def test_grid_fn_norm():
    """Ensures proper function when the norm uses the trapezoid rule"""
    grid = Grid(0.0, 2.0, 201)
    assert GridFn(grid, np.ones(201)).norm() == pytest.approx(math.sqrt(2.0), rel=1e-14)


'''DefaultGrid Tests'''


def test_default_grid_oscillator():
    """Ensures proper function when the oscillator box is [-8, 8]"""
    grid = default_grid(OSCILLATOR)
    assert (grid.xmin, grid.xmax) == pytest.approx((-8.0, 8.0))


def test_default_grid_well():
    """Ensures proper function when the typeA grid spans the whole well"""
    cfg = FamilyConfig('typeA', a1=ETA, beta=2.0, lam=0.1)
    grid = default_grid(cfg, 256)
    assert (grid.xmin, grid.xmax) == pytest.approx((-0.1, math.pi / 2 - 0.1))
    assert grid.npoints == 256


def test_default_grid_self_similar():
    """Ensures proper function when the family has no position space"""
    with pytest.raises(UnsupportedConfigurationException):
        default_grid(FamilyConfig('selfSimilar', a1=1.0, q=0.5, r_scale=1.0))


def test_interior_mask():
    """Ensures proper function when singular endpoints are excluded"""
    mask = interior_mask(WELL, default_grid(WELL, 128))
    assert not mask[0]
    assert not mask[-1]
    assert np.all(mask[1:-1])
    assert not interior_mask(RADIAL, default_grid(RADIAL, 128))[0]


def test_interior_mask_outside():
    """Ensures proper function when a typeC grid reaches x < 0"""
    with pytest.raises(DomainException):
        interior_mask(RADIAL, Grid(-1.0, 5.0, 128))


'''Stencil Tests'''


def test_derivative():
    """Ensures proper function when differentiating sin"""
    grid = Grid(0.0, 2.0 * math.pi, 512)
    d = derivative(np.sin(grid.x), grid.dx)
    np.testing.assert_allclose(d[2:-2], np.cos(grid.x[2:-2]), atol=1e-8)
    np.testing.assert_allclose(d[[0, -1]], 1.0, atol=1e-3)


def test_second_derivative():
    """Ensures proper function when differentiating sin twice"""
    grid = Grid(0.0, 2.0 * math.pi, 512)
    d = second_derivative(np.sin(grid.x), grid.dx)
    np.testing.assert_allclose(d[2:-2], -np.sin(grid.x[2:-2]), atol=1e-7)
    assert d[0] == 0.0


'''GroundState Tests'''


def test_ground_state_oscillator():
    """Ensures proper function when Psi_0 is the Gaussian"""
    grid = default_grid(OSCILLATOR)
    psi = ground_state(OSCILLATOR, grid)
    expected_values = math.pi ** -0.25 * np.exp(-grid.x ** 2 / 2)
    np.testing.assert_allclose(psi.values.real, expected_values, atol=1e-8)
    assert psi.norm() == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize('cfg', [OSCILLATOR, RADIAL, WELL])
def test_ground_state_residual(cfg):
    """Ensures proper function when Psi_0 has zero energy"""
    psi = ground_state(cfg, default_grid(cfg))
    assert hamiltonian_residual(cfg, psi, 0.0) < 1e-4
    assert hamiltonian_residual(cfg, psi, 1.0) > 0.5


def test_ground_state_not_decayed():
    """Ensures proper function when the box cuts the Gaussian off"""
    with pytest.raises(NonNormalizableException):
        ground_state(OSCILLATOR, Grid(0.0, 3.0, 256))


'''Eigenfunction Tests'''


def test_eigenfunctions_oscillator():
    """Ensures proper function when the ladder builds orthonormal Hermite
    functions"""
    levels = eigenfunctions(OSCILLATOR, default_grid(OSCILLATOR), 3)
    assert len(levels) == 4
    np.testing.assert_allclose(gram_matrix(levels), np.eye(4), atol=1e-5)
    for n, f in enumerate(levels):
        assert energy_mean(OSCILLATOR, f) == pytest.approx(n, abs=1e-4)
        assert hamiltonian_residual(OSCILLATOR, f, n) < 1e-4


def test_eigenfunctions_well():
    """Ensures proper function when typeA levels are kappa^2 n (n + 2)"""
    levels = eigenfunctions(WELL, default_grid(WELL), 2)
    for n in (1, 2):
        assert energy_mean(WELL, levels[n]) == pytest.approx(0.5 * n * (n + 2), abs=1e-4)


def test_excited_state():
    """Ensures proper function when Psi_1 of the oscillator is odd"""
    grid = default_grid(OSCILLATOR)
    psi = excited_state(OSCILLATOR, grid, 1)
    np.testing.assert_allclose(psi.values, -psi.values[::-1], atol=1e-10)


def test_excited_state_ground():
    """Ensures proper function when n < 1"""
    with pytest.raises(DomainException):
        excited_state(OSCILLATOR, default_grid(OSCILLATOR), 0)


def test_gram_matrix_mismatch():
    """Ensures proper function when functions live on different grids"""
    first = ground_state(OSCILLATOR, default_grid(OSCILLATOR))
    second = ground_state(OSCILLATOR, default_grid(OSCILLATOR, 512))
    with pytest.raises(GridMismatchException):
        gram_matrix([first, second])


'''Wavepacket Tests'''


def test_wavepacket_means():
    """Ensures proper function when <x> and <p> follow Re z and Im z"""
    packet = wavepacket(build_state(OSCILLATOR, CONST, 0.5 + 0.3j))
    assert packet.norm() == pytest.approx(1.0, abs=1e-8)
    assert position_mean(packet) == pytest.approx(math.sqrt(2.0) * 0.5, abs=1e-6)
    assert momentum_mean(packet) == pytest.approx(math.sqrt(2.0) * 0.3, abs=1e-6)
    assert energy_mean(OSCILLATOR, packet) == pytest.approx(0.34, abs=1e-4)


@pytest.mark.parametrize('z', [0.0, 1.0, 0.7j])
def test_wavepacket_minimum_uncertainty(z):
    """Ensures proper function when Glauber packets saturate dx dp = 1/2"""
    spread_x, spread_p, product = uncertainty(wavepacket(build_state(OSCILLATOR, CONST, z)))
    assert spread_x == pytest.approx(math.sqrt(0.5), abs=1e-4)
    assert spread_p == pytest.approx(math.sqrt(0.5), abs=1e-4)
    assert product == pytest.approx(0.5, abs=1e-4)


def test_wavepacket_tail():
    """Ensures proper function when the state was truncated too early"""
    state = build_state(OSCILLATOR, CONST, 2.0, nmax=8, tail_tol=1e-3)
    with pytest.raises(TruncationException):
        wavepacket(state)


'''EvolveGrid Tests'''


def test_evolve_grid_zero_time():
    """Ensures proper function when no time elapses"""
    packet = wavepacket(build_state(OSCILLATOR, CONST, 0.5))
    np.testing.assert_array_equal(evolve_grid(OSCILLATOR, packet, 0.0, 1e-3).values, packet.values)


@pytest.mark.parametrize('t, dt', [(0.5, 0.0), (0.0015, 1e-3)])
def test_evolve_grid_bad_steps(t, dt):
    """Ensures proper function when dt or t is not usable"""
    packet = wavepacket(build_state(OSCILLATOR, CONST, 0.5))
    with pytest.raises(DomainException):
        evolve_grid(OSCILLATOR, packet, t, dt)


def test_evolve_grid_matches_coefficients():
    """Ensures proper function when grid propagation follows evolved
    coefficients"""
    state = build_state(OSCILLATOR, CONST, 0.7)
    grid = default_grid(OSCILLATOR)
    propagated = evolve_grid(OSCILLATOR, wavepacket(state, grid), 0.5, 1e-3)
    expected = wavepacket(evolve(state, 0.5), grid)
    inner = np.sum(np.conj(expected.values) * propagated.values) * grid.dx
    fidelity = abs(inner) ** 2 / (expected.norm() ** 2 * propagated.norm() ** 2)
    assert fidelity >= 0.9999
    assert uncertainty(propagated)[2] == pytest.approx(0.5, abs=2e-3)


'''LadderStability Tests'''


def _hermite_function(n, x):
    scale = math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
    return eval_hermite(n, x) * np.exp(-x ** 2 / 2) / scale


def test_eigenfunctions_high_levels():
    """Ensures proper function when levels well above the first few are
    needed by a wavepacket"""
    grid = default_grid(OSCILLATOR)
    levels = eigenfunctions(OSCILLATOR, grid, 12)
    for n, f in enumerate(levels):
        assert hamiltonian_residual(OSCILLATOR, f, n) < 1e-4 * max(1, n)
        overlap = np.sum(f.values.real * _hermite_function(n, grid.x)) * grid.dx
        assert overlap == pytest.approx(1.0, abs=1e-6)


def test_eigenfunctions_well_high_levels():
    """Ensures proper function when typeA levels reach the singular ends"""
    cfg = FamilyConfig('typeA', a1=2 * ETA, beta=1.0)
    grid = default_grid(cfg)
    levels = eigenfunctions(cfg, grid, 6)
    np.testing.assert_allclose(gram_matrix(levels), np.eye(7), atol=1e-5)
    for n in range(1, 7):
        expected_energy = 0.5 * n * (n + 4)
        assert energy_mean(cfg, levels[n]) == pytest.approx(expected_energy, rel=1e-4)


def test_eigenfunctions_ladder_sign():
    """Ensures proper function when a level is the raised image of the
    level below, [W - eta d/dx] sin^2 x = -3 eta sin x cos x"""
    grid = default_grid(WELL)
    upper = eigenfunctions(WELL, grid, 1)[1]
    expected_values = -np.sin(2.0 * grid.x) / math.sqrt(math.pi / 2.0)
    np.testing.assert_allclose(upper.values.real, expected_values, atol=1e-6)
