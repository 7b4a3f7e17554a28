"""
Position-space realization on a uniform grid: ladder eigenfunctions built
from the superpotential, Hamiltonian residuals, coherent wavepackets and a
Crank-Nicolson propagator.
"""
from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from numpy import ndarray
from scipy import sparse
from scipy.integrate import trapezoid
from scipy.linalg import eig_banded
from scipy.sparse.linalg import splu

from sis.core.exception.exception import DomainException
from sis.core.exception.exception import GridMismatchException
from sis.core.exception.exception import InstabilityException
from sis.core.exception.exception import LadderResidualException
from sis.core.exception.exception import NonNormalizableException
from sis.core.exception.exception import TruncationException
from sis.core.exception.exception import UnsupportedConfigurationException
from sis.core.model.coherent import CoherentState
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.family import FamilyKind
from sis.core.model.family import orbit_point
from sis.core.model.family import partner_potentials
from sis.core.model.family import remainder_sum
from sis.core.model.family import superpotential
from sis.core.model.family import superpotential_integral

logger = logging.getLogger(__name__)

''' Smallest grid accepted '''
MIN_POINTS = 64

''' Points of a default grid '''
DEFAULT_POINTS = 1024

''' Boundary values above this fraction of the peak mean the state has not decayed '''
BOUNDARY_TOL = 1e-6

''' Ladder residual allowed per unit of energy '''
LADDER_RESIDUAL_TOL = 1e-3

''' Largest tail mass a state may carry to be put on a grid '''
WAVEPACKET_TAIL_TOL = 1e-10

''' Coefficients whose suffix mass is below this are left out of a wavepacket '''
WAVEPACKET_DROP_MASS = 1e-14

''' Norm drift allowed per thousand Crank-Nicolson steps '''
NORM_DRIFT_TOL = 1e-10

''' Angular margin that counts a typeA node as a singular endpoint '''
ENDPOINT_TOL = 1e-12


class Grid:
    """
    Uniform grid of npoints nodes on [xmin, xmax].
    """

    def __init__(self, xmin: float, xmax: float, npoints: int = DEFAULT_POINTS):
        """
        Initialize an instance of Grid.

        :param xmin: Left end
        :type xmin: float
        :param xmax: Right end, xmax > xmin
        :type xmax: float
        :param npoints: Number of nodes, at least 64
        :type npoints: int
        """
        if not xmax > xmin:
            raise DomainException(
                f'\nError: Grid needs xmax > xmin, got [{xmin}, {xmax}].'
            )
        if npoints < MIN_POINTS:
            raise DomainException(
                f'\nError: Grid needs at least {MIN_POINTS} points, got {npoints}.'
            )
        self._xmin: float = float(xmin)
        self._xmax: float = float(xmax)
        self._npoints: int = int(npoints)
        self._x: ndarray = np.linspace(self._xmin, self._xmax, self._npoints)
        self._x.setflags(write=False)

    @property
    def xmin(self) -> float:
        return self._xmin

    @property
    def xmax(self) -> float:
        return self._xmax

    @property
    def npoints(self) -> int:
        return self._npoints

    @property
    def dx(self) -> float:
        return (self._xmax - self._xmin) / (self._npoints - 1)

    @property
    def x(self) -> ndarray:
        return self._x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return False
        return (self._xmin, self._xmax, self._npoints) == (
            other._xmin, other._xmax, other._npoints
        )

    def __hash__(self) -> int:
        return hash((self._xmin, self._xmax, self._npoints))

    def __repr__(self) -> str:
        return f'Grid({self._xmin}, {self._xmax}, {self._npoints})'


class GridFn:
    """
    Complex function sampled on a grid.
    """

    def __init__(self, grid: Grid, values: ndarray):
        """
        Initialize an instance of GridFn.

        :param grid: Grid the values live on
        :type grid: Grid
        :param values: Samples, one per node
        :type values: ndarray
        """
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.npoints,):
            raise GridMismatchException(
                f'\nError: {values.shape[0]} values do not fit a grid of'
                f' {grid.npoints} points.'
            )
        self._grid: Grid = grid
        self._values: ndarray = values
        self._values.setflags(write=False)

    @property
    def grid(self) -> Grid:
        return self._grid

    @property
    def values(self) -> ndarray:
        return self._values

    def norm(self) -> float:
        return math.sqrt(trapezoid(np.abs(self._values) ** 2, dx=self._grid.dx))


def default_grid(cfg: FamilyConfig, npoints: int = DEFAULT_POINTS) -> Grid:
    """
    Default grid of a family: a box wide enough for the low levels of typeD
     and typeC, and the closed interval between the two typeA singularities.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param npoints: Number of nodes
    :type npoints: int
    :return: Grid
    :rtype: Grid
    """
    if cfg.kind is FamilyKind.TYPE_D:
        centre = -cfg.delta / cfg.beta
        half_width = 8.0 / math.sqrt(math.sqrt(2.0) * cfg.beta)
        return Grid(centre - half_width, centre + half_width, npoints)
    if cfg.kind is FamilyKind.TYPE_A:
        return Grid(-cfg.lam, math.pi / cfg.beta - cfg.lam, npoints)
    if cfg.kind is FamilyKind.TYPE_C:
        return Grid(0.0, 12.0 / math.sqrt(math.sqrt(2.0) * cfg.beta), npoints)
    raise _no_position_space(cfg)


def _no_position_space(cfg: FamilyConfig) -> UnsupportedConfigurationException:
    return UnsupportedConfigurationException(
        f'\nError: {cfg.kind.value} has no position-space realization.'
    )


def interior_mask(cfg: FamilyConfig, grid: Grid) -> ndarray:
    """
    Nodes where the superpotential is regular. Singular endpoints of the
     typeA interval and x = 0 for typeC are excluded and held at zero.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param grid: Grid
    :type grid: Grid
    :return: Boolean mask of regular nodes
    :rtype: ndarray
    """
    x = grid.x
    if cfg.kind is FamilyKind.TYPE_D:
        return np.ones(x.shape, dtype=bool)
    if cfg.kind is FamilyKind.TYPE_C:
        if np.any(x < 0):
            raise DomainException('\nError: typeC grids must lie in x >= 0.')
        return x > 0
    if cfg.kind is FamilyKind.TYPE_A:
        u = cfg.beta * (x + cfg.lam)
        margin = ENDPOINT_TOL * math.pi
        if np.any(u < -margin) or np.any(u > math.pi + margin):
            raise DomainException(
                f'\nError: typeA grids must lie in [{-cfg.lam},'
                f' {math.pi / cfg.beta - cfg.lam}].'
            )
        return (u > margin) & (u < math.pi - margin)
    raise _no_position_space(cfg)


def derivative(values: ndarray, dx: float) -> ndarray:
    """
    First derivative: 5-point central stencil inside, 3-point central next
     to the ends and second-order one-sided at the ends.

    :param values: Samples
    :type values: ndarray
    :param dx: Grid spacing
    :type dx: float
    :return: Derivative samples
    :rtype: ndarray
    """
    f = np.asarray(values)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)
    d[1] = (f[2] - f[0]) / (2.0 * dx)
    d[-2] = (f[-1] - f[-3]) / (2.0 * dx)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return d


def second_derivative(values: ndarray, dx: float) -> ndarray:
    """
    Second derivative: 5-point stencil inside, 3-point next to the ends and
     zero at the ends themselves.

    :param values: Samples
    :type values: ndarray
    :param dx: Grid spacing
    :type dx: float
    :return: Second-derivative samples
    :rtype: ndarray
    """
    f = np.asarray(values)
    d = np.zeros_like(f)
    d[2:-2] = (
        -f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]
    ) / (12.0 * dx ** 2)
    d[1] = (f[0] - 2.0 * f[1] + f[2]) / dx ** 2
    d[-2] = (f[-3] - 2.0 * f[-2] + f[-1]) / dx ** 2
    return d


def _normalized(grid: Grid, values: ndarray) -> ndarray:
    norm = math.sqrt(trapezoid(np.abs(values) ** 2, dx=grid.dx))
    if not norm > 0 or not math.isfinite(norm):
        raise NonNormalizableException(
            f'\nError: Grid function has norm {norm} on {grid}.'
        )
    return values / norm


def _check_boundary(grid: Grid, values: ndarray, mask: ndarray) -> None:
    magnitude = np.abs(values)
    peak = float(np.max(magnitude))
    inner = np.nonzero(mask)[0]
    edge = max(magnitude[0], magnitude[-1])
    if edge > BOUNDARY_TOL * peak:
        raise NonNormalizableException(
            f'\nError: Grid function is {edge / peak:.3e} of its peak at the'
            f' boundary of {grid}; it has not decayed.'
        )
    top = int(np.argmax(magnitude))
    if top in (inner[0], inner[-1]):
        raise NonNormalizableException(
            f'\nError: Grid function peaks next to a singular endpoint of'
            f' {grid}; it is not normalizable there.'
        )


def ground_state(cfg: FamilyConfig, grid: Grid, a: float | None = None) -> GridFn:
    """
    Ground state Psi_0 proportional to exp(-sqrt(2) int W dx), normalized by
     the trapezoid rule.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param grid: Grid
    :type grid: Grid
    :param a: Orbit parameter, defaults to a1
    :type a: float | None
    :return: Psi_0
    :rtype: GridFn
    """
    mask = interior_mask(cfg, grid)
    exponent = -math.sqrt(2.0) * superpotential_integral(cfg, grid.x[mask], a)
    values = np.zeros(grid.npoints)
    values[mask] = np.exp(exponent - np.max(exponent))
    _check_boundary(grid, values, mask)
    return GridFn(grid, _normalized(grid, values))


def hamiltonian_residual(
        cfg: FamilyConfig, f: GridFn, energy: float, a: float | None = None
) -> float:
    """
    Relative residual ||(-1/2 d^2/dx^2 + V-(x, a) - E) f|| / ||f|| over the
     interior nodes 2 ... n-3.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param f: Grid function
    :type f: GridFn
    :param energy: Trial eigenvalue E
    :type energy: float
    :param a: Orbit parameter of V-, defaults to a1
    :type a: float | None
    :return: Relative residual
    :rtype: float
    """
    grid = f.grid
    mask = interior_mask(cfg, grid)
    mask[:2] = False
    mask[-2:] = False
    v_minus, _ = partner_potentials(cfg, grid.x[mask], a)
    laplacian = second_derivative(f.values, grid.dx)[mask]
    residual = -0.5 * laplacian + (v_minus - energy) * f.values[mask]
    return math.sqrt(np.sum(np.abs(residual) ** 2) * grid.dx) / f.norm()


def energy_mean(cfg: FamilyConfig, f: GridFn, a: float | None = None) -> float:
    """
    Rayleigh quotient <f|-1/2 d^2/dx^2 + V-(x, a)|f> / <f|f> over the
     interior nodes.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param f: Grid function
    :type f: GridFn
    :param a: Orbit parameter of V-, defaults to a1
    :type a: float | None
    :return: Mean energy
    :rtype: float
    """
    grid = f.grid
    mask = interior_mask(cfg, grid)
    mask[:2] = False
    mask[-2:] = False
    v_minus, _ = partner_potentials(cfg, grid.x[mask], a)
    applied = (
        -0.5 * second_derivative(f.values, grid.dx)[mask]
        + v_minus * f.values[mask]
    )
    mean = np.sum(np.conj(f.values[mask]) * applied) * grid.dx
    return float(mean.real) / f.norm() ** 2


def _potential(cfg: FamilyConfig, grid: Grid, a: float | None = None) -> ndarray:
    # V- on the unknowns 1 ... n-2, zero on singular nodes
    mask = interior_mask(cfg, grid)[1:-1]
    v_minus, _ = partner_potentials(cfg, grid.x[1:-1][mask], a)
    potential = np.zeros(grid.npoints - 2)
    potential[mask] = v_minus
    return potential


def _laplacian_bands(unknowns: int, dx: float) -> tuple[ndarray, ndarray, ndarray]:
    # odd ghost nodes keep the 5-point Laplacian symmetric next to the ends
    scale = 1.0 / (12.0 * dx ** 2)
    main = np.full(unknowns, -30.0 * scale)
    main[0] = main[-1] = -29.0 * scale
    return main, np.full(unknowns - 1, 16.0 * scale), np.full(unknowns - 2, -scale)


def _lowest_levels(
        cfg: FamilyConfig, grid: Grid, a: float, count: int
) -> tuple[ndarray, ndarray]:
    """
    Lowest eigenpairs of the banded Dirichlet Hamiltonian of V-(x, a).

    :return: (energies, normalized eigenvectors as columns over all nodes)
    :rtype: tuple[ndarray, ndarray]
    """
    unknowns = grid.npoints - 2
    main, first, second = _laplacian_bands(unknowns, grid.dx)
    band = np.zeros((3, unknowns))
    band[0, 2:] = -0.5 * second
    band[1, 1:] = -0.5 * first
    band[2] = -0.5 * main + _potential(cfg, grid, a)
    energies, vectors = eig_banded(band, select='i', select_range=(0, count - 1))
    values = np.zeros((grid.npoints, count))
    values[1:-1] = vectors / math.sqrt(grid.dx)
    return energies, values


def _raise(cfg: FamilyConfig, grid: Grid, lower: ndarray, a: float) -> ndarray:
    # [W(x, a) - eta d/dx] on the regular nodes
    mask = interior_mask(cfg, grid)
    image = np.zeros(grid.npoints)
    image[mask] = (
        superpotential(cfg, grid.x[mask], a) * lower[mask]
        - ETA * derivative(lower, grid.dx)[mask]
    )
    return image


def eigenfunctions(cfg: FamilyConfig, grid: Grid, nmax: int) -> list[GridFn]:
    """
    Psi_0 ... Psi_nmax of the a1 orbit.

    Each level is an eigenvector of the banded Hamiltonian of its orbit point;
     the sign follows the ladder
     Psi_m(a_k) ~ [W(x, a_k) - eta d/dx] Psi_{m-1}(a_{k+1}), so the phases
     match those of the coefficient vector. The returned levels must solve
     the continuum equation with the exact energies.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param grid: Grid
    :type grid: Grid
    :param nmax: Highest level
    :type nmax: int
    :return: Eigenfunctions indexed by level
    :rtype: list[GridFn]
    """
    if nmax < 0:
        raise DomainException(f'\nError: nmax must be >= 0, got {nmax}.')
    ground_state(cfg, grid)
    needed: dict[float, int] = {}
    for k in range(1, nmax + 2):
        a_k = orbit_point(cfg, k)
        needed[a_k] = max(needed.get(a_k, 0), nmax + 2 - k)
    spectra = {a: _lowest_levels(cfg, grid, a, count)[1] for a, count in needed.items()}
    memo: dict[tuple[float, int], ndarray] = {}
    for m in range(nmax + 1):
        for k in range(1, nmax - m + 2):
            a_k = orbit_point(cfg, k)
            if (a_k, m) in memo:
                continue
            values = spectra[a_k][:, m]
            if m == 0:
                reference = np.ones(grid.npoints)
            else:
                reference = _raise(cfg, grid, memo[(orbit_point(cfg, k + 1), m - 1)], a_k)
            if np.sum(values * reference) < 0:
                values = -values
            memo[(a_k, m)] = values
    a1 = orbit_point(cfg, 1)
    levels = []
    for m in range(nmax + 1):
        f = GridFn(grid, memo[(a1, m)].astype(complex))
        energy = remainder_sum(cfg, 1, m) if m else 0.0
        residual = hamiltonian_residual(cfg, f, energy)
        if residual > LADDER_RESIDUAL_TOL * max(1.0, energy):
            raise LadderResidualException(
                f'\nError: Level {m} has Hamiltonian residual {residual:.3e}'
                f' against E = {energy:.6g}; refine {grid}.'
            )
        logger.debug('Level %d built, residual %.3e', m, residual)
        levels.append(f)
    return levels


def excited_state(cfg: FamilyConfig, grid: Grid, n: int) -> GridFn:
    """
    Eigenfunction Psi_n of the a1 orbit.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param grid: Grid
    :type grid: Grid
    :param n: Level, n >= 1
    :type n: int
    :return: Psi_n
    :rtype: GridFn
    """
    if n < 1:
        raise DomainException(f'\nError: Excited level must be >= 1, got {n}.')
    return eigenfunctions(cfg, grid, n)[n]


def gram_matrix(fns: list[GridFn]) -> ndarray:
    """
    Gram matrix G_ij = sum conj(f_i) f_j dx.

    :param fns: Grid functions on one grid
    :type fns: list[GridFn]
    :return: Gram matrix
    :rtype: ndarray
    """
    grid = fns[0].grid
    if any(f.grid != grid for f in fns):
        raise GridMismatchException(
            '\nError: Gram matrices need functions on a common grid.'
        )
    stacked = np.array([f.values for f in fns])
    return np.conj(stacked) @ stacked.T * grid.dx


def wavepacket(s: CoherentState, grid: Grid | None = None) -> GridFn:
    """
    Coherent wavepacket sum_n c_n Psi_n(x).

    :param s: Coherent state with tail at most 1e-10
    :type s: CoherentState
    :param grid: Grid, defaults to the family's default grid
    :type grid: Grid | None
    :return: Wavepacket
    :rtype: GridFn
    """
    if s.tail > WAVEPACKET_TAIL_TOL:
        raise TruncationException(
            f'\nError: State tail {s.tail:.3e} exceeds {WAVEPACKET_TAIL_TOL}'
            f' for a wavepacket.'
        )
    grid = default_grid(s.cfg) if grid is None else grid
    mass = np.abs(s.c) ** 2
    suffix = np.cumsum(mass[::-1])[::-1]
    levels = max(1, int(np.count_nonzero(suffix > WAVEPACKET_DROP_MASS)))
    basis = eigenfunctions(s.cfg, grid, levels - 1)
    values = np.zeros(grid.npoints, dtype=complex)
    for n in range(levels):
        values += s.c[n] * basis[n].values
    _check_boundary(grid, values, interior_mask(s.cfg, grid))
    return GridFn(grid, values)


def _moments(f: GridFn) -> tuple[float, float, float, float]:
    grid = f.grid
    density = np.abs(f.values) ** 2
    norm_sq = trapezoid(density, dx=grid.dx)
    mean_x = trapezoid(grid.x * density, dx=grid.dx) / norm_sq
    mean_x2 = trapezoid(grid.x ** 2 * density, dx=grid.dx) / norm_sq
    slope = derivative(f.values, grid.dx)
    mean_p = trapezoid(np.conj(f.values) * -1j * slope, dx=grid.dx).real / norm_sq
    mean_p2 = trapezoid(np.abs(slope) ** 2, dx=grid.dx) / norm_sq
    return mean_x, mean_x2, mean_p, mean_p2


def position_mean(f: GridFn) -> float:
    return float(_moments(f)[0])


def momentum_mean(f: GridFn) -> float:
    return float(_moments(f)[2])


def uncertainty(f: GridFn) -> tuple[float, float, float]:
    """
    Position and momentum spreads of a decayed grid function.

    :param f: Grid function
    :type f: GridFn
    :return: (dx, dp, dx dp)
    :rtype: tuple[float, float, float]
    """
    mean_x, mean_x2, mean_p, mean_p2 = _moments(f)
    spread_x = math.sqrt(max(0.0, mean_x2 - mean_x ** 2))
    spread_p = math.sqrt(max(0.0, mean_p2 - mean_p ** 2))
    return spread_x, spread_p, spread_x * spread_p


def _hamiltonian_matrix(cfg: FamilyConfig, grid: Grid) -> Any:
    # unknowns are nodes 1 ... n-2
    main, first, second = _laplacian_bands(grid.npoints - 2, grid.dx)
    laplacian = sparse.diags([second, first, main, first, second], [-2, -1, 0, 1, 2])
    return -0.5 * laplacian + sparse.diags(_potential(cfg, grid))


def evolve_grid(cfg: FamilyConfig, f: GridFn, t: float, dt: float) -> GridFn:
    """
    Crank-Nicolson propagation of i d psi/dt = (-1/2 d^2/dx^2 + V-) psi with
     Dirichlet ends.

    :param cfg: Family of kind typeA, typeC or typeD
    :type cfg: FamilyConfig
    :param f: Initial wavefunction
    :type f: GridFn
    :param t: Total time, a whole number of steps
    :type t: float
    :param dt: Step, dt > 0
    :type dt: float
    :return: Wavefunction at time t
    :rtype: GridFn
    """
    if not dt > 0:
        raise DomainException(f'\nError: Time step must be > 0, got {dt}.')
    if t == 0:
        return GridFn(f.grid, f.values.copy())
    steps = round(t / dt)
    if steps < 1 or abs(steps * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise DomainException(
            f'\nError: t = {t} is not a positive whole number of steps dt = {dt}.'
        )
    grid = f.grid
    hamiltonian = _hamiltonian_matrix(cfg, grid)
    identity = sparse.identity(grid.npoints - 2)
    implicit = splu(sparse.csc_matrix(identity + 0.5j * dt * hamiltonian))
    explicit = sparse.csr_matrix(identity - 0.5j * dt * hamiltonian)
    psi = f.values[1:-1].copy()
    start = float(np.sum(np.abs(psi) ** 2))
    for _ in range(steps):
        psi = implicit.solve(explicit @ psi)
    drift = abs(float(np.sum(np.abs(psi) ** 2)) - start) / start
    if drift > NORM_DRIFT_TOL * max(1.0, steps / 1000):
        raise InstabilityException(
            f'\nError: Norm drifted by {drift:.3e} over {steps} steps.'
        )
    values = np.zeros(grid.npoints, dtype=complex)
    values[1:-1] = psi
    return GridFn(grid, values)
