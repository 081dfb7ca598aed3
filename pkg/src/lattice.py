# -*- encoding: utf-8 -*-

"""
Breathing waveguide lattice in the nearest-neighbour tight-binding approximation:

    i dc_n/dz = -(k/alpha)(c_{n+1} + c_{n-1}) + i (alpha'/alpha) c_n
                - (alpha alpha''/2 + alpha'^2) (g/k) (n - n0)^2 c_n

with z measured in units of 1/k when k = 1 and open boundaries at the end sites.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial

import numpy as np
from scipy import sparse, special

from .breathing import BreathingSchedule, alpha_eval, drive_integral, inverse_integral
from .logger import logger
from .numerics import (
    ComplexMatrix, FloquetState, IntegratorConfig, floquet_states, integrate_linear, monodromy,
    unitarity_defect
)
from .sweep import run_grid
from .utils import NumericalError, ParameterError

UNIT_CIRCLE_TOLERANCE = 1e-6
UNIT_CIRCLE_WARNING = 1e-8


class DilationTerm(Enum):
    """Coefficient of the i alpha'/alpha c_n term."""
    PRINTED = 1.0
    HALVED = 0.5


@dataclass(frozen=True)
class LatticeConfig:
    n_sites: int = 161
    k: float = 1.0
    g: float = 1.0
    schedule: BreathingSchedule = field(default_factory=lambda: BreathingSchedule(epsilon=0.1, omega=1.0))
    trap_center: int = 0
    dilation: DilationTerm = DilationTerm.PRINTED

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3 or self.n_sites % 2 == 0:
            raise ParameterError(f"n_sites must be an odd integer >= 3, got {self.n_sites}")
        if not self.k > 0:
            raise ParameterError(f"coupling k must be positive, got {self.k}")
        if not self.g > 0:
            raise ParameterError(f"on-site strength g must be positive, got {self.g}")
        if int(self.trap_center) != self.trap_center or not abs(self.trap_center) < (self.n_sites - 1) // 2:
            raise ParameterError(f"trap_center must be an integer with |n0| < {(self.n_sites - 1) // 2}, "
                                 f"got {self.trap_center}")
        if not isinstance(self.dilation, DilationTerm):
            object.__setattr__(self, 'dilation', DilationTerm[str(self.dilation).upper()])


@dataclass(frozen=True, eq=False)
class PropagationResult:
    z_samples: np.ndarray
    snapshots: np.ndarray = field(repr=False)
    variance_series: np.ndarray = field(repr=False)
    norm_series: np.ndarray = field(repr=False)


def site_indices(cfg: LatticeConfig) -> np.ndarray:
    half = (cfg.n_sites - 1) // 2
    return np.arange(-half, half + 1)


def gaussian_beam(cfg: LatticeConfig, width: float = 5.0) -> np.ndarray:
    """c_n = exp(-(n - n0)^2 / width), unnormalized."""
    n = site_indices(cfg)
    return np.exp(-((n - cfg.trap_center) ** 2) / width).astype(np.complex128)


def single_site(cfg: LatticeConfig, site: int | None = None) -> np.ndarray:
    site = cfg.trap_center if site is None else site
    n = site_indices(cfg)
    if site not in n:
        raise ParameterError(f"site {site} is outside the lattice")
    return (n == site).astype(np.complex128)


def bessel_intensity(sites: np.ndarray, z: float, k: float = 1.0) -> np.ndarray:
    """Discrete diffraction of a single-site input in an infinite uniform lattice, J_n(2kz)^2."""
    return special.jv(np.asarray(sites), 2.0 * k * z) ** 2


def _onsite(cfg: LatticeConfig, t: float, onsite_energy: float = 0.0) -> tuple[float, np.ndarray]:
    alpha, alpha_dot, _, drive_f = alpha_eval(cfg.schedule, t)
    offset = site_indices(cfg) - cfg.trap_center
    diagonal = (1j * cfg.dilation.value * alpha_dot / alpha
                - drive_f * (cfg.g / cfg.k) * offset ** 2
                + onsite_energy / alpha)
    return alpha, diagonal


def lattice_generator(cfg: LatticeConfig, t: float) -> ComplexMatrix:
    alpha, diagonal = _onsite(cfg, t)
    hopping = np.full(cfg.n_sites - 1, -cfg.k / alpha, dtype=np.complex128)
    return np.diag(diagonal) + np.diag(hopping, 1) + np.diag(hopping, -1)


def _sparse_generator(cfg: LatticeConfig, onsite_energy: float, t: float) -> sparse.csr_matrix:
    alpha, diagonal = _onsite(cfg, t, onsite_energy)
    hopping = np.full(cfg.n_sites - 1, -cfg.k / alpha, dtype=np.complex128)
    return sparse.diags([hopping, diagonal, hopping], [-1, 0, 1], format='csr')


def _diagonal_phase(cfg: LatticeConfig, onsite_energy: float, t: float) -> np.ndarray:
    alpha = alpha_eval(cfg.schedule, t).alpha
    offset = site_indices(cfg) - cfg.trap_center
    return (1j * cfg.dilation.value * math.log(alpha)
            - (cfg.g / cfg.k) * offset ** 2 * drive_integral(cfg.schedule, t)
            + onsite_energy * inverse_integral(cfg.schedule, t)).astype(np.complex128)


def variance_n(state: np.ndarray, center: int = 0) -> float:
    """Site variance sum (n - n0)^2 |c_n|^2 / sum |c_n|^2 of a lattice state."""
    state = np.asarray(state)
    if state.size % 2 == 0:
        raise ParameterError(f"lattice states have an odd number of sites, got {state.size}")
    intensity = np.abs(state) ** 2
    total = float(np.sum(intensity))
    if not total > 0:
        raise ParameterError("variance of a zero state is undefined")
    half = (state.size - 1) // 2
    n = np.arange(-half, half + 1)
    return float(np.sum((n - center) ** 2 * intensity) / total)


def _propagate_amplitudes(
        cfg: LatticeConfig,
        c0: np.ndarray,
        z_samples: np.ndarray,
        integrator_cfg: IntegratorConfig,
        onsite_energy: float = 0.0
) -> np.ndarray:
    rhs = partial(_sparse_generator, cfg, onsite_energy)
    phase = partial(_diagonal_phase, cfg, onsite_energy)
    amplitudes = [np.asarray(c0, dtype=np.complex128)]
    for z0, z1 in zip(z_samples[:-1], z_samples[1:]):
        amplitudes.append(integrate_linear(rhs, amplitudes[-1], float(z0), float(z1), integrator_cfg,
                                           period=cfg.schedule.period, diagonal_phase=phase))
    return np.array(amplitudes)


def sample_grid(z_end: float, sample_every: float) -> np.ndarray:
    """Uniform samples from 0 to z_end; the spacing is adjusted to divide z_end evenly."""
    if not z_end > 0:
        raise ParameterError(f"z_end must be positive, got {z_end}")
    if not sample_every > 0:
        raise ParameterError(f"sample_every must be positive, got {sample_every}")
    intervals = max(1, round(z_end / sample_every))
    return np.linspace(0.0, z_end, intervals + 1)


def propagate(
        cfg: LatticeConfig,
        c0: np.ndarray,
        z_end: float,
        sample_every: float,
        integrator_cfg: IntegratorConfig = IntegratorConfig()
) -> PropagationResult:
    c0 = np.asarray(c0, dtype=np.complex128)
    if c0.shape != (cfg.n_sites,):
        raise ParameterError(f"initial state needs {cfg.n_sites} sites, got shape {c0.shape}")

    z_samples = sample_grid(z_end, sample_every)
    amplitudes = _propagate_amplitudes(cfg, c0, z_samples, integrator_cfg)
    snapshots = np.abs(amplitudes) ** 2
    result = PropagationResult(
        z_samples=z_samples,
        snapshots=snapshots,
        variance_series=np.array([variance_n(c, cfg.trap_center) for c in amplitudes]),
        norm_series=np.linalg.norm(amplitudes, axis=1),
    )
    logger.debug(f"lattice propagation to z={z_end} eps={cfg.schedule.epsilon} omega={cfg.schedule.omega}: "
                 f"variance {result.variance_series[0]:.6g} -> {result.variance_series[-1]:.6g}")
    return result


def one_period_propagator(cfg: LatticeConfig, integrator_cfg: IntegratorConfig = IntegratorConfig()) -> ComplexMatrix:
    return monodromy(partial(_sparse_generator, cfg, 0.0), cfg.n_sites, cfg.schedule.period, integrator_cfg,
                     diagonal_phase=partial(_diagonal_phase, cfg, 0.0))


def lattice_floquet(cfg: LatticeConfig, integrator_cfg: IntegratorConfig = IntegratorConfig()) -> list[FloquetState]:
    """Floquet states at drive phase z = 0, sorted by ascending site variance."""
    m = one_period_propagator(cfg, integrator_cfg)
    defect = unitarity_defect(m)
    if defect > UNIT_CIRCLE_TOLERANCE:
        raise NumericalError(f"one-period propagator is not unitary (defect {defect:.3e}); "
                             f"increase steps_per_period")
    if defect > UNIT_CIRCLE_WARNING:
        logger.warning(f"one-period propagator drifts off the unit circle by {defect:.3e}")
    return floquet_states(m, cfg.schedule.period, partial(variance_n, center=cfg.trap_center))


def _min_variance(cfg_template: LatticeConfig, integrator_cfg: IntegratorConfig, point: tuple[float, float]) -> float:
    omega, epsilon = point
    cfg = replace(cfg_template, schedule=BreathingSchedule(epsilon=epsilon, omega=omega))
    return lattice_floquet(cfg, integrator_cfg)[0].variance


def lattice_variance_map(
        cfg_template: LatticeConfig,
        omega_grid: np.ndarray,
        epsilon_grid: np.ndarray,
        integrator_cfg: IntegratorConfig = IntegratorConfig(),
        workers: int = 1,
        show_progress: bool = False
) -> np.ndarray:
    """Lowest Floquet site variance on the (omega, epsilon) grid; row per omega, column per epsilon."""
    omega_grid = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    epsilon_grid = np.atleast_1d(np.asarray(epsilon_grid, dtype=float))
    if omega_grid.size == 0 or epsilon_grid.size == 0:
        raise ParameterError("omega and epsilon grids must be nonempty")
    points = [(float(w), float(e)) for w in omega_grid for e in epsilon_grid]
    for omega, epsilon in points:
        BreathingSchedule(epsilon=epsilon, omega=omega)

    values = run_grid(partial(_min_variance, cfg_template, integrator_cfg), points, workers=workers,
                      desc="lattice variance map", show_progress=show_progress)
    return np.array(values, dtype=float).reshape(omega_grid.size, epsilon_grid.size)


def gauge_check(
        cfg: LatticeConfig,
        onsite_energy: float,
        c0: np.ndarray,
        z_end: float,
        integrator_cfg: IntegratorConfig = IntegratorConfig(),
        sample_every: float | None = None
) -> float:
    """
    Largest intensity difference between runs with and without a uniform on-site energy e/alpha.

    The run with the on-site term is mapped back by the canonical phase exp(i e int dz/alpha),
    which removes that term from the equation; the amplitude mismatch after the phase is logged.
    """
    c0 = np.asarray(c0, dtype=np.complex128)
    if c0.shape != (cfg.n_sites,):
        raise ParameterError(f"initial state needs {cfg.n_sites} sites, got shape {c0.shape}")

    z_samples = sample_grid(z_end, sample_every or min(cfg.schedule.period, z_end))
    plain = _propagate_amplitudes(cfg, c0, z_samples, integrator_cfg)
    shifted = _propagate_amplitudes(cfg, c0, z_samples, integrator_cfg, onsite_energy=onsite_energy)
    canonical = shifted * np.exp(1j * onsite_energy * inverse_integral(cfg.schedule, z_samples))[:, None]

    intensity_deviation = float(np.max(np.abs(np.abs(canonical) ** 2 - np.abs(plain) ** 2)))
    amplitude_deviation = float(np.max(np.abs(canonical - plain)))
    logger.debug(f"gauge check e={onsite_energy}: intensity deviation {intensity_deviation:.3e}, "
                 f"amplitude deviation {amplitude_deviation:.3e}")
    return intensity_deviation
