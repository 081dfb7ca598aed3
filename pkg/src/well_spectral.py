# -*- encoding: utf-8 -*-

"""
Particle between two breathing impenetrable walls.

The state is expanded in the static eigenbasis of a well centered at 0 with
walls at -L/2 and L/2, and evolved in the non-breathing frame, where the
Hamiltonian is H(t) = diag(E_n) / alpha^2 - (alpha alpha''/2 + alpha'^2) m X2.

The leading model keeps only the first-order drive of that frame,
H(t) = diag(E_n) + m eps omega^2 cos(omega t) X2 / 2. Its fast-drive average is the
harmonic trap of frequency eps omega / sqrt(2); in the full frame Hamiltonian the
second-order static term cancels that trap.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial

import numpy as np
import numpy.typing as npt
from scipy import linalg, signal

from .breathing import BreathingSchedule, alpha_eval, drive_integral, inverse_square_integral
from .logger import logger
from .numerics import (
    ComplexMatrix, FloquetState, IntegratorConfig, fix_phase, floquet_states, gauss_legendre_rule,
    integrate_linear, monodromy, unitarity_defect
)
from .sweep import run_grid
from .utils import NumericalError, ParameterError

ModeState = npt.NDArray[np.complex128]

NORM_TOLERANCE = 1e-8
BASIS_CHECK_TOLERANCE = 1e-10
CYCLE_SAMPLES = 16


class WellModel(Enum):
    FULL = "full"
    LEADING = "leading"


@dataclass(frozen=True, eq=False)
class WellBasis:
    L: float
    N: int
    hbar: float
    mass: float
    E: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    X2: np.ndarray = field(repr=False)


def _closed_form_elements(L: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, N + 1, dtype=float)
    n_col, m_row = n[:, None], n[None, :]
    same = np.eye(N, dtype=bool)
    even_sum = ((n_col + m_row) % 2) == 0
    with np.errstate(divide='ignore', invalid='ignore'):
        kernel = 8.0 * n_col * m_row / (math.pi ** 2 * (n_col ** 2 - m_row ** 2) ** 2)
    x = np.where(~even_sum, -L * kernel, 0.0)
    x2 = np.where(even_sum & ~same, L ** 2 * kernel, 0.0)
    x2[same] = L ** 2 * (1.0 / 12.0 - 1.0 / (2.0 * n ** 2 * math.pi ** 2))
    return x, x2


def basis_functions(basis: WellBasis, x: np.ndarray) -> np.ndarray:
    """Static eigenfunctions sampled at ``x``; row per sample, column per mode, zero outside the walls."""
    x = np.asarray(x, dtype=float)
    n = np.arange(1, basis.N + 1)
    values = math.sqrt(2.0 / basis.L) * np.sin(np.pi * n[None, :] * (x[:, None] / basis.L + 0.5))
    values[np.abs(x) > 0.5 * basis.L] = 0.0
    return values


def quadrature_matrix_elements(basis: WellBasis, panels: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """X and X2 by Gauss-Legendre quadrature of the sine-basis integrals."""
    panels = panels or max(64, 8 * basis.N)
    nodes, weights = gauss_legendre_rule(-0.5 * basis.L, 0.5 * basis.L, panels)
    phi = basis_functions(basis, nodes)
    weighted = phi * weights[:, None]
    return weighted.T @ (nodes[:, None] * phi), weighted.T @ (nodes[:, None] ** 2 * phi)


def build_basis(L: float = 1.0, N: int = 30, hbar: float = 1.0, mass: float = 1.0, verify: bool = True) -> WellBasis:
    if int(N) != N or N < 2:
        raise ParameterError(f"N must be an integer >= 2, got {N}")
    if not L > 0 or not hbar > 0 or not mass > 0:
        raise ParameterError(f"L, hbar and mass must be positive, got L={L}, hbar={hbar}, mass={mass}")

    N = int(N)
    n = np.arange(1, N + 1, dtype=float)
    energies = n ** 2 * math.pi ** 2 * hbar ** 2 / (2.0 * mass * L ** 2)
    x, x2 = _closed_form_elements(L, N)
    basis = WellBasis(L=L, N=N, hbar=hbar, mass=mass, E=energies, X=x, X2=x2)

    if verify:
        x_q, x2_q = quadrature_matrix_elements(basis)
        deviation = max(float(np.max(np.abs(x - x_q))), float(np.max(np.abs(x2 - x2_q))))
        logger.debug(f"well basis N={N} L={L}: closed form vs quadrature deviation {deviation:.2e}")
        if deviation > BASIS_CHECK_TOLERANCE * max(1.0, L ** 2):
            raise NumericalError(f"Closed-form matrix elements disagree with quadrature by {deviation:.2e}")
    return basis


def hamiltonian_at(basis: WellBasis, schedule: BreathingSchedule, t: float,
                   model: WellModel = WellModel.FULL) -> ComplexMatrix:
    if model is WellModel.LEADING:
        drive = 0.5 * basis.mass * schedule.epsilon * schedule.omega ** 2 * math.cos(schedule.omega * t)
        return (np.diag(basis.E) + drive * basis.X2).astype(np.complex128)
    alpha, _, _, drive_f = alpha_eval(schedule, t)
    h = np.diag(basis.E / alpha ** 2) - drive_f * basis.mass * basis.X2
    return h.astype(np.complex128)


def _generator(basis: WellBasis, schedule: BreathingSchedule, model: WellModel, t: float) -> ComplexMatrix:
    return hamiltonian_at(basis, schedule, t, model) / basis.hbar


def _diagonal_phase(basis: WellBasis, schedule: BreathingSchedule, model: WellModel, t: float) -> np.ndarray:
    if model is WellModel.LEADING:
        drive = 0.5 * basis.mass * schedule.epsilon * schedule.omega * math.sin(schedule.omega * t)
        return (basis.E * t + drive * np.diagonal(basis.X2)) / basis.hbar
    kinetic = basis.E * inverse_square_integral(schedule, t)
    drive = basis.mass * np.diagonal(basis.X2) * drive_integral(schedule, t)
    return (kinetic - drive) / basis.hbar


def _check_normalized(state: np.ndarray, name: str = "state") -> None:
    norm = float(np.linalg.norm(state))
    if not abs(norm - 1.0) <= NORM_TOLERANCE:
        raise ParameterError(f"{name} must be normalized, got norm {norm:.12g}")


def variance_x(basis: WellBasis, state: ModeState) -> float:
    state = np.asarray(state, dtype=np.complex128)
    _check_normalized(state)
    mean = float(np.real(np.vdot(state, basis.X @ state)))
    mean_square = float(np.real(np.vdot(state, basis.X2 @ state)))
    return max(mean_square - mean ** 2, 0.0)


def evolve(
        basis: WellBasis,
        schedule: BreathingSchedule,
        state: ModeState,
        t0: float,
        t1: float,
        cfg: IntegratorConfig = IntegratorConfig(),
        model: WellModel = WellModel.FULL
) -> ModeState:
    """Mode coefficients at t1 under the non-breathing-frame Hamiltonian, starting from ``state`` at t0."""
    return integrate_linear(
        partial(_generator, basis, schedule, model), state, t0, t1, cfg,
        period=schedule.period, diagonal_phase=partial(_diagonal_phase, basis, schedule, model)
    )


def one_period_propagator(basis: WellBasis, schedule: BreathingSchedule,
                          cfg: IntegratorConfig = IntegratorConfig(),
                          model: WellModel = WellModel.FULL) -> ComplexMatrix:
    return monodromy(partial(_generator, basis, schedule, model), basis.N, schedule.period, cfg,
                     diagonal_phase=partial(_diagonal_phase, basis, schedule, model))


def cycle_propagators(
        basis: WellBasis,
        schedule: BreathingSchedule,
        cfg: IntegratorConfig = IntegratorConfig(),
        model: WellModel = WellModel.FULL,
        samples: int = CYCLE_SAMPLES
) -> list[ComplexMatrix]:
    """U(k T / samples, 0) for k = 1..samples; the last entry is the one-period propagator."""
    if samples < 1:
        raise ParameterError(f"samples must be positive, got {samples}")
    u = np.eye(basis.N, dtype=np.complex128)
    times = np.linspace(0.0, schedule.period, samples + 1)
    propagators = []
    for t0, t1 in zip(times[:-1], times[1:]):
        u = evolve(basis, schedule, u, float(t0), float(t1), cfg, model)
        propagators.append(u)
    return propagators


def cycle_variance(basis: WellBasis, propagators: list[ComplexMatrix], state: ModeState) -> float:
    """Position variance averaged over the sampled phases t = 0, T/S, ..., (S-1) T/S."""
    values = [variance_x(basis, state)]
    for u in propagators[:-1]:
        moved = u @ state
        values.append(variance_x(basis, moved / np.linalg.norm(moved)))
    return float(np.mean(values))


def floquet_spectrum(
        basis: WellBasis,
        schedule: BreathingSchedule,
        cfg: IntegratorConfig = IntegratorConfig(),
        model: WellModel = WellModel.FULL
) -> list[FloquetState]:
    """Floquet states of the well, sorted by position variance averaged over one period."""
    propagators = cycle_propagators(basis, schedule, cfg, model)
    m = propagators[-1]
    logger.debug(f"well monodromy N={basis.N} model={model.value} unitarity defect={unitarity_defect(m):.3e}")
    states = floquet_states(m, schedule.period, partial(variance_x, basis),
                            partial(cycle_variance, basis, propagators))
    logger.debug(f"well floquet eps={schedule.epsilon} omega={schedule.omega:.6g}: "
                 f"min cycle variance {states[0].cycle_variance:.6g}")
    return states


def floquet_state_at(
        basis: WellBasis,
        schedule: BreathingSchedule,
        floquet: FloquetState,
        t: float,
        cfg: IntegratorConfig = IntegratorConfig(),
        model: WellModel = WellModel.FULL
) -> ModeState:
    """
    Mode coefficients of a Floquet state at time t, given its vector at t = 0.

    Negative times are shifted forward by whole periods and the quasi-energy phase
    exp(i mu n T) is restored.
    """
    periods = math.ceil(-t / schedule.period) if t < 0 else 0
    shifted = t + periods * schedule.period
    state = floquet.state
    if shifted > 1e-12 * schedule.period:
        state = evolve(basis, schedule, state, 0.0, shifted, cfg, model)
    return state * np.exp(1j * floquet.quasi_energy * periods * schedule.period)


def effective_ground_state(basis: WellBasis, omega_eff: float) -> tuple[float, ModeState]:
    """Ground eigenpair of diag(E_n) + m Omega^2 X2 / 2, the averaged harmonic trap."""
    if not omega_eff >= 0:
        raise ParameterError(f"Omega must be non-negative, got {omega_eff}")
    h = np.diag(basis.E) + 0.5 * basis.mass * omega_eff ** 2 * basis.X2
    values, vectors = linalg.eigh(h, subset_by_index=[0, 0])
    state = fix_phase(vectors[:, 0].astype(np.complex128))
    return float(values[0]), state / np.linalg.norm(state)


def effective_potential(omega_eff: float, x: np.ndarray, mass: float = 1.0) -> np.ndarray:
    return 0.5 * mass * omega_eff ** 2 * np.asarray(x, dtype=float) ** 2


def fidelity(s1: ModeState, s2: ModeState) -> float:
    s1 = np.asarray(s1, dtype=np.complex128)
    s2 = np.asarray(s2, dtype=np.complex128)
    _check_normalized(s1, "first state")
    _check_normalized(s2, "second state")
    return float(min(abs(np.vdot(s1, s2)) ** 2, 1.0))


def _min_variance(basis: WellBasis, cfg: IntegratorConfig, model: WellModel, point: tuple[float, float]) -> float:
    omega, epsilon = point
    return floquet_spectrum(basis, BreathingSchedule(epsilon=epsilon, omega=omega), cfg, model)[0].cycle_variance


def variance_map(
        basis: WellBasis,
        omega_grid: np.ndarray,
        epsilon_grid: np.ndarray,
        cfg: IntegratorConfig = IntegratorConfig(),
        workers: int = 1,
        show_progress: bool = False,
        model: WellModel = WellModel.FULL
) -> np.ndarray:
    """Lowest cycle-averaged Floquet variance on the (omega, epsilon) grid; row per omega, column per epsilon."""
    omega_grid = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    epsilon_grid = np.atleast_1d(np.asarray(epsilon_grid, dtype=float))
    if omega_grid.size == 0 or epsilon_grid.size == 0:
        raise ParameterError("omega and epsilon grids must be nonempty")
    points = [(float(w), float(e)) for w in omega_grid for e in epsilon_grid]
    for omega, epsilon in points:
        BreathingSchedule(epsilon=epsilon, omega=omega)

    values = run_grid(partial(_min_variance, basis, cfg, model), points, workers=workers,
                      desc="well variance map", show_progress=show_progress)
    return np.array(values, dtype=float).reshape(omega_grid.size, epsilon_grid.size)


def reconstruct_lab_frame(
        basis: WellBasis,
        schedule: BreathingSchedule,
        state: ModeState,
        t: float,
        x_samples: np.ndarray
) -> np.ndarray:
    """Lab-frame wavefunction psi(x, t) of the mode coefficients ``state`` at time t."""
    alpha, alpha_dot, _, _ = alpha_eval(schedule, t)
    x = np.asarray(x_samples, dtype=float)
    half_width = 0.5 * alpha * basis.L
    if np.any(np.abs(x) > half_width * (1.0 + 1e-12)):
        raise ParameterError(f"Samples must lie between the breathing walls at +-{half_width:.6g}")

    phi = basis_functions(basis, x / alpha) @ np.asarray(state, dtype=np.complex128)
    chirp = np.exp(1j * basis.mass * alpha_dot * x ** 2 / (2.0 * basis.hbar * alpha))
    return phi * chirp / math.sqrt(alpha)


def level_spacings(basis: WellBasis) -> np.ndarray:
    differences = (basis.E[:, None] - basis.E[None, :]) / basis.hbar
    return np.unique(differences[differences > 0])


def nearest_level_spacing(basis: WellBasis, omega: float) -> tuple[float, float]:
    spacings = level_spacings(basis)
    nearest = float(spacings[int(np.argmin(np.abs(spacings - omega)))])
    return nearest, abs(omega - nearest) / nearest


def resonance_spikes(variances: np.ndarray, prominence: float = 0.2) -> np.ndarray:
    """Indices of isolated peaks of a variance-vs-frequency series, prominence relative to its median."""
    values = np.asarray(variances, dtype=float)
    scale = float(np.median(values))
    if not scale > 0:
        return np.array([], dtype=int)
    peaks, _ = signal.find_peaks(values / scale, prominence=prominence)
    return peaks
