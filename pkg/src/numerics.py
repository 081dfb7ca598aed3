# -*- encoding: utf-8 -*-

"""
Fixed-step integration of complex linear systems i dy/dt = A(t) y, one-period
propagators (monodromy matrices), their eigendecomposition and the Gauss-Legendre
quadrature used to check closed-form matrix elements.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy import sparse

from .logger import logger
from .utils import NumericalError, ParameterError

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]
MatrixLike = np.ndarray | sparse.spmatrix | sparse.sparray
RhsProvider = Callable[[float], MatrixLike]
PhaseProvider = Callable[[float], np.ndarray]

DEGENERACY_THRESHOLD = 1e-10
MIN_STEPS_PER_PERIOD = 16


class IntegratorScheme(Enum):
    RK4 = "rk4"


@dataclass(frozen=True)
class IntegratorConfig:
    steps_per_period: int = 4096
    scheme: IntegratorScheme = field(default=IntegratorScheme.RK4)

    def __post_init__(self):
        if int(self.steps_per_period) != self.steps_per_period or self.steps_per_period < MIN_STEPS_PER_PERIOD:
            raise ParameterError(f"steps_per_period must be an integer >= {MIN_STEPS_PER_PERIOD}, "
                                 f"got {self.steps_per_period}")
        if not isinstance(self.scheme, IntegratorScheme):
            object.__setattr__(self, 'scheme', IntegratorScheme(self.scheme))


@dataclass(frozen=True, eq=False)
class FloquetState:
    state: ComplexVector = field(repr=False)
    quasi_energy: float
    variance: float
    cycle_variance: float


def _without_diagonal(a: MatrixLike) -> MatrixLike:
    if sparse.issparse(a):
        return (a - sparse.diags(a.diagonal())).tocsr()
    return a - np.diag(np.diagonal(a))


def _conjugate_by_phases(a: MatrixLike, phases: np.ndarray, inverse: np.ndarray) -> MatrixLike:
    if sparse.issparse(a):
        return (sparse.diags(phases) @ a @ sparse.diags(inverse)).tocsr()
    return phases[:, None] * a * inverse[None, :]


def _interaction_picture(rhs_provider: RhsProvider, diagonal_phase: PhaseProvider) -> RhsProvider:
    # G(t) = P (A - diag A) P^-1 with P = diag(exp(i Phi(t))), Phi' = diag A
    def generator(t: float) -> MatrixLike:
        phi = np.asarray(diagonal_phase(t), dtype=np.complex128)
        return _conjugate_by_phases(_without_diagonal(rhs_provider(t)), np.exp(1j * phi), np.exp(-1j * phi))

    return generator


def _step_count(t0: float, t1: float, cfg: IntegratorConfig, period: float | None) -> int:
    if period is None:
        return cfg.steps_per_period
    nominal = period / cfg.steps_per_period
    return max(1, math.ceil((t1 - t0) / nominal - 1e-9))


def _rk4(generator: RhsProvider, y: np.ndarray, t0: float, t1: float, steps: int) -> np.ndarray:
    h = (t1 - t0) / steps
    a_start = generator(t0)
    for i in range(steps):
        a_mid = generator(t0 + (i + 0.5) * h)
        a_end = generator(t0 + (i + 1) * h)
        k1 = -1j * (a_start @ y)
        k2 = -1j * (a_mid @ (y + 0.5 * h * k1))
        k3 = -1j * (a_mid @ (y + 0.5 * h * k2))
        k4 = -1j * (a_end @ (y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        a_start = a_end
    return y


def integrate_linear(
        rhs_provider: RhsProvider,
        y0: np.ndarray,
        t0: float,
        t1: float,
        cfg: IntegratorConfig = IntegratorConfig(),
        *,
        period: float | None = None,
        diagonal_phase: PhaseProvider | None = None
) -> np.ndarray:
    """
    Solve i dy/dt = A(t) y from t0 to t1 with fixed-step classical RK4.

    Without ``period`` the interval [t0, t1] is split into exactly
    ``cfg.steps_per_period`` steps; with it, the nominal step is
    period / steps_per_period and the interval is covered by the smallest number
    of equal steps not exceeding it. ``y0`` may be a vector or a matrix whose
    columns are propagated together.

    ``diagonal_phase`` gives Phi(t) with dPhi/dt = diag A(t); the diagonal part is
    then applied exactly and RK4 only integrates the interaction-picture coupling.
    """
    if not t1 > t0:
        raise ParameterError(f"t1 must be greater than t0, got t0={t0}, t1={t1}")

    y = np.array(y0, dtype=np.complex128)
    a0 = rhs_provider(t0)
    if a0.shape[0] != a0.shape[1] or a0.shape[1] != y.shape[0]:
        raise ParameterError(f"Dimension mismatch: generator {a0.shape}, initial state {y.shape}")

    steps = _step_count(t0, t1, cfg, period)
    generator = rhs_provider
    if diagonal_phase is not None:
        phi0 = np.asarray(diagonal_phase(t0), dtype=np.complex128)
        y = _scale_rows(np.exp(1j * phi0), y)
        generator = _interaction_picture(rhs_provider, diagonal_phase)

    y = _rk4(generator, y, t0, t1, steps)

    if diagonal_phase is not None:
        phi1 = np.asarray(diagonal_phase(t1), dtype=np.complex128)
        y = _scale_rows(np.exp(-1j * phi1), y)

    if not np.all(np.isfinite(y)):
        raise NumericalError(f"Non-finite values after {steps} RK4 steps on [{t0}, {t1}]; "
                             f"the step size is too large for these parameters")
    return y


def _scale_rows(factors: np.ndarray, y: np.ndarray) -> np.ndarray:
    return factors[:, None] * y if y.ndim == 2 else factors * y


def monodromy(
        rhs_provider: RhsProvider,
        dim: int,
        period: float,
        cfg: IntegratorConfig = IntegratorConfig(),
        *,
        diagonal_phase: PhaseProvider | None = None
) -> ComplexMatrix:
    if dim < 1:
        raise ParameterError(f"dim must be positive, got {dim}")
    if not period > 0:
        raise ParameterError(f"period must be positive, got {period}")

    m = integrate_linear(rhs_provider, np.eye(dim, dtype=np.complex128), 0.0, period, cfg,
                         diagonal_phase=diagonal_phase)
    logger.debug(f"monodromy dim={dim} T={period:.6g} steps={cfg.steps_per_period} "
                 f"unitarity defect={unitarity_defect(m):.3e}")
    return m


def unitarity_defect(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def fix_phase(vector: np.ndarray) -> np.ndarray:
    pivot = vector[int(np.argmax(np.abs(vector)))]
    if pivot == 0:
        return vector
    return vector * (abs(pivot) / pivot)


def eig_normal(
        m: ComplexMatrix,
        residual_tol: float = 1e-8,
        normality_tol: float = 1e-6
) -> list[tuple[complex, ComplexVector]]:
    """
    Eigenpairs of a (near-)normal matrix, sorted by ascending quasi-phase -arg(lambda).

    Eigenvectors are unit-norm with their largest entry real positive. Vectors in
    clusters closer than DEGENERACY_THRESHOLD are orthonormalized.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"eig_normal needs a square matrix, got shape {m.shape}")

    commutator = float(np.max(np.abs(m @ m.conj().T - m.conj().T @ m)))
    if commutator > normality_tol:
        raise NumericalError(f"Matrix is not normal: max |MM* - M*M| = {commutator:.3e}")

    try:
        values, vectors = np.linalg.eig(m)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Eigendecomposition did not converge: {e}") from e

    order = sorted(range(len(values)), key=lambda i: (-np.angle(values[i]), i))
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)

    for cluster in _degenerate_clusters(values):
        if len(cluster) > 1:
            q, _ = np.linalg.qr(vectors[:, cluster])
            vectors[:, cluster] = q

    pairs = []
    for j, value in enumerate(values):
        v = fix_phase(vectors[:, j])
        residual = float(np.linalg.norm(m @ v - value * v))
        if not residual < residual_tol:
            raise NumericalError(f"Eigenpair {j} residual {residual:.3e} exceeds {residual_tol:.1e}")
        pairs.append((complex(value), v))
    return pairs


def _degenerate_clusters(values: np.ndarray) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i, value in enumerate(values):
        if clusters and abs(value - values[clusters[-1][-1]]) < DEGENERACY_THRESHOLD:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and abs(values[0] - values[-1]) < DEGENERACY_THRESHOLD:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def reduce_quasi_energy(mu: float, period: float) -> float:
    """Map mu onto the principal branch (-pi/T, pi/T]."""
    width = 2.0 * math.pi / period
    half = math.pi / period
    return float(mu - width * math.ceil((mu - half) / width))


def quasi_energy(eigenvalue: complex, period: float) -> float:
    return reduce_quasi_energy(-float(np.angle(eigenvalue)) / period, period)


def floquet_states(
        m: ComplexMatrix,
        period: float,
        variance: Callable[[ComplexVector], float],
        cycle_variance: Callable[[ComplexVector], float] | None = None
) -> list[FloquetState]:
    """
    Floquet states of a monodromy, sorted by cycle variance with ties broken by quasi-energy.

    Without ``cycle_variance`` the variance at the start of the period is used for both.
    """
    states = []
    for value, v in eig_normal(m):
        at_start = variance(v)
        states.append(FloquetState(
            state=v, quasi_energy=quasi_energy(value, period), variance=at_start,
            cycle_variance=cycle_variance(v) if cycle_variance else at_start
        ))
    return sorted(states, key=lambda s: (s.cycle_variance, s.quasi_energy))


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(10)


def gauss_legendre_rule(a: float, b: float, panels: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Flattened nodes and weights of the composite 10-point Gauss-Legendre rule on [a, b]."""
    if panels < 1:
        raise ParameterError(f"panels must be positive, got {panels}")
    edges = np.linspace(a, b, panels + 1)
    half_width = 0.5 * (edges[1:] - edges[:-1])
    centers = 0.5 * (edges[1:] + edges[:-1])
    nodes = centers[:, None] + half_width[:, None] * _GAUSS_NODES[None, :]
    weights = half_width[:, None] * _GAUSS_WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def quadrature(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int = 64) -> float:
    """Composite Gauss-Legendre value of the integral; ``f`` is evaluated on an array of nodes."""
    nodes, weights = gauss_legendre_rule(a, b, panels)
    values = np.asarray(f(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"Integrand is not finite on [{a}, {b}]")
    return float(np.sum(weights * values))


def convergence_order(rhs_provider: RhsProvider, y0: np.ndarray, t0: float, t1: float, steps: int) -> float:
    """Measured RK4 order from runs at h and h/2 against a reference at h/16."""
    coarse = integrate_linear(rhs_provider, y0, t0, t1, IntegratorConfig(steps))
    fine = integrate_linear(rhs_provider, y0, t0, t1, IntegratorConfig(2 * steps))
    reference = integrate_linear(rhs_provider, y0, t0, t1, IntegratorConfig(16 * steps))
    coarse_error = float(np.max(np.abs(coarse - reference)))
    fine_error = float(np.max(np.abs(fine - reference)))
    if fine_error == 0.0:
        raise NumericalError("Fine run matches the reference exactly; the order is undefined")
    return math.log2(coarse_error / fine_error)
