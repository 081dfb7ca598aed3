# -*- encoding: utf-8 -*-

"""
The breathing drive alpha(t) = 1 + epsilon cos(omega t).

Time t is the single dimensionless evolution parameter: physical time for the
particle between walls, propagation distance z for the waveguide lattice.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .utils import ParameterError

ArrayOrFloat = float | np.ndarray


@dataclass(frozen=True)
class BreathingSchedule:
    epsilon: float
    omega: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or not abs(self.epsilon) < 1:
            raise ParameterError(f"|epsilon| must be < 1 to keep alpha positive, got {self.epsilon}")
        if not math.isfinite(self.omega) or not self.omega > 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def min_alpha(self) -> float:
        return 1.0 - abs(self.epsilon)


class AlphaValues(NamedTuple):
    alpha: ArrayOrFloat
    alpha_dot: ArrayOrFloat
    alpha_ddot: ArrayOrFloat
    drive_f: ArrayOrFloat


def alpha_eval(s: BreathingSchedule, t: ArrayOrFloat) -> AlphaValues:
    phase = s.omega * np.asarray(t, dtype=float)
    cos_phase = np.cos(phase)
    alpha = 1.0 + s.epsilon * cos_phase
    alpha_dot = -s.epsilon * s.omega * np.sin(phase)
    alpha_ddot = -s.epsilon * s.omega ** 2 * cos_phase
    drive_f = 0.5 * alpha * alpha_ddot + alpha_dot ** 2
    if np.ndim(phase) == 0:
        return AlphaValues(float(alpha), float(alpha_dot), float(alpha_ddot), float(drive_f))
    return AlphaValues(alpha, alpha_dot, alpha_ddot, drive_f)


def effective_frequency(s: BreathingSchedule) -> float:
    """Frequency of the averaged harmonic trap, Omega = epsilon omega / sqrt(2)."""
    return abs(s.epsilon) * s.omega / math.sqrt(2.0)


def mean_drive(s: BreathingSchedule) -> float:
    return 0.25 * s.epsilon ** 2 * s.omega ** 2


def drive_integral(s: BreathingSchedule, t: ArrayOrFloat) -> ArrayOrFloat:
    """Integral of drive_f from 0 to t."""
    t = np.asarray(t, dtype=float)
    alpha, alpha_dot, _, _ = alpha_eval(s, t)
    squared = s.epsilon ** 2 * s.omega ** 2 * (0.5 * t - np.sin(2.0 * s.omega * t) / (4.0 * s.omega))
    return _as_output(0.5 * alpha * alpha_dot + 0.5 * squared)


def _unwrapped_half_angle(s: BreathingSchedule, t: np.ndarray) -> np.ndarray:
    # continuous branch of 2 atan(r tan(omega t / 2)) / sqrt(1 - eps^2), r = sqrt((1-eps)/(1+eps))
    half = 0.5 * s.omega * t
    r = math.sqrt((1.0 - s.epsilon) / (1.0 + s.epsilon))
    wrapped = np.arctan2(r * np.sin(half), np.cos(half))
    unwrapped = wrapped + 2.0 * math.pi * np.round((half - wrapped) / (2.0 * math.pi))
    return 2.0 * unwrapped / math.sqrt(1.0 - s.epsilon ** 2)


def inverse_integral(s: BreathingSchedule, t: ArrayOrFloat) -> ArrayOrFloat:
    """Integral of 1/alpha from 0 to t."""
    t = np.asarray(t, dtype=float)
    return _as_output(_unwrapped_half_angle(s, t) / s.omega)


def inverse_square_integral(s: BreathingSchedule, t: ArrayOrFloat) -> ArrayOrFloat:
    """Integral of 1/alpha^2 from 0 to t."""
    t = np.asarray(t, dtype=float)
    phase = s.omega * t
    correction = s.epsilon * np.sin(phase) / (1.0 + s.epsilon * np.cos(phase))
    return _as_output((_unwrapped_half_angle(s, t) - correction) / ((1.0 - s.epsilon ** 2) * s.omega))


def _as_output(value: np.ndarray) -> ArrayOrFloat:
    return float(value) if np.ndim(value) == 0 else value
