# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from src import well_spectral
from src.breathing import BreathingSchedule
from src.numerics import IntegratorConfig

ACCEPTANCE_OMEGA = 25 * math.pi ** 2


@pytest.fixture(scope="session")
def small_basis() -> well_spectral.WellBasis:
    return well_spectral.build_basis(N=8)


@pytest.fixture(scope="session")
def acceptance_basis() -> well_spectral.WellBasis:
    return well_spectral.build_basis(N=30)


@pytest.fixture
def acceptance_schedule() -> BreathingSchedule:
    return BreathingSchedule(epsilon=0.05, omega=ACCEPTANCE_OMEGA)


@pytest.fixture
def quick_cfg() -> IntegratorConfig:
    return IntegratorConfig(steps_per_period=1024)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def circular_distance(a: float, b: float, width: float) -> float:
    """Distance between two quasi-energies taken modulo ``width``."""
    d = (a - b) % width
    return min(d, width - d)
