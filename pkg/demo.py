# -*- coding: utf-8 -*-
import math

from src.logger import logger
from src import lattice, well_spectral
from src.breathing import BreathingSchedule, effective_frequency
from src.numerics import IntegratorConfig


def _well_trapping(n_modes: int, omega: float, epsilon: float) -> dict:
    schedule = BreathingSchedule(epsilon=epsilon, omega=omega)
    basis = well_spectral.build_basis(N=n_modes)
    lowest = well_spectral.floquet_spectrum(basis, schedule, IntegratorConfig(1024),
                                            well_spectral.WellModel.LEADING)[0]
    _, effective = well_spectral.effective_ground_state(basis, effective_frequency(schedule))
    return {
        "variance": lowest.variance,
        "cycle_variance": lowest.cycle_variance,
        "quasi_energy": lowest.quasi_energy,
        "fidelity_effective": well_spectral.fidelity(lowest.state, effective),
    }


def _lattice_trapping(sites: int, omega: float, epsilon: float) -> dict:
    cfg = lattice.LatticeConfig(n_sites=sites, schedule=BreathingSchedule(epsilon=epsilon, omega=omega))
    result = lattice.propagate(cfg, lattice.gaussian_beam(cfg), 15.0, 5.0, IntegratorConfig(512))
    return {
        "sigma_start": math.sqrt(result.variance_series[0]),
        "sigma_end": math.sqrt(result.variance_series[-1]),
        "norm_end": result.norm_series[-1],
    }


# Small, quick configurations; the command line runs the full-size versions
EXPERIMENT_CONFIG = {
    "well_trapping": {
        "func": _well_trapping,
        "kwargs": {"n_modes": 16, "omega": 25 * math.pi ** 2, "epsilon": 0.05},
    },
    "well_static": {
        "func": _well_trapping,
        "kwargs": {"n_modes": 16, "omega": 25 * math.pi ** 2, "epsilon": 0.0},
    },
    "lattice_trapping": {
        "func": _lattice_trapping,
        "kwargs": {"sites": 61, "omega": 1.0, "epsilon": 0.1},
    },
    "lattice_diffraction": {
        "func": _lattice_trapping,
        "kwargs": {"sites": 61, "omega": 1.0, "epsilon": 0.0},
    },
}


def run_experiment(name: str) -> None:
    if name in EXPERIMENT_CONFIG:
        config = EXPERIMENT_CONFIG[name]
        try:
            result = config['func'](**config['kwargs'])
            logger.info(f"Result for {name}: {result}")
        except Exception as e:
            logger.error(f"Error running experiment {name}: {e}")
    else:
        logger.warning(f"No configuration found for experiment: {name}")


if __name__ == "__main__":
    experiment = "well_trapping"
    run_experiment(experiment)
