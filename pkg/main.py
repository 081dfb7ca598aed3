# -*- encoding: utf-8 -*-

"""
Command-line front end: Floquet analysis of a particle between breathing walls,
its effective harmonic trap, and beam trapping in a breathing waveguide lattice.
Every command writes CSV/JSON results plus a manifest that replays it.
"""
import argparse
import math
import sys
import time
from dataclasses import asdict
from typing import Any, Callable

import numpy as np

from src import __version__
from src import lattice, well_spectral
from src.artifacts import ArtifactSet, RunManifest, format_number
from src.breathing import BreathingSchedule, alpha_eval, effective_frequency
from src.logger import configure_logging, logger
from src.numerics import IntegratorConfig
from src.utils import (
    EXIT_BAD_ARGUMENTS, EXIT_NUMERICAL_FAILURE, EXIT_OK, ParameterError, parse_bool, read_config_section,
    trace_error_decorator
)

GAUGE_TOLERANCE = 1e-10
REPLAY_EXCLUDED = ('handler', 'config', 'verbose', 'log_dir')
Command = Callable[[argparse.Namespace], int]


def _grid(minimum: float, maximum: float, count: int) -> np.ndarray:
    if count < 1:
        raise ParameterError(f"grid count must be positive, got {count}")
    if count == 1:
        return np.array([minimum], dtype=float)
    return np.linspace(minimum, maximum, count)


def _well_omega(args: argparse.Namespace) -> float:
    if args.omega is not None:
        return args.omega
    return args.omega_pi2 * math.pi ** 2


def _lattice_config(args: argparse.Namespace) -> lattice.LatticeConfig:
    return lattice.LatticeConfig(
        n_sites=args.sites,
        k=args.k,
        g=args.g,
        schedule=BreathingSchedule(epsilon=args.epsilon, omega=args.omega),
        trap_center=args.trap_center,
        dilation=lattice.DilationTerm[args.dilation.upper()],
    )


def _initial_state(cfg: lattice.LatticeConfig, args: argparse.Namespace) -> np.ndarray:
    if args.init == 'site':
        return lattice.single_site(cfg)
    return lattice.gaussian_beam(cfg, args.width)


def _finish(args: argparse.Namespace, artifacts: ArtifactSet, started: float) -> int:
    arguments = {key: value for key, value in vars(args).items() if key not in REPLAY_EXCLUDED}
    manifest = RunManifest(
        command=args.command,
        arguments=arguments,
        duration_seconds=round(time.perf_counter() - started, 3),
        outputs=artifacts.names,
    )
    artifacts.commit(args.out, manifest)
    return EXIT_OK


@trace_error_decorator
def cmd_well_floquet(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    schedule = BreathingSchedule(epsilon=args.epsilon, omega=_well_omega(args))
    basis = well_spectral.build_basis(N=args.n_modes)
    cfg = IntegratorConfig(args.steps_per_period)
    model = well_spectral.WellModel(args.model)

    lowest = well_spectral.floquet_spectrum(basis, schedule, cfg, model)[0]
    omega_eff = effective_frequency(schedule)
    effective_energy, effective_state = well_spectral.effective_ground_state(basis, omega_eff)

    x = np.linspace(-0.5 * basis.L, 0.5 * basis.L, args.samples)
    phi = well_spectral.basis_functions(basis, x)
    profile = np.column_stack([x, np.abs(phi @ lowest.state) ** 2, np.abs(phi @ effective_state) ** 2])

    artifacts = ArtifactSet('well_floquet')
    artifacts.add_csv('profile', ['x_sample', 'phi_floquet_sq', 'phi_effective_sq'], profile)
    artifacts.add_json('summary', {
        'omega': schedule.omega,
        'epsilon': schedule.epsilon,
        'model': model.value,
        'omega_eff': omega_eff,
        'n_modes': basis.N,
        'fidelity': well_spectral.fidelity(lowest.state, effective_state),
        'quasi_energy': lowest.quasi_energy,
        'variance_floquet': lowest.variance,
        'cycle_variance_floquet': lowest.cycle_variance,
        'variance_effective': well_spectral.variance_x(basis, effective_state),
        'effective_energy': effective_energy,
    })

    if args.lab_time is not None:
        alpha = alpha_eval(schedule, args.lab_time).alpha
        x_lab = np.linspace(-0.5 * alpha * basis.L, 0.5 * alpha * basis.L, args.samples)
        state_t = well_spectral.floquet_state_at(basis, schedule, lowest, args.lab_time, cfg, model)
        psi = well_spectral.reconstruct_lab_frame(basis, schedule, state_t, args.lab_time, x_lab)
        artifacts.add_csv('lab_frame', ['x', 'psi_sq', 'psi_real', 'psi_imag'],
                          np.column_stack([x_lab, np.abs(psi) ** 2, psi.real, psi.imag]))

    logger.info(f"well floquet: omega={schedule.omega:.6g} eps={schedule.epsilon} "
                f"min cycle variance {lowest.cycle_variance:.6g}")
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_well_effective(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    basis = well_spectral.build_basis(N=args.n_modes)
    if args.omega_eff is not None:
        omega_eff = args.omega_eff
    else:
        omega_eff = effective_frequency(BreathingSchedule(epsilon=args.epsilon, omega=_well_omega(args)))
    energy, state = well_spectral.effective_ground_state(basis, omega_eff)

    x = np.linspace(-0.5 * basis.L, 0.5 * basis.L, args.samples)
    phi = well_spectral.basis_functions(basis, x)
    profile = np.column_stack([x, np.abs(phi @ state) ** 2,
                               well_spectral.effective_potential(omega_eff, x, basis.mass)])

    artifacts = ArtifactSet('well_effective')
    artifacts.add_csv('profile', ['x_sample', 'phi_effective_sq', 'v_effective'], profile)
    artifacts.add_json('summary', {
        'omega_eff': omega_eff,
        'n_modes': basis.N,
        'energy': energy,
        'variance': well_spectral.variance_x(basis, state),
    })
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_well_variance_map(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    scale = math.pi ** 2 if args.omega_unit == 'pi2' else 1.0
    omegas = _grid(args.omega_min, args.omega_max, args.omega_count) * scale
    epsilons = _grid(args.epsilon_min, args.epsilon_max, args.epsilon_count)
    basis = well_spectral.build_basis(N=args.n_modes)

    variances = well_spectral.variance_map(basis, omegas, epsilons, IntegratorConfig(args.steps_per_period),
                                           workers=args.workers, show_progress=args.progress,
                                           model=well_spectral.WellModel(args.model))

    resonances = []
    if omegas.size >= 3:
        for j, epsilon in enumerate(epsilons):
            for i in well_spectral.resonance_spikes(variances[:, j]):
                spacing, distance = well_spectral.nearest_level_spacing(basis, float(omegas[i]))
                resonances.append({'epsilon': float(epsilon), 'omega': float(omegas[i]),
                                   'variance': float(variances[i, j]), 'nearest_level_spacing': spacing,
                                   'relative_distance': distance})

    artifacts = ArtifactSet('well_variance_map')
    artifacts.add_csv('matrix', ['omega'] + [format_number(e) for e in epsilons],
                      np.column_stack([omegas, variances]))
    artifacts.add_json('resonances', {'spikes': resonances})
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_lattice_propagate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg = _lattice_config(args)
    if args.snapshots < 1:
        raise ParameterError(f"--snapshots must be positive, got {args.snapshots}")
    result = lattice.propagate(cfg, _initial_state(cfg, args), args.z_end, args.z_end / args.snapshots,
                               IntegratorConfig(args.steps_per_period))

    sites = lattice.site_indices(cfg)
    artifacts = ArtifactSet('lattice_propagate')
    artifacts.add_csv('snapshots', ['z'] + [str(n) for n in sites],
                      np.column_stack([result.z_samples, result.snapshots]))
    artifacts.add_csv('series', ['z', 'variance', 'sigma', 'norm'],
                      np.column_stack([result.z_samples, result.variance_series,
                                       np.sqrt(result.variance_series), result.norm_series]))
    logger.info(f"lattice propagate: sigma {math.sqrt(result.variance_series[0]):.4g} -> "
                f"{math.sqrt(result.variance_series[-1]):.4g} at z={args.z_end}")
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_lattice_floquet(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg = _lattice_config(args)
    if args.states < 1:
        raise ParameterError(f"--states must be positive, got {args.states}")
    states = lattice.lattice_floquet(cfg, IntegratorConfig(args.steps_per_period))[:args.states]

    gaussian = lattice.gaussian_beam(cfg, args.width)
    gaussian = gaussian / np.linalg.norm(gaussian)
    columns = [lattice.site_indices(cfg)]
    header = ['site']
    for index, floquet in enumerate(states):
        columns += [np.abs(floquet.state) ** 2, floquet.state.real, floquet.state.imag]
        header += [f'intensity_{index}', f'real_{index}', f'imag_{index}']

    artifacts = ArtifactSet('lattice_floquet')
    artifacts.add_csv('states', header, np.column_stack(columns))
    artifacts.add_json('summary', {
        'config': _config_payload(cfg),
        'states': [{'quasi_energy': s.quasi_energy, 'variance': s.variance} for s in states],
        'fidelity_gaussian': well_spectral.fidelity(states[0].state, gaussian),
    })
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_lattice_variance_map(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg = _lattice_config(args)
    omegas = _grid(args.omega_min, args.omega_max, args.omega_count)
    epsilons = _grid(args.epsilon_min, args.epsilon_max, args.epsilon_count)

    variances = lattice.lattice_variance_map(cfg, omegas, epsilons, IntegratorConfig(args.steps_per_period),
                                             workers=args.workers, show_progress=args.progress)

    artifacts = ArtifactSet('lattice_variance_map')
    artifacts.add_csv('matrix', ['omega'] + [format_number(e) for e in epsilons],
                      np.column_stack([omegas, variances]))
    return _finish(args, artifacts, started)


@trace_error_decorator
def cmd_lattice_gauge_check(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg = _lattice_config(args)
    deviation = lattice.gauge_check(cfg, args.onsite_energy, _initial_state(cfg, args), args.z_end,
                                    IntegratorConfig(args.steps_per_period))
    passed = deviation < GAUGE_TOLERANCE

    artifacts = ArtifactSet('lattice_gauge_check')
    artifacts.add_json('summary', {
        'config': _config_payload(cfg),
        'onsite_energy': args.onsite_energy,
        'intensity_deviation': deviation,
        'tolerance': GAUGE_TOLERANCE,
        'passed': passed,
    })
    if not passed:
        logger.error(f"gauge check failed: intensity deviation {deviation:.3e} >= {GAUGE_TOLERANCE:.0e}, "
                     f"nothing written to {args.out}")
        return EXIT_NUMERICAL_FAILURE
    return _finish(args, artifacts, started)


def _config_payload(cfg: lattice.LatticeConfig) -> dict[str, Any]:
    payload = asdict(cfg)
    payload['dilation'] = cfg.dilation.name.lower()
    return payload


def _add_integrator(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--steps-per-period', type=int, default=4096, help='fixed RK4 steps per drive period')
    parser.add_argument('--out', default='results', help='output directory')


def _add_sweep(parser: argparse.ArgumentParser, omega_range: tuple[float, float], epsilon_range: tuple[float, float]) -> None:
    parser.add_argument('--omega-min', type=float, default=omega_range[0])
    parser.add_argument('--omega-max', type=float, default=omega_range[1])
    parser.add_argument('--omega-count', type=int, default=20)
    parser.add_argument('--epsilon-min', type=float, default=epsilon_range[0])
    parser.add_argument('--epsilon-max', type=float, default=epsilon_range[1])
    parser.add_argument('--epsilon-count', type=int, default=20)
    parser.add_argument('--workers', type=int, default=1, help='grid points evaluated concurrently')
    parser.add_argument('--progress', action='store_true', help='show a progress bar')


def _add_well_drive(parser: argparse.ArgumentParser) -> None:
    frequency = parser.add_mutually_exclusive_group()
    frequency.add_argument('--omega', type=float, default=None, help='drive frequency in natural units')
    frequency.add_argument('--omega-pi2', type=float, default=25.0,
                           help='drive frequency in units of hbar pi^2 / (m L^2)')
    parser.add_argument('--epsilon', type=float, default=0.05, help='breathing amplitude, |epsilon| < 1')
    parser.add_argument('--n-modes', type=int, default=30, help='static modes kept in the expansion')
    parser.add_argument('--samples', type=int, default=201, help='profile samples across the well')


def _add_well_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--model', choices=[m.value for m in well_spectral.WellModel], default='full',
                        help='full frame Hamiltonian or its leading-order drive')


def _add_lattice(parser: argparse.ArgumentParser, initial: bool = True) -> None:
    parser.add_argument('--epsilon', type=float, default=0.1, help='breathing amplitude, |epsilon| < 1')
    parser.add_argument('--omega', type=float, default=1.0, help='breathing frequency in units of k')
    parser.add_argument('--sites', type=int, default=161, help='odd number of waveguides')
    parser.add_argument('--k', type=float, default=1.0, help='coupling constant')
    parser.add_argument('--g', type=float, default=1.0, help='on-site strength n_s a^2 k / reduced wavelength')
    parser.add_argument('--trap-center', type=int, default=0, help='trapping site n0')
    parser.add_argument('--dilation', choices=['printed', 'halved'], default='printed',
                        help="coefficient of the i alpha'/alpha term: 1 (printed) or 1/2 (halved)")
    parser.add_argument('--width', type=float, default=5.0, help='Gaussian beam exp(-(n-n0)^2/width)')
    if initial:
        parser.add_argument('--init', choices=['gaussian', 'site'], default='gaussian', help='initial beam')


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog='breathing-trap', description=__doc__)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    parser.add_argument('--log-dir', default=None, help='also write logs to this directory')
    parser.add_argument('--config', default=None, help='INI file with one section per command')
    groups = parser.add_subparsers(dest='group', required=True)
    leaves: dict[str, argparse.ArgumentParser] = {}

    def leaf(group: argparse._SubParsersAction, name: str, command: str, handler: Command, help_text: str):
        sub = group.add_parser(name, help=help_text)
        sub.set_defaults(command=command, handler=handler)
        leaves[command] = sub
        return sub

    well = groups.add_parser('well', help='particle between breathing walls').add_subparsers(dest='action', required=True)
    sub = leaf(well, 'floquet', 'well floquet', cmd_well_floquet, 'lowest-variance Floquet state vs effective trap')
    _add_well_drive(sub)
    _add_well_model(sub)
    sub.add_argument('--lab-time', type=float, default=None, help='also write the lab-frame profile at this time')
    _add_integrator(sub)

    sub = leaf(well, 'effective', 'well effective', cmd_well_effective, 'ground state of the effective harmonic trap')
    _add_well_drive(sub)
    sub.add_argument('--omega-eff', type=float, default=None, help='effective trap frequency (overrides the drive)')
    _add_integrator(sub)

    sub = leaf(well, 'variance-map', 'well variance-map', cmd_well_variance_map, 'lowest Floquet variance map')
    _add_sweep(sub, (5.0, 50.0), (0.0, 0.1))
    sub.add_argument('--omega-unit', choices=['raw', 'pi2'], default='pi2',
                     help='unit of --omega-min/--omega-max')
    sub.add_argument('--n-modes', type=int, default=30)
    _add_well_model(sub)
    _add_integrator(sub)

    lat = groups.add_parser('lattice', help='breathing waveguide lattice').add_subparsers(dest='action', required=True)
    sub = leaf(lat, 'propagate', 'lattice propagate', cmd_lattice_propagate, 'beam propagation snapshots')
    _add_lattice(sub)
    sub.add_argument('--z-end', type=float, default=30.0, help='propagation distance')
    sub.add_argument('--snapshots', type=int, default=60, help='number of sampling intervals')
    _add_integrator(sub)

    sub = leaf(lat, 'floquet', 'lattice floquet', cmd_lattice_floquet, 'most localized Floquet states')
    _add_lattice(sub, initial=False)
    sub.add_argument('--states', type=int, default=2, help='number of most localized states written')
    _add_integrator(sub)

    sub = leaf(lat, 'variance-map', 'lattice variance-map', cmd_lattice_variance_map, 'lowest Floquet variance map')
    _add_lattice(sub, initial=False)
    _add_sweep(sub, (0.5, 3.0), (0.0, 0.2))
    _add_integrator(sub)

    sub = leaf(lat, 'gauge-check', 'lattice gauge-check', cmd_lattice_gauge_check,
               'intensity invariance under a uniform on-site energy')
    _add_lattice(sub)
    sub.add_argument('--onsite-energy', type=float, default=0.7, help='uniform on-site energy e')
    sub.add_argument('--z-end', type=float, default=2 * math.pi, help='propagation distance')
    _add_integrator(sub)

    replay = groups.add_parser('replay', help='re-run a command from its manifest')
    replay.add_argument('manifest', help='path to a *.manifest.json file')
    replay.add_argument('--out', default=None, help='output directory (defaults to the recorded one)')
    replay.set_defaults(command='replay', handler=cmd_replay)
    return parser, leaves


COMMANDS: dict[str, Command] = {
    'well floquet': cmd_well_floquet,
    'well effective': cmd_well_effective,
    'well variance-map': cmd_well_variance_map,
    'lattice propagate': cmd_lattice_propagate,
    'lattice floquet': cmd_lattice_floquet,
    'lattice variance-map': cmd_lattice_variance_map,
    'lattice gauge-check': cmd_lattice_gauge_check,
}


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        manifest = RunManifest.load(args.manifest)
    except ParameterError as e:
        logger.error(str(e))
        return EXIT_BAD_ARGUMENTS
    if manifest.command not in COMMANDS:
        logger.error(f"Manifest names an unknown command: {manifest.command!r}")
        return EXIT_BAD_ARGUMENTS
    if manifest.version != __version__:
        logger.warning(f"Manifest written by version {manifest.version}, replaying with {__version__}")

    replayed = argparse.Namespace(**manifest.arguments)
    if args.out is not None:
        replayed.out = args.out
    logger.info(f"Replaying '{manifest.command}' from {args.manifest}")
    return COMMANDS[manifest.command](replayed)


def _apply_config(args: argparse.Namespace, leaves: dict[str, argparse.ArgumentParser],
                  parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    if not args.config or args.command not in leaves:
        return args
    values = read_config_section(args.config, args.command)
    sub = leaves[args.command]
    known = {action.dest: action for action in sub._actions}
    defaults = {}
    for key, value in values.items():
        action = known.get(key)
        if action is None or key in ('help', 'command', 'handler'):
            logger.warning(f"Ignoring unknown option '{key}' in [{args.command}] of {args.config}")
        elif isinstance(action, argparse._StoreTrueAction):
            defaults[key] = parse_bool(value)
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else "INFO", args.log_dir)
    try:
        args = _apply_config(args, leaves, parser, argv)
    except ParameterError as e:
        logger.error(str(e))
        return EXIT_BAD_ARGUMENTS
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
