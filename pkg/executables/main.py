"""
This initializes the environment, parses the subcommand and hands it to the orchestrators

Run as `python -m executables.main <subcommand> --device <file> ...`

Subcommands:
    sweep        transfer entries against the modulation amplitude (CSV or JSON) plus operating-point markers
    point        one operating point of the device (JSON)
    compose      cascade, phase shifter or Mach-Zehnder built from the compose section (JSON)
    feasibility  penny-graph and Hadamard checks on the array connectivity (JSON)
    robustness   first-order robustness of the modulation pattern (JSON)
    validate     effective transfer against the time-domain simulation (JSON, exit 1 on failure)
    optimize     equal-spacing coupling ratios for a rectangular lattice (JSON)
"""


# Standard Library Imports
import argparse
import logging
import re
import sys

# Third-Party Library Imports
import orjson

# Local Application/Library-Specific Imports
from modules.analysis.td_oracle import SimulationConfig
from modules.core.configs import cli_settings
from modules.core.device_file import build_device_array, load_device_file, normalized_document
from modules.core.errors import DeviceFileError, RbsKitError
from modules.core.schema import ErrorReport
from modules.core.high_level_orchestrators import (
    POINT_KINDS,
    run_compose,
    run_feasibility,
    run_optimize,
    run_point,
    run_robustness,
    run_sweep,
    run_validate,
    write_plot_stub,
    write_sweep_csv,
)
from modules.core.utils import initialize_environment, initialize_executors, shutdown_executors, write_json
from modules.network.resonator_graph import normal_modes


def build_parser():
    parser = argparse.ArgumentParser(prog='rbskit', description='Modulated ring-resonator frequency beam splitters')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR (default from RBSKIT_LOG_LEVEL)')
    commands = parser.add_subparsers(dest='command', required=True)

    def add_command(name, needs_device=True):
        command = commands.add_parser(name)
        command.add_argument('--device', required=needs_device, help='device file (JSON or YAML)')
        command.add_argument('--out', default='-', help="output path, '-' for stdout")
        command.add_argument('--emit-normalized', default=None, metavar='PATH', help='also write the device file with defaults filled in')
        return command

    sweep = add_command('sweep')
    sweep.add_argument('--format', choices=('csv', 'json'), default='csv')
    sweep.add_argument('--eps-min', type=float, default=None, help='GHz')
    sweep.add_argument('--eps-max', type=float, default=None, help='GHz')
    sweep.add_argument('--samples', type=int, default=None)
    sweep.add_argument('--plot-stub', action='store_true', help='write a matplotlib script next to the CSV')

    point = add_command('point')
    point.add_argument('--kind', required=True, choices=sorted(POINT_KINDS))
    point.add_argument('--ratio', type=float, default=None, help='target splitting ratio for --kind ratio')
    point.add_argument('--branch', choices=('plus', 'minus'), default='plus')

    add_command('compose')

    feasibility = add_command('feasibility')
    feasibility.add_argument('--variant', choices=('standard', 'literal'), default='standard', help='penny-graph edge bound')

    robustness = add_command('robustness')
    robustness.add_argument('--model', choices=('edge', 'diagonal'), default='edge')
    robustness.add_argument('--seed', type=int, default=None)

    validate = add_command('validate')
    validate.add_argument('--eps-grid', type=int, default=10, help='number of amplitudes checked')
    validate.add_argument('--tol', type=float, default=0.05, help='allowed |Xi|^2 deviation')
    validate.add_argument('--duration', type=float, default=None, help='simulated time in ns')

    optimize = add_command('optimize', needs_device=False)
    optimize.add_argument('--lattice', default=None, metavar='LxM')
    optimize.add_argument('--starts', type=int, default=None)
    optimize.add_argument('--seed', type=int, default=None)

    return parser


def _lattice_shape(args, device):
    if args.lattice:
        match = re.fullmatch(r'(\d+)[xX](\d+)', args.lattice)
        if not match:
            raise DeviceFileError(f"--lattice expects LxM, got {args.lattice!r}", field='--lattice')
        return int(match.group(1)), int(match.group(2))
    if device is not None and device.array.lattice is not None:
        return device.array.lattice.rows, device.array.lattice.columns
    raise DeviceFileError("optimize needs --lattice or a device file with a lattice", field='--lattice')


# Dispatches one parsed command; returns the process exit status
def run_command(args):
    device = load_device_file(args.device) if args.device else None

    if device is not None and args.emit_normalized:
        basis = normal_modes(build_device_array(device)) if device.modulation is not None else None
        write_json(args.emit_normalized, normalized_document(device, basis))

    if args.command == 'sweep':
        rows, markers = run_sweep(device, args.eps_min, args.eps_max, args.samples)
        if args.format == 'json':
            write_json(args.out, {'rows': rows, 'markers': markers})
            return 0
        write_sweep_csv(rows, args.out)
        if args.out != '-':
            write_json(args.out + cli_settings['marker_suffix'], markers)
            if args.plot_stub:
                write_plot_stub(args.out)
        elif args.plot_stub:
            logging.warning("[run_command] --plot-stub needs --out; no script written")
        return 0

    if args.command == 'point':
        write_json(args.out, run_point(device, args.kind, args.ratio, args.branch))
        return 0

    if args.command == 'compose':
        write_json(args.out, run_compose(device))
        return 0

    if args.command == 'feasibility':
        write_json(args.out, run_feasibility(device, args.variant))
        return 0

    if args.command == 'robustness':
        write_json(args.out, run_robustness(device, args.model, args.seed))
        return 0

    if args.command == 'validate':
        config = SimulationConfig(duration=args.duration * 1e-9) if args.duration else None
        report = run_validate(device, args.eps_grid, args.tol, config)
        write_json(args.out, report)
        return 0 if report['passed'] else 1

    rows, columns = _lattice_shape(args, device)
    write_json(args.out, run_optimize(rows, columns, args.starts, args.seed))
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    initialize_environment(args.log_level)
    initialize_executors()
    try:
        return run_command(args)
    except RbsKitError as error:
        logging.error(f"[main] {type(error).__name__}: {error}")
        report: ErrorReport = {'error': type(error).__name__, 'message': str(error), 'exit_code': error.exit_code}
        sys.stderr.write(orjson.dumps(report).decode() + '\n')
        return error.exit_code
    finally:
        shutdown_executors()


if __name__ == '__main__':
    sys.exit(main())
