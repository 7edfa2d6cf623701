"""
This module provides functions that coordinate the subcommands of the toolkit
(ie. in charge of organizing calls to the lower level network and analysis modules and shaping their reports)

Functions:
    run_sweep()
    sweep_markers()
    write_sweep_csv()
    write_plot_stub()
    run_point()
    run_compose()
    run_feasibility()
    run_robustness()
    run_validate()
    run_optimize()
    transfer_report()
"""


# Standard Library Imports
import csv
import logging
import sys
from typing import List, Optional, Tuple

# Third-Party Library Imports
import networkx as nx
import numpy as np
from tqdm import tqdm

# Local Application/Library-Specific Imports
from modules.analysis.feasibility import classify_and_verdict, optimize_spacings
from modules.analysis.perturbation import robustness_report
from modules.analysis.td_oracle import compare, deviation_trend, oracle_matrix
from modules.core.configs import cli_settings
from modules.core.device_file import build_device_array, build_modspec, device_signs
from modules.core.errors import DeviceFileError, DisconnectedGraph, RatioUnreachable
from modules.core.schema import (
    ComposeReport,
    FeasibilityReportDict,
    FilePath,
    GHz,
    PointReport,
    RobustnessReportDict,
    SpacingFitReport,
    SweepMarkers,
    SweepRow,
    TransferReport,
    ValidationReport,
)
from modules.core.utils import ghz_to_rad, map_in_executor, rad_to_ghz
from modules.network.composer import StageParams, cascade, mach_zehnder, phase_shifter, stage_transfer
from modules.network.modulation import pattern_from_signs
from modules.network.operating_points import epsilon_for_ratio, operating_point
from modules.network.resonator_graph import normal_modes, rectangular_connectivity
from modules.network.rwa_engine import effective_system, effective_transfer

POINT_KINDS = {
    'gcc': 'GCC',
    'bs_minus': 'bs50_minus',
    'bs_plus': 'bs50_plus',
    'ratio': 'ratio_R',
    'bs_right': 'bs_R_2wg',
    'undercoupled': 'undercoupled_peak',
    'four_way': 'four_way',
}


def transfer_report(transfer) -> TransferReport:
    return {
        'ports': transfer.port_names(),
        'entries': transfer.entries,
        'abs2': transfer.abs2(),
        'metadata': transfer.metadata,
    }


# Helper function to load the array, its modes and the drive of a device file in one go
def _device_context(device):
    array = build_device_array(device)
    basis = normal_modes(array)
    modspec = build_modspec(device, basis)
    return array, basis, modspec


def _input_ports(device, transfer):
    names = transfer.port_names()
    ports = []
    for mode in device.input.modes:
        name = f"c{mode}{device.input.side}"
        if name not in names:
            raise DeviceFileError(f"input port {name} does not exist on this device", field='input.modes')
        ports.append(name)
    return ports


# Returns (pair weight, partner) for the driven pair of the first input mode
def _driven_pair(device, basis, modspec):
    mode = device.input.modes[0] - 1
    if modspec is None:
        return 1.0, None, None
    pattern = pattern_from_signs(basis, modspec.signs)
    partner = pattern.partner(mode)
    if partner is None:
        return 1.0, None, pattern
    return abs(pattern.pairs[tuple(sorted((mode, partner)))]), partner, pattern


#################################################################### Sweeps ###########################################################################


def sweep_markers(device, array, basis, modspec) -> SweepMarkers:
    """
    Operating points of the swept device as drive amplitudes in GHz.
    """
    weight, partner, pattern = _driven_pair(device, basis, modspec)
    if pattern is None or not pattern.pairs:
        return {}

    mode = device.input.modes[0] - 1
    gamma_l = float(basis.rates('L')[mode])
    gamma_r = float(basis.rates('R')[mode])
    kappa_int = array.kappa_int
    markers = {}

    if not pattern.is_disjoint():
        if basis.size == 4 and gamma_l >= kappa_int:
            markers['four_way'] = np.sqrt(gamma_l ** 2 - kappa_int ** 2)
    elif partner is not None and 'R' in array.sides:
        markers['bs_right'] = (gamma_l + gamma_r + kappa_int) / weight
        if gamma_l >= gamma_r + kappa_int:
            markers['gcc'] = np.sqrt(gamma_l ** 2 - (gamma_r + kappa_int) ** 2) / weight
    elif partner is not None:
        if gamma_l >= kappa_int:
            markers['gcc'] = np.sqrt(gamma_l ** 2 - kappa_int ** 2) / weight
        else:
            markers['undercoupled_peak'] = np.sqrt(kappa_int ** 2 - gamma_l ** 2) / weight
        try:
            eps_minus, eps_plus = epsilon_for_ratio(0.5, gamma_l, kappa_int)
            markers['bs_minus'] = eps_minus / weight
            markers['bs_plus'] = eps_plus / weight
        except RatioUnreachable:
            logging.info("[sweep_markers] 50-50 points are out of reach for this coupling")

    return {name: rad_to_ghz(float(value)) for name, value in markers.items()}


def run_sweep(
    device,
    eps_min_ghz: Optional[GHz] = None,
    eps_max_ghz: Optional[GHz] = None,
    samples: Optional[int] = None,
) -> Tuple[List[SweepRow], SweepMarkers]:
    array, basis, modspec = _device_context(device)
    if modspec is None:
        raise DeviceFileError("a sweep needs a modulation section", field='modulation')

    spec = device.sweep
    eps_min = eps_min_ghz if eps_min_ghz is not None else (spec.eps_min_ghz if spec else 0.0)
    eps_max = eps_max_ghz if eps_max_ghz is not None else (spec.eps_max_ghz if spec else None)
    if eps_max is None:
        raise DeviceFileError("no sweep range: give sweep.eps_max_ghz or --eps-max", field='sweep')
    samples = samples or (spec.samples if spec else cli_settings['default_samples'])
    grid = np.linspace(eps_min, eps_max, samples)

    # Computes one column block of the sweep at amplitude eps_ghz
    def sweep_point(eps_ghz):
        transfer = effective_transfer(effective_system(array, basis, modspec.with_amplitude(ghz_to_rad(eps_ghz))))
        names = transfer.port_names()
        rows = []
        for port_in in _input_ports(device, transfer):
            column = names.index(port_in)
            for row, port_out in enumerate(names):
                value = transfer.entries[row, column]
                rows.append({
                    'eps_ghz': float(eps_ghz),
                    'port_in': port_in,
                    'port_out': port_out,
                    're': float(value.real),
                    'im': float(value.imag),
                    'abs2': float(abs(value) ** 2),
                })
        return rows

    blocks = map_in_executor(sweep_point, grid, description='sweep')
    rows = [row for block in blocks for row in block]
    markers = sweep_markers(device, array, basis, modspec)
    logging.info(f"[run_sweep] {len(grid)} amplitudes, {len(rows)} rows, markers {sorted(markers)}")
    return rows, markers


def write_sweep_csv(rows: List[SweepRow], file_path: FilePath):
    header = cli_settings['csv_header']
    if file_path is None or file_path == '-':
        writer = csv.DictWriter(sys.stdout, fieldnames=header, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
        return
    with open(file_path, 'w', newline='') as file:
        writer = csv.DictWriter(file, fieldnames=header, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
    logging.info(f"[write_sweep_csv] {len(rows)} rows written to {file_path}")


PLOT_STUB = '''"""Plots |Xi|^2 against the modulation amplitude from {csv_name}."""
import csv
import json

import matplotlib.pyplot as plt

curves = {{}}
with open({csv_name!r}) as file:
    for row in csv.DictReader(file):
        key = (row['port_in'], row['port_out'])
        curves.setdefault(key, ([], []))
        curves[key][0].append(float(row['eps_ghz']))
        curves[key][1].append(float(row['abs2']))

for (port_in, port_out), (eps, abs2) in curves.items():
    plt.plot(eps, abs2, label=f"{{port_in}} -> {{port_out}}")

with open({marker_name!r}) as file:
    for name, value in json.load(file).items():
        plt.axvline(value, color='gray', linestyle='--', linewidth=0.8)

plt.xlabel('eps / 2pi (GHz)')
plt.ylabel('|Xi|^2')
plt.legend()
plt.show()
'''


def write_plot_stub(csv_path: FilePath) -> FilePath:
    stub_path = csv_path + cli_settings['plot_suffix']
    with open(stub_path, 'w') as file:
        file.write(PLOT_STUB.format(csv_name=csv_path, marker_name=csv_path + cli_settings['marker_suffix']))
    logging.info(f"[write_plot_stub] plot script written to {stub_path}")
    return stub_path


#################################################################### Point & Compose ###########################################################################


def run_point(device, kind: str, ratio: Optional[float] = None, branch: str = 'plus') -> PointReport:
    canonical = POINT_KINDS.get(kind, kind)
    if canonical == 'ratio_R' and ratio is None:
        raise DeviceFileError("--kind ratio needs --ratio", field='--ratio')
    array, basis, modspec = _device_context(device)
    weight, _, _ = _driven_pair(device, basis, modspec)

    mode = device.input.modes[0] - 1
    gamma = float(basis.rates('L')[mode])
    gamma_r = float(basis.rates('R')[mode])
    point = operating_point(canonical, gamma, array.kappa_int, R=ratio, branch=branch, gamma_r=gamma_r)

    amplitude = point.epsilon if canonical == 'four_way' else point.epsilon / weight
    report = point.to_report()
    report.update({
        'eps_ghz': rad_to_ghz(amplitude),
        'inputs': {
            'gamma_ghz': rad_to_ghz(gamma),
            'gamma_r_ghz': rad_to_ghz(gamma_r),
            'kappa_int_ghz': rad_to_ghz(array.kappa_int),
            'pattern_weight': weight,
            'R': ratio,
            'branch': branch,
        },
    })
    del report['epsilon']
    logging.info(f"[run_point] {canonical}: eps = {report['eps_ghz']:.6g} GHz, loss = {point.loss:.4g}")
    return report


def _stage(spec):
    return StageParams(
        gamma=ghz_to_rad(spec.gamma_ghz),
        kappa_int=ghz_to_rad(spec.kappa_int_ghz),
        epsilon=None if spec.eps_ghz is None else ghz_to_rad(spec.eps_ghz),
        phase=spec.phase,
    )


def run_compose(device) -> ComposeReport:
    spec = device.compose
    if spec is None:
        raise DeviceFileError("compose needs a compose section", field='compose')
    stages = [_stage(stage) for stage in spec.stages]

    if spec.kind == 'phase_shifter':
        if len(stages) != 2:
            raise DeviceFileError("a phase shifter takes exactly two stages", field='compose.stages')
        return {'transfer': transfer_report(phase_shifter(spec.mu, stages[0], stages[1]))}

    if spec.kind == 'mach_zehnder':
        if len(stages) > 2:
            raise DeviceFileError("a Mach-Zehnder interferometer takes one or two stages", field='compose.stages')
        transfer, probabilities = mach_zehnder(spec.phi1, stages[0], stages[1] if len(stages) == 2 else None)
        return {'transfer': transfer_report(transfer), 'probabilities': probabilities}

    for index, stage in enumerate(stages):
        if stage.epsilon is None:
            raise DeviceFileError(f"cascade stage {index + 1} needs eps_ghz", field=f"compose.stages.{index}.eps_ghz")
    return {'transfer': transfer_report(cascade([stage_transfer(stage) for stage in stages]))}


#################################################################### Analysis ###########################################################################


def _device_graph(device):
    spec = device.array
    if spec.lattice is not None:
        edges = [(i, j) for i, j, _ in rectangular_connectivity(spec.lattice.rows, spec.lattice.columns)]
    else:
        edges = [(i - 1, j - 1) for i, j, _ in spec.couplings]
    graph = nx.Graph()
    graph.add_nodes_from(range(spec.size))
    graph.add_edges_from(edges)
    return graph


def run_feasibility(device, variant: str = 'standard') -> FeasibilityReportDict:
    try:
        target = build_device_array(device)
    except DisconnectedGraph:
        logging.info("[run_feasibility] disconnected array; checking the bare connectivity graph")
        target = _device_graph(device)
    report = classify_and_verdict(target, variant)
    return report.to_report()


def run_robustness(device, model: str = 'edge', seed: Optional[int] = None) -> RobustnessReportDict:
    array = build_device_array(device)
    signs = device_signs(device)
    if signs is None:
        raise DeviceFileError("robustness needs a modulation section", field='modulation')
    name = device.modulation.pattern if device.modulation.pattern else None
    return robustness_report(array, signs, model, seed, name).to_report()


def run_validate(device, points: int = 10, tol: float = 0.05, config=None) -> ValidationReport:
    """
    Compares effective transfer entries with the time-domain simulation on an amplitude grid.

    The grid runs up to sweep.eps_max_ghz, or a fifth of the smallest splitting when no sweep is given.
    """
    array, basis, modspec = _device_context(device)
    if modspec is None:
        raise DeviceFileError("validate needs a modulation section", field='modulation')

    gaps = np.diff(basis.frequencies)
    min_gap = float(np.min(gaps)) if gaps.size else 1.0
    eps_max = ghz_to_rad(device.sweep.eps_max_ghz) if device.sweep else 0.2 * min_gap
    grid = np.linspace(eps_max / points, eps_max, points)

    comparisons = []
    for eps in tqdm(grid, desc='validate', leave=False):
        drive = modspec.with_amplitude(float(eps))
        effective = effective_transfer(effective_system(array, basis, drive, guard=False))
        columns = [port for port in effective.ports if port.name in _input_ports(device, effective)]
        empirical = oracle_matrix(array, drive, config, columns)
        comparisons.append(compare(effective, empirical, tol, float(eps / min_gap)))

    rho = deviation_trend(comparisons) if len(comparisons) >= 3 else None
    passed = all(report['passed'] for report in comparisons)
    logging.info(f"[run_validate] {sum(r['passed'] for r in comparisons)}/{len(comparisons)} comparisons within {tol}")
    return {'comparisons': comparisons, 'trend_rho': rho, 'passed': passed}


def run_optimize(rows: int, columns: int, starts: Optional[int] = None, seed: Optional[int] = None) -> SpacingFitReport:
    fit = optimize_spacings(rectangular_connectivity(rows, columns), ['v'], fixed={'u': 1.0}, starts=starts, seed=seed)
    return {
        'lattice': f"{rows}x{columns}",
        'weights': fit.weights,
        'residual': fit.residual,
        'achieved': fit.achieved,
        'ratio_v_u': fit.weights['v'] / fit.weights['u'],
    }
