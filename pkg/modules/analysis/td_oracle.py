"""
This module integrates the full time-dependent coupled-mode equations of a modulated array, without the rotating-wave
approximation, and reads steady-state transfer entries off the simulated output fields.

The equations are linear, so classical amplitudes obey the same A(t), B, C, D system as the mode operators. The simulation
runs in the frame rotating at omega0, which leaves only couplings, drive and linewidths in A(t):

    da/dt = -i (U + eps(t) F) a - (kappa_int/2) a - sum_side (Gamma_side/2) e e^T a - sum_side sqrt(Gamma_side) e b_side(t)
    b_out,side(t) = sqrt(Gamma_side) e^T a + b_side(t)

Steady-state amplitudes at every normal-mode frequency are demodulated with a Hann window spanning an integer number of
beat periods.

Classes:
    SimulationConfig
    InputCarrier
    TimeSeries
    EmpiricalTransfer

Functions:
    integrate()
    steady_state_transfer()
    oracle_transfer()
    oracle_matrix()
    energy_balance()
    compare()
    deviation_trend()
    write_time_series_csv()
"""


# Standard Library Imports
import csv
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

# Third-Party Library Imports
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp
from scipy.stats import spearmanr
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

# Local Application/Library-Specific Imports
from modules.core.configs import oracle_defaults
from modules.core.errors import InsufficientDuration, InsufficientWindow, PortMismatch, StepFailure
from modules.core.utils import map_in_executor
from modules.network.resonator_graph import normal_modes
from modules.network.slh_abcd import Port


class SimulationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    duration: Optional[float] = Field(default=None, gt=0)      # None -> duration_linewidths / kappa_min
    rtol: float = Field(default=oracle_defaults['rtol'], gt=0)
    atol: float = Field(default=oracle_defaults['atol'], gt=0)
    transient_fraction: float = Field(default=oracle_defaults['transient_fraction'], gt=0, lt=1)
    method: str = oracle_defaults['method']
    samples_per_fastest_period: int = Field(default=oracle_defaults['samples_per_fastest_period'], ge=4)
    min_samples: int = Field(default=oracle_defaults['min_samples'], ge=16)
    min_beat_periods: int = Field(default=oracle_defaults['min_beat_periods'], ge=1)
    max_attempts: int = Field(default=oracle_defaults['max_attempts'], ge=1)


class InputCarrier(NamedTuple):
    frequency: float        # absolute, rad/s
    amplitude: complex = 1.0
    side: str = 'L'


@dataclass(frozen=True, eq=False)
class TimeSeries:
    t: np.ndarray
    modes: np.ndarray           # rings x samples, omega0 frame
    outputs: dict               # side -> b_out(t)
    inputs: tuple               # InputCarrier list
    probes: np.ndarray          # normal-mode frequencies relative to omega0
    kappa_min: float
    config: SimulationConfig
    omega0: float = 0.0


@dataclass(frozen=True, eq=False)
class EmpiricalTransfer:
    entries: np.ndarray         # ports x ports, NaN where no input column was simulated
    ports: tuple
    columns: tuple = ()
    metadata: dict = field(default_factory=dict)

    def port_names(self):
        return [port.name for port in self.ports]

    def abs2(self):
        return np.abs(self.entries) ** 2


#################################################################### Integration ###########################################################################


def _operators(array, modspec):
    n = array.n
    coupling = array.coupling_matrix().astype(complex)
    signs = np.diag(np.asarray(modspec.signs if modspec is not None else (0,) * n, dtype=float))
    damping = 0.5 * array.kappa_int * np.eye(n)
    ports = {}
    for guide in array.waveguides:
        unit = np.zeros(n)
        unit[guide.node] = 1.0
        damping = damping + 0.5 * guide.gamma * np.outer(unit, unit)
        ports[guide.side] = (np.sqrt(guide.gamma), guide.node)
    return coupling, signs, damping, ports


def _sample_count(duration, probes, modspec, config):
    fastest = float(np.max(np.abs(probes), initial=0.0))
    if modspec is not None and modspec.tones:
        fastest = max(fastest, max(tone.frequency for tone in modspec.tones) + fastest)
    cycles = duration * fastest / (2.0 * np.pi)
    return int(max(config.min_samples, np.ceil(config.samples_per_fastest_period * cycles)))


def integrate(array, modspec, inputs, config=None, basis=None):
    """
    Integrates the modulated array driven by monochromatic carriers and returns the sampled time series.
    """
    config = config or SimulationConfig()
    basis = normal_modes(array) if basis is None else basis
    inputs = tuple(carrier if isinstance(carrier, InputCarrier) else InputCarrier(*carrier) for carrier in inputs)

    kappa_min = float(np.min(basis.linewidths(array.kappa_int)))
    if kappa_min <= 0:
        raise InsufficientDuration("a mode without loss never reaches a steady state")
    duration = config.duration or oracle_defaults['duration_linewidths'] / kappa_min
    if duration * kappa_min < oracle_defaults['min_duration_linewidths']:
        raise InsufficientDuration(f"duration {duration:.4g} covers {duration * kappa_min:.1f} decay times, need >= {oracle_defaults['min_duration_linewidths']}")

    coupling, signs, damping, ports = _operators(array, modspec)
    for carrier in inputs:
        if carrier.side not in ports:
            raise PortMismatch(f"no waveguide on side {carrier.side}")

    probes = basis.frequencies - array.omega0
    envelope = modspec.envelope if modspec is not None else (lambda t: 0.0)

    def drive_at(t):
        fields = {side: 0.0j for side in ports}
        for carrier in inputs:
            fields[carrier.side] += carrier.amplitude * np.exp(-1j * (carrier.frequency - array.omega0) * t)
        return fields

    def rhs(t, amplitudes):
        derivative = -1j * (coupling + envelope(t) * signs) @ amplitudes - damping @ amplitudes
        for side, value in drive_at(t).items():
            rate, node = ports[side]
            derivative[node] -= rate * value
        return derivative

    samples = _sample_count(duration, probes, modspec, config)
    t_eval = np.linspace(0.0, duration, samples)
    initial = np.zeros(array.n, dtype=complex)

    for attempt in Retrying(stop=stop_after_attempt(config.max_attempts), retry=retry_if_exception_type(StepFailure), reraise=True):
        with attempt:
            relax = 10.0 ** (attempt.retry_state.attempt_number - 1)
            if relax > 1:
                logging.warning(f"[integrate] retrying with tolerances relaxed x{relax:g}")
            solution = solve_ivp(rhs, (0.0, duration), initial, method=config.method, t_eval=t_eval,
                                 rtol=config.rtol * relax, atol=config.atol * relax)
            if not solution.success:
                raise StepFailure(f"integration failed: {solution.message}")

    incoming = drive_at(solution.t)
    outputs = {side: rate * solution.y[node] + incoming[side] for side, (rate, node) in ports.items()}

    logging.debug(f"[integrate] {samples} samples over {duration:.4g} s ({duration * kappa_min:.1f} decay times)")
    return TimeSeries(solution.t, solution.y, outputs, inputs, probes, kappa_min, config, array.omega0)


#################################################################### Demodulation ###########################################################################


def _steady_window(series):
    start = series.config.transient_fraction * series.t[-1]
    gaps = np.diff(np.sort(series.probes))
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        mask = series.t >= start
        return mask, None

    period = 2.0 * np.pi / float(np.min(gaps))
    periods = int(np.floor((series.t[-1] - start) / period))
    if periods < series.config.min_beat_periods:
        raise InsufficientWindow(f"steady window holds {periods} beat periods, need {series.config.min_beat_periods}")
    mask = series.t >= series.t[-1] - periods * period
    return mask, periods


def _demodulate(t, signal, frequency):
    window = np.hanning(t.size)
    return complex(np.sum(window * signal * np.exp(1j * frequency * t)) / np.sum(window))


def steady_state_transfer(series, probe_frequencies=None):
    """
    Steady-state output amplitude at every probe frequency and side, divided by the (single) input amplitude.

    Returns {Port: complex}.
    """
    if len(series.inputs) != 1:
        raise InsufficientWindow(f"one input carrier per column, got {len(series.inputs)}")
    probes = series.probes if probe_frequencies is None else np.asarray(probe_frequencies) - series.omega0
    mask, periods = _steady_window(series)
    reference = series.inputs[0].amplitude

    column = {}
    for mode, frequency in enumerate(probes):
        for side, signal in series.outputs.items():
            column[Port(mode, side, float(frequency + series.omega0))] = _demodulate(series.t[mask], signal[mask], frequency) / reference
    logging.debug(f"[steady_state_transfer] demodulated over {periods} beat periods")
    return column


def energy_balance(series):
    mask, _ = _steady_window(series)
    out_power = sum(np.mean(np.abs(signal[mask]) ** 2) for signal in series.outputs.values())
    in_power = sum(abs(carrier.amplitude) ** 2 for carrier in series.inputs)
    return float(out_power / in_power)


def oracle_transfer(array, modspec, input_mode, side='L', config=None, basis=None):
    basis = normal_modes(array) if basis is None else basis
    series = integrate(array, modspec, [InputCarrier(float(basis.frequencies[input_mode]), 1.0, side)], config, basis)
    return steady_state_transfer(series)


def oracle_matrix(array, modspec, config=None, columns=None):
    """
    Empirical transfer matrix over all (mode, side) ports. Columns default to every port; each is one simulation and
    runs on the shared executor.
    """
    basis = normal_modes(array)
    ports = tuple(Port(k, side, float(basis.frequencies[k])) for k in range(basis.size) for side in array.sides)
    columns = ports if columns is None else tuple(columns)

    results = map_in_executor(lambda port: oracle_transfer(array, modspec, port.mode, port.side, config, basis), columns)
    entries = np.full((len(ports), len(ports)), np.nan, dtype=complex)
    lookup = {(port.mode, port.side): index for index, port in enumerate(ports)}
    for port, column in zip(columns, results):
        for out_port, value in column.items():
            entries[lookup[(out_port.mode, out_port.side)], lookup[(port.mode, port.side)]] = value

    epsilon = modspec.max_amplitude if modspec is not None else 0.0
    return EmpiricalTransfer(entries, ports, columns, {'epsilon': epsilon})


#################################################################### Comparison ###########################################################################


def compare(effective, empirical, tol=0.05, eps_ratio=None):
    if effective.port_names() != empirical.port_names():
        raise PortMismatch(f"effective ports {effective.port_names()} differ from empirical ports {empirical.port_names()}")

    names = effective.port_names()
    expected = effective.abs2()
    measured = empirical.abs2()
    per_entry = {}
    for column in range(len(names)):
        if np.all(np.isnan(empirical.entries[:, column])):
            continue
        for row in range(len(names)):
            per_entry[f"{names[column]}->{names[row]}"] = float(abs(expected[row, column] - measured[row, column]))

    deviation = max(per_entry.values(), default=0.0)
    report = {
        'max_deviation': deviation,
        'per_entry': per_entry,
        'tolerance': tol,
        'passed': deviation <= tol,
        'eps_ratio': eps_ratio,
        'epsilon': empirical.metadata.get('epsilon'),
    }
    if not report['passed']:
        logging.warning(f"[compare] oracle deviation {deviation:.4f} exceeds tolerance {tol}")
    return report


def deviation_trend(reports):
    ratios = [report['eps_ratio'] for report in reports]
    deviations = [report['max_deviation'] for report in reports]
    rho, _ = spearmanr(ratios, deviations)
    return float(rho)


def write_time_series_csv(series, file_path):
    with open(file_path, 'w', newline='') as file:
        writer = csv.writer(file)
        header = ['t_ns']
        for ring in range(series.modes.shape[0]):
            header += [f"re_a{ring + 1}", f"im_a{ring + 1}"]
        writer.writerow(header)
        for index, t in enumerate(series.t):
            row = [f"{t * 1e9:.12g}"]
            for ring in range(series.modes.shape[0]):
                row += [f"{series.modes[ring, index].real:.12g}", f"{series.modes[ring, index].imag:.12g}"]
            writer.writerow(row)
    logging.info(f"[write_time_series_csv] {series.t.size} samples written to {file_path}")
