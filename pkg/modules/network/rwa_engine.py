"""
This module builds effective, time-independent transfer matrices for modulated resonator arrays.

The pipeline is:
    normal modes -> one virtual port per (mode, waveguide side) -> rotating frame per mode
    -> rotating-wave truncation of the drive -> A_eff = A + W -> Xi = -C A_eff^-1 B + D

A is written in the frame rotating at omega0, W is the diagonal frame shift i * diag(frame frequencies), and the drive
survives only on pattern pairs with a resonant tone, where it contributes -i (eps/2) w_ij e^{+-i phi}. The module also
carries closed-form transfer matrices for the standard devices, used to cross-check the generic construction, and the
block-diagonal assembly of nonoverlapping two-mode splitters.

Classes:
    TransferMatrix
    EffectiveSystem

Functions:
    effective_system()
    effective_transfer()
    effective_transfer_at()
    closed_form()
    assemble_blocks()
"""


# Standard Library Imports
import logging
from collections import deque
from dataclasses import dataclass, field

# Third-Party Library Imports
import numpy as np

# Local Application/Library-Specific Imports
from modules.core.configs import numerical_tolerances, validity_thresholds
from modules.core.errors import (
    DimensionMismatch,
    NonResonantInput,
    NoResonantTone,
    OverlappingPairs,
    PassivityViolation,
    SingularAeff,
    SingularResolvent,
    UnknownDevice,
    UnresolvedModes,
    UnsupportedPhase,
    ValidityViolation,
)
from modules.network.modulation import pattern_from_signs
from modules.network.resonator_graph import normal_modes
from modules.network.slh_abcd import AbcdSystem, Port, transfer_function


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """
    Complex transfer matrix with labelled ports. Column index is the input port, row index the output port.
    """
    entries: np.ndarray
    ports: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        entries = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if entries.shape != (len(self.ports), len(self.ports)):
            raise DimensionMismatch(f"{len(self.ports)} ports but entries have shape {entries.shape}")
        column_norms = np.sqrt(np.sum(np.abs(entries) ** 2, axis=0))
        if np.any(column_norms > 1.0 + numerical_tolerances['passivity']):
            raise PassivityViolation(f"column norms {np.round(column_norms, 12)} exceed 1")
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'ports', tuple(self.ports))

    @property
    def size(self):
        return len(self.ports)

    def port_names(self):
        return [port.name for port in self.ports]

    def index(self, port):
        if isinstance(port, int):
            return port
        return self.port_names().index(port)

    def entry(self, out_port, in_port):
        return self.entries[self.index(out_port), self.index(in_port)]

    def abs2(self):
        return np.abs(self.entries) ** 2

    def signature(self):
        return tuple((port.mode, port.side) for port in self.ports)

    def restrict(self, modes):
        keep = [k for k, port in enumerate(self.ports) if port.mode in set(modes)]
        return TransferMatrix(self.entries[np.ix_(keep, keep)], tuple(self.ports[k] for k in keep), dict(self.metadata))


@dataclass(frozen=True, eq=False)
class EffectiveSystem:
    """
    Time-independent slow-frame system.

    Attributes:
        a_eff, b, c, d:      A + W and the virtual-port input/output matrices
        w:                   diagonal frame matrix i * diag(frame frequencies - omega0)
        ports:               Port per (mode, side), modes ascending, L before R
        kappas:              total linewidth per mode
        pattern:             full coupling pattern of the sign vector
        selected_pairs:      pattern pairs with a resonant tone -> tone index
        input_assignment:    carrier index -> resonant mode
        passthrough_modes:   modes outside every selected pair (bare lossy-cavity response)
        epsilon:             largest tone amplitude
    """
    a_eff: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    w: np.ndarray
    ports: tuple
    kappas: np.ndarray
    pattern: object
    selected_pairs: dict
    input_assignment: dict
    passthrough_modes: tuple
    epsilon: float

    def as_abcd(self):
        return AbcdSystem(self.a_eff, self.b, self.c, self.d, self.ports)


#################################################################### Guards ###########################################################################


# Linewidths must be small against the level splittings for the modes to act as separate frequency channels
def _check_resolution(kappas, gaps):
    if gaps.size == 0:
        return
    min_gap = float(np.min(gaps))
    widest = float(np.max(kappas))
    if widest >= min_gap:
        raise UnresolvedModes(f"linewidth {widest:.6g} >= smallest splitting {min_gap:.6g}")
    if widest >= validity_thresholds['resolution_warning_fraction'] * min_gap:
        logging.warning(f"[effective_system] linewidth {widest:.6g} is not small against splitting {min_gap:.6g}")


def _check_validity(epsilon, gaps):
    if gaps.size == 0 or epsilon == 0:
        return
    min_gap = float(np.min(gaps))
    ratio = epsilon / min_gap
    if ratio >= validity_thresholds['drive_error_fraction']:
        raise ValidityViolation(f"drive {epsilon:.6g} >= consecutive splitting {min_gap:.6g}; the rotating-wave model does not apply")
    if ratio >= validity_thresholds['drive_warning_fraction']:
        logging.warning(f"[effective_system] drive/splitting = {ratio:.3f}; expect rotating-wave errors")


#################################################################### Frames & Tones ###########################################################################


def _select_pairs(pattern, frequencies, tones, tolerance_fraction):
    selected = {}
    matched_tones = set()
    for (i, j) in sorted(pattern.pairs):
        splitting = frequencies[j] - frequencies[i]
        tolerance = tolerance_fraction * max(abs(splitting), np.finfo(float).tiny)
        candidates = [k for k, tone in enumerate(tones) if abs(tone.frequency - splitting) <= tolerance]
        if not candidates:
            continue
        if len(candidates) > 1:
            logging.warning(f"[effective_system] pair {(i, j)} matched by tones {candidates}; using tone {candidates[0]}")
        selected[(i, j)] = candidates[0]
        matched_tones.add(candidates[0])

    for k, tone in enumerate(tones):
        if k not in matched_tones:
            logging.warning(f"[effective_system] tone {k} at {tone.frequency:.6g} matches no pattern pair")
    return selected


# Walks the selected pairs so that every coupled pair is co-rotating with its tone
def _frame_frequencies(frequencies, selected, tones):
    frames = np.array(frequencies, dtype=float)
    neighbours = {}
    for (i, j), k in selected.items():
        neighbours.setdefault(i, []).append((j, tones[k].frequency))
        neighbours.setdefault(j, []).append((i, -tones[k].frequency))

    visited = set()
    for root in sorted(neighbours):
        if root in visited:
            continue
        visited.add(root)
        queue = deque([root])
        while queue:
            mode = queue.popleft()
            for other, shift in neighbours[mode]:
                expected = frames[mode] + shift
                if other in visited:
                    if abs(frames[other] - expected) > 1e-9 * max(1.0, abs(shift)):
                        logging.warning(f"[effective_system] tones do not close around the pattern cycle at mode {other}; no common rotating frame")
                    continue
                frames[other] = expected
                visited.add(other)
                queue.append(other)
    return frames


def _assign_inputs(input_carriers, frequencies, gaps):
    if input_carriers is None:
        return {k: k for k in range(len(frequencies))}
    scale = float(np.min(gaps)) if gaps.size else max(1.0, abs(frequencies[0]))
    tolerance = validity_thresholds['input_tolerance_fraction'] * scale

    assignment = {}
    for index, carrier in enumerate(input_carriers):
        matches = np.flatnonzero(np.abs(frequencies - carrier) <= tolerance)
        if matches.size != 1:
            raise NonResonantInput(f"input carrier {carrier:.6g} is resonant with {matches.size} modes")
        assignment[index] = int(matches[0])
    return assignment


#################################################################### Effective System ###########################################################################


def effective_system(array, basis=None, modspec=None, input_carriers=None, guard=True, tolerance_fraction=None):
    basis = normal_modes(array) if basis is None else basis
    tolerance_fraction = validity_thresholds['detuning_tolerance_fraction'] if tolerance_fraction is None else tolerance_fraction
    tones = modspec.tones if modspec is not None else ()
    signs = modspec.signs if modspec is not None else (0,) * basis.size

    pattern = pattern_from_signs(basis, signs)
    relative = basis.frequencies - array.omega0
    kappas = basis.linewidths(array.kappa_int)
    gaps = np.diff(relative)
    epsilon = modspec.max_amplitude if modspec is not None else 0.0

    _check_resolution(kappas, gaps)
    if guard:
        _check_validity(epsilon, gaps)

    selected = _select_pairs(pattern, relative, tones, tolerance_fraction)
    if tones and not selected:
        raise NoResonantTone(f"none of the tones {[t.frequency for t in tones]} is resonant with a pattern splitting")

    frames = _frame_frequencies(relative, selected, tones)
    a_eff = np.diag(-1j * relative - 0.5 * kappas).astype(complex)
    w = np.diag(1j * frames)
    a_eff = a_eff + w
    for (i, j), k in selected.items():
        tone = tones[k]
        weight = pattern.pairs[(i, j)]
        a_eff[i, j] += -0.5j * tone.amplitude * weight * np.exp(1j * tone.phase)
        a_eff[j, i] += -0.5j * tone.amplitude * weight * np.exp(-1j * tone.phase)

    ports = []
    rows = []
    for k in range(basis.size):
        for side in array.sides:
            ports.append(Port(k, side, float(basis.frequencies[k])))
            row = np.zeros(basis.size, dtype=complex)
            row[k] = np.sqrt(basis.couplings[side]) * basis.support[side][k]
            rows.append(row)
    phi = np.array(rows, dtype=complex).reshape(len(ports), basis.size)

    paired = {mode for pair in selected for mode in pair}
    passthrough = tuple(k for k in range(basis.size) if k not in paired)
    if selected and passthrough:
        logging.info(f"[effective_system] modes {passthrough} are outside every driven pair and pass through as bare cavities")

    return EffectiveSystem(
        a_eff=a_eff,
        b=-phi.conj().T,
        c=phi,
        d=np.eye(len(ports), dtype=complex),
        w=w,
        ports=tuple(ports),
        kappas=kappas,
        pattern=pattern,
        selected_pairs=selected,
        input_assignment=_assign_inputs(input_carriers, basis.frequencies, gaps),
        passthrough_modes=passthrough,
        epsilon=float(epsilon),
    )


def effective_transfer_at(effsys, omega):
    try:
        return transfer_function(effsys.as_abcd(), omega)
    except SingularResolvent as error:
        raise SingularAeff(str(error)) from error


def effective_transfer(effsys, device='generic'):
    entries = effective_transfer_at(effsys, 0.0)
    metadata = {
        'epsilon': effsys.epsilon,
        'device': device,
        'passthrough_modes': list(effsys.passthrough_modes),
        'linewidths': effsys.kappas.tolist(),
    }
    return TransferMatrix(entries, effsys.ports, metadata)


#################################################################### Closed Forms ###########################################################################


def _ports(modes, sides):
    return tuple(Port(mode, side) for mode in range(modes) for side in sides)


# Generic two-mode resolvent entries G = A_eff^-1 for the coupled pair
def _pair_resolvent(kappa_i, kappa_j, eps, phi):
    denominator = kappa_i * kappa_j + eps ** 2
    return np.array([
        [-2.0 * kappa_j / denominator, 2j * eps * np.exp(1j * phi) / denominator],
        [2j * eps * np.exp(-1j * phi) / denominator, -2.0 * kappa_i / denominator],
    ])


def _two_ring_1wg(gamma, kappa_int, eps, phi=0.0):
    kappa = gamma + kappa_int
    denominator = eps ** 2 + kappa ** 2
    diagonal = 1.0 - 2.0 * kappa * gamma / denominator
    off = 2j * gamma * eps / denominator
    return np.array([
        [diagonal, off * np.exp(1j * phi)],
        [off * np.exp(-1j * phi), diagonal],
    ]), ('L',)


def _block2x2(gamma_i, gamma_j, kappa_int, eps, phi=0.0, signs=(1, 1)):
    kappa_i = gamma_i + kappa_int
    kappa_j = gamma_j + kappa_int
    denominator = eps ** 2 + kappa_i * kappa_j
    off = 2j * eps * np.sqrt(gamma_i * gamma_j) * signs[0] * signs[1] / denominator
    return np.array([
        [1.0 - 2.0 * kappa_j * gamma_i / denominator, off * np.exp(1j * phi)],
        [off * np.exp(-1j * phi), 1.0 - 2.0 * kappa_i * gamma_j / denominator],
    ]), ('L',)


def _block4x4(gamma_l, gamma_r, kappa_int, eps, phi=0.0, signs_l=(1, 1), signs_r=(1, 1)):
    kappas = [gamma_l[k] + gamma_r[k] + kappa_int for k in range(2)]
    resolvent = _pair_resolvent(kappas[0], kappas[1], eps, phi)
    amplitudes = {
        (k, 'L'): np.sqrt(gamma_l[k]) * signs_l[k] for k in range(2)
    } | {
        (k, 'R'): np.sqrt(gamma_r[k]) * signs_r[k] for k in range(2)
    }
    labels = [(k, side) for k in range(2) for side in ('L', 'R')]
    entries = np.eye(4, dtype=complex)
    for row, (k, side_out) in enumerate(labels):
        for column, (l, side_in) in enumerate(labels):
            entries[row, column] += amplitudes[(k, side_out)] * amplitudes[(l, side_in)] * resolvent[k, l]
    return entries, ('L', 'R')


def _two_ring_2wg(gamma_l, gamma_r, kappa_int, eps, phi=0.0, signs_r=(-1, 1)):
    return _block4x4((gamma_l, gamma_l), (gamma_r, gamma_r), kappa_int, eps, phi, (1, 1), signs_r)


def _four_way(gamma, kappa_int, eps, phases=(np.pi / 2, -np.pi / 2)):
    if not (np.isclose(phases[0], np.pi / 2) and np.isclose(phases[1], -np.pi / 2)):
        raise UnsupportedPhase(f"closed form covers phases (pi/2, -pi/2) only, got {tuple(phases)}")

    kappa = gamma + kappa_int
    half = eps / 2.0
    common = kappa ** 2 + 4.0 * half ** 2
    d = 1.0 - 2.0 * gamma * (kappa ** 2 + 2.0 * half ** 2) / (kappa * common)
    a = 2.0 * gamma * half / common
    b = 4.0 * gamma * half ** 2 / (kappa * common)
    return np.array([
        [d, -a, -b, a],
        [a, d, -a, -b],
        [-b, a, d, -a],
        [-a, -b, a, d],
    ], dtype=complex), ('L',)


CLOSED_FORMS = {
    'two_ring_1wg': _two_ring_1wg,
    'two_ring_2wg': _two_ring_2wg,
    'block2x2': _block2x2,
    'block4x4': _block4x4,
    'four_way': _four_way,
}


def closed_form(device, **params):
    """
    Exact transfer matrix of a standard device.

    Devices and parameters (rates per normal mode, eps is the effective pair coupling):
        two_ring_1wg:  gamma, kappa_int, eps, phi
        two_ring_2wg:  gamma_l, gamma_r, kappa_int, eps, phi, signs_r (default (-1, +1))
        block2x2:      gamma_i, gamma_j, kappa_int, eps, phi, signs
        block4x4:      gamma_l=(i, j), gamma_r=(i, j), kappa_int, eps, phi, signs_l, signs_r
        four_way:      gamma, kappa_int, eps (drive amplitude), phases=(pi/2, -pi/2)
    """
    if device not in CLOSED_FORMS:
        raise UnknownDevice(f"unknown device {device!r}; expected one of {sorted(CLOSED_FORMS)}")
    if any(isinstance(value, (int, float)) and value < 0 for key, value in params.items() if key not in ('phi',)):
        raise ValueError(f"closed-form parameters must be nonnegative, got {params}")

    entries, sides = CLOSED_FORMS[device](**params)
    modes = entries.shape[0] // len(sides)
    metadata = {'device': device, 'epsilon': params.get('eps'), 'params': dict(params)}
    return TransferMatrix(entries, _ports(modes, sides), metadata)


#################################################################### Block Assembly ###########################################################################


def assemble_blocks(pattern, blocks, sides=None):
    """
    Places per-pair transfer matrices on the diagonal of the full mode x side port space.

    blocks maps each pattern pair (i, j) to a two-mode TransferMatrix whose local modes 0 and 1 stand for i and j.
    Modes outside every pair pass through unchanged.
    """
    pairs = list(blocks)
    used = [mode for pair in pairs for mode in pair]
    if len(used) != len(set(used)):
        raise OverlappingPairs(f"pairs {pairs} share modes")

    if sides is None:
        first = next(iter(blocks.values()))
        sides = tuple(dict.fromkeys(port.side for port in first.ports))
    ports = _ports(pattern.size, sides)
    position = {(port.mode, port.side): k for k, port in enumerate(ports)}

    entries = np.eye(len(ports), dtype=complex)
    for (i, j), block in blocks.items():
        local = sorted({port.mode for port in block.ports})
        mapping = {local[0]: i, local[1]: j}
        index = [position[(mapping[port.mode], port.side)] for port in block.ports]
        entries[np.ix_(index, index)] = block.entries

    unpaired = [mode for mode in range(pattern.size) if mode not in used]
    if unpaired:
        logging.debug(f"[assemble_blocks] modes {unpaired} pass through")
    return TransferMatrix(entries, ports, {'device': 'assembled', 'pairs': pairs})
