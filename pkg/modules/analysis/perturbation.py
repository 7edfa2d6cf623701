"""
This module applies first-order perturbation theory to fabrication disorder in resonator arrays and classifies coupling
patterns as robust or fragile.

Disorder is either a frequency offset per ring ('diagonal') or an error per coupling ('edge'). With the perturbation
written in the normal-mode basis as Vm = V^T dV V, the corrected modes are c_j' = c_j + sum_l T_lj c_l with
T_lj = Vm_lj / (omega_j - omega_l), and the corrected frequencies are omega_j + Vm_jj. Re-summing the drive on the
corrected modes gives M' = (I + T)^T M (I + T); a pattern is robust when M' - M vanishes at first order.

Classes:
    Perturbation
    CorrectedModes
    DriveDecomposition
    RobustnessReport

Functions:
    perturbation_matrix()
    random_perturbation()
    corrected_modes()
    drive_in_corrected_basis()
    robustness_report()
    frequency_error_slope()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, field
from typing import Optional

# Third-Party Library Imports
import numpy as np
from scipy.linalg import eigh

# Local Application/Library-Specific Imports
from modules.core.configs import perturbation_defaults
from modules.core.errors import DegenerateSpectrum, UnknownEdge
from modules.network.resonator_graph import degenerate_groups, normal_modes

MODELS = ('diagonal', 'edge')


@dataclass(frozen=True)
class Perturbation:
    kind: str
    strengths: dict     # ring index -> delta, or (i, j) edge -> eps

    def __post_init__(self):
        if self.kind not in MODELS:
            raise ValueError(f"perturbation kind must be one of {MODELS}, got {self.kind!r}")

    @property
    def magnitude(self):
        return max((abs(value) for value in self.strengths.values()), default=0.0)

    def scaled(self, factor):
        return Perturbation(self.kind, {key: factor * value for key, value in self.strengths.items()})


@dataclass(frozen=True, eq=False)
class CorrectedModes:
    frequencies: np.ndarray
    vectors: np.ndarray
    mixing: np.ndarray          # T, column j holds the admixture of every c_l into c_j'
    unperturbed: object


@dataclass(frozen=True, eq=False)
class DriveDecomposition:
    matrix: np.ndarray          # M' = (I + T)^T M (I + T)
    first_order: np.ndarray     # T^T M + M T
    target: dict                # unperturbed pattern pairs -> corrected coupling
    diagonal: dict              # mode -> induced diagonal term
    cross: dict                 # pair outside the pattern -> induced coupling


@dataclass
class RobustnessReport:
    pattern: str
    model: str
    first_order_robust: bool
    slope: Optional[float]
    scales: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    induced_terms: list = field(default_factory=list)

    def to_report(self):
        return dict(self.__dict__)


def perturbation_matrix(array, perturbation):
    matrix = np.zeros((array.n, array.n))
    if perturbation.kind == 'diagonal':
        for ring, delta in perturbation.strengths.items():
            if not 0 <= int(ring) < array.n:
                raise UnknownEdge(f"ring {ring} outside 0..{array.n - 1}")
            matrix[int(ring), int(ring)] += delta
        return matrix

    edges = {(i, j) for i, j, _ in array.couplings}
    for edge, value in perturbation.strengths.items():
        i, j = sorted(int(k) for k in edge)
        if (i, j) not in edges:
            raise UnknownEdge(f"({i}, {j}) is not a coupling of the array")
        matrix[i, j] += value
        matrix[j, i] += value
    return matrix


def random_perturbation(array, kind, scale=1.0, seed=None):
    rng = np.random.default_rng(perturbation_defaults['seed'] if seed is None else seed)
    if kind == 'diagonal':
        return Perturbation(kind, {ring: float(scale * value) for ring, value in enumerate(rng.uniform(-1.0, 1.0, array.n))})
    if kind == 'edge':
        values = rng.uniform(-1.0, 1.0, len(array.couplings))
        return Perturbation(kind, {(i, j): float(scale * value) for (i, j, _), value in zip(array.couplings, values)})
    raise ValueError(f"perturbation kind must be one of {MODELS}, got {kind!r}")


def corrected_modes(array, perturbation, basis=None):
    basis = normal_modes(array) if basis is None else basis
    if any(len(group) > 1 for group in degenerate_groups(basis.frequencies)):
        raise DegenerateSpectrum("first-order corrections need a nondegenerate spectrum")

    if array.min_coupling > 0 and perturbation.magnitude > perturbation_defaults['warning_fraction'] * array.min_coupling:
        logging.warning(f"[corrected_modes] perturbation {perturbation.magnitude:.3g} exceeds {perturbation_defaults['warning_fraction']:.0%} of the smallest coupling")

    vectors = basis.vectors
    projected = vectors.T @ perturbation_matrix(array, perturbation) @ vectors
    differences = basis.frequencies[np.newaxis, :] - basis.frequencies[:, np.newaxis]   # [l, j] -> omega_j - omega_l
    np.fill_diagonal(differences, 1.0)
    mixing = projected / differences
    np.fill_diagonal(mixing, 0.0)

    return CorrectedModes(
        frequencies=basis.frequencies + np.diag(projected),
        vectors=vectors @ (np.eye(basis.size) + mixing),
        mixing=mixing,
        unperturbed=basis,
    )


def drive_in_corrected_basis(signs, corrected):
    vectors = corrected.unperturbed.vectors
    drive = vectors.T @ np.diag(np.asarray(signs, dtype=float)) @ vectors
    transform = np.eye(len(drive)) + corrected.mixing
    resummed = transform.T @ drive @ transform
    first_order = corrected.mixing.T @ drive + drive @ corrected.mixing

    floor = perturbation_defaults['residual_floor']
    size = len(drive)
    target = {(i, j): float(resummed[i, j]) for i in range(size) for j in range(i + 1, size) if abs(drive[i, j]) > floor}
    diagonal = {i: float(resummed[i, i] - drive[i, i]) for i in range(size) if abs(resummed[i, i] - drive[i, i]) > floor}
    cross = {
        (i, j): float(resummed[i, j])
        for i in range(size) for j in range(i + 1, size)
        if abs(drive[i, j]) <= floor and abs(resummed[i, j]) > floor
    }
    return DriveDecomposition(resummed, first_order, target, diagonal, cross)


# Log-log slope of values against scales
def _slope(scales, values):
    return float(np.polyfit(np.log(scales), np.log(values), 1)[0])


def _scale_grid(array):
    low, high = perturbation_defaults['scales']
    unit = array.min_coupling if array.min_coupling > 0 else 1.0
    return np.logspace(np.log10(low), np.log10(high), perturbation_defaults['scale_samples']) * unit


def robustness_report(array, signs, model='edge', seed=None, name=None):
    """
    Classifies a drive pattern as robust or fragile against random disorder of the given model.

    One random disorder direction is scaled over the configured range; the largest entry of M' - M is fitted against the
    scale. Slopes above the threshold mean the first-order terms cancel.
    """
    basis = normal_modes(array)
    direction = random_perturbation(array, model, 1.0, seed)
    scales = _scale_grid(array)

    drive = basis.vectors.T @ np.diag(np.asarray(signs, dtype=float)) @ basis.vectors

    residuals = []
    for scale in scales:
        corrected = corrected_modes(array, direction.scaled(scale), basis)
        residuals.append(float(np.max(np.abs(drive_in_corrected_basis(signs, corrected).matrix - drive))))

    # First-order coefficients per unit disorder strength, evaluated at the smallest scale
    smallest = corrected_modes(array, direction.scaled(scales[0]), basis)
    first_order = drive_in_corrected_basis(signs, smallest).first_order / scales[0]
    induced = []
    for i in range(basis.size):
        for j in range(i, basis.size):
            coefficient = float(first_order[i, j])
            if abs(coefficient) <= 1e-12:
                continue
            if i == j:
                kind = 'diagonal'
            elif abs(drive[i, j]) > perturbation_defaults['residual_floor']:
                kind = 'target'
            else:
                kind = 'cross-pattern'
            induced.append({'type': kind, 'modes': (i, j), 'coefficient': coefficient})

    label = name or ''.join('+' if f > 0 else '-' if f < 0 else '0' for f in signs)
    if max(residuals) <= perturbation_defaults['residual_floor']:
        logging.info(f"[robustness_report] pattern {label} is left untouched by {model} disorder")
        return RobustnessReport(label, model, True, None, scales.tolist(), residuals, induced)

    slope = _slope(scales, np.maximum(residuals, perturbation_defaults['residual_floor']))
    robust = slope >= perturbation_defaults['slope_threshold']
    logging.info(f"[robustness_report] pattern {label} under {model} disorder: slope {slope:.3f} -> {'robust' if robust else 'fragile'}")
    return RobustnessReport(label, model, robust, slope, scales.tolist(), residuals, induced)


def frequency_error_slope(array, kind='edge', seed=None):
    basis = normal_modes(array)
    direction = random_perturbation(array, kind, 1.0, seed)
    scales = _scale_grid(array)

    errors = []
    for scale in scales:
        perturbation = direction.scaled(scale)
        exact = eigh(array.coupling_matrix() + perturbation_matrix(array, perturbation), eigvals_only=True)
        first_order = corrected_modes(array, perturbation, basis).frequencies - array.omega0
        errors.append(float(np.max(np.abs(np.sort(exact) - np.sort(first_order)))))
    return _slope(scales, np.maximum(errors, 1e-300)), scales, errors
