"""
This module solves for the modulation amplitudes at which a two-mode frequency beam splitter hits a target splitting ratio, and reports
the transmission and loss figures at those amplitudes.

Every formula is written per normal mode: gamma is the mode's waveguide rate (Gamma/2 for the two-ring device, Gamma/4 for the
four-ring device, supplied by the caller) and kappa_int the internal loss rate. Cooperativity-based helpers take alpha = Gamma/kappa_int
together with the number of resonators, which fixes the divisor.

Classes:
    OperatingPoint

Functions:
    epsilon_for_ratio()
    transmission_amplitude()
    lattice_transmission()
    operating_point()
    device_loss()
    intensities_two_waveguide()
    asymptotic_limits()
    no_shifter_with_second_waveguide()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, field
from typing import Optional

# Third-Party Library Imports
import numpy as np

# Local Application/Library-Specific Imports
from modules.core.configs import validity_thresholds
from modules.core.errors import RatioUnreachable, RegimeViolation
from modules.network.rwa_engine import closed_form

KINDS = ('ratio_R', 'GCC', 'bs50_minus', 'bs50_plus', 'bs_R_2wg', 'undercoupled_peak', 'four_way')
LOSS_KINDS = ('gcc', 'bs_minus', 'bs_plus', 'two_waveguide', 'four_way', 'undercoupled')


@dataclass(frozen=True)
class OperatingPoint:
    """
    A modulation amplitude together with the splitter it realizes.

    Attributes:
        kind:          one of KINDS
        epsilon:       modulation amplitude (rad/s), nonnegative
        transmission:  transmission amplitude K; may be negative on the low-amplitude branch
        loss:          total intensity loss, 1 - K^2 for single-waveguide points
        ratio:         conversion ratio R realized at epsilon, if defined
        intensities:   {'left': I_L, 'right': I_R} for two-waveguide points
        params:        the rates the point was solved for
    """
    kind: str
    epsilon: float
    transmission: float
    loss: float
    ratio: Optional[float] = None
    intensities: Optional[dict] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        tolerance = validity_thresholds['operating_point_tolerance']
        if not -tolerance <= self.loss <= 1.0 + tolerance:
            raise ValueError(f"loss {self.loss} outside [0, 1]")

    def to_report(self):
        return {
            'kind': self.kind,
            'epsilon': self.epsilon,
            'K': self.transmission,
            'loss': self.loss,
            'ratio': self.ratio,
            'intensities': self.intensities,
            'inputs': dict(self.params),
        }


#################################################################### Ratio Branches ###########################################################################


def _check_rates(**rates):
    for name, value in rates.items():
        if value < 0:
            raise ValueError(f"{name} must be >= 0, got {value}")


def epsilon_for_ratio(R, gamma, kappa_int=0.0):
    """
    Both modulation amplitudes at which a fraction R of the input is converted to the partner mode.

    Returns (eps_minus, eps_plus) with eps_minus <= eps_plus. R = 0 is reached at eps = 0 and asymptotically.
    """
    _check_rates(gamma=gamma, kappa_int=kappa_int)
    if not 0.0 <= R <= 1.0:
        raise RatioUnreachable(f"ratio must lie in [0, 1], got {R}")
    if R == 0.0:
        return 0.0, np.inf

    discriminant = gamma ** 2 / R - kappa_int ** 2
    if discriminant < 0:
        raise RatioUnreachable(f"gamma^2/R = {gamma ** 2 / R:.6g} < kappa_int^2 = {kappa_int ** 2:.6g}; the device is under-coupled for R={R}")

    offset = np.sqrt((1.0 - R) / R) * gamma
    root = np.sqrt(discriminant)
    return float(abs(offset - root)), float(offset + root)


def transmission_amplitude(gamma, kappa_int, R, branch='plus'):
    _check_rates(gamma=gamma, kappa_int=kappa_int)
    discriminant = gamma ** 2 - R * kappa_int ** 2
    if discriminant < 0:
        raise RatioUnreachable(f"gamma^2 < R kappa_int^2 for R={R}")
    sign = 1.0 if branch == 'plus' else -1.0
    return float((kappa_int * np.sqrt(1.0 - R) + sign * np.sqrt(discriminant)) / (gamma + kappa_int))


# Same amplitude written with the lattice support mu^2 = gamma / Gamma and alpha = Gamma / kappa_int
def lattice_transmission(alpha, R, mu, branch='plus'):
    scaled = mu ** 2 * alpha
    if scaled ** 2 < R:
        raise RatioUnreachable(f"mu^4 alpha^2 = {scaled ** 2:.6g} < R = {R}")
    sign = 1.0 if branch == 'plus' else -1.0
    return float((np.sqrt(1.0 - R) + sign * np.sqrt(scaled ** 2 - R)) / (scaled + 1.0))


#################################################################### Operating Points ###########################################################################


def _ratio_point(kind, R, gamma, kappa_int, branch):
    eps_minus, eps_plus = epsilon_for_ratio(R, gamma, kappa_int)
    epsilon = eps_plus if branch == 'plus' else eps_minus
    transmission = transmission_amplitude(gamma, kappa_int, R, branch)
    return OperatingPoint(kind, epsilon, transmission, 1.0 - transmission ** 2, R,
                          params={'gamma': gamma, 'kappa_int': kappa_int, 'R': R, 'branch': branch})


def operating_point(kind, gamma, kappa_int=0.0, R=None, branch='plus', gamma_r=0.0):
    _check_rates(gamma=gamma, kappa_int=kappa_int, gamma_r=gamma_r)
    params = {'gamma': gamma, 'kappa_int': kappa_int}

    if kind == 'ratio_R':
        if R is None:
            raise ValueError("ratio_R needs a target ratio R")
        return _ratio_point(kind, R, gamma, kappa_int, branch)

    if kind == 'GCC':
        if gamma < kappa_int:
            raise RegimeViolation(f"GCC needs gamma >= kappa_int, got {gamma:.6g} < {kappa_int:.6g}")
        transmission = float(np.sqrt((gamma - kappa_int) / (gamma + kappa_int)))
        return OperatingPoint(kind, float(np.sqrt(gamma ** 2 - kappa_int ** 2)), transmission, 1.0 - transmission ** 2, 1.0, params=params)

    if kind in ('bs50_minus', 'bs50_plus'):
        return _ratio_point(kind, 0.5, gamma, kappa_int, kind.rsplit('_', 1)[-1])

    if kind == 'bs_R_2wg':
        kappa = gamma + gamma_r + kappa_int
        right = 2.0 * gamma * gamma_r / kappa ** 2
        left = ((gamma_r + kappa_int) ** 2 + gamma ** 2) / kappa ** 2
        loss = 2.0 * gamma * kappa_int / kappa ** 2
        if gamma < kappa_int:
            logging.info("[operating_point] under-coupled two-waveguide splitter; the right output is strongly depleted")
        return OperatingPoint(kind, float(kappa), float(np.sqrt(1.0 - loss)), loss, 0.5,
                              {'left': left, 'right': right}, params | {'gamma_r': gamma_r})

    if kind == 'undercoupled_peak':
        if gamma > kappa_int:
            raise RegimeViolation(f"undercoupled peak needs gamma <= kappa_int, got {gamma:.6g} > {kappa_int:.6g}")
        transmission = float(np.sqrt((kappa_int - gamma) / (kappa_int + gamma)))
        ratio = (gamma / kappa_int) ** 2 if kappa_int > 0 else 0.0
        return OperatingPoint(kind, float(np.sqrt(kappa_int ** 2 - gamma ** 2)), transmission, 1.0 - transmission ** 2, ratio, params=params)

    if kind == 'four_way':
        if gamma < kappa_int:
            raise RegimeViolation(f"4-way splitter needs gamma >= kappa_int, got {gamma:.6g} < {kappa_int:.6g}")
        a = gamma / kappa_int if kappa_int > 0 else np.inf
        # Outputs carry K or sqrt(K) depending on the input mode, so loss != 1 - K^2 here
        transmission = (gamma - kappa_int) / (gamma + kappa_int)
        loss = 0.0 if np.isinf(a) else (3.0 * a + 1.0) / (a + 1.0) ** 2
        return OperatingPoint(kind, float(np.sqrt(gamma ** 2 - kappa_int ** 2)), float(transmission), loss, 0.25, params=params)

    raise ValueError(f"unknown operating point {kind!r}; expected one of {KINDS}")


#################################################################### Loss Figures ###########################################################################


def device_loss(kind, alphaL, alphaR=None, resonators=2):
    """
    Total intensity loss of a device in terms of its cooperativities.

    The per-mode rate is alpha / resonators in units of kappa_int; the 4-way splitter always uses four resonators.
    """
    if alphaL <= 0 or (alphaR is not None and alphaR <= 0):
        raise ValueError(f"cooperativities must be > 0, got alphaL={alphaL}, alphaR={alphaR}")
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")

    a = alphaL / resonators
    if kind == 'gcc':
        if a < 1.0:
            raise RegimeViolation(f"GCC needs alpha >= {resonators}, got {alphaL}")
        return 2.0 / (a + 1.0)
    if kind in ('bs_minus', 'bs_plus'):
        transmission = transmission_amplitude(a, 1.0, 0.5, kind.split('_')[1])
        return 1.0 - transmission ** 2
    if kind == 'two_waveguide':
        return intensities_two_waveguide(alphaL, alphaR, resonators)['loss']
    if kind == 'four_way':
        a = alphaL / 4.0
        if a < 1.0:
            raise RegimeViolation(f"4-way splitter needs alpha >= 4, got {alphaL}")
        return (3.0 * a + 1.0) / (a + 1.0) ** 2
    if a > 1.0:
        raise RegimeViolation(f"under-coupled peak needs alpha <= {resonators}, got {alphaL}")
    return 2.0 * a / (1.0 + a)


def intensities_two_waveguide(alphaL, alphaR=None, resonators=2):
    alphaR = alphaL if alphaR is None else alphaR
    a_left = alphaL / resonators
    a_right = alphaR / resonators
    kappa = a_left + a_right + 1.0
    report = {
        'right': 2.0 * a_left * a_right / kappa ** 2,
        'left': ((a_right + 1.0) ** 2 + a_left ** 2) / kappa ** 2,
        'loss': 2.0 * a_left / kappa ** 2,
        'undercoupled': a_left < 1.0,
    }
    return report


def asymptotic_limits(gamma, kappa_int=0.0, eps=None):
    """
    Limiting behaviour of a driven two-mode splitter on one waveguide.

    Vanishing drive leaves a bare cavity reflection; strong drive detunes the pair so far (Autler-Townes splitting eps) that
    the device becomes an identity.
    """
    kappa = gamma + kappa_int
    limits = {
        'reflection_at_zero': -(gamma - kappa_int) / kappa if kappa > 0 else 1.0,
        'transfer_at_infinity': np.eye(2),
        'dressed_decay': -kappa / 2.0,
    }
    if eps is not None:
        limits['dressed_offsets'] = (-eps / 2.0, eps / 2.0)
        limits['dressed_splitting'] = eps
    return limits


#################################################################### Second Waveguide ###########################################################################


def no_shifter_with_second_waveguide(gamma_l, gamma_r, kappa_int=0.0, samples=4000, floor=0.01):
    """
    Scans the drive amplitude of the two-waveguide two-ring device for a frequency shifter on the second waveguide.

    A shifter needs no output at the input mode on the right waveguide (Xi[c1R, c1L] = 0) while the converted mode leaves
    there (|Xi[c2R, c1L]| > floor). Returns a report with the scan minimum and the left-waveguide conversion point.
    """
    _check_rates(gamma_l=gamma_l, gamma_r=gamma_r, kappa_int=kappa_int)
    kappa = gamma_l + gamma_r + kappa_int

    if gamma_r == 0:
        logging.info("[no_shifter_with_second_waveguide] no second waveguide; reduces to the single-waveguide GCC splitter")
        point = operating_point('GCC', gamma_l, kappa_int) if gamma_l >= kappa_int else None
        return {
            'reduced_to_single_waveguide': True,
            'shifter_found': point is not None,
            'epsilon_gcc_2wg': point.epsilon if point else None,
            'xi11_at_gcc': 0.0 if point else None,
            'xi21_at_gcc': 0.0 if point else None,
            'min_xi21': 0.0,
            'epsilon_at_min': point.epsilon if point else None,
        }

    grid = np.linspace(2.0 * kappa / samples, 2.0 * kappa, samples)
    best = (np.inf, None)
    for eps in grid:
        entries = closed_form('two_ring_2wg', gamma_l=gamma_l, gamma_r=gamma_r, kappa_int=kappa_int, eps=eps).entries
        stay, convert = abs(entries[1, 0]), abs(entries[3, 0])
        if convert > floor and stay < best[0]:
            best = (stay, float(eps))

    report = {
        'reduced_to_single_waveguide': False,
        'shifter_found': bool(best[0] <= 1e-9),
        'min_xi21': float(best[0]),
        'epsilon_at_min': best[1],
        'epsilon_gcc_2wg': None,
        'xi11_at_gcc': None,
        'xi21_at_gcc': None,
    }

    if gamma_l >= gamma_r + kappa_int:
        eps_gcc = float(np.sqrt(gamma_l ** 2 - (gamma_r + kappa_int) ** 2))
        entries = closed_form('two_ring_2wg', gamma_l=gamma_l, gamma_r=gamma_r, kappa_int=kappa_int, eps=eps_gcc).entries
        report.update({
            'epsilon_gcc_2wg': eps_gcc,
            'xi11_at_gcc': float(abs(entries[0, 0])),
            'xi21_at_gcc': float(abs(entries[1, 0])),
        })
    else:
        logging.info(f"[no_shifter_with_second_waveguide] gamma_l < gamma_r + kappa_int; the left output never fully converts")
    return report
