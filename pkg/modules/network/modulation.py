"""
This module describes the time-dependent drive on a resonator array and the normal-mode coupling pattern it induces.

The drive is sum_k eps_k cos(omega_d^(k) t + phi_k) * sum_j f_j a_j^dag a_j, with per-ring signs f_j in {-1, 0, +1}.
Written in the normal-mode basis the sign vector becomes M = V^T diag(f) V; its off-diagonal entries are the
pattern of mode pairs the drive can couple, and the diagonal entries are residual frequency modulations.

Classes:
    Tone
    ModulationSpec
    CouplingPattern
    ToneAssignment

Functions:
    pattern_from_signs()
    rectangular_pattern_signs()
    required_tones()
    resonant_tones()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, field

# Third-Party Library Imports
import numpy as np

# Local Application/Library-Specific Imports
from modules.core.configs import numerical_tolerances
from modules.core.errors import (
    EmptyDrive,
    EmptyPattern,
    InvalidSign,
    InvalidTone,
    LengthMismatch,
    OddSideForbidden,
)


@dataclass(frozen=True)
class Tone:
    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class ModulationSpec:
    signs: tuple
    tones: tuple = ()

    def __post_init__(self):
        if any(isinstance(f, bool) or f not in (-1, 0, 1) for f in self.signs):
            raise InvalidSign(f"signs must be in {{-1, 0, +1}}, got {self.signs}")
        signs = tuple(int(f) for f in self.signs)
        tones = tuple(tone if isinstance(tone, Tone) else Tone(*tone) for tone in self.tones)
        for tone in tones:
            if tone.frequency <= 0:
                raise InvalidTone(f"tone frequency must be > 0, got {tone.frequency}")
            if tone.amplitude < 0:
                raise InvalidTone(f"tone amplitude must be >= 0, got {tone.amplitude}")
        if tones and not any(signs):
            raise EmptyDrive("tones given but every sign is zero")
        object.__setattr__(self, 'signs', signs)
        object.__setattr__(self, 'tones', tones)

    @property
    def max_amplitude(self):
        return max((tone.amplitude for tone in self.tones), default=0.0)

    def with_amplitude(self, amplitude):
        tones = tuple(Tone(amplitude, tone.frequency, tone.phase) for tone in self.tones)
        return ModulationSpec(self.signs, tones)

    # Scalar drive eps(t) = sum_k eps_k cos(omega_k t + phi_k)
    def envelope(self, t):
        return sum(tone.amplitude * np.cos(tone.frequency * t + tone.phase) for tone in self.tones)


@dataclass(frozen=True)
class CouplingPattern:
    """
    Mode pairs coupled by a sign vector.

    Attributes:
        pairs:     {(i, j): w_ij} for i < j, the off-diagonal entries of V^T diag(f) V
        diagonal:  {i: d_i}, residual diagonal weights
        size:      number of modes
    """
    pairs: dict
    diagonal: dict = field(default_factory=dict)
    size: int = 0

    def __bool__(self):
        return bool(self.pairs)

    def is_disjoint(self):
        used = [index for pair in self.pairs for index in pair]
        return len(used) == len(set(used))

    def is_unit_weight(self, tol=1e-9):
        return all(abs(abs(weight) - 1.0) <= tol for weight in self.pairs.values())

    def partner(self, mode):
        for i, j in self.pairs:
            if i == mode:
                return j
            if j == mode:
                return i
        return None

    def matrix(self):
        weights = np.zeros((self.size, self.size))
        for (i, j), weight in self.pairs.items():
            weights[i, j] = weight
            weights[j, i] = weight
        for i, weight in self.diagonal.items():
            weights[i, i] = weight
        return weights


@dataclass(frozen=True)
class ToneAssignment:
    splittings: tuple
    pair_to_tone: dict


def pattern_from_signs(basis, signs):
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (basis.size,):
        raise LengthMismatch(f"expected {basis.size} signs, got {signs.size}")

    weights = basis.vectors.T @ np.diag(signs) @ basis.vectors
    tolerance = numerical_tolerances['prune']

    pairs = {}
    diagonal = {}
    for i in range(basis.size):
        if abs(weights[i, i]) > tolerance:
            diagonal[i] = float(weights[i, i])
        for j in range(i + 1, basis.size):
            if abs(weights[i, j]) > tolerance:
                pairs[(i, j)] = float(weights[i, j])

    pattern = CouplingPattern(pairs, diagonal, basis.size)
    if pairs and not pattern.is_unit_weight():
        logging.warning(f"[pattern_from_signs] non-unit pattern weights {sorted(set(round(w, 6) for w in pairs.values()))}; carried into A(t) as-is")
    return pattern


def rectangular_pattern_signs(L, M, which):
    which = which.upper()
    if which == 'P1':
        rule = lambda l, m: (-1) ** (l + m)
        if L % 2 and M % 2:
            logging.warning(f"[rectangular_pattern_signs] {L}x{M} lattice: P1 leaves the central mode self-paired on the diagonal")
    elif which == 'P2':
        if M % 2:
            raise OddSideForbidden(f"P2 needs an even number of columns, got M={M}")
        rule = lambda l, m: (-1) ** (m + 1)
    elif which == 'P3':
        if L % 2:
            raise OddSideForbidden(f"P3 needs an even number of rows, got L={L}")
        rule = lambda l, m: (-1) ** (l + 1)
    else:
        raise ValueError(f"unknown pattern {which!r}, expected P1, P2 or P3")

    return tuple(rule(l, m) for l in range(1, L + 1) for m in range(1, M + 1))


def required_tones(pattern, frequencies):
    if not pattern.pairs:
        raise EmptyPattern("pattern has no coupled pairs")

    frequencies = np.asarray(frequencies, dtype=float)
    span = np.ptp(frequencies) if frequencies.size > 1 else 1.0
    tolerance = 1e-9 * max(span, np.finfo(float).tiny)

    splittings = []
    raw = {}
    for i, j in sorted(pattern.pairs):
        delta = abs(frequencies[j] - frequencies[i])
        raw[(i, j)] = delta
        if not any(abs(delta - known) <= tolerance for known in splittings):
            splittings.append(delta)

    splittings.sort()
    pair_to_tone = {}
    for pair, delta in raw.items():
        pair_to_tone[pair] = int(np.argmin([abs(delta - known) for known in splittings]))
    return ToneAssignment(tuple(float(s) for s in splittings), pair_to_tone)


# Builds one tone per required splitting, all at the same amplitude
def resonant_tones(pattern, frequencies, amplitude, phases=None):
    assignment = required_tones(pattern, frequencies)
    phases = phases if phases is not None else [0.0] * len(assignment.splittings)
    if len(phases) != len(assignment.splittings):
        raise LengthMismatch(f"{len(assignment.splittings)} tones needed, got {len(phases)} phases")
    return tuple(Tone(amplitude, splitting, phase) for splitting, phase in zip(assignment.splittings, phases))
