"""
This module cascades frequency beam splitters and builds the two standard compositions: a frequency-mode phase shifter from
two conversion stages, and a frequency-mode Mach-Zehnder interferometer from two 50-50 stages.

Stage lists are in propagation order (the stage the light meets first comes first) and the product is taken as
Xi_total = Xi_last ... Xi_first. Propagation time between stages is neglected.

Classes:
    StageParams
    CascadeSpec

Functions:
    stage_transfer()
    cascade()
    phase_shifter()
    mach_zehnder()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, replace
from typing import Optional

# Third-Party Library Imports
import numpy as np

# Local Application/Library-Specific Imports
from modules.core.configs import validity_thresholds
from modules.core.errors import NotAt5050, NotAtGCC, PortMismatch
from modules.network.operating_points import operating_point
from modules.network.rwa_engine import TransferMatrix, closed_form


@dataclass(frozen=True)
class StageParams:
    gamma: float
    kappa_int: float = 0.0
    epsilon: Optional[float] = None     # None -> filled in by the composition that owns the stage
    phase: float = 0.0


def stage_transfer(stage):
    return closed_form('two_ring_1wg', gamma=stage.gamma, kappa_int=stage.kappa_int, eps=stage.epsilon, phi=stage.phase)


def _same_ports(first, second):
    if first.signature() != second.signature():
        return False
    frequencies = np.array([port.frequency for port in first.ports])
    others = np.array([port.frequency for port in second.ports])
    return bool(np.allclose(frequencies, others, rtol=1e-9, atol=0.0))


@dataclass(frozen=True)
class CascadeSpec:
    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise PortMismatch("a cascade needs at least one stage")
        for index, (first, second) in enumerate(zip(stages, stages[1:])):
            if not _same_ports(first, second):
                raise PortMismatch(f"stage {index} ports {first.port_names()} do not match stage {index + 1} ports {second.port_names()}")
        object.__setattr__(self, 'stages', stages)


# Helper function to flag stages whose resonances sit closer than a few linewidths
def _warn_on_overlap(stages):
    widths = [max(stage.metadata.get('linewidths') or [0.0]) for stage in stages]
    widest = max(widths, default=0.0)
    frequencies = np.unique([port.frequency for port in stages[0].ports])
    if widest <= 0 or frequencies.size < 2:
        return
    closest = float(np.min(np.diff(frequencies)))
    if closest < validity_thresholds['composer_overlap_linewidths'] * widest:
        logging.warning(f"[cascade] port frequencies {closest:.6g} apart overlap within {validity_thresholds['composer_overlap_linewidths']} linewidths ({widest:.6g})")


def cascade(stages):
    spec = stages if isinstance(stages, CascadeSpec) else CascadeSpec(tuple(stages))
    _warn_on_overlap(spec.stages)

    total = np.eye(spec.stages[0].size, dtype=complex)
    for stage in spec.stages:
        total = stage.entries @ total

    metadata = {'device': 'cascade', 'stages': [stage.metadata.get('device') for stage in spec.stages]}
    return TransferMatrix(total, spec.stages[0].ports, metadata)


def _tolerance(stage):
    return validity_thresholds['operating_point_tolerance'] * max(1.0, stage.gamma)


def _at_gcc(stage):
    point = operating_point('GCC', stage.gamma, stage.kappa_int)
    if stage.epsilon is None:
        return replace(stage, epsilon=point.epsilon)
    if abs(stage.epsilon - point.epsilon) > _tolerance(stage):
        raise NotAtGCC(f"stage epsilon {stage.epsilon:.6g} differs from its GCC point {point.epsilon:.6g}")
    return stage


def phase_shifter(mu, stage1, stage2):
    """
    Frequency-mode phase shifter: two full-conversion stages with phases mu/2 and pi.

    The returned matrix is Xi(stage1) Xi(stage2) = diag(e^{i mu/2}, e^{-i mu/2}) * K1 * K2, so stage2 is the one the
    light meets first. The relative phase between the two frequency modes is mu.
    """
    first = replace(_at_gcc(stage1), phase=mu / 2.0)
    second = replace(_at_gcc(stage2), phase=np.pi)
    transfer = cascade([stage_transfer(second), stage_transfer(first)])

    gain = operating_point('GCC', first.gamma, first.kappa_int).transmission * operating_point('GCC', second.gamma, second.kappa_int).transmission
    metadata = transfer.metadata | {'device': 'phase_shifter', 'mu': mu, 'K': gain, 'loss': 1.0 - gain ** 2}
    return TransferMatrix(transfer.entries, transfer.ports, metadata)


def _check_5050(stage):
    if stage.epsilon is None:
        raise NotAt5050("Mach-Zehnder stages need an explicit epsilon at a 50-50 point")
    transfer = stage_transfer(stage).abs2()
    if abs(transfer[0, 0] - transfer[1, 0]) > validity_thresholds['operating_point_tolerance'] * max(1.0, transfer[0, 0]):
        raise NotAt5050(f"stage at epsilon {stage.epsilon:.6g} splits {transfer[0, 0]:.6g} / {transfer[1, 0]:.6g}")


def mach_zehnder(phi1, stage1, stage2=None):
    """
    Frequency-mode Mach-Zehnder interferometer from two 50-50 stages.

    The first stage in propagation order runs at phase 0, the second at phi1. Returns the transfer matrix and the output
    probabilities for an input on the lower mode: {'same': |Xi_11|^2, 'swap': |Xi_21|^2}.
    """
    stage2 = stage1 if stage2 is None else stage2
    _check_5050(stage1)
    _check_5050(stage2)

    transfer = cascade([stage_transfer(replace(stage1, phase=0.0)), stage_transfer(replace(stage2, phase=phi1))])
    abs2 = transfer.abs2()
    probabilities = {'same': float(abs2[0, 0]), 'swap': float(abs2[1, 0])}

    metadata = transfer.metadata | {'device': 'mach_zehnder', 'phi1': phi1, 'K2': probabilities['same'] + probabilities['swap']}
    return TransferMatrix(transfer.entries, transfer.ports, metadata), probabilities
