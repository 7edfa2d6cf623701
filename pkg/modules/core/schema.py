"""
Type schemas and hover-friendly docs for the ring beam-splitter toolkit.

This file is types-only. It documents the shapes of the JSON documents the CLI writes and the report dictionaries the
orchestrators pass around. Use these types to annotate variables and function parameters for rich IDE hovers.

Design goals:
- Accurate to current code
- Prefer `TypedDict` + aliases so plain dict reports keep working unchanged.
- Document the report produced at every subcommand:
  device file → sweep rows + markers → point / compose / feasibility / robustness / validate / optimize reports.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple, TypedDict, Union
try:
    # Python 3.11+
    from typing import NotRequired
except ImportError:
    # Python 3.10 fallback
    from typing_extensions import NotRequired

# ──────────────────────────────────────────────────────────────────────────────
# Basic aliases (used throughout)
FilePath = str
"""Absolute or relative file path (e.g., 'two_ring_sweep.csv')."""

PortName = str
"""Virtual port label: 'c' + 1-based mode + waveguide side (e.g., 'c1L', 'c2R')."""

GHz = float
"""A frequency or rate in GHz at the CLI boundary (multiplied by 2π·1e9 internally)."""

Rad = float
"""An angular frequency or rate in rad/s, the library's internal unit."""


class ComplexValue(TypedDict):
    """
    JSON rendering of a complex number.

    Keys:
        re:  real part
        im:  imaginary part
    """
    re: float
    im: float


# ──────────────────────────────────────────────────────────────────────────────
# Sweeps (`sweep` subcommand)
class SweepRow(TypedDict):
    """
    One CSV row of an ε-sweep; the header is exactly `eps_ghz,port_in,port_out,re,im,abs2`.

    Keys:
        eps_ghz:   modulation amplitude (GHz)
        port_in:   input port name
        port_out:  output port name
        re, im:    transfer entry Ξ[port_out, port_in]
        abs2:      |Ξ[port_out, port_in]|²
    """
    eps_ghz: GHz
    port_in: PortName
    port_out: PortName
    re: float
    im: float
    abs2: float


class SweepMarkers(TypedDict, total=False):
    """
    Sidecar `<csv>.markers.json`: operating points that fall on the swept device (GHz).

    Keys:
        gcc:        full-conversion amplitude ε_GCC
        bs_minus:   lower 50-50 amplitude ε_bs⁻
        bs_plus:    upper 50-50 amplitude ε_bs⁺
        bs_right:   second-waveguide 50-50 amplitude ε_bs^(R) (two waveguides)
        four_way:   4-way splitter amplitude ε_4bs (four-ring P4 drive)
        undercoupled_peak:
                    best-ratio amplitude ε_uc (under-coupled single waveguide)
    """
    gcc: GHz
    bs_minus: GHz
    bs_plus: GHz
    bs_right: GHz
    four_way: GHz
    undercoupled_peak: GHz


# ──────────────────────────────────────────────────────────────────────────────
# Operating points and transfer matrices (`point`, `compose`)
class PointReport(TypedDict):
    """
    Operating-point report.

    Keys:
        kind:     operating point kind (GCC, bs50_minus, ...)
        eps_ghz:  modulation amplitude (GHz)
        K:        transmission amplitude parameter
        loss:     total intensity loss
        inputs:   per-mode rates used (GHz) and the target ratio where relevant
    """
    kind: str
    eps_ghz: GHz
    K: float
    loss: float
    ratio: NotRequired[Optional[float]]
    intensities: NotRequired[Optional[Dict[str, float]]]
    inputs: Dict[str, Union[float, str, None]]


class TransferReport(TypedDict):
    """
    A transfer matrix as JSON.

    Keys:
        ports:    port names, row/column order
        entries:  row-major complex entries
        abs2:     row-major |entries|²
        metadata: device kind, ε and composition details
    """
    ports: List[PortName]
    entries: List[List[ComplexValue]]
    abs2: List[List[float]]
    metadata: Dict[str, object]


class ComposeReport(TypedDict):
    """
    `compose` output.

    Keys:
        transfer:       cascaded transfer matrix
        probabilities:  Mach–Zehnder output probabilities (same / swap), when the composition is one
    """
    transfer: TransferReport
    probabilities: NotRequired[Dict[str, float]]


# ──────────────────────────────────────────────────────────────────────────────
# Analysis reports (`feasibility`, `robustness`, `validate`, `optimize`)
class FeasibilityReportDict(TypedDict, total=False):
    """
    JSON mirror of `FeasibilityReport`: every penny-graph and Hadamard flag, the equal-spacing and uniform-support checks, the failing
    rules (`reasons`, primary first) and the verdict (feasible | infeasible | unknown).
    """
    n: int
    edges: int
    simple: bool
    connected: bool
    planar: bool
    regular: bool
    degree: Optional[int]
    penny_bound: int
    penny_bound_ok: bool
    triangle_free: bool
    triangle_free_bound: Optional[int]
    triangle_free_bound_ok: bool
    n_mod4_ok: bool
    laplacian_even_integers: bool
    hadamard_diagonalizable: Optional[bool]
    witness: Optional[List[List[int]]]
    property1: Optional[bool]
    property1_deviation: Optional[float]
    property2: Optional[bool]
    property2_deviation: Optional[float]
    candidate_match: Optional[str]
    reasons: List[str]
    primary_reason: Optional[str]
    verdict: str
    conjecture_note: Optional[str]


class InducedTerm(TypedDict):
    """A first-order term the disorder adds to the drive (per unit disorder strength)."""
    type: str
    modes: Tuple[int, int]
    coefficient: float


class RobustnessReportDict(TypedDict):
    """
    JSON mirror of `RobustnessReport`.

    Keys:
        pattern:             sign string or pattern name
        model:               'edge' or 'diagonal' disorder
        first_order_robust:  True when the drive residual scales faster than linearly
        slope:               fitted log-log slope (None when the residual vanishes)
        scales, residuals:   disorder strengths (rad/s) and max |M' − M|
        induced_terms:       first-order coefficients per unit strength
    """
    pattern: str
    model: str
    first_order_robust: bool
    slope: Optional[float]
    scales: List[float]
    residuals: List[float]
    induced_terms: List[InducedTerm]


class ComparisonReport(TypedDict):
    """
    One oracle-vs-effective comparison.

    Keys:
        max_deviation:  largest |Δ|Ξ|²| over simulated columns
        per_entry:      'c1L->c2L' → deviation
        tolerance:      pass threshold
        passed:         max_deviation ≤ tolerance
        eps_ratio:      ε divided by the smallest consecutive splitting
        epsilon:        ε (rad/s)
    """
    max_deviation: float
    per_entry: Dict[str, float]
    tolerance: float
    passed: bool
    eps_ratio: Optional[float]
    epsilon: Optional[float]


class ValidationReport(TypedDict):
    """
    `validate` output: the comparisons over the ε grid, their Spearman trend and the overall verdict.
    """
    comparisons: List[ComparisonReport]
    trend_rho: Optional[float]
    passed: bool


class SpacingFitReport(TypedDict):
    """
    `optimize` output.

    Keys:
        weights:    coupling label → value (same unit as the fixed weights)
        residual:   Σ (Δ_i − Δ̄)² / Δ̄²
        achieved:   residual below the optimizer tolerance
        lattice:    "LxM" shape the fit was run for
        ratio_v_u:  v/u when both labels are present
    """
    weights: Dict[str, float]
    residual: float
    achieved: bool
    ratio_v_u: NotRequired[float]
    lattice: NotRequired[str]


class ErrorReport(TypedDict):
    """JSON error object printed on stderr for a failed subcommand."""
    error: str
    message: str
    exit_code: int
