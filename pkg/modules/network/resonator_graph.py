"""
This module represents coupled ring-resonator arrays as weighted graphs and diagonalizes their static Hamiltonian.

A ResonatorArray is a validated, immutable description of identical rings (central frequency omega0), the positive
couplings between them, the waveguides attached to them and a uniform internal loss rate. normal_modes() turns an array
into a NormalModeBasis: orthonormal eigenmodes sorted by frequency, with the rate at which every mode leaks into each
waveguide. Rectangular L x M lattices have a closed-form basis of products of discrete sines.

All indices are 0-based. Rates and frequencies are angular (rad/s).

Classes:
    Waveguide
    ResonatorArray
    NormalModeBasis

Functions:
    build_array()
    normal_modes()
    rectangular_modes()
    rectangular_array()
    rectangular_connectivity()
    degenerate_groups()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, field
from typing import Optional

# Third-Party Library Imports
import networkx as nx
import numpy as np

# Local Application/Library-Specific Imports
from modules.core.configs import numerical_tolerances
from modules.core.errors import (
    DisconnectedGraph,
    DuplicateEdge,
    DuplicateWaveguide,
    IndexOutOfRange,
    InvalidSide,
    NegativeRate,
    SelfLoop,
)

SIDES = ('L', 'R')


@dataclass(frozen=True)
class Waveguide:
    node: int
    gamma: float
    side: str = 'L'


@dataclass(frozen=True)
class ResonatorArray:
    """
    Weighted coupling graph of identical rings.

    Attributes:
        n:          number of resonators
        omega0:     common ring frequency
        couplings:  tuple of (i, j, u_ij) with i < j and u_ij > 0
        waveguides: attached waveguides, at most one per side label
        kappa_int:  internal loss rate of every ring
    """
    n: int
    omega0: float
    couplings: tuple
    waveguides: tuple = ()
    kappa_int: float = 0.0

    def hamiltonian(self):
        h0 = self.omega0 * np.eye(self.n)
        for i, j, u in self.couplings:
            h0[i, j] = u
            h0[j, i] = u
        return h0

    def coupling_matrix(self):
        return self.hamiltonian() - self.omega0 * np.eye(self.n)

    def graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for i, j, u in self.couplings:
            graph.add_edge(i, j, weight=u)
        return graph

    def waveguide(self, side):
        for guide in self.waveguides:
            if guide.side == side:
                return guide
        return None

    @property
    def sides(self):
        return tuple(side for side in SIDES if self.waveguide(side) is not None)

    @property
    def min_coupling(self):
        return min((u for _, _, u in self.couplings), default=0.0)


@dataclass(frozen=True, eq=False)
class NormalModeBasis:
    """
    Orthonormal eigenmodes of the static Hamiltonian.

    Attributes:
        vectors:      real N x N matrix, column k is mode c_k in the resonator basis
        frequencies:  ascending mode frequencies
        support:      side -> V[attach_row, :], the signed support of every mode on the attached ring
        couplings:    side -> physical waveguide rate Gamma
        labels:       optional per-mode labels, (p, q) for rectangular lattices
    """
    vectors: np.ndarray
    frequencies: np.ndarray
    support: dict = field(default_factory=dict)
    couplings: dict = field(default_factory=dict)
    labels: Optional[tuple] = None

    @property
    def size(self):
        return len(self.frequencies)

    def rates(self, side):
        if side not in self.support:
            return np.zeros(self.size)
        return self.couplings[side] * self.support[side] ** 2

    def signs(self, side):
        if side not in self.support:
            return np.ones(self.size)
        return np.where(self.support[side] < 0.0, -1.0, 1.0)

    def linewidths(self, kappa_int=0.0):
        total = np.full(self.size, float(kappa_int))
        for side in self.support:
            total = total + self.rates(side)
        return total


# Helper function to fix the sign of every eigenvector (first nonzero entry positive)
def _normalize_signs(vectors):
    vectors = np.array(vectors, dtype=float, copy=True)
    tolerance = numerical_tolerances['prune']
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        nonzero = np.flatnonzero(np.abs(column) > tolerance)
        if nonzero.size and column[nonzero[0]] < 0.0:
            vectors[:, k] = -column
    return vectors


def build_array(n, omega0, couplings, waveguides=(), kappa_int=0.0):
    if n < 1:
        raise IndexOutOfRange(f"an array needs at least one resonator, got n={n}")
    if kappa_int < 0:
        raise NegativeRate(f"kappa_int must be >= 0, got {kappa_int}")

    seen = set()
    normalized = []
    for edge in couplings:
        i, j, u = int(edge[0]), int(edge[1]), float(edge[2])
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRange(f"coupling ({i}, {j}) outside 0..{n - 1}")
        if i == j:
            raise SelfLoop(f"self-loop on resonator {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"duplicate coupling between {key[0]} and {key[1]}")
        if u <= 0:
            raise NegativeRate(f"coupling ({i}, {j}) must be > 0, got {u}")
        seen.add(key)
        normalized.append((key[0], key[1], u))

    guides = []
    for guide in waveguides:
        if not isinstance(guide, Waveguide):
            guide = Waveguide(*guide) if isinstance(guide, (tuple, list)) else Waveguide(**guide)
        if guide.side not in SIDES:
            raise InvalidSide(f"waveguide side must be one of {SIDES}, got {guide.side!r}")
        if not 0 <= guide.node < n:
            raise IndexOutOfRange(f"waveguide attached to {guide.node}, outside 0..{n - 1}")
        if guide.gamma < 0:
            raise NegativeRate(f"waveguide rate must be >= 0, got {guide.gamma}")
        if any(existing.side == guide.side for existing in guides):
            raise DuplicateWaveguide(f"more than one waveguide on side {guide.side}")
        guides.append(Waveguide(int(guide.node), float(guide.gamma), guide.side))

    array = ResonatorArray(n, float(omega0), tuple(sorted(normalized)), tuple(guides), float(kappa_int))
    if n > 1 and not nx.is_connected(array.graph()):
        raise DisconnectedGraph(f"coupling graph on {n} resonators is not connected")
    return array


# Builds the basis from (vectors, frequencies) and the array's waveguides
def _basis_with_waveguides(vectors, frequencies, waveguides, labels=None):
    support = {guide.side: vectors[guide.node, :].copy() for guide in waveguides}
    couplings = {guide.side: guide.gamma for guide in waveguides}
    return NormalModeBasis(vectors, np.asarray(frequencies, dtype=float), support, couplings, labels)


def normal_modes(array):
    frequencies, vectors = np.linalg.eigh(array.hamiltonian())
    order = np.argsort(frequencies, kind='stable')
    frequencies = frequencies[order]
    vectors = _normalize_signs(vectors[:, order])
    return _basis_with_waveguides(vectors, frequencies, array.waveguides)


def rectangular_modes(L, M, u, v, omega0=0.0, gamma=1.0, kappa_int=0.0):
    """
    Closed-form normal modes of the L x M lattice (horizontal coupling u, vertical coupling v).

    Resonator (l, m) sits at row-major index (l-1)*M + (m-1). The waveguide is attached at (1, 1)
    with rate gamma, so every mode has positive support there.
    """
    if L < 1 or M < 1:
        raise IndexOutOfRange(f"lattice sides must be >= 1, got {L} x {M}")

    rows = [(l, m) for l in range(1, L + 1) for m in range(1, M + 1)]
    labels = [(p, q) for p in range(1, L + 1) for q in range(1, M + 1)]
    norm = 2.0 / np.sqrt((L + 1) * (M + 1))

    vectors = np.empty((L * M, L * M))
    for column, (p, q) in enumerate(labels):
        for row, (l, m) in enumerate(rows):
            vectors[row, column] = norm * np.sin(np.pi * l * p / (L + 1)) * np.sin(np.pi * m * q / (M + 1))

    frequencies = np.array([
        omega0 + 2.0 * v * np.cos(np.pi * p / (L + 1)) + 2.0 * u * np.cos(np.pi * q / (M + 1))
        for p, q in labels
    ])
    order = np.argsort(frequencies, kind='stable')
    waveguides = (Waveguide(0, float(gamma), 'L'),)
    return _basis_with_waveguides(vectors[:, order], frequencies[order], waveguides, tuple(labels[k] for k in order))


def rectangular_connectivity(L, M):
    edges = []
    for l in range(L):
        for m in range(M):
            index = l * M + m
            if m + 1 < M:
                edges.append((index, index + 1, 'u'))
            if l + 1 < L:
                edges.append((index, index + M, 'v'))
    return edges


def rectangular_array(L, M, u, v, omega0=0.0, gamma=0.0, kappa_int=0.0):
    weights = {'u': u, 'v': v}
    couplings = [(i, j, weights[label]) for i, j, label in rectangular_connectivity(L, M)]
    waveguides = [Waveguide(0, gamma, 'L')] if gamma > 0 else []
    return build_array(L * M, omega0, couplings, waveguides, kappa_int)


# Groups mode indices whose frequencies coincide within the degeneracy threshold
def degenerate_groups(frequencies, rel_tol=None):
    rel_tol = numerical_tolerances['degeneracy'] if rel_tol is None else rel_tol
    frequencies = np.asarray(frequencies, dtype=float)
    if frequencies.size == 0:
        return []
    scale = max(np.max(np.abs(frequencies)), np.finfo(float).tiny)
    threshold = rel_tol * scale

    groups = [[0]]
    for k in range(1, frequencies.size):
        if abs(frequencies[k] - frequencies[groups[-1][-1]]) < threshold:
            groups[-1].append(k)
        else:
            groups.append([k])
    if any(len(group) > 1 for group in groups):
        logging.debug(f"[degenerate_groups] degenerate eigenspaces: {[g for g in groups if len(g) > 1]}")
    return groups
