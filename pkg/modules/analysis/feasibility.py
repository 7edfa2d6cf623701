"""
This module decides whether a ring-resonator array can have equally spaced normal-mode frequencies with uniform support on
every ring, the two properties a multi-mode frequency beam splitter on one waveguide needs.

The checks run from cheapest to most expensive:
    - the connectivity must be a penny graph: simple, connected, planar, within the Harborth edge bound and, when
      triangle free, within the sharper triangle-free bound
    - uniform support means the Laplacian is diagonalized by a Hadamard matrix, which needs N in {1, 2} or 4 | N, a regular
      graph and an even-integer Laplacian spectrum before an exhaustive +-1 eigenbasis search
    - sizes N = 8l + 4 (l > 0) are excluded outright, since the only Hadamard diagonalizable graphs there are K_N, K_{N/2,N/2},
      2K_{N/2}, NK_1 and their complements, none of which is a connected penny graph

Equal spacing for weighted lattices is searched numerically with a multi-start simplex descent.

Classes:
    FeasibilityReport
    SpacingFit

Functions:
    connectivity_graph()
    harborth_bound()
    triangle_free_bound()
    check_penny_necessary()
    check_hadamard_diagonalizable()
    hadamard_graph_candidates()
    property1_check()
    property2_check()
    classify_and_verdict()
    optimize_spacings()
    lattice_spacing_conditions()
"""


# Standard Library Imports
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

# Third-Party Library Imports
import networkx as nx
import numpy as np
from scipy.optimize import least_squares, minimize

# Local Application/Library-Specific Imports
from modules.core.configs import feasibility_limits, optimizer_defaults
from modules.core.errors import NoConvergence, SearchLimitExceeded
from modules.core.utils import map_in_executor
from modules.network.resonator_graph import ResonatorArray, degenerate_groups, normal_modes, rectangular_connectivity

REASON_ORDER = (
    'not_simple', 'disconnected', 'nonplanar', 'penny_bound', 'triangle_free_bound', 'size_rule', 'size_8l_plus_4',
    'irregular', 'laplacian_spectrum', 'not_hadamard', 'property1', 'property2',
)


@dataclass
class FeasibilityReport:
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
    hadamard_diagonalizable: Optional[bool] = None
    witness: Optional[np.ndarray] = None
    property1: Optional[bool] = None
    property1_deviation: Optional[float] = None
    property2: Optional[bool] = None
    property2_deviation: Optional[float] = None
    candidate_match: Optional[str] = None
    reasons: list = field(default_factory=list)
    verdict: str = 'unknown'
    conjecture_note: Optional[str] = None

    @property
    def primary_reason(self):
        return self.reasons[0] if self.reasons else None

    def to_report(self):
        report = dict(self.__dict__)
        report['witness'] = None if self.witness is None else self.witness.astype(int).tolist()
        report['primary_reason'] = self.primary_reason
        return report


@dataclass(frozen=True)
class SpacingFit:
    weights: dict
    residual: float
    achieved: bool
    frequencies: np.ndarray
    starts: int


#################################################################### Penny Graph Conditions ###########################################################################


def connectivity_graph(array_or_graph):
    if isinstance(array_or_graph, ResonatorArray):
        graph = nx.Graph()
        graph.add_nodes_from(range(array_or_graph.n))
        graph.add_edges_from((i, j) for i, j, _ in array_or_graph.couplings)
        return graph
    return array_or_graph


def harborth_bound(n, variant='standard'):
    if variant == 'standard':
        return int(np.floor(3 * n - np.sqrt(12 * n - 3)))
    if variant == 'literal':
        return int(np.floor(3 * n - np.sqrt(12 * n) - 3))
    raise ValueError(f"unknown Harborth variant {variant!r}, expected 'standard' or 'literal'")


def triangle_free_bound(n):
    return int(np.floor(2 * n - feasibility_limits['triangle_free_coefficient'] * np.sqrt(n)))


def check_penny_necessary(graph, variant='standard'):
    graph = connectivity_graph(graph)
    n = graph.number_of_nodes()
    edges = graph.number_of_edges()
    simple = not graph.is_multigraph() and nx.number_of_selfloops(graph) == 0
    simple_graph = nx.Graph(graph)
    connected = n > 0 and nx.is_connected(simple_graph)
    planar, _ = nx.check_planarity(simple_graph, False)
    triangle_free = sum(nx.triangles(simple_graph).values()) == 0

    bound = harborth_bound(n, variant)
    tf_bound = triangle_free_bound(n) if triangle_free else None
    return {
        'n': n,
        'edges': edges,
        'simple': simple,
        'connected': connected,
        'planar': bool(planar),
        'penny_bound': bound,
        'penny_bound_ok': edges <= bound,
        'triangle_free': triangle_free,
        'triangle_free_bound': tf_bound,
        'triangle_free_bound_ok': tf_bound is None or edges <= tf_bound,
    }


#################################################################### Hadamard Diagonalizability ###########################################################################


def _laplacian(graph):
    nodes = sorted(graph.nodes())
    return nx.laplacian_matrix(graph, nodelist=nodes).toarray().astype(np.int64)


def _size_rule(n):
    return n in (1, 2) or n % 4 == 0


def _integer_spectrum(laplacian):
    eigenvalues = np.linalg.eigvalsh(laplacian.astype(float))
    rounded = np.rint(eigenvalues).astype(np.int64)
    integral = bool(np.all(np.abs(eigenvalues - rounded) < 1e-8))
    return integral and bool(np.all(rounded % 2 == 0)), rounded


# All +-1 vectors with leading +1, one per row
def _sign_vectors(n):
    if n == 1:
        return np.ones((1, 1), dtype=np.int64)
    tails = np.array(list(product((1, -1), repeat=n - 1)), dtype=np.int64)
    return np.hstack([np.ones((tails.shape[0], 1), dtype=np.int64), tails])


# Depth-first search for `size` mutually orthogonal rows of `candidates`
def _orthogonal_subset(candidates, size):
    gram = candidates @ candidates.T
    chosen = []

    def extend(start):
        if len(chosen) == size:
            return True
        for index in range(start, candidates.shape[0]):
            if all(gram[index, other] == 0 for other in chosen):
                chosen.append(index)
                if extend(index + 1):
                    return True
                chosen.pop()
        return False

    return candidates[chosen] if extend(0) else None


def _necessary_for_hadamard(graph):
    n = graph.number_of_nodes()
    degrees = {degree for _, degree in graph.degree()}
    laplacian = _laplacian(graph)
    even, spectrum = _integer_spectrum(laplacian)
    return {
        'n_mod4_ok': _size_rule(n),
        'regular': len(degrees) <= 1,
        'degree': next(iter(degrees)) if len(degrees) == 1 else None,
        'laplacian_even_integers': even,
        'laplacian': laplacian,
        'spectrum': spectrum,
    }


def check_hadamard_diagonalizable(graph):
    """
    Searches for a Hadamard matrix whose columns are Laplacian eigenvectors.

    Returns (found, witness). The witness columns are ordered by eigenvalue and satisfy H^T H = N I and H^T L H diagonal.
    Graphs above the exhaustive search limit raise SearchLimitExceeded carrying the necessary-condition verdict.
    """
    graph = connectivity_graph(graph)
    n = graph.number_of_nodes()
    necessary = _necessary_for_hadamard(graph)
    necessary_ok = necessary['n_mod4_ok'] and necessary['regular'] and necessary['laplacian_even_integers']
    if not necessary_ok:
        return False, None
    if n > feasibility_limits['max_search_nodes']:
        raise SearchLimitExceeded(f"exhaustive Hadamard search is limited to N <= {feasibility_limits['max_search_nodes']}, got N={n}", necessary_ok)

    laplacian = necessary['laplacian']
    vectors = _sign_vectors(n)
    images = vectors @ laplacian

    columns = []
    eigenvalues, multiplicities = np.unique(necessary['spectrum'], return_counts=True)
    for eigenvalue, multiplicity in zip(eigenvalues, multiplicities):
        candidates = vectors[np.all(images == eigenvalue * vectors, axis=1)]
        subset = _orthogonal_subset(candidates, multiplicity) if candidates.shape[0] >= multiplicity else None
        if subset is None:
            logging.debug(f"[check_hadamard_diagonalizable] eigenvalue {eigenvalue} has no {multiplicity} orthogonal +-1 eigenvectors")
            return False, None
        columns.extend(subset)

    witness = np.array(columns, dtype=np.int64).T
    gram = witness.T @ witness
    diagonalized = witness.T @ laplacian @ witness
    if not (np.array_equal(gram, n * np.eye(n, dtype=np.int64)) and np.count_nonzero(diagonalized - np.diag(np.diag(diagonalized))) == 0):
        return False, None
    return True, witness


def hadamard_graph_candidates(n):
    if n % 2:
        raise ValueError(f"candidates are defined for even N, got {n}")
    half = n // 2
    base = [
        ('K_N', nx.complete_graph(n)),
        ('K_{N/2,N/2}', nx.complete_bipartite_graph(half, half)),
        ('2K_{N/2}', nx.disjoint_union(nx.complete_graph(half), nx.complete_graph(half))),
        ('NK_1', nx.empty_graph(n)),
    ]
    candidates = list(base)
    for name, graph in base:
        complement = nx.complement(graph)
        if not any(nx.is_isomorphic(complement, other) for _, other in candidates):
            candidates.append((f"complement({name})", complement))
    return candidates


def _candidate_match(graph):
    for name, candidate in hadamard_graph_candidates(graph.number_of_nodes()):
        if nx.faster_could_be_isomorphic(graph, candidate) and nx.is_isomorphic(graph, candidate):
            return name
    return None


#################################################################### Mode Properties ###########################################################################


def property1_check(frequencies, rel_tol=None):
    rel_tol = feasibility_limits['property1_rel_tol'] if rel_tol is None else rel_tol
    frequencies = np.sort(np.asarray(frequencies, dtype=float))
    if frequencies.size < 3:
        return True, 0.0
    gaps = np.diff(frequencies)
    mean_gap = float(np.mean(gaps))
    if mean_gap <= 0:
        return False, np.inf
    deviation = float(np.max(np.abs(gaps - mean_gap)) / mean_gap)
    return deviation <= rel_tol, deviation


def property2_check(basis, abs_tol=None):
    abs_tol = feasibility_limits['property2_abs_tol'] if abs_tol is None else abs_tol
    n = basis.size
    target = 1.0 / np.sqrt(n)
    deviation = 0.0

    for group in degenerate_groups(basis.frequencies):
        block = basis.vectors[:, group]
        group_deviation = float(np.max(np.abs(np.abs(block) - target)))
        if len(group) == 1 or group_deviation <= abs_tol:
            deviation = max(deviation, group_deviation)
            continue

        if n > feasibility_limits['max_search_nodes']:
            logging.warning(f"[property2_check] degenerate eigenspace of size {len(group)} at N={n}; uniform basis search skipped")
            deviation = max(deviation, group_deviation)
            continue

        # Uniform-support vectors of the eigenspace are its +-1 vectors scaled by 1/sqrt(N)
        signs = _sign_vectors(n).astype(float)
        projected = (signs @ block) @ block.T
        inside = signs[np.max(np.abs(projected - signs), axis=1) <= abs_tol * np.sqrt(n)]
        subset = _orthogonal_subset(np.rint(inside).astype(np.int64), len(group)) if inside.shape[0] >= len(group) else None
        if subset is None:
            deviation = max(deviation, group_deviation)
    return deviation <= abs_tol, deviation


#################################################################### Verdict ###########################################################################


def classify_and_verdict(array_or_graph, variant='standard'):
    graph = connectivity_graph(array_or_graph)
    n = graph.number_of_nodes()
    penny = check_penny_necessary(graph, variant)
    necessary = _necessary_for_hadamard(nx.Graph(graph))

    report = FeasibilityReport(
        n=n,
        edges=penny['edges'],
        simple=penny['simple'],
        connected=penny['connected'],
        planar=penny['planar'],
        regular=necessary['regular'],
        degree=necessary['degree'],
        penny_bound=penny['penny_bound'],
        penny_bound_ok=penny['penny_bound_ok'],
        triangle_free=penny['triangle_free'],
        triangle_free_bound=penny['triangle_free_bound'],
        triangle_free_bound_ok=penny['triangle_free_bound_ok'],
        n_mod4_ok=necessary['n_mod4_ok'],
        laplacian_even_integers=necessary['laplacian_even_integers'],
    )

    failing = {
        'not_simple': not report.simple,
        'disconnected': not report.connected,
        'nonplanar': not report.planar,
        'penny_bound': not report.penny_bound_ok,
        'triangle_free_bound': not report.triangle_free_bound_ok,
        'size_rule': not report.n_mod4_ok,
        'size_8l_plus_4': n >= 12 and n % 8 == 4,
        'irregular': not report.regular,
        'laplacian_spectrum': not report.laplacian_even_integers,
    }

    if n % 8 == 4 and n >= 12:
        report.candidate_match = _candidate_match(nx.Graph(graph))

    if not any(failing.values()):
        try:
            report.hadamard_diagonalizable, report.witness = check_hadamard_diagonalizable(graph)
            failing['not_hadamard'] = not report.hadamard_diagonalizable
        except SearchLimitExceeded as error:
            logging.info(f"[classify_and_verdict] {error}")

    if isinstance(array_or_graph, ResonatorArray):
        basis = normal_modes(array_or_graph)
        report.property1, report.property1_deviation = property1_check(basis.frequencies)
        report.property2, report.property2_deviation = property2_check(basis)
        failing['property1'] = not report.property1
        failing['property2'] = not report.property2

    report.reasons = [reason for reason in REASON_ORDER if failing.get(reason)]
    if report.reasons:
        report.verdict = 'infeasible'
    elif n <= 4:
        report.verdict = 'feasible'
    else:
        report.verdict = 'unknown'
        if n <= feasibility_limits['known_search_max_nodes']:
            report.conjecture_note = f"no Hadamard diagonalizable penny graph is known for 4 < N <= {feasibility_limits['known_search_max_nodes']}"
        else:
            report.conjecture_note = "conjectured infeasible for every multiple of 4 above 4; not established at this size"
        logging.warning(f"[classify_and_verdict] N={n}: {report.conjecture_note}")
    return report


#################################################################### Spacing Optimizer ###########################################################################


def _frequencies_for(connectivity, n, weights):
    hamiltonian = np.zeros((n, n))
    for i, j, label in connectivity:
        hamiltonian[i, j] = hamiltonian[j, i] = weights[label]
    return np.linalg.eigvalsh(hamiltonian)


def _gap_residuals(frequencies):
    gaps = np.diff(frequencies)
    mean_gap = (frequencies[-1] - frequencies[0]) / max(len(gaps), 1)
    if mean_gap <= 0:
        return np.full(len(gaps), 1e6)
    return (gaps - mean_gap) / mean_gap


def optimize_spacings(connectivity, free_weights, fixed=None, starts=None, seed=None, bounds=None, tolerance=None):
    """
    Tunes the free coupling labels so that the normal-mode frequencies are equally spaced.

    connectivity is a list of (i, j, label); fixed maps labels to given values (default {'u': 1.0}). Free weights are
    searched inside [min fixed, upper_bound_factor * max fixed] unless bounds are given.
    """
    fixed = {'u': 1.0} if fixed is None else dict(fixed)
    free_weights = list(free_weights)
    if not free_weights:
        raise ValueError("optimize_spacings needs at least one free weight")
    starts = optimizer_defaults['starts'] if starts is None else starts
    seed = optimizer_defaults['seed'] if seed is None else seed
    tolerance = optimizer_defaults['residual_tolerance'] if tolerance is None else tolerance

    n = 1 + max(max(i, j) for i, j, _ in connectivity)
    graph = nx.Graph([(i, j) for i, j, _ in connectivity])
    if graph.number_of_nodes() != n or not nx.is_connected(graph):
        raise ValueError("spacing optimization needs a connected coupling graph")

    scale = list(fixed.values()) or [1.0]
    low, high = bounds if bounds is not None else (min(scale), optimizer_defaults['upper_bound_factor'] * max(scale))

    def residual_vector(x):
        return _gap_residuals(_frequencies_for(connectivity, n, fixed | dict(zip(free_weights, x))))

    def objective(x):
        return float(np.sum(residual_vector(x) ** 2))

    # Helper function to run one start: simplex descent, then a bounded least-squares polish
    def run_start(x0):
        coarse = minimize(objective, x0, method='Nelder-Mead', bounds=[(low, high)] * len(free_weights),
                          options=optimizer_defaults['nelder_mead_options'])
        polished = least_squares(residual_vector, np.clip(coarse.x, low, high), bounds=(low, high), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        best = polished.x if objective(polished.x) <= coarse.fun else coarse.x
        return objective(best), best

    rng = np.random.default_rng(seed)
    initial = rng.uniform(low, high, size=(starts, len(free_weights)))
    results = map_in_executor(run_start, list(initial))
    residual, best = min(results, key=lambda item: item[0])

    weights = fixed | {label: float(value) for label, value in zip(free_weights, best)}
    fit = SpacingFit(weights, float(residual), residual < tolerance, _frequencies_for(connectivity, n, weights), starts)
    logging.info(f"[optimize_spacings] best residual {residual:.3e} with weights {weights}")
    if not fit.achieved:
        raise NoConvergence(f"no equal spacing found; best residual {residual:.3e}", fit)
    return fit


def lattice_spacing_conditions(shapes=((2, 2), (2, 3), (3, 3))):
    fits = {}
    for rows, columns in shapes:
        fit = optimize_spacings(rectangular_connectivity(rows, columns), ['v'], fixed={'u': 1.0})
        fits[f"{rows}x{columns}"] = fit
    return fits
