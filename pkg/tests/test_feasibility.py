import networkx as nx
import numpy as np
import pytest

from modules.analysis.feasibility import (
    check_hadamard_diagonalizable,
    check_penny_necessary,
    classify_and_verdict,
    harborth_bound,
    optimize_spacings,
    property1_check,
    property2_check,
    hadamard_graph_candidates,
    lattice_spacing_conditions,
    triangle_free_bound,
)
from modules.core.errors import SearchLimitExceeded
from modules.network.resonator_graph import normal_modes, rectangular_array, rectangular_connectivity


def test_complete_graph_on_four_nodes_breaks_the_penny_bound():
    report = classify_and_verdict(nx.complete_graph(4))
    assert report.planar
    assert report.penny_bound == 5
    assert report.primary_reason == 'penny_bound'
    assert report.verdict == 'infeasible'


def test_cube_is_hadamard_diagonalizable_but_not_a_penny_graph():
    cube = nx.convert_node_labels_to_integers(nx.hypercube_graph(3))
    found, witness = check_hadamard_diagonalizable(cube)
    assert found
    assert np.array_equal(witness.T @ witness, 8 * np.eye(8, dtype=int))

    report = classify_and_verdict(cube)
    assert report.triangle_free
    assert report.triangle_free_bound == 11 and report.edges == 12
    assert report.reasons == ['triangle_free_bound']
    assert report.verdict == 'infeasible'


def test_four_cycle_is_feasible_with_a_witness():
    report = classify_and_verdict(nx.cycle_graph(4))
    assert report.penny_bound_ok and report.triangle_free_bound_ok
    assert report.hadamard_diagonalizable
    assert report.verdict == 'feasible'
    witness = np.array(report.to_report()['witness'])
    laplacian = nx.laplacian_matrix(nx.cycle_graph(4)).toarray()
    diagonalized = witness.T @ laplacian @ witness
    assert np.count_nonzero(diagonalized - np.diag(np.diag(diagonalized))) == 0


def test_four_ring_cycle_array_has_both_mode_properties(four_ring):
    report = classify_and_verdict(four_ring)
    assert report.property1 and report.property2
    assert report.verdict == 'feasible'
    assert report.primary_reason is None


def test_path_is_not_hadamard_diagonalizable():
    assert check_hadamard_diagonalizable(nx.path_graph(3)) == (False, None)


def test_twelve_node_candidates_are_all_infeasible():
    candidates = hadamard_graph_candidates(12)
    assert len(candidates) == 4
    for name, graph in candidates:
        report = classify_and_verdict(graph)
        assert report.verdict == 'infeasible', name
        assert {'nonplanar', 'disconnected'} & set(report.reasons), name
        assert report.candidate_match == name


def test_sizes_of_the_form_eight_l_plus_four_are_excluded():
    report = classify_and_verdict(nx.cycle_graph(20))
    assert 'size_8l_plus_4' in report.reasons
    assert report.candidate_match is None


def test_cycles_above_four_have_an_irrational_laplacian_spectrum():
    report = classify_and_verdict(nx.cycle_graph(8))
    assert report.verdict == 'infeasible'
    assert 'laplacian_spectrum' in report.reasons


def test_harborth_bound_variants():
    assert harborth_bound(4) == 5
    assert harborth_bound(7) == 12
    assert harborth_bound(4, 'literal') == 2
    assert harborth_bound(7, 'literal') == 8
    with pytest.raises(ValueError):
        harborth_bound(4, 'loose')
    assert triangle_free_bound(8) == 11


def test_penny_checks_on_a_multigraph():
    graph = nx.MultiGraph([(0, 1), (0, 1), (1, 2)])
    assert not check_penny_necessary(graph)['simple']


def test_two_by_three_lattice_is_equally_spaced_without_uniform_support():
    array = rectangular_array(2, 3, 1.0, 3.0 / np.sqrt(2.0))
    basis = normal_modes(array)
    assert property1_check(basis.frequencies)[0]
    ok, deviation = property2_check(basis)
    assert not ok and deviation > 0.01

    report = classify_and_verdict(array)
    assert report.property1 and not report.property2
    assert 'size_rule' in report.reasons and 'property2' in report.reasons


def test_unequal_spacing_fails_property1():
    ok, deviation = property1_check([-3.0, -1.0, 1.5, 3.0])
    assert not ok and deviation > 0.1


@pytest.mark.parametrize('rows, columns, expected', [(2, 2, 2.0), (2, 3, 3.0 / np.sqrt(2.0)), (3, 3, 3.0)])
def test_optimizer_recovers_lattice_spacing_conditions(rows, columns, expected):
    fit = optimize_spacings(rectangular_connectivity(rows, columns), ['v'], fixed={'u': 1.0})
    assert fit.achieved
    assert fit.weights['v'] == pytest.approx(expected, abs=1e-6)
    assert property1_check(fit.frequencies, rel_tol=1e-6)[0]


def test_optimizer_needs_a_free_weight():
    with pytest.raises(ValueError):
        optimize_spacings(rectangular_connectivity(2, 2), [])


def test_large_graphs_exceed_the_exhaustive_search():
    with pytest.raises(SearchLimitExceeded) as error:
        check_hadamard_diagonalizable(nx.hypercube_graph(5))
    assert error.value.necessary_ok


def test_lattice_spacing_conditions_per_shape():
    fits = lattice_spacing_conditions(((2, 2),))
    assert list(fits) == ['2x2']
    assert fits['2x2'].achieved
    assert fits['2x2'].weights['v'] == pytest.approx(2.0, abs=1e-6)
