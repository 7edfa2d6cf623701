import numpy as np
import pytest

from modules.core.errors import (
    DisconnectedGraph,
    DuplicateEdge,
    DuplicateWaveguide,
    IndexOutOfRange,
    InvalidSide,
    NegativeRate,
    SelfLoop,
)
from modules.network.resonator_graph import (
    Waveguide,
    build_array,
    degenerate_groups,
    normal_modes,
    rectangular_array,
    rectangular_connectivity,
    rectangular_modes,
)


def test_two_ring_modes_are_antisymmetric_then_symmetric(two_ring):
    basis = normal_modes(two_ring)
    np.testing.assert_allclose(basis.frequencies, [-10.0, 10.0], atol=1e-12)
    np.testing.assert_allclose(basis.vectors[:, 0], np.array([1.0, -1.0]) / np.sqrt(2), atol=1e-12)
    np.testing.assert_allclose(basis.vectors[:, 1], np.array([1.0, 1.0]) / np.sqrt(2), atol=1e-12)
    np.testing.assert_allclose(basis.rates('L'), [2.0, 2.0], atol=1e-12)


def test_basis_is_orthonormal_and_complete(four_ring):
    vectors = normal_modes(four_ring).vectors
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(vectors @ vectors.T, np.eye(4), atol=1e-12)


def test_four_ring_cycle_frequencies_and_support(four_ring):
    basis = normal_modes(four_ring)
    np.testing.assert_allclose(basis.frequencies, [-3.0, -1.0, 1.0, 3.0], atol=1e-12)
    np.testing.assert_allclose(np.abs(basis.vectors), 0.5, atol=1e-12)
    np.testing.assert_allclose(basis.rates('L'), [0.1] * 4, atol=1e-12)


def test_sides_without_waveguide_have_zero_rate(two_ring, two_ring_2wg):
    assert two_ring.sides == ('L',)
    np.testing.assert_array_equal(normal_modes(two_ring).rates('R'), [0.0, 0.0])

    basis = normal_modes(two_ring_2wg)
    assert two_ring_2wg.sides == ('L', 'R')
    np.testing.assert_allclose(basis.rates('R'), [1.5, 1.5], atol=1e-12)
    np.testing.assert_array_equal(basis.signs('R'), [-1.0, 1.0])
    np.testing.assert_allclose(basis.linewidths(0.2), [2.0 + 1.5 + 0.2] * 2, atol=1e-12)


def test_single_ring_is_its_own_mode():
    array = build_array(1, 3.0, [], [Waveguide(0, 1.0)])
    basis = normal_modes(array)
    np.testing.assert_allclose(basis.frequencies, [3.0])
    np.testing.assert_allclose(basis.rates('L'), [1.0])


@pytest.mark.parametrize('couplings, waveguides, kappa_int, error', [
    ([(0, 1, 1.0), (1, 0, 2.0)], [], 0.0, DuplicateEdge),
    ([(0, 0, 1.0)], [], 0.0, SelfLoop),
    ([(0, 3, 1.0)], [], 0.0, IndexOutOfRange),
    ([(0, 1, -1.0)], [], 0.0, NegativeRate),
    ([(0, 1, 1.0)], [], -0.1, NegativeRate),
    ([(0, 1, 1.0)], [Waveguide(0, 1.0, 'X')], 0.0, InvalidSide),
    ([(0, 1, 1.0)], [Waveguide(0, 1.0, 'L'), Waveguide(1, 1.0, 'L')], 0.0, DuplicateWaveguide),
    ([(0, 1, 1.0)], [Waveguide(0, -1.0, 'L')], 0.0, NegativeRate),
])
def test_build_array_rejects_invalid_input(couplings, waveguides, kappa_int, error):
    with pytest.raises(error):
        build_array(2, 0.0, couplings, waveguides, kappa_int)


def test_self_loop_is_a_duplicate_edge_error():
    assert issubclass(SelfLoop, DuplicateEdge)


def test_disconnected_array_is_rejected():
    with pytest.raises(DisconnectedGraph):
        build_array(4, 0.0, [(0, 1, 1.0), (2, 3, 1.0)])


def test_rectangular_closed_form_matches_numerical_modes():
    u, v = 1.0, 3.0 / np.sqrt(2.0)
    closed = rectangular_modes(2, 3, u, v, gamma=1.0)
    numerical = normal_modes(rectangular_array(2, 3, u, v, gamma=1.0))
    np.testing.assert_allclose(closed.frequencies, numerical.frequencies, atol=1e-12)
    np.testing.assert_allclose(np.abs(closed.vectors.T @ numerical.vectors), np.eye(6), atol=1e-10)
    assert closed.labels is not None and len(closed.labels) == 6


def test_rectangular_modes_have_positive_support_on_the_waveguide_ring():
    basis = rectangular_modes(3, 3, 1.0, 3.0)
    assert np.all(basis.support['L'] > 0)


def test_rectangular_connectivity_labels_rows_and_columns():
    edges = rectangular_connectivity(2, 3)
    assert (0, 1, 'u') in edges and (0, 3, 'v') in edges
    assert sum(1 for _, _, label in edges if label == 'u') == 4
    assert sum(1 for _, _, label in edges if label == 'v') == 3


def test_degenerate_groups_collects_equal_frequencies():
    assert degenerate_groups([-1.0, 0.0, 0.0, 1.0]) == [[0], [1, 2], [3]]
    assert degenerate_groups([]) == []


def test_graph_carries_coupling_weights(four_ring):
    graph = four_ring.graph()
    assert graph.number_of_edges() == 4
    assert graph[1][2]['weight'] == 2.0
