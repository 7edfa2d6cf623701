import logging

import numpy as np
import pytest

from modules.analysis.perturbation import (
    Perturbation,
    corrected_modes,
    drive_in_corrected_basis,
    frequency_error_slope,
    perturbation_matrix,
    random_perturbation,
    robustness_report,
)
from modules.core.errors import DegenerateSpectrum, UnknownEdge
from modules.network.modulation import rectangular_pattern_signs
from modules.network.resonator_graph import build_array, rectangular_array


def test_ring_detuning_shifts_the_driven_pair_on_the_diagonal(two_ring):
    delta0, delta1 = 0.03, -0.01
    corrected = corrected_modes(two_ring, Perturbation('diagonal', {0: delta0, 1: delta1}))
    decomposition = drive_in_corrected_basis((1, -1), corrected)
    coefficient = (delta0 - delta1) / (2.0 * 10.0)

    assert decomposition.first_order[0, 0] == pytest.approx(-coefficient, abs=1e-12)
    assert decomposition.first_order[1, 1] == pytest.approx(coefficient, abs=1e-12)
    assert decomposition.first_order[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert set(decomposition.diagonal) == {0, 1}
    assert decomposition.cross == {}


def test_corrected_frequencies_add_the_projected_shift(two_ring):
    corrected = corrected_modes(two_ring, Perturbation('diagonal', {0: 0.02, 1: 0.02}))
    np.testing.assert_allclose(corrected.frequencies, [-9.98, 10.02], atol=1e-12)
    np.testing.assert_allclose(corrected.mixing, 0.0, atol=1e-15)


def test_single_coupling_error_leaves_two_ring_drive_untouched(two_ring):
    report = robustness_report(two_ring, (1, -1), model='edge')
    assert report.first_order_robust
    assert report.slope is None
    assert report.induced_terms == []


def test_checkerboard_pattern_is_robust_on_two_by_two_lattice():
    array = rectangular_array(2, 2, 1.0, 2.0)
    report = robustness_report(array, rectangular_pattern_signs(2, 2, 'P1'), model='edge', name='P1')
    assert report.pattern == 'P1'
    assert report.first_order_robust
    assert report.slope is None or report.slope >= 1.9


@pytest.mark.parametrize('which', ['P2', 'P3'])
def test_row_and_column_patterns_are_fragile(which):
    array = rectangular_array(2, 2, 1.0, 2.0)
    report = robustness_report(array, rectangular_pattern_signs(2, 2, which), model='edge')
    assert not report.first_order_robust
    assert report.slope <= 1.1
    assert report.induced_terms
    assert len(report.scales) == len(report.residuals) == 5


def test_first_order_frequencies_err_at_second_order(four_ring):
    slope, scales, errors = frequency_error_slope(four_ring, 'edge', seed=5)
    assert slope == pytest.approx(2.0, abs=0.1)
    assert errors[0] < errors[-1]


def test_degenerate_spectrum_is_rejected():
    array = build_array(4, 0.0, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])
    with pytest.raises(DegenerateSpectrum):
        corrected_modes(array, Perturbation('diagonal', {0: 1e-3}))


def test_unknown_edges_and_rings(two_ring):
    with pytest.raises(UnknownEdge):
        perturbation_matrix(two_ring, Perturbation('edge', {(0, 2): 0.1}))
    with pytest.raises(UnknownEdge):
        perturbation_matrix(two_ring, Perturbation('diagonal', {5: 0.1}))
    with pytest.raises(ValueError):
        Perturbation('global', {})
    with pytest.raises(ValueError):
        random_perturbation(two_ring, 'global')


def test_edge_perturbation_matrix_is_symmetric(four_ring):
    matrix = perturbation_matrix(four_ring, random_perturbation(four_ring, 'edge', 0.01, seed=2))
    np.testing.assert_allclose(matrix, matrix.T)
    assert np.count_nonzero(matrix) == 8


def test_strong_disorder_is_flagged(two_ring, caplog):
    with caplog.at_level(logging.WARNING):
        corrected_modes(two_ring, Perturbation('edge', {(0, 1): 2.0}))
    assert 'smallest coupling' in caplog.text
