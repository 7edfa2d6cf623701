import logging

import numpy as np
import pytest

from modules.core.errors import (
    DimensionMismatch,
    NonResonantInput,
    NoResonantTone,
    OverlappingPairs,
    PassivityViolation,
    UnknownDevice,
    UnresolvedModes,
    UnsupportedPhase,
    ValidityViolation,
)
from modules.network.modulation import ModulationSpec, Tone, pattern_from_signs, rectangular_pattern_signs
from modules.network.operating_points import operating_point
from modules.network.resonator_graph import Waveguide, build_array, normal_modes, rectangular_array
from modules.network.rwa_engine import (
    TransferMatrix,
    assemble_blocks,
    closed_form,
    effective_system,
    effective_transfer,
    effective_transfer_at,
)
from modules.network.slh_abcd import Port

FOUR_WAY_PHASES = (np.pi / 2, -np.pi / 2)


def two_ring_drive(eps, phase=0.0):
    return ModulationSpec((1, -1), (Tone(eps, 20.0, phase),))


def four_way_drive(eps):
    return ModulationSpec((1, -1, 0, 0), (Tone(eps, 2.0, FOUR_WAY_PHASES[0]), Tone(eps, 6.0, FOUR_WAY_PHASES[1])))


def test_two_ring_generic_matches_closed_form(two_ring_lossy):
    basis = normal_modes(two_ring_lossy)
    for eps in np.linspace(0.0, 15.0, 50):
        generic = effective_transfer(effective_system(two_ring_lossy, basis, two_ring_drive(eps, 0.4)))
        exact = closed_form('two_ring_1wg', gamma=2.0, kappa_int=0.5, eps=eps, phi=0.4)
        np.testing.assert_allclose(generic.entries, exact.entries, atol=1e-10)
        assert generic.port_names() == exact.port_names() == ['c1L', 'c2L']


def test_two_waveguide_generic_matches_closed_form(two_ring_2wg):
    basis = normal_modes(two_ring_2wg)
    for eps in np.linspace(0.0, 15.0, 50):
        generic = effective_transfer(effective_system(two_ring_2wg, basis, two_ring_drive(eps)))
        exact = closed_form('two_ring_2wg', gamma_l=2.0, gamma_r=1.5, kappa_int=0.2, eps=eps)
        np.testing.assert_allclose(generic.entries, exact.entries, atol=1e-10)
    assert generic.port_names() == ['c1L', 'c1R', 'c2L', 'c2R']


def test_four_way_generic_matches_closed_form_magnitudes(four_ring):
    basis = normal_modes(four_ring)
    for eps in np.linspace(0.0, 0.9, 50):
        generic = effective_transfer(effective_system(four_ring, basis, four_way_drive(eps)))
        exact = closed_form('four_way', gamma=0.1, kappa_int=0.0, eps=eps)
        np.testing.assert_allclose(generic.abs2(), exact.abs2(), atol=1e-10)


def test_four_way_splitter_is_symmetric_at_its_operating_point(four_ring):
    exact = closed_form('four_way', gamma=0.1, kappa_int=0.0, eps=0.1)
    np.testing.assert_allclose(exact.abs2(), np.full((4, 4), 0.25), atol=1e-10)
    generic = effective_transfer(effective_system(four_ring, None, four_way_drive(0.1)))
    np.testing.assert_allclose(generic.abs2(), np.full((4, 4), 0.25), atol=1e-10)


def test_four_way_strong_drive_swaps_opposite_modes():
    exact = closed_form('four_way', gamma=0.1, kappa_int=0.0, eps=1e6)
    swap = np.zeros((4, 4))
    swap[2, 0] = swap[0, 2] = swap[3, 1] = swap[1, 3] = 1.0
    np.testing.assert_allclose(exact.abs2(), swap, atol=1e-8)


def test_four_way_closed_form_rejects_other_phases():
    with pytest.raises(UnsupportedPhase):
        closed_form('four_way', gamma=0.1, kappa_int=0.0, eps=0.1, phases=(0.0, 0.0))


def test_closed_form_argument_checks():
    with pytest.raises(UnknownDevice):
        closed_form('three_way', gamma=1.0)
    with pytest.raises(ValueError):
        closed_form('two_ring_1wg', gamma=-1.0, kappa_int=0.0, eps=1.0)


def test_lossless_effective_transfer_is_unitary_off_center(two_ring):
    system = effective_system(two_ring, None, two_ring_drive(1.3))
    xi = effective_transfer_at(system, 0.7)
    np.testing.assert_allclose(xi.conj().T @ xi, np.eye(2), atol=1e-12)


def test_disjoint_blocks_match_generic_pipeline():
    array = rectangular_array(2, 2, 1.0, 2.0, gamma=0.4, kappa_int=0.01)
    basis = normal_modes(array)
    signs = rectangular_pattern_signs(2, 2, 'P2')
    pattern = pattern_from_signs(basis, signs)
    eps = 0.3
    generic = effective_transfer(effective_system(array, basis, ModulationSpec(signs, (Tone(eps, 2.0),))))

    rates, support = basis.rates('L'), basis.signs('L')
    blocks = {}
    for (i, j), weight in pattern.pairs.items():
        blocks[(i, j)] = closed_form(
            'block2x2', gamma_i=rates[i], gamma_j=rates[j], kappa_int=0.01, eps=eps * abs(weight),
            phi=0.0 if weight > 0 else np.pi, signs=(support[i], support[j]),
        )
    assembled = assemble_blocks(pattern, blocks)
    np.testing.assert_allclose(assembled.entries, generic.entries, atol=1e-10)


def test_overlapping_blocks_are_rejected(four_ring):
    pattern = pattern_from_signs(normal_modes(four_ring), (1, -1, 0, 0))
    block = closed_form('two_ring_1wg', gamma=0.1, kappa_int=0.0, eps=0.1)
    with pytest.raises(OverlappingPairs):
        assemble_blocks(pattern, {(0, 1): block, (1, 2): block})


def test_modes_outside_driven_pairs_pass_through_as_bare_cavities(four_ring):
    drive = ModulationSpec((1, -1, 0, 0), (Tone(0.1, 6.0),))
    system = effective_system(four_ring, None, drive)
    assert system.selected_pairs == {(0, 3): 0}
    assert system.passthrough_modes == (1, 2)
    transfer = effective_transfer(system)
    assert transfer.entry('c2L', 'c2L') == pytest.approx(-1.0, abs=1e-12)
    assert transfer.metadata['passthrough_modes'] == [1, 2]


def test_drive_stronger_than_the_splitting_is_rejected(two_ring):
    with pytest.raises(ValidityViolation) as error:
        effective_system(two_ring, None, two_ring_drive(25.0))
    assert error.value.exit_code == 3
    system = effective_system(two_ring, None, two_ring_drive(25.0), guard=False)
    assert system.epsilon == 25.0


def test_drive_in_the_warning_band_still_builds(two_ring, caplog):
    with caplog.at_level(logging.WARNING):
        system = effective_system(two_ring, None, two_ring_drive(12.0))
    assert system.epsilon == 12.0
    assert 'rotating-wave errors' in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING):
        effective_system(two_ring, None, two_ring_drive(9.0))
    assert 'rotating-wave' not in caplog.text


def test_linewidth_above_splitting_is_rejected():
    array = build_array(2, 0.0, [(0, 1, 1.0)], [Waveguide(0, 4.0)])
    with pytest.raises(UnresolvedModes):
        effective_system(array)


def test_tones_must_hit_a_pattern_splitting(two_ring):
    with pytest.raises(NoResonantTone):
        effective_system(two_ring, None, ModulationSpec((1, -1), (Tone(1.0, 7.0),)))


def test_input_carriers_are_assigned_to_modes(two_ring):
    basis = normal_modes(two_ring)
    system = effective_system(two_ring, basis, two_ring_drive(1.0), input_carriers=[basis.frequencies[1]])
    assert system.input_assignment == {0: 1}
    with pytest.raises(NonResonantInput):
        effective_system(two_ring, basis, two_ring_drive(1.0), input_carriers=[0.0])


def test_undriven_array_is_a_set_of_bare_cavities(two_ring_lossy):
    transfer = effective_transfer(effective_system(two_ring_lossy))
    expected = -(2.0 - 0.5) / (2.0 + 0.5)
    np.testing.assert_allclose(np.diag(transfer.entries), [expected, expected], atol=1e-12)


def test_transfer_matrix_validation_and_views(four_ring):
    with pytest.raises(DimensionMismatch):
        TransferMatrix(np.eye(2), (Port(0, 'L'),))
    with pytest.raises(PassivityViolation):
        TransferMatrix([[1.5]], (Port(0, 'L'),))

    transfer = effective_transfer(effective_system(four_ring, None, four_way_drive(0.1)))
    restricted = transfer.restrict([0, 2])
    assert restricted.port_names() == ['c1L', 'c3L']
    assert restricted.entry('c3L', 'c1L') == transfer.entry('c3L', 'c1L')
    assert transfer.signature() == ((0, 'L'), (1, 'L'), (2, 'L'), (3, 'L'))


def test_measured_two_ring_device_at_full_conversion(measured_array, measured_params):
    gamma, kappa_int, alpha = measured_params['gamma'], measured_params['kappa_int'], measured_params['alpha']
    eps = operating_point('GCC', gamma, kappa_int).epsilon
    drive = ModulationSpec((1, -1), (Tone(eps, 2.0 * measured_params['u']),))
    transfer = effective_transfer(effective_system(measured_array, None, drive)).abs2()
    assert transfer[0, 0] < 1e-10
    assert transfer[1, 0] == pytest.approx((alpha - 2.0) / (alpha + 2.0), abs=1e-10)
    assert transfer[1, 0] == pytest.approx(0.88, abs=0.01)
