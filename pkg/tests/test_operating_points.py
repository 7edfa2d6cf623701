import numpy as np
import pytest

from modules.core.errors import RatioUnreachable, RegimeViolation
from modules.network.operating_points import (
    asymptotic_limits,
    device_loss,
    epsilon_for_ratio,
    intensities_two_waveguide,
    lattice_transmission,
    no_shifter_with_second_waveguide,
    operating_point,
    transmission_amplitude,
)
from modules.network.rwa_engine import closed_form


def test_gcc_point_of_the_two_ring_device(measured_params):
    gamma, kappa_int, alpha = measured_params['gamma'], measured_params['kappa_int'], measured_params['alpha']
    point = operating_point('GCC', gamma, kappa_int)
    transfer = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=point.epsilon).abs2()
    assert transfer[0, 0] < 1e-10
    assert transfer[1, 0] == pytest.approx((alpha - 2.0) / (alpha + 2.0), abs=1e-10)
    assert point.loss == pytest.approx(device_loss('gcc', alpha), abs=1e-12)


def test_fifty_fifty_points_split_evenly(measured_params):
    gamma, kappa_int = measured_params['gamma'], measured_params['kappa_int']
    for kind in ('bs50_minus', 'bs50_plus'):
        point = operating_point(kind, gamma, kappa_int)
        transfer = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=point.epsilon).abs2()
        assert transfer[0, 0] == pytest.approx(transfer[1, 0], abs=1e-8)
        assert transfer[0, 0] + transfer[1, 0] == pytest.approx(point.transmission ** 2, abs=1e-10)


@pytest.mark.parametrize('R', [0.1, 0.25, 0.5, 0.9, 1.0])
def test_ratio_points_realize_the_target_ratio(R):
    gamma, kappa_int = 3.0, 0.2
    for eps in epsilon_for_ratio(R, gamma, kappa_int):
        transfer = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=eps).abs2()
        assert transfer[1, 0] / (transfer[0, 0] + transfer[1, 0]) == pytest.approx(R, abs=1e-10)


def test_strong_and_weak_fifty_fifty_amplitudes_in_the_lossless_limit():
    eps_minus, eps_plus = epsilon_for_ratio(0.5, 1e6, 1.0)
    assert eps_plus / eps_minus == pytest.approx(3.0 + 2.0 * np.sqrt(2.0), abs=1e-6)
    alpha = 2e6
    assert device_loss('bs_plus', alpha) / device_loss('bs_minus', alpha) == pytest.approx(1.0 / (3.0 + 2.0 * np.sqrt(2.0)), abs=1e-4)


def test_lossless_fifty_fifty_amplitudes():
    eps_minus, eps_plus = epsilon_for_ratio(0.5, 1.0, 0.0)
    assert eps_minus == pytest.approx(np.sqrt(2.0) - 1.0)
    assert eps_plus == pytest.approx(np.sqrt(2.0) + 1.0)


@pytest.mark.parametrize('alpha', [2.5, 4.0, 6.0, 9.0, 9.9, 10.5, 12.0, 30.0, 100.0])
def test_weak_fifty_fifty_loss_breaks_even_at_alpha_ten(alpha):
    assert (device_loss('bs_minus', alpha) <= 0.5) == (alpha >= 10.0)


def test_two_waveguide_loss_anchors():
    assert device_loss('two_waveguide', 30.0) == pytest.approx(0.0312, abs=1e-3)
    assert device_loss('two_waveguide', 30.0, resonators=4) == pytest.approx(2.0 * 30.0 / 32.0 ** 2, abs=1e-12)
    assert device_loss('two_waveguide', 30.0, resonators=4) == pytest.approx(0.0585, abs=1e-3)


def test_two_waveguide_point_matches_the_closed_form():
    gamma_l, gamma_r, kappa_int = 2.0, 1.5, 0.2
    point = operating_point('bs_R_2wg', gamma_l, kappa_int, gamma_r=gamma_r)
    assert point.epsilon == pytest.approx(gamma_l + gamma_r + kappa_int)
    transfer = closed_form('two_ring_2wg', gamma_l=gamma_l, gamma_r=gamma_r, kappa_int=kappa_int, eps=point.epsilon).abs2()
    # c1R and c2R outputs for an input on c1L
    assert transfer[1, 0] == pytest.approx(transfer[3, 0], abs=1e-12)
    assert transfer[1, 0] == pytest.approx(point.intensities['right'] / 2.0, abs=1e-12)
    assert transfer[0, 0] + transfer[2, 0] == pytest.approx(point.intensities['left'], abs=1e-12)
    assert 1.0 - transfer[:, 0].sum() == pytest.approx(point.loss, abs=1e-12)


def test_symmetric_two_waveguide_intensities():
    report = intensities_two_waveguide(30.0)
    a = 15.0
    assert report['right'] == pytest.approx(2 * a * a / (2 * a + 1) ** 2)
    assert report['right'] + report['left'] + report['loss'] == pytest.approx(1.0)
    assert not report['undercoupled']
    assert intensities_two_waveguide(1.0)['undercoupled']


def test_undercoupled_peak_at_unit_cooperativity():
    point = operating_point('undercoupled_peak', 0.5, 1.0)
    assert point.ratio == pytest.approx(0.25, abs=1e-10)
    assert point.loss == pytest.approx(2.0 / 3.0, abs=1e-10)
    assert device_loss('undercoupled', 1.0) == pytest.approx(2.0 / 3.0, abs=1e-10)
    transfer = closed_form('two_ring_1wg', gamma=0.5, kappa_int=1.0, eps=point.epsilon).abs2()
    assert transfer[0, 0] / transfer[1, 0] == pytest.approx(3.0, abs=1e-10)


def test_undercoupled_peak_is_the_best_ratio():
    gamma, kappa_int = 0.3, 1.0
    peak = operating_point('undercoupled_peak', gamma, kappa_int)
    grid = np.linspace(0.01, 3.0, 500)
    ratios = []
    for eps in grid:
        transfer = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=eps).abs2()
        ratios.append(transfer[1, 0] / (transfer[0, 0] + transfer[1, 0]))
    assert max(ratios) <= peak.ratio + 1e-9


def test_four_way_point():
    lossless = operating_point('four_way', 0.25, 0.0)
    assert lossless.epsilon == pytest.approx(0.25)
    assert lossless.transmission == pytest.approx(1.0)

    lossy = operating_point('four_way', 2.0, 0.5)
    entries = closed_form('four_way', gamma=2.0, kappa_int=0.5, eps=lossy.epsilon).abs2()
    assert entries[:, 0].sum() == pytest.approx(1.0 - lossy.loss, abs=1e-10)
    assert device_loss('four_way', 16.0) == pytest.approx(lossy.loss, abs=1e-12)

    K = (2.0 - 0.5) / (2.0 + 0.5)
    assert lossy.transmission == pytest.approx(K)
    np.testing.assert_allclose(entries[:, 0], [K ** 2 / 4, K / 4, K ** 2 / 4, K / 4], atol=1e-12)
    assert entries[:, 0].sum() == pytest.approx((K ** 2 + K) / 2, abs=1e-12)


def test_regime_checks():
    with pytest.raises(RegimeViolation):
        operating_point('GCC', 0.1, 1.0)
    with pytest.raises(RegimeViolation):
        operating_point('undercoupled_peak', 2.0, 1.0)
    with pytest.raises(RatioUnreachable):
        epsilon_for_ratio(0.5, 0.1, 1.0)
    with pytest.raises(RatioUnreachable):
        epsilon_for_ratio(1.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        operating_point('ratio_R', 1.0, 0.0)
    with pytest.raises(ValueError):
        operating_point('GCC', -1.0)


def test_zero_ratio_is_reached_without_drive():
    assert epsilon_for_ratio(0.0, 1.0, 0.1) == (0.0, np.inf)


def test_transmission_branches_and_lattice_form():
    gamma, kappa_int, R = 3.0, 1.0, 0.5
    plus = transmission_amplitude(gamma, kappa_int, R, 'plus')
    minus = transmission_amplitude(gamma, kappa_int, R, 'minus')
    assert plus > minus
    # mu^2 = 1/2 for the two-ring device, alpha = Gamma / kappa_int = 2 gamma / kappa_int
    assert lattice_transmission(2.0 * gamma / kappa_int, R, np.sqrt(0.5), 'plus') == pytest.approx(plus)
    assert lattice_transmission(2.0 * gamma / kappa_int, R, np.sqrt(0.5), 'minus') == pytest.approx(minus)


def test_asymptotic_limits_agree_with_the_closed_form():
    gamma, kappa_int = 2.0, 0.5
    limits = asymptotic_limits(gamma, kappa_int, eps=4.0)
    weak = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=0.0).entries
    strong = closed_form('two_ring_1wg', gamma=gamma, kappa_int=kappa_int, eps=1e9).entries
    assert weak[0, 0] == pytest.approx(limits['reflection_at_zero'])
    np.testing.assert_allclose(strong, limits['transfer_at_infinity'], atol=1e-8)
    assert limits['dressed_splitting'] == 4.0


def test_second_waveguide_gives_no_shifter():
    report = no_shifter_with_second_waveguide(2.0, 0.5, 0.1)
    assert not report['reduced_to_single_waveguide']
    assert not report['shifter_found']
    assert report['min_xi21'] > 1e-3
    assert report['xi11_at_gcc'] == pytest.approx(0.0, abs=1e-10)
    assert report['xi21_at_gcc'] > 0.0


def test_second_waveguide_without_coupling_reduces_to_gcc():
    report = no_shifter_with_second_waveguide(2.0, 0.0, 0.1)
    assert report['reduced_to_single_waveguide']
    assert report['shifter_found']
    assert report['epsilon_gcc_2wg'] == pytest.approx(np.sqrt(2.0 ** 2 - 0.1 ** 2))


def test_operating_point_report_fields():
    report = operating_point('GCC', 2.0, 0.5).to_report()
    assert set(report) == {'kind', 'epsilon', 'K', 'loss', 'ratio', 'intensities', 'inputs'}
    assert report['inputs'] == {'gamma': 2.0, 'kappa_int': 0.5}
