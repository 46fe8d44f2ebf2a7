"""简并二能级解析解与光束耦合映射"""

import math

import numpy as np
import pytest

from src.beam import BeamKind, BeamProfile, ImpactParameter
from src.errors import UsageError, ValidationError
from src.twostate import (
    QUARTER_PERIOD,
    CouplingMap,
    DriveParameters,
    amplitudes_degenerate,
    broad_maximum_indicator,
    complete_transfer_radii,
    first_order_probability,
    transfer_scan,
    transition_probability,
)


@pytest.mark.parametrize("coupling", [0.0, 0.5, math.pi / 2, 2.718, math.pi, 7.3])
def test_amplitudes_are_unitary(coupling):
    tau = np.linspace(-0.3, 2.7, 301)
    a11, a21 = amplitudes_degenerate(DriveParameters(coupling), tau)
    np.testing.assert_allclose(np.abs(a11) ** 2 + np.abs(a21) ** 2, 1.0, rtol=0, atol=1e-14)


def test_phase_sign_flips_a21_only():
    params = DriveParameters(1.2)
    a11_plus, a21_plus = amplitudes_degenerate(params, 0.1)
    a11_minus, a21_minus = amplitudes_degenerate(params, 0.1, phase_sign=-1)
    assert a11_plus == a11_minus
    assert a21_minus == -a21_plus
    assert a21_plus.real == 0.0 and a21_plus.imag > 0
    with pytest.raises(UsageError):
        amplitudes_degenerate(params, 0.1, phase_sign=0)


def test_scalar_input_gives_scalar_output():
    p = transition_probability(DriveParameters(1.0), 0.25)
    assert isinstance(p, float)
    assert transition_probability(DriveParameters(1.0), np.array([0.25])).shape == (1,)


def test_fig2_quarter_period_value():
    assert transition_probability(DriveParameters(2.718), QUARTER_PERIOD) == pytest.approx(
        math.sin(2.718) ** 2, abs=1e-12
    )


def test_fig3_dashed_curve_maximum():
    assert transition_probability(DriveParameters(0.5), 0.25) == pytest.approx(0.2298488470659301, abs=1e-12)


def test_probability_is_periodic():
    params = DriveParameters(2.718)
    tau = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(transition_probability(params, tau + 5.0), transition_probability(params, tau), atol=1e-12)


@pytest.mark.parametrize("coupling", [math.pi / 2, 3 * math.pi / 2])
def test_complete_transfer_at_odd_half_pi(coupling):
    assert transition_probability(DriveParameters(coupling), 0.25) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("coupling", [1e-3, 1e-4])
def test_perturbative_limit(coupling):
    ratio = transition_probability(DriveParameters(coupling), 0.25) / coupling**2
    assert 1.0 - 1e-4 <= ratio <= 1.0
    assert first_order_probability(DriveParameters(coupling), 0.25) == pytest.approx(coupling**2, rel=1e-14)


def test_broad_maximum_at_half_pi():
    result = broad_maximum_indicator(DriveParameters(math.pi / 2))
    assert abs(result.first_derivative) < 1e-6
    assert abs(result.second_derivative) < 1e-6
    assert result.is_broad


def test_ordinary_maximum_at_half():
    result = broad_maximum_indicator(DriveParameters(0.5))
    assert abs(result.first_derivative) < 1e-6
    assert result.second_derivative < -0.1
    assert not result.is_broad


def test_generic_coupling_is_not_broad():
    # d²P/dτ² = −(2π)²·R·sin 2R 在 τ = 1/4
    result = broad_maximum_indicator(DriveParameters(2.718))
    expected = -((2 * math.pi) ** 2) * 2.718 * math.sin(2 * 2.718)
    assert result.second_derivative == pytest.approx(expected, rel=1e-4)
    assert not result.is_broad


@pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf])
def test_drive_rejects_bad_coupling(bad):
    with pytest.raises(ValidationError):
        DriveParameters(bad)


def test_drive_from_physical_units():
    params = DriveParameters.from_physical(coupling=-2.0 * math.pi, period=3.0, hbar=1.0)
    assert params.coupling_strength == pytest.approx(3.0)
    assert params.period == 3.0


def test_gaussian_coupling_map(gaussian_beam):
    coupling_map = CouplingMap(gaussian_beam, 2.0)
    assert coupling_map.reference_radius == 0.0
    assert coupling_map.coupling_at(ImpactParameter(0.0)) == pytest.approx(2.0, rel=1e-15)
    assert coupling_map.coupling_at(ImpactParameter(0.0, gaussian_beam.waist)) == pytest.approx(
        2.0 * math.exp(-1.0), rel=1e-14
    )


def test_laguerre_gauss_coupling_peaks_on_ring():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1)
    coupling_map = CouplingMap(profile, 1.0)
    assert coupling_map.coupling_at(ImpactParameter(0.0)) == 0.0
    assert coupling_map.coupling_at(ImpactParameter(coupling_map.reference_radius)) == pytest.approx(1.0, rel=1e-12)


def test_complete_transfer_radii_gaussian(gaussian_beam):
    coupling_map = CouplingMap(gaussian_beam, 3 * math.pi / 2)
    radii = complete_transfer_radii(coupling_map)
    assert [m for m, _ in radii] == [3, 1]
    assert radii[0][1] == 0.0
    assert radii[1][1] == pytest.approx(gaussian_beam.waist * math.sqrt(math.log(3.0)), rel=1e-14)
    for _, b in radii:
        p = transition_probability(coupling_map.drive_at(ImpactParameter(b)), 0.25)
        assert p == pytest.approx(1.0, abs=1e-10)


def test_complete_transfer_radii_respects_max_order(gaussian_beam):
    radii = complete_transfer_radii(CouplingMap(gaussian_beam, 3 * math.pi / 2), max_order=1)
    assert [m for m, _ in radii] == [1]


def test_complete_transfer_radii_laguerre_gauss_has_two_crossings():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1)
    coupling_map = CouplingMap(profile, 2.0)
    radii = complete_transfer_radii(coupling_map)
    assert len(radii) == 2
    inner, outer = radii[0][1], radii[1][1]
    assert inner < coupling_map.reference_radius < outer
    for _, b in radii:
        assert coupling_map.coupling_radial(b) == pytest.approx(math.pi / 2, rel=1e-10)


def test_plane_wave_has_no_transfer_radii():
    profile = BeamProfile.from_waist(BeamKind.PLANE_WAVE, 5e-7, 1e-5)
    assert complete_transfer_radii(CouplingMap(profile, 3 * math.pi / 2)) == []


def test_transfer_scan(gaussian_beam):
    coupling_map = CouplingMap(gaussian_beam, math.pi / 2)
    samples = transfer_scan(coupling_map, [ImpactParameter(0.0), ImpactParameter(1e-5)])
    assert samples[0].probability == pytest.approx(1.0, abs=1e-14)
    assert samples[1].coupling == pytest.approx(math.pi / 2 * math.exp(-1.0), rel=1e-14)
    with pytest.raises(UsageError):
        transfer_scan(coupling_map, [])


def test_scalar_tau_gives_complex_scalar_amplitudes():
    a11, a21 = amplitudes_degenerate(DriveParameters(1.0), 0.25)
    assert isinstance(a11, complex) and isinstance(a21, complex)
    assert a11 == pytest.approx(math.cos(1.0), abs=1e-15)
    assert a21 == pytest.approx(1j * math.sin(1.0), abs=1e-15)
    _, a21_minus = amplitudes_degenerate(DriveParameters(1.0), 0.25, phase_sign=-1)
    assert a21_minus == pytest.approx(-1j * math.sin(1.0), abs=1e-15)


@pytest.mark.parametrize("coupling", [0.5, math.pi / 2, 2.718, math.pi])
def test_probability_is_symmetric_about_quarter_period(coupling):
    params = DriveParameters(coupling)
    tau = np.linspace(0.0, 0.5, 101)
    np.testing.assert_allclose(
        transition_probability(params, tau), transition_probability(params, 0.5 - tau), rtol=0, atol=1e-12
    )


def test_quarter_period_probability_grows_with_coupling_up_to_half_pi():
    couplings = np.linspace(0.0, math.pi / 2, 200)
    values = np.array([transition_probability(DriveParameters(r), 0.25) for r in couplings])
    np.testing.assert_allclose(values, np.sin(couplings) ** 2, rtol=0, atol=1e-15)
    assert np.all(np.diff(values) > 0)


def test_coupling_pi_has_minimum_at_quarter_period():
    params = DriveParameters(math.pi)
    assert transition_probability(params, 0.25) < 1e-30
    result = broad_maximum_indicator(params)
    assert abs(result.first_derivative) < 1e-6
    assert result.second_derivative > 0


def test_laguerre_gauss_ring_touching_transfer_condition():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1)
    coupling_map = CouplingMap(profile, math.pi / 2)
    radii = complete_transfer_radii(coupling_map)
    assert radii == [(1, coupling_map.reference_radius)]
    p = transition_probability(coupling_map.drive_at(ImpactParameter(radii[0][1])), 0.25)
    assert p == pytest.approx(1.0, abs=1e-12)
