"""光束剖面与几何关系"""

import math

import numpy as np
import pytest

from src.beam import (
    BeamKind,
    BeamProfile,
    ImpactParameter,
    field_amplitude,
    field_map,
    impact_parameter_for_angle,
    intensity,
    intensity_map,
    rayleigh_range,
    vortex_angle,
    waist_from_rayleigh_range,
)
from src.errors import ValidationError


def test_rayleigh_range_reference_value():
    assert rayleigh_range(5e-7, 1e-5) == pytest.approx(6.283185307179586e-4, rel=1e-14)


@pytest.mark.parametrize("wavelength, waist", [(5e-7, 1e-5), (1.064e-6, 3e-4), (8e-7, 2.5e-6)])
def test_waist_round_trip(wavelength, waist):
    z_r = rayleigh_range(wavelength, waist)
    assert waist_from_rayleigh_range(wavelength, z_r) == pytest.approx(waist, rel=1e-14)


@pytest.mark.parametrize("wavelength, waist", [(0.0, 1e-5), (-5e-7, 1e-5), (5e-7, 0.0), (5e-7, math.inf)])
def test_rayleigh_range_rejects_bad_geometry(wavelength, waist):
    with pytest.raises(ValidationError):
        rayleigh_range(wavelength, waist)


def test_vortex_angle_at_rayleigh_range_is_quarter_pi():
    z_r = rayleigh_range(5e-7, 1e-5)
    assert vortex_angle(z_r, z_r) == pytest.approx(math.pi / 4, abs=1e-14)
    assert vortex_angle(0.0, z_r) == 0.0


def test_vortex_angle_is_linear_for_small_b():
    z_r = 100.0
    theta = vortex_angle(1.0, z_r)
    assert theta == pytest.approx(0.01, rel=1e-4)
    assert abs(math.tan(theta) - theta) / theta < 1e-4


def test_vortex_angle_rejects_negative_b():
    with pytest.raises(ValidationError):
        vortex_angle(-1.0, 1.0)


def test_impact_parameter_for_angle_inverts_vortex_angle():
    z_r = 6.3e-4
    b = impact_parameter_for_angle(0.3, z_r)
    assert vortex_angle(b, z_r) == pytest.approx(0.3, rel=1e-14)
    with pytest.raises(ValidationError):
        impact_parameter_for_angle(math.pi / 2, z_r)


def test_profile_keeps_rayleigh_consistency(gaussian_beam):
    assert gaussian_beam.rayleigh_range * gaussian_beam.wavelength == pytest.approx(
        math.pi * gaussian_beam.waist**2, rel=1e-14
    )
    from_zr = BeamProfile.from_rayleigh_range(BeamKind.GAUSSIAN, 5e-7, 6.283185307179586e-4)
    assert from_zr.waist == pytest.approx(1e-5, rel=1e-14)


def test_profile_rejects_inconsistent_rayleigh_range():
    with pytest.raises(ValidationError, match="Inconsistent"):
        BeamProfile(BeamKind.GAUSSIAN, 5e-7, 1e-5, 1e-3)


def test_mode_indices_only_for_laguerre_gauss():
    with pytest.raises(ValidationError):
        BeamProfile.from_waist(BeamKind.GAUSSIAN, 5e-7, 1e-5, oam_index=1)
    with pytest.raises(ValidationError):
        BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1, radial_index=-1)


@pytest.mark.parametrize(
    "text, kind",
    [("Gaussian", BeamKind.GAUSSIAN), ("plane_wave", BeamKind.PLANE_WAVE), ("laguerre-gauss", BeamKind.LAGUERRE_GAUSS)],
)
def test_beam_kind_parse(text, kind):
    assert BeamKind.parse(text) is kind


def test_beam_kind_parse_unknown():
    with pytest.raises(ValidationError, match="Unknown beam kind"):
        BeamKind.parse("Bessel")


def test_gaussian_intensity_drops_to_e_minus_two_at_waist(gaussian_beam):
    ratio = intensity(gaussian_beam, ImpactParameter(gaussian_beam.waist)) / intensity(
        gaussian_beam, ImpactParameter(0.0)
    )
    assert ratio == pytest.approx(math.exp(-2.0), abs=1e-12)


def test_plane_wave_intensity_is_uniform():
    profile = BeamProfile.from_waist(BeamKind.PLANE_WAVE, 5e-7, 1e-5, peak_field=2.0)
    values = intensity_map(profile, np.linspace(0, 1e-3, 7), np.zeros(7))
    assert np.all(values == 4.0)


def test_laguerre_gauss_has_dark_core():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1)
    assert intensity(profile, ImpactParameter(0.0)) == 0.0
    assert profile.peak_radius() == pytest.approx(1e-5 / math.sqrt(2.0), rel=1e-14)
    assert profile.peak_intensity() == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_laguerre_gauss_radial_mode_peak():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=1, radial_index=1)
    # x(2 - x)² e^-x 的最大值在 x = (5 - √17)/2
    x_peak = (5.0 - math.sqrt(17.0)) / 2.0
    assert profile.peak_radius() == pytest.approx(1e-5 * math.sqrt(x_peak / 2.0), rel=1e-6)


def test_laguerre_gauss_p1_l0_peaks_on_axis():
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, radial_index=1)
    assert profile.peak_radius() == 0.0
    assert profile.peak_intensity() == pytest.approx(1.0)


@pytest.mark.parametrize("ell, p", [(0, 0), (1, 0), (2, 1), (-3, 2)])
def test_field_modulus_matches_intensity(ell, p):
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=ell, radial_index=p)
    for b in (ImpactParameter(3e-6, 1e-6), ImpactParameter.polar(1.2e-5, 2.0)):
        assert abs(field_amplitude(profile, b)) ** 2 == pytest.approx(intensity(profile, b), rel=1e-12)


@pytest.mark.parametrize("ell", [1, 2, -1])
def test_vortex_phase_winds_by_two_pi_ell(ell):
    profile = BeamProfile.from_waist(BeamKind.LAGUERRE_GAUSS, 5e-7, 1e-5, oam_index=ell)
    phi = np.linspace(0.0, 2.0 * math.pi, 401)
    values = field_map(profile, 1e-5 * np.cos(phi), 1e-5 * np.sin(phi))
    winding = np.unwrap(np.angle(values))
    assert winding[-1] - winding[0] == pytest.approx(2.0 * math.pi * ell, abs=1e-9)


def test_intensity_map_matches_pointwise(gaussian_beam):
    bx = np.array([0.0, 2e-6, -7e-6])
    by = np.array([1e-6, 0.0, 3e-6])
    expected = [intensity(gaussian_beam, ImpactParameter(x, y)) for x, y in zip(bx, by)]
    np.testing.assert_allclose(intensity_map(gaussian_beam, bx, by), expected, rtol=1e-15)


def test_impact_parameter_polar():
    b = ImpactParameter.polar(2.0, math.pi / 2)
    assert b.magnitude == pytest.approx(2.0)
    assert b.azimuth == pytest.approx(math.pi / 2)


def test_gaussian_intensity_decreases_with_b(gaussian_beam):
    radii = np.linspace(0.0, 3.0 * gaussian_beam.waist, 200)
    values = intensity_map(gaussian_beam, radii, np.zeros_like(radii))
    assert np.all(np.diff(values) < 0)


@pytest.mark.parametrize("magnitude", [0.0, 4e-6, 1e-5, 2.5e-5])
def test_gaussian_intensity_is_isotropic(gaussian_beam, magnitude):
    reference = intensity(gaussian_beam, ImpactParameter(magnitude))
    for azimuth in np.linspace(0.0, 2.0 * math.pi, 13):
        b = ImpactParameter.polar(magnitude, float(azimuth))
        assert intensity(gaussian_beam, b) == pytest.approx(reference, rel=1e-12)


def test_vortex_angle_increases_with_b(gaussian_beam):
    z_r = gaussian_beam.rayleigh_range
    angles = [vortex_angle(float(b), z_r) for b in np.linspace(0.0, 10.0 * z_r, 500)]
    assert np.all(np.diff(angles) > 0)
    assert angles[-1] < math.pi / 2
