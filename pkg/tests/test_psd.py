import numpy as np
import pytest

from src.exceptions import ConfigurationError, ParameterRangeError
from src.interference.quadrature import BandSpec, integrate_psd
from src.waveforms.chebyshev import chebyshev_window
from src.waveforms.params import (
    FbmcParams,
    OfdmParams,
    ResourceBlockSpec,
    UfmcParams,
    WaveformKind,
    default_params,
)
from src.waveforms.psd import (
    PsdCurve,
    build_ufmc_subband_filter,
    fbmc_prototype,
    multi_rb_psd,
    psd_fbmc_subcarrier,
    psd_ofdm_subcarrier,
    psd_resource_block,
    psd_ufmc_subcarrier,
    resource_block_curve,
    subcarrier_curve,
    ufmc_curve,
)

DF = 15e3
OFDM = OfdmParams.from_spacing(DF)
FBMC = FbmcParams()
UFMC = UfmcParams()


# --- OFDM ---


def test_ofdm_peak_value():
    assert psd_ofdm_subcarrier(0.0, 1.0, OFDM) == pytest.approx(1.0 / 15000.0, rel=1e-15)


def test_ofdm_half_spacing_value():
    expected = (1.0 / 15000.0) * (2.0 / np.pi) ** 2
    assert psd_ofdm_subcarrier(7500.0, 1.0, OFDM) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(2.7019e-5, rel=1e-4)


def test_ofdm_nulls_at_multiples_of_symbol_rate():
    m = np.arange(1, 21)
    values = psd_ofdm_subcarrier(m / OFDM.symbol_duration_s, 1.0, OFDM)
    assert np.all(values < 1e-12 * OFDM.symbol_duration_s)


def test_ofdm_params_require_orthogonality():
    with pytest.raises(ParameterRangeError):
        OfdmParams(symbol_duration_s=1e-3, subcarrier_spacing_hz=DF)
    with pytest.raises(ParameterRangeError):
        OfdmParams(symbol_duration_s=-1.0, subcarrier_spacing_hz=-1.0)


# --- FBMC ---


def _fbmc_scale():
    _, coeffs = FBMC.symmetric_coeffs()
    return FBMC.overlap_factor / (DF * np.sum(coeffs**2))


def test_fbmc_peak_is_the_scale():
    assert psd_fbmc_subcarrier(0.0, 1.0, FBMC) == pytest.approx(_fbmc_scale(), rel=1e-12)


def test_fbmc_first_shifted_sinc_peak():
    f = DF / FBMC.overlap_factor
    expected = FBMC.polyphase_coeffs[1] ** 2 * _fbmc_scale()
    assert psd_fbmc_subcarrier(f, 1.0, FBMC) == pytest.approx(expected, rel=1e-10)


def test_ofdm_and_fbmc_are_even():
    rng = np.random.default_rng(3)
    f = rng.uniform(-3 * DF, 3 * DF, 1000)
    for curve in (subcarrier_curve(WaveformKind.OFDM, OFDM), subcarrier_curve(WaveformKind.FBMC, FBMC)):
        peak = curve(0.0)
        np.testing.assert_allclose(curve(f), curve(-f), rtol=1e-10, atol=1e-14 * peak)


def test_fbmc_prototype_is_symmetric():
    h = fbmc_prototype(FBMC)
    assert h.shape == (FBMC.overlap_factor * FBMC.fft_size + 1,)
    np.testing.assert_allclose(h, h[::-1], rtol=0.0, atol=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"polyphase_coeffs": (0.9, 0.97196, 0.7071, 0.235147)},
        {"polyphase_coeffs": (1.0, 0.97196, 0.7071)},
        {"polyphase_coeffs": (1.0, 1.2, 0.7071, 0.235147)},
        {"overlap_factor": 0},
    ],
)
def test_fbmc_params_validation(kwargs):
    with pytest.raises(ParameterRangeError):
        FbmcParams(**kwargs)


# --- UFMC ---


def test_unmodulated_filter_is_the_window():
    taps = build_ufmc_subband_filter(UFMC, 0)
    np.testing.assert_array_equal(taps, chebyshev_window(74, 40.0))


def test_modulation_keeps_tap_magnitudes():
    window = chebyshev_window(74, 40.0)
    for center in (1, 17.5, 700, 2047):
        np.testing.assert_allclose(np.abs(build_ufmc_subband_filter(UFMC, center)), np.abs(window), rtol=1e-12)


def test_half_band_modulation_alternates_sign():
    params = UfmcParams(filter_length=4, fft_size=8, psd_oversampling=16, subband_size=4)
    window = chebyshev_window(4, 40.0)
    taps = build_ufmc_subband_filter(params, 4)
    np.testing.assert_allclose(taps, window * np.array([1, -1, 1, -1]), atol=1e-15)


def test_filter_centre_must_lie_on_the_fft_grid():
    with pytest.raises(ParameterRangeError):
        build_ufmc_subband_filter(UFMC, 2048)
    with pytest.raises(ParameterRangeError):
        build_ufmc_subband_filter(UFMC, -1)


@pytest.mark.parametrize("relative_bin", [0.0, 5.5, -5.5])
def test_ufmc_peak_sits_on_the_subcarrier(relative_bin):
    curve = ufmc_curve(UFMC, relative_bin)
    f = np.arange(-64, 65) * DF / UFMC.psd_oversampling
    assert abs(f[np.argmax(curve(f))]) <= DF / UFMC.psd_oversampling


def test_ufmc_outside_computed_span_raises():
    with pytest.raises(ParameterRangeError):
        psd_ufmc_subcarrier(1100 * DF, 1.0, UFMC, rb_center=5.5, subcarrier=11)


def test_ufmc_far_from_rb_below_ofdm():
    # Edge subcarrier of the RB, 10 RB widths beyond the RB edge
    f = (10 * 12 + 0.5) * DF
    ufmc = psd_ufmc_subcarrier(f, 1.0, UFMC, rb_center=5.5, subcarrier=11)
    assert ufmc < psd_ofdm_subcarrier(f, 1.0, OFDM)


def test_ufmc_params_validation():
    with pytest.raises(ParameterRangeError):
        UfmcParams(sidelobe_attenuation_db=-40.0)
    with pytest.raises(ParameterRangeError):
        UfmcParams(filter_length=74, fft_size=64)
    with pytest.raises(ParameterRangeError):
        UfmcParams(sidelobe_attenuation_db=1e5)


# --- normalization and non-negativity ---


def test_ofdm_normalization_with_analytic_tails():
    half_span = 200
    inner = integrate_psd(subcarrier_curve(WaveformKind.OFDM, OFDM), BandSpec(-half_span * DF, 2 * half_span * DF))
    tails = 2.0 / (2.0 * np.pi**2 * half_span)
    assert inner + tails == pytest.approx(1.0, rel=1e-6)


def test_fbmc_normalization():
    total = integrate_psd(subcarrier_curve(WaveformKind.FBMC, FBMC), BandSpec(-40 * DF, 80 * DF))
    assert total == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("relative_bin", [0.0, 5.5, -2.5])
def test_ufmc_normalization_over_computed_span(relative_bin):
    curve = ufmc_curve(UFMC, relative_bin, power_w=2.5)
    lo, hi = curve.support_hz
    assert lo == pytest.approx(-1024 * DF)
    assert hi == pytest.approx(1024 * DF)
    assert integrate_psd(curve, BandSpec(lo, hi - lo)) == pytest.approx(2.5, rel=1e-6)


@pytest.mark.parametrize("kind", list(WaveformKind))
def test_densities_are_non_negative(kind):
    curve = subcarrier_curve(kind, default_params(kind), relative_bin=5.5)
    f = np.linspace(-200 * DF, 200 * DF, 20001)
    assert np.all(curve(f) >= 0.0)


# --- resource blocks ---


@pytest.mark.parametrize("kind", [WaveformKind.OFDM, WaveformKind.FBMC])
def test_single_subcarrier_rb_is_the_subcarrier(kind):
    params = default_params(kind)
    f = np.linspace(-10 * DF, 16 * DF, 101)
    rb = ResourceBlockSpec(start_subcarrier=3, num_subcarriers=1, powers_w=(2.0,))
    expected = subcarrier_curve(kind, params, 2.0)(f - 3 * DF)
    np.testing.assert_allclose(psd_resource_block(kind, rb, params, f), expected, rtol=1e-13)


def test_single_subcarrier_ufmc_rb_is_centred_on_its_filter():
    f = np.arange(-40, 41) * DF / 16
    rb = ResourceBlockSpec(0, 1)
    np.testing.assert_allclose(psd_resource_block(WaveformKind.UFMC, rb, UFMC, f), ufmc_curve(UFMC, 0.0)(f))


@pytest.mark.parametrize("kind", list(WaveformKind))
def test_zero_powers_give_zero_psd(kind):
    rb = ResourceBlockSpec(0, 12, (0.0,) * 12)
    f = np.linspace(-30 * DF, 30 * DF, 301)
    assert np.all(psd_resource_block(kind, rb, default_params(kind), f) == 0.0)


def test_ofdm_rb_is_sum_of_shifted_subcarriers():
    powers = tuple(np.linspace(0.5, 1.6, 12))
    rb = ResourceBlockSpec(0, 12, powers)
    f = 5 * DF
    expected = sum(psd_ofdm_subcarrier(f - n * DF, p, OFDM) for n, p in enumerate(powers))
    assert psd_resource_block(WaveformKind.OFDM, rb, OFDM, f) == pytest.approx(expected, rel=1e-13)


def test_rb_rejects_mismatched_params():
    with pytest.raises(ConfigurationError):
        resource_block_curve(WaveformKind.OFDM, ResourceBlockSpec(0, 12), FBMC)


def test_rb_rejects_bad_powers():
    with pytest.raises(ParameterRangeError):
        ResourceBlockSpec(0, 3, (1.0, -1.0, 1.0))
    with pytest.raises(ParameterRangeError):
        ResourceBlockSpec(0, 3, (1.0, 1.0))


def test_out_of_band_ordering_of_one_rb():
    # Odd sixteenths of a spacing sit on the UFMC sample grid and avoid the OFDM nulls
    offsets = 11 + 2 + (2 * np.arange(144) + 1) / 16.0
    f = offsets * DF
    rb = ResourceBlockSpec(0, 12)
    ofdm = psd_resource_block(WaveformKind.OFDM, rb, OFDM, f)
    fbmc = psd_resource_block(WaveformKind.FBMC, rb, FBMC, f)
    ufmc = psd_resource_block(WaveformKind.UFMC, rb, UFMC, f)
    assert np.all(fbmc <= ufmc)
    assert np.all(ufmc <= ofdm)


def test_multi_rb_psd_covers_partial_last_rb():
    curve = multi_rb_psd(WaveformKind.OFDM, OFDM, 30, rb_size=12)
    f = np.linspace(-5 * DF, 35 * DF, 81)
    expected = sum(psd_ofdm_subcarrier(f - n * DF, 1.0, OFDM) for n in range(30))
    np.testing.assert_allclose(curve(f), expected, rtol=1e-12)
    with pytest.raises(ConfigurationError):
        multi_rb_psd(WaveformKind.OFDM, OFDM, 30, powers=[1.0] * 29)


def test_multi_rb_ufmc_support_is_where_every_subcarrier_is_computed():
    curve = multi_rb_psd(WaveformKind.UFMC, UFMC, 24)
    assert curve.support_hz == (-1001 * DF, 1024 * DF)
    assert curve(-1001 * DF) > 0.0
    # Outside the span of subcarrier 23, though inside that of subcarrier 0
    with pytest.raises(ParameterRangeError):
        curve(-1020 * DF)
    # Centred on the block, every term is computed within 1012.5 spacings
    with pytest.raises(ParameterRangeError):
        curve.shifted(-11.5 * DF)(1030 * DF)


def test_sum_of_disjoint_supports_is_rejected():
    left = PsdCurve.constant(1.0, (-2.0, -1.0))
    right = PsdCurve.constant(1.0, (1.0, 2.0))
    with pytest.raises(ParameterRangeError):
        PsdCurve.sum([left, right])
    overlap = PsdCurve.sum([left, PsdCurve.constant(2.0, (-1.5, 0.0))])
    assert overlap.support_hz == (-1.5, -1.0)
    assert overlap(-1.2) == pytest.approx(3.0)


# --- curve algebra ---


def test_curve_algebra():
    base = subcarrier_curve(WaveformKind.OFDM, OFDM)
    f = np.linspace(-3 * DF, 3 * DF, 61)
    np.testing.assert_allclose(base.shifted(DF)(f + DF), base(f), rtol=1e-13)
    np.testing.assert_allclose(base.scaled(3.0)(f), 3.0 * base(f), rtol=1e-15)
    np.testing.assert_allclose(PsdCurve.sum([base, base])(f), 2.0 * base(f), rtol=1e-15)
    assert PsdCurve.constant(2.0)(np.array([0.0, 1e9])).tolist() == [2.0, 2.0]
    with pytest.raises(ParameterRangeError):
        base.scaled(-1.0)


def test_knots_follow_the_curve_grid():
    curve = subcarrier_curve(WaveformKind.FBMC, FBMC)
    knots = curve.knots_within(0.0, DF)
    np.testing.assert_allclose(knots, np.array([0.25, 0.5, 0.75]) * DF)
