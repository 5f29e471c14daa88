import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import e1_oracle, log_stsa_gain_oracle, stsa_gain_oracle
from scipy.special import exp1

from modwd.enhance import (
    GAIN_FLOOR,
    CascadeSpec,
    EnhancerSpec,
    GainParams,
    NoisePsd,
    SubtractionParams,
    band_edges,
    cascade,
    decision_directed,
    estimate_noise_initial,
    log_stsa,
    log_stsa_gain,
    over_subtraction,
    spectral_subtract_multiband,
    stsa_gain,
    stsa_mmse,
    wiener_filter,
    wiener_gain,
)
from modwd.errors import ConfigError, DimensionMismatch, TooFewFrames
from modwd.metrics import segmental_snr
from modwd.pipeline import ModwdConfig, modwd_enhance
from modwd.signal_io import PcmSignal
from modwd.stft import FrameParams, MagPhase, stft
from modwd.synth import white_noise

PARAMS = FrameParams()


def _magphase(magnitude, seed=0):
    magnitude = np.asarray(magnitude, dtype=np.float64)
    phase = np.random.default_rng(seed).uniform(-np.pi, np.pi, magnitude.shape)
    return MagPhase(magnitude, phase, PARAMS)


@pytest.fixture(scope="module")
def noise_only():
    return stft(white_noise(16000, seed=5)).to_magphase()


# noise estimation -----------------------------------------------------------


def test_noise_estimate_of_zeros_is_floored():
    mag = np.ones((20, 129))
    mag[:6] = 0.0
    assert np.all(estimate_noise_initial(_magphase(mag)).psd == 1e-12)


def test_noise_estimate_of_constant():
    est = estimate_noise_initial(_magphase(np.full((10, 129), 0.3)))
    np.testing.assert_allclose(est.psd, 0.09, rtol=1e-15)
    assert est.n_frames_used == 6


def test_noise_estimate_of_white_noise_is_flat(noise_only):
    psd = estimate_noise_initial(noise_only, n_frames=100).psd
    assert psd.max() / psd.min() < 10


def test_noise_estimate_needs_frames():
    with pytest.raises(TooFewFrames):
        estimate_noise_initial(_magphase(np.ones((5, 129))))


# spectral subtraction -------------------------------------------------------


def test_over_subtraction_breakpoints():
    np.testing.assert_allclose(over_subtraction([-30, -5, 0, 10, 20, 40]),
                               [4.75, 4.75, 4.0, 2.5, 1.0, 1.0])


def test_band_edges_cover_all_bins():
    edges = band_edges(129, 4)
    assert edges[0] == 0 and edges[-1] == 129
    assert np.all(np.diff(edges) > 0)
    assert SubtractionParams().tweak_factors().tolist() == [1.0, 2.5, 2.5, 1.5]


def test_ss_with_zero_noise_is_identity(rng):
    spec = _magphase(rng.uniform(0.1, 1.0, (30, 129)))
    out = spectral_subtract_multiband(spec, NoisePsd(np.zeros(129), 6))
    np.testing.assert_allclose(out.magnitude, spec.magnitude, rtol=1e-15)


def test_ss_floor_engages_when_power_equals_noise(rng):
    spec = _magphase(rng.uniform(0.1, 1.0, (30, 129)))
    noise = NoisePsd(spec.magnitude[0] ** 2, 1)
    out = spectral_subtract_multiband(spec, noise)
    np.testing.assert_allclose(out.magnitude[0], np.sqrt(0.002) * spec.magnitude[0], rtol=1e-12)


def test_ss_output_power_between_floor_and_input(noisy_speech):
    spec = stft(noisy_speech).to_magphase()
    out = spectral_subtract_multiband(spec, estimate_noise_initial(spec))
    p_in, p_out = spec.magnitude ** 2, out.magnitude ** 2
    assert np.all(p_out >= 0.002 * p_in * (1 - 1e-12))
    assert np.all(p_out <= p_in * (1 + 1e-12))


def test_ss_improves_noisy_sine():
    sr = 8000
    t = np.arange(2 * sr) / sr
    tone = 0.5 * np.sin(2 * np.pi * 440 * t)
    tone[: int(0.1 * sr)] = 0.0  # leading noise-only stretch for the noise estimate
    clean = PcmSignal(tone, sr)
    noise = white_noise(len(t), seed=3).samples
    noise *= np.sqrt(np.mean(tone ** 2) / np.mean(noise ** 2) / 10 ** 0.5)
    noisy = PcmSignal(tone + noise, sr)
    out = cascade(CascadeSpec.parse("ss"), noisy)
    assert segmental_snr(clean, out) > segmental_snr(clean, noisy)


# gain laws ------------------------------------------------------------------


def test_wiener_gain_at_unit_snr():
    assert wiener_gain(1.0) == 0.5


def test_wiener_without_noise_passes_signal(rng):
    spec = _magphase(rng.uniform(0.1, 1.0, (30, 129)))
    out = wiener_filter(spec, NoisePsd(np.full(129, 1e-12), 6))
    np.testing.assert_allclose(out.magnitude, spec.magnitude, rtol=1e-6)


def test_wiener_on_noise_only_is_floor_dominated(noise_only):
    # with an accurate PSD; a 6-frame estimate leaves a few bins under-estimated
    psd = estimate_noise_initial(noise_only, n_frames=noise_only.shape[0])
    out = wiener_filter(noise_only, psd)
    steady = slice(50, None)
    ratio = np.mean(out.magnitude[steady] ** 2) / np.mean(noise_only.magnitude[steady] ** 2)
    assert ratio <= GAIN_FLOOR ** 2 + 1e-3


def test_stsa_high_snr_limit():
    gamma = 1000.0
    xi = gamma - 1.0
    assert stsa_gain(xi, gamma) == pytest.approx(wiener_gain(xi), rel=0.01)


@pytest.mark.parametrize("xi, gamma", [(1.0, 2.0), (0.1, 0.5), (3.0, 8.0), (20.0, 40.0), (0.01, 100.0)])
def test_stsa_matches_quadrature_oracle(xi, gamma):
    assert stsa_gain(xi, gamma) == pytest.approx(stsa_gain_oracle(xi, gamma), rel=1e-8, abs=1e-12)


def test_stsa_asymptotic_branch_is_continuous():
    gamma = 1500.0
    xi = 700.0 / (gamma - 700.0)  # nu just below and above the switch
    below = stsa_gain(xi * 0.999, gamma)
    above = stsa_gain(xi * 1.001, gamma)
    assert above == pytest.approx(below, rel=1e-3)


def test_zero_frame_stays_zero(rng):
    mag = rng.uniform(0.1, 1.0, (20, 129))
    mag[10] = 0.0
    noise = NoisePsd(np.full(129, 0.05), 6)
    for fn in (wiener_filter, stsa_mmse, log_stsa):
        assert np.all(fn(_magphase(mag), noise).magnitude[10] == 0.0)


def test_exponential_integral_oracle():
    assert e1_oracle(1.0) == pytest.approx(0.21938393439552027, rel=1e-15)
    for x in (1e-3, 0.5, 1.0, 2.0, 10.0, 50.0):
        assert exp1(x) == pytest.approx(e1_oracle(x), rel=1e-8)


def test_log_stsa_wiener_limit():
    gamma = 51.0
    xi = 50.0 / (gamma - 50.0)  # nu == 50
    assert log_stsa_gain(xi, gamma) == pytest.approx(wiener_gain(xi), abs=1e-6)


@pytest.mark.parametrize("xi, gamma", [(1.0, 2.0), (0.05, 0.3), (5.0, 7.0)])
def test_log_stsa_matches_oracle(xi, gamma):
    assert log_stsa_gain(xi, gamma) == pytest.approx(log_stsa_gain_oracle(xi, gamma), rel=1e-8)


XI_GRID = np.logspace(-2, 2, 41)
GAMMA_GRID = np.logspace(-1, 2, 31)


def test_log_stsa_never_exceeds_stsa():
    xi, gamma = np.meshgrid(XI_GRID, GAMMA_GRID)
    assert np.all(log_stsa_gain(xi, gamma) <= stsa_gain(xi, gamma))


def test_applied_gains_are_ordered_and_bounded():
    xi, gamma = np.meshgrid(XI_GRID, GAMMA_GRID)
    clip = lambda g: np.clip(g, GAIN_FLOOR, 1.0)  # noqa: E731
    lsa, stsa = clip(log_stsa_gain(xi, gamma)), clip(stsa_gain(xi, gamma))
    assert np.all(lsa <= stsa)
    assert np.all(stsa <= 1.0)


@pytest.mark.parametrize("gain", [lambda x, g: wiener_gain(x), stsa_gain, log_stsa_gain])
def test_gains_non_decreasing_in_xi(gain):
    xi, gamma = np.meshgrid(XI_GRID, GAMMA_GRID)
    g = gain(xi, gamma)
    assert np.all(np.diff(g, axis=1) >= -1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_gains_finite_and_positive(xi, gamma):
    for fn in (stsa_gain, log_stsa_gain):
        g = float(fn(xi, gamma))
        assert np.isfinite(g) and g > 0


# decision-directed recursion ------------------------------------------------


@pytest.mark.parametrize("kind", ["wf", "stsa", "logstsa"])
def test_applied_gain_within_bounds(noisy_speech, kind):
    spec = stft(noisy_speech).to_magphase()
    out = EnhancerSpec(kind).apply(spec)
    nz = spec.magnitude > 0
    g = out.magnitude[nz] / spec.magnitude[nz]
    assert g.min() >= GAIN_FLOOR * (1 - 1e-12)
    assert g.max() <= 1.0 + 1e-12


@pytest.mark.parametrize("kind", ["ss", "wf", "stsa", "logstsa", "modwd"])
def test_enhancers_keep_phase_and_are_deterministic(noisy_speech, kind):
    spec = stft(noisy_speech).to_magphase()
    a = EnhancerSpec(kind).apply(spec)
    b = EnhancerSpec(kind).apply(spec)
    assert a.phase is spec.phase
    np.testing.assert_array_equal(a.magnitude, b.magnitude)


def test_first_frame_uses_no_previous_estimate():
    mag = np.full((8, 129), 2.0)
    noise = NoisePsd(np.ones(129), 6)
    out = decision_directed(_magphase(mag), noise, lambda xi, g: wiener_gain(xi), GainParams())
    xi0 = 0.02 * 3.0  # (1 - a) * (gamma - 1)
    np.testing.assert_allclose(out.magnitude[0], 2.0 * xi0 / (1 + xi0))


def test_dimension_mismatch(rng):
    spec = _magphase(rng.uniform(size=(10, 129)))
    with pytest.raises(DimensionMismatch):
        wiener_filter(spec, NoisePsd(np.ones(64), 6))
    with pytest.raises(DimensionMismatch):
        spectral_subtract_multiband(spec, NoisePsd(np.ones(64), 6))


def test_parameter_ranges():
    with pytest.raises(ConfigError):
        GainParams(dd_smoothing=0.5)
    with pytest.raises(ConfigError):
        GainParams(gain_floor=0.0)
    with pytest.raises(ConfigError):
        EnhancerSpec("kalman")
    with pytest.raises(ConfigError):
        EnhancerSpec("modwd", alpha=1.5)


# cascades -------------------------------------------------------------------


def test_single_stage_cascade_equals_modwd(noisy_speech):
    out = cascade(CascadeSpec.parse("modwd:0.25"), noisy_speech)
    np.testing.assert_array_equal(out.samples, modwd_enhance(noisy_speech, ModwdConfig(0.25)).samples)


def test_cascade_order_matters(noisy_speech):
    a = cascade(CascadeSpec.parse("modwd:0-ss"), noisy_speech).samples
    b = cascade(CascadeSpec.parse("ss-modwd:0"), noisy_speech).samples
    n = min(len(a), len(b))
    assert np.sqrt(np.mean((a[:n] - b[:n]) ** 2)) > 1e-4


def test_empty_cascade_is_rejected():
    with pytest.raises(ConfigError):
        CascadeSpec(())
    with pytest.raises(ConfigError):
        CascadeSpec.parse("")


def test_token_parsing():
    spec = CascadeSpec.parse("modwd:0-logstsa")
    assert [(s.kind, s.alpha) for s in spec.stages] == [("modwd", 0.0), ("logstsa", 0.25)]
    assert [s.kind for s in CascadeSpec.parse("logstsa-modwd:0").stages] == ["logstsa", "modwd"]
    assert CascadeSpec.parse("SS-modwd").label == "ss-modwd:0.25"


@pytest.mark.parametrize("token", ["modwd:2", "modwd:x", "ss:1", "ss--wf", "-ss", "pesq"])
def test_bad_tokens(token):
    with pytest.raises(ConfigError):
        CascadeSpec.parse(token)
