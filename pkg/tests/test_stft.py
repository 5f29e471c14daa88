import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import dft_direct

from modwd.errors import DimensionMismatch, SignalTooShort
from modwd.signal_io import PcmSignal
from modwd.stft import FrameParams, MagPhase, hamming_window, istft, round_trip, stft

P = FrameParams()


def test_default_params():
    assert (P.frame_len, P.hop, P.fft_size, P.n_bins) == (160, 80, 256, 129)
    with pytest.raises(ValueError):
        FrameParams(frame_len=300, fft_size=256)
    with pytest.raises(ValueError):
        FrameParams(hop=0)


def test_hamming_window():
    w = hamming_window(161)
    assert w[0] == pytest.approx(0.08, abs=1e-15)
    assert w[80] == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(w, w[::-1])
    np.testing.assert_allclose(hamming_window(160), np.hamming(160), atol=1e-15)
    assert hamming_window(8, periodic=True)[4] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hamming_window(1)


def test_framing_arithmetic():
    spec = stft(PcmSignal(np.zeros(8000)))
    assert spec.values.shape == (99, 129)


def test_dc_input():
    spec = stft(PcmSignal(np.full(1000, 0.3)))
    np.testing.assert_allclose(np.abs(spec.values[:, 0]), 0.3 * hamming_window(160).sum(), rtol=1e-12)


def test_sine_matches_direct_dft():
    k0 = 20
    n = np.arange(800)
    x = np.cos(2 * np.pi * k0 * n / 256)
    spec = stft(PcmSignal(x))
    assert np.all(np.argmax(np.abs(spec.values), axis=1) == k0)
    frame = x[3 * 80 : 3 * 80 + 160] * hamming_window(160)
    np.testing.assert_allclose(spec.values[3], dft_direct(frame, 256), atol=1e-10)


def test_too_short():
    with pytest.raises(SignalTooShort):
        stft(PcmSignal(np.zeros(159)))


def test_round_trip_interior(random_signal):
    y = round_trip(random_signal)
    x = random_signal.samples
    n = len(x)
    assert len(y) == (P.n_frames(n) - 1) * 80 + 160
    np.testing.assert_allclose(y.samples[160 : n - 160], x[160 : n - 160], atol=1e-6)


def test_zero_magnitude_gives_zero_signal(rng):
    mp = MagPhase(np.zeros((10, 129)), rng.uniform(-np.pi, np.pi, (10, 129)), P)
    assert not np.any(istft(mp).samples)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        istft(MagPhase(np.zeros((4, 100)), np.zeros((4, 100)), P))
    with pytest.raises(DimensionMismatch):
        MagPhase(np.zeros((4, 129)), np.zeros((5, 129)), P)


def test_stft_istft_stft_consistency(speech):
    first = stft(speech).values
    second = stft(round_trip(speech)).values
    interior = slice(2, first.shape[0] - 2)
    err = np.linalg.norm(second[interior] - first[interior]) / np.linalg.norm(first[interior])
    assert err < 1e-5


def test_magphase_recombination(speech):
    spec = stft(speech)
    rebuilt = spec.to_magphase().complex()
    assert np.max(np.abs(rebuilt - spec.values)) <= 1e-12 * np.max(np.abs(spec.values))
    assert np.all(spec.to_magphase().magnitude >= 0)


def test_linearity(random_signal):
    a = -2.75
    lhs = stft(random_signal.with_samples(a * random_signal.samples)).values
    rhs = a * stft(random_signal).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_parseval_per_frame(random_signal):
    spec = stft(random_signal).values
    frames = np.lib.stride_tricks.sliding_window_view(random_signal.samples, 160)[::80]
    frames = frames[: spec.shape[0]] * hamming_window(160)
    # rebuild the two-sided spectrum from the one-sided half
    two_sided = np.concatenate([spec, np.conj(spec[:, -2:0:-1])], axis=1)
    lhs = np.sum(frames ** 2, axis=1)
    rhs = np.sum(np.abs(two_sided) ** 2, axis=1) / 256
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(3 * 160, 3000))
def test_reconstruction_any_length(seed, n):
    x = np.random.default_rng(seed).standard_normal(n)
    y = round_trip(PcmSignal(x)).samples
    np.testing.assert_allclose(y[160 : n - 160], x[160 : n - 160], atol=1e-6)
    assert len(y) <= n
