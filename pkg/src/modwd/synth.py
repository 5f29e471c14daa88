"""Deterministic synthetic speech and noise fixtures.

The speech generator is a small source-filter model: a glottal pulse train
with a drifting pitch (voiced segments) or white noise (fricatives) is passed
through three formant resonators and shaped by a syllabic envelope of a few
Hz. It is meant to give the enhancers something with speech-like spectral and
modulation structure, not to sound natural.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .signal_io import PcmSignal

# (F1, F2, F3) in Hz for a handful of vowels
_VOWELS = (
    (730, 1090, 2440),
    (270, 2290, 3010),
    (530, 1840, 2480),
    (570, 840, 2410),
    (300, 870, 2240),
    (660, 1720, 2410),
)


def _resonator(x, freq, bandwidth, sr):
    r = np.exp(-np.pi * bandwidth / sr)
    theta = 2.0 * np.pi * freq / sr
    a = [1.0, -2.0 * r * np.cos(theta), r * r]
    return lfilter([1.0 - r], a, x)


def _formant_filter(x, formants, sr):
    out = np.zeros_like(x)
    for gain, (f, bw) in zip((1.0, 0.6, 0.3), zip(formants, (80.0, 110.0, 160.0))):
        if f < sr / 2:
            out += gain * _resonator(x, f, bw, sr)
    return out


def synth_speech(duration_s: float = 2.0, sample_rate_hz: int = 8000, seed: int = 0,
                 level: float = 0.3, floor_db: float | None = -60.0) -> PcmSignal:
    """Speech-like utterance normalized to a peak of ``level``.

    A white recording floor ``floor_db`` below the peak is added so that
    pauses are quiet rather than digitally silent; ``None`` disables it.
    """
    rng = np.random.default_rng(seed)
    sr = sample_rate_hz
    n_total = int(round(duration_s * sr))
    out = np.zeros(n_total)
    pos = int(0.08 * sr)  # leading silence
    while pos < n_total - int(0.1 * sr):
        n = int(rng.uniform(0.12, 0.3) * sr)
        n = min(n, n_total - pos)
        t = np.arange(n) / sr
        if rng.random() < 0.8:
            f0 = rng.uniform(95, 220) * (1.0 + 0.08 * np.sin(2 * np.pi * rng.uniform(1, 3) * t))
            phase = np.cumsum(f0) / sr
            pulses = np.diff(np.floor(phase), prepend=0.0)
            source = lfilter([1.0], [1.0, -0.9], pulses)  # soft glottal roll-off
            formants = _VOWELS[rng.integers(len(_VOWELS))]
        else:
            source = rng.standard_normal(n) * 0.3
            formants = (rng.uniform(2200, 3200), rng.uniform(3300, 3800), 3900.0)
        seg = _formant_filter(source, formants, sr)
        envelope = np.sin(np.pi * np.arange(n) / n) ** 1.5
        out[pos : pos + n] += rng.uniform(0.4, 1.0) * seg * envelope
        pos += n + int(rng.uniform(0.0, 0.12) * sr)
    peak = np.max(np.abs(out))
    if peak > 0:
        out *= level / peak
    if floor_db is not None:
        out += level * 10.0 ** (floor_db / 20.0) * rng.standard_normal(n_total)
    return PcmSignal(out, sr)


def white_noise(n: int, sample_rate_hz: int = 8000, seed: int = 0) -> PcmSignal:
    return PcmSignal(np.random.default_rng(seed).standard_normal(n), sample_rate_hz)


def pink_noise(n: int, sample_rate_hz: int = 8000, seed: int = 0) -> PcmSignal:
    """1/f noise by spectral shaping of white Gaussian noise, unit power."""
    rng = np.random.default_rng(seed)
    spectrum = np.fft.rfft(rng.standard_normal(n))
    f = np.arange(spectrum.shape[0], dtype=np.float64)
    f[0] = 1.0
    x = np.fft.irfft(spectrum / np.sqrt(f), n=n)
    return PcmSignal(x / np.sqrt(np.mean(x * x)), sample_rate_hz)


def babble_noise(n: int, sample_rate_hz: int = 8000, seed: int = 0, talkers: int = 6) -> PcmSignal:
    """Several overlapping synthetic talkers over a pink floor (airport-like), unit power."""
    rng = np.random.default_rng(seed)
    duration = n / sample_rate_hz
    x = 0.5 * pink_noise(n, sample_rate_hz, seed=int(rng.integers(1 << 31))).samples
    for _ in range(talkers):
        talker = synth_speech(duration, sample_rate_hz, seed=int(rng.integers(1 << 31))).samples
        x += np.roll(talker, int(rng.integers(n)))[:n] / np.sqrt(np.mean(talker ** 2) + 1e-20)
    return PcmSignal(x / np.sqrt(np.mean(x * x)), sample_rate_hz)


NOISE_KINDS = {"white": white_noise, "pink": pink_noise, "babble": babble_noise}


def make_noise(kind: str, n: int, sample_rate_hz: int = 8000, seed: int = 0) -> PcmSignal:
    try:
        return NOISE_KINDS[kind](n, sample_rate_hz, seed=seed)
    except KeyError:
        raise ValueError(f"unknown noise kind {kind!r}; choose from {sorted(NOISE_KINDS)}") from None
