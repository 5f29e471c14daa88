"""Short-time Fourier analysis and weighted overlap-add synthesis.

Defaults follow the 8 kHz setup: 20 ms Hamming frames (160 samples),
10 ms hop (80 samples), zero-padded to a 256-point FFT, keeping the
129 one-sided bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SignalTooShort
from .signal_io import PcmSignal

WOLA_FLOOR = 1e-8


@dataclass(frozen=True)
class FrameParams:
    frame_len: int = 160
    hop: int = 80
    fft_size: int = 256
    window: str = "hamming"
    periodic: bool = False

    def __post_init__(self):
        if not 0 < self.hop <= self.frame_len <= self.fft_size:
            raise ValueError(
                f"need 0 < hop <= frame_len <= fft_size, got "
                f"{self.hop}, {self.frame_len}, {self.fft_size}"
            )
        if self.window not in _WINDOWS:
            raise ValueError(f"unknown window {self.window!r}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.frame_len:
            return 0
        return (n_samples - self.frame_len) // self.hop + 1

    def output_length(self, n_frames: int) -> int:
        return (n_frames - 1) * self.hop + self.frame_len

    def window_values(self) -> np.ndarray:
        return _WINDOWS[self.window](self.frame_len, self.periodic)


def hamming_window(n: int, periodic: bool = False) -> np.ndarray:
    """0.54 - 0.46 cos(2 pi i / D) with D = n - 1 (symmetric) or n (periodic)."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    denom = n if periodic else n - 1
    i = np.arange(n)
    w = 0.54 - 0.46 * np.cos(2.0 * np.pi * i / denom)
    if not periodic:
        # mirror so that w[i] == w[n-1-i] holds bitwise
        w[n - n // 2 :] = w[: n // 2][::-1]
    return w


def _rect(n: int, periodic: bool = False) -> np.ndarray:
    return np.ones(n)


_WINDOWS = {"hamming": hamming_window, "rect": _rect}


@dataclass(frozen=True)
class ComplexSpectrogram:
    """L x K one-sided STFT grid (rows are frames)."""

    values: np.ndarray
    params: FrameParams
    sample_rate_hz: int = 8000

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_bins(self) -> int:
        return self.values.shape[1]

    def to_magphase(self) -> MagPhase:
        return MagPhase(np.abs(self.values), np.angle(self.values), self.params, self.sample_rate_hz)


@dataclass(frozen=True)
class MagPhase:
    magnitude: np.ndarray
    phase: np.ndarray
    params: FrameParams
    sample_rate_hz: int = 8000

    def __post_init__(self):
        if self.magnitude.shape != self.phase.shape:
            raise DimensionMismatch(
                f"magnitude {self.magnitude.shape} vs phase {self.phase.shape}"
            )

    @property
    def shape(self):
        return self.magnitude.shape

    def complex(self) -> np.ndarray:
        return self.magnitude * np.exp(1j * self.phase)

    def with_magnitude(self, magnitude) -> MagPhase:
        return MagPhase(np.asarray(magnitude, dtype=np.float64), self.phase, self.params, self.sample_rate_hz)


def frame_signal(x: np.ndarray, params: FrameParams) -> np.ndarray:
    n_frames = params.n_frames(x.shape[0])
    idx = np.arange(params.frame_len)[None, :] + params.hop * np.arange(n_frames)[:, None]
    return x[idx]


def stft(signal: PcmSignal, params: FrameParams = FrameParams()) -> ComplexSpectrogram:
    """Windowed, zero-padded DFT of every full frame; one-sided bins only.

    Samples past the last full frame are not analysed.
    """
    x = signal.samples
    if x.shape[0] < params.frame_len:
        raise SignalTooShort(f"{x.shape[0]} samples < frame length {params.frame_len}")
    frames = frame_signal(x, params) * params.window_values()
    values = np.fft.rfft(frames, n=params.fft_size, axis=1)
    return ComplexSpectrogram(values, params, signal.sample_rate_hz)


def istft(spec: MagPhase | ComplexSpectrogram, params: FrameParams | None = None) -> PcmSignal:
    """Weighted overlap-add inverse of :func:`stft`.

    Each frame is inverted, truncated to ``frame_len``, multiplied by the
    analysis window again and overlap-added; the sum is divided by the
    overlap-added squared window (floored at 1e-8). Output length is
    ``(L - 1) * hop + frame_len``.
    """
    params = params or spec.params
    grid = spec.complex() if isinstance(spec, MagPhase) else spec.values
    if grid.ndim != 2 or grid.shape[1] != params.n_bins:
        raise DimensionMismatch(
            f"spectrogram shape {grid.shape} does not match {params.n_bins} bins"
        )
    n_frames = grid.shape[0]
    if n_frames == 0:
        raise DimensionMismatch("spectrogram has no frames")
    w = params.window_values()
    frames = np.fft.irfft(grid, n=params.fft_size, axis=1)[:, : params.frame_len] * w

    n_out = params.output_length(n_frames)
    out = np.zeros(n_out)
    norm = np.zeros(n_out)
    w2 = w * w
    for m in range(n_frames):
        start = m * params.hop
        out[start : start + params.frame_len] += frames[m]
        norm[start : start + params.frame_len] += w2
    out /= np.maximum(norm, WOLA_FLOOR)
    return PcmSignal(out, spec.sample_rate_hz)


def round_trip(signal: PcmSignal, params: FrameParams = FrameParams()) -> PcmSignal:
    """istft(stft(x)) through the magnitude/phase split."""
    return istft(stft(signal, params).to_magphase(), params)
