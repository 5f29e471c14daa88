"""Classical single-channel enhancers and the cascade combinator.

All enhancers work on a :class:`~modwd.stft.MagPhase` and change only the
magnitude; phase is passed through. Noise power is estimated from the
leading frames of each stage's own input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import exp1, i0e, i1e

from .errors import ConfigError, DimensionMismatch, TooFewFrames
from .pipeline import ModwdConfig, modwd_magnitude
from .signal_io import PcmSignal
from .stft import FrameParams, MagPhase, istft, stft

PSD_FLOOR = 1e-12
NOISE_FRAMES = 6

# decision-directed a-priori SNR
DD_SMOOTHING = 0.98
XI_MIN = 10.0 ** (-25.0 / 10.0)
GAIN_FLOOR = 0.05

# multi-band spectral subtraction
SS_BANDS = 4
SS_SPECTRAL_FLOOR = 0.002
SS_TWEAK_LOW, SS_TWEAK_MID, SS_TWEAK_HIGH = 1.0, 2.5, 1.5
SS_SNR_LO_DB, SS_SNR_HI_DB = -5.0, 20.0

STSA_ASYMPTOTIC_NU = 700.0


@dataclass(frozen=True)
class NoisePsd:
    psd: np.ndarray
    n_frames_used: int


def estimate_noise_initial(spec: MagPhase, n_frames: int = NOISE_FRAMES) -> NoisePsd:
    """Mean power of the first ``n_frames`` frames, floored at 1e-12."""
    if n_frames < 1 or spec.magnitude.shape[0] < n_frames:
        raise TooFewFrames(
            f"need {n_frames} frames for noise estimation, have {spec.magnitude.shape[0]}"
        )
    power = np.mean(spec.magnitude[:n_frames] ** 2, axis=0)
    return NoisePsd(np.maximum(power, PSD_FLOOR), n_frames)


def _check(spec: MagPhase, noise: NoisePsd):
    if noise.psd.shape != (spec.magnitude.shape[1],):
        raise DimensionMismatch(
            f"noise PSD has {noise.psd.shape} bins, spectrogram has {spec.magnitude.shape[1]}"
        )


# ---------------------------------------------------------------------------
# gain functions of (a-priori SNR xi, a-posteriori SNR gamma)


def wiener_gain(xi):
    xi = np.asarray(xi, dtype=np.float64)
    return xi / (1.0 + xi)


def stsa_gain(xi, gamma):
    """MMSE short-time spectral amplitude gain.

    G = sqrt(pi)/2 * sqrt(nu)/gamma * exp(-nu/2) * [(1+nu) I0(nu/2) + nu I1(nu/2)],
    nu = xi * gamma / (1 + xi). The exponentially scaled Bessel functions
    absorb exp(-nu/2); above nu = 700 the gain is replaced by its limit
    xi / (1 + xi).
    """
    xi, gamma = np.broadcast_arrays(np.asarray(xi, dtype=np.float64),
                                    np.asarray(gamma, dtype=np.float64))
    nu = xi * gamma / (1.0 + xi)
    half = 0.5 * nu
    with np.errstate(invalid="ignore", divide="ignore"):
        g = (0.5 * math.sqrt(math.pi) * np.sqrt(nu) / gamma
             * ((1.0 + nu) * i0e(half) + nu * i1e(half)))
    g = np.where(gamma == 0.0, np.inf, g)  # limit as gamma -> 0; callers clip
    return np.where(nu > STSA_ASYMPTOTIC_NU, xi / (1.0 + xi), g)


def log_stsa_gain(xi, gamma):
    """MMSE log-spectral amplitude gain: xi/(1+xi) * exp(E1(nu) / 2)."""
    xi, gamma = np.broadcast_arrays(np.asarray(xi, dtype=np.float64),
                                    np.asarray(gamma, dtype=np.float64))
    nu = xi * gamma / (1.0 + xi)
    return xi / (1.0 + xi) * np.exp(0.5 * exp1(nu))


_GAINS: dict[str, Callable] = {
    "wf": lambda xi, gamma: wiener_gain(xi),
    "stsa": stsa_gain,
    "logstsa": log_stsa_gain,
}


@dataclass(frozen=True)
class GainParams:
    dd_smoothing: float = DD_SMOOTHING
    gain_floor: float = GAIN_FLOOR
    xi_min: float = XI_MIN
    noise_frames: int = NOISE_FRAMES

    def __post_init__(self):
        if not 0.9 <= self.dd_smoothing <= 0.999:
            raise ConfigError(f"dd_smoothing must lie in [0.9, 0.999], got {self.dd_smoothing}")
        if not 0.0 < self.gain_floor <= 0.5:
            raise ConfigError(f"gain_floor must lie in (0, 0.5], got {self.gain_floor}")
        if self.xi_min < 0:
            raise ConfigError("xi_min must be non-negative")


def decision_directed(spec: MagPhase, noise: NoisePsd, gain_fn: Callable,
                      params: GainParams = GainParams()) -> MagPhase:
    """Frame-recursive a-priori SNR estimation with a gain law.

    xi[m] = a * |S[m-1]|^2 / psd + (1 - a) * max(gamma[m] - 1, 0), where
    S[m-1] is the previous enhanced frame (zero before the first frame).
    The applied gain is clipped to [gain_floor, 1].
    """
    _check(spec, noise)
    power = spec.magnitude ** 2
    gamma = power / noise.psd
    a = params.dd_smoothing
    out = np.empty_like(spec.magnitude)
    prev = np.zeros(spec.magnitude.shape[1])
    for m in range(power.shape[0]):
        xi = a * prev / noise.psd + (1.0 - a) * np.maximum(gamma[m] - 1.0, 0.0)
        xi = np.maximum(xi, params.xi_min)
        g = np.clip(gain_fn(xi, gamma[m]), params.gain_floor, 1.0)
        out[m] = g * spec.magnitude[m]
        prev = out[m] ** 2
    return spec.with_magnitude(out)


def wiener_filter(spec: MagPhase, noise: NoisePsd, params: GainParams = GainParams()) -> MagPhase:
    return decision_directed(spec, noise, _GAINS["wf"], params)


def stsa_mmse(spec: MagPhase, noise: NoisePsd, params: GainParams = GainParams()) -> MagPhase:
    return decision_directed(spec, noise, stsa_gain, params)


def log_stsa(spec: MagPhase, noise: NoisePsd, params: GainParams = GainParams()) -> MagPhase:
    return decision_directed(spec, noise, log_stsa_gain, params)


# ---------------------------------------------------------------------------
# multi-band spectral subtraction


@dataclass(frozen=True)
class SubtractionParams:
    n_bands: int = SS_BANDS
    spectral_floor: float = SS_SPECTRAL_FLOOR
    tweak_low: float = SS_TWEAK_LOW
    tweak_mid: float = SS_TWEAK_MID
    tweak_high: float = SS_TWEAK_HIGH
    noise_frames: int = NOISE_FRAMES

    def __post_init__(self):
        if self.n_bands < 1:
            raise ConfigError("n_bands must be >= 1")
        if not 0.0 <= self.spectral_floor < 1.0:
            raise ConfigError("spectral_floor must lie in [0, 1)")

    def tweak_factors(self) -> np.ndarray:
        if self.n_bands == 1:
            return np.array([self.tweak_low])
        mid = [self.tweak_mid] * (self.n_bands - 2)
        return np.array([self.tweak_low, *mid, self.tweak_high])


def over_subtraction(snr_db):
    """Band over-subtraction factor: 4 - 0.15 * SNR, held at 4.75 below -5 dB and 1 above 20 dB."""
    snr_db = np.asarray(snr_db, dtype=np.float64)
    return 4.0 - 0.15 * np.clip(snr_db, SS_SNR_LO_DB, SS_SNR_HI_DB)


def band_edges(n_bins: int, n_bands: int) -> np.ndarray:
    """Linearly spaced contiguous bin ranges; returns n_bands + 1 edges."""
    return np.round(np.linspace(0, n_bins, n_bands + 1)).astype(int)


def spectral_subtract_multiband(spec: MagPhase, noise: NoisePsd,
                                params: SubtractionParams = SubtractionParams()) -> MagPhase:
    _check(spec, noise)
    power = spec.magnitude ** 2
    edges = band_edges(power.shape[1], params.n_bands)
    tweaks = params.tweak_factors()
    out = np.empty_like(power)
    for i in range(params.n_bands):
        lo, hi = edges[i], edges[i + 1]
        band_power = power[:, lo:hi]
        noise_band = noise.psd[lo:hi]
        with np.errstate(divide="ignore"):
            snr = 10.0 * np.log10(band_power.sum(axis=1) / noise_band.sum())
        beta = over_subtraction(snr)[:, None]
        subtracted = band_power - tweaks[i] * beta * noise_band
        out[:, lo:hi] = np.maximum(subtracted, params.spectral_floor * band_power)
    return spec.with_magnitude(np.sqrt(out))


# ---------------------------------------------------------------------------
# waveform-level stages and cascades

METHODS = ("ss", "wf", "stsa", "logstsa", "modwd")


@dataclass(frozen=True)
class EnhancerSpec:
    kind: str
    alpha: float = 0.25
    gain: GainParams = field(default_factory=GainParams)
    subtraction: SubtractionParams = field(default_factory=SubtractionParams)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in METHODS:
            raise ConfigError(f"unknown method {self.kind!r}; choose from {', '.join(METHODS)}")
        object.__setattr__(self, "kind", kind)
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def label(self) -> str:
        return f"modwd:{self.alpha:g}" if self.kind == "modwd" else self.kind

    def apply(self, spec: MagPhase) -> MagPhase:
        if self.kind == "modwd":
            return modwd_magnitude(spec, ModwdConfig(self.alpha, spec.params))
        if self.kind == "ss":
            noise = estimate_noise_initial(spec, self.subtraction.noise_frames)
            return spectral_subtract_multiband(spec, noise, self.subtraction)
        noise = estimate_noise_initial(spec, self.gain.noise_frames)
        return decision_directed(spec, noise, _GAINS[self.kind], self.gain)


def enhance(noisy: PcmSignal, stage: EnhancerSpec, params: FrameParams = FrameParams()) -> PcmSignal:
    """Waveform-to-waveform run of a single enhancer."""
    spec = stft(noisy, params).to_magphase()
    return istft(stage.apply(spec), params)


@dataclass(frozen=True)
class CascadeSpec:
    stages: tuple[EnhancerSpec, ...]

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ConfigError("a cascade needs at least one stage")
        object.__setattr__(self, "stages", stages)

    @property
    def label(self) -> str:
        return "-".join(stage.label for stage in self.stages)

    @classmethod
    def parse(cls, token: str, **overrides) -> CascadeSpec:
        """Parse ``"modwd:0.25-ss"`` style tokens; stages run left to right.

        ``overrides`` (``gain=``, ``subtraction=``) are passed to every stage.
        """
        parts = [p.strip() for p in token.strip().split("-")]
        if not token.strip() or any(not p for p in parts):
            raise ConfigError(f"malformed cascade token {token!r}")
        stages = []
        for part in parts:
            name, _, arg = part.partition(":")
            name = name.lower()
            if name == "modwd":
                try:
                    alpha = float(arg) if arg else 0.25
                except ValueError:
                    raise ConfigError(f"bad alpha in {part!r}") from None
                stages.append(EnhancerSpec("modwd", alpha=alpha, **overrides))
            elif arg:
                raise ConfigError(f"method {name!r} takes no argument ({part!r})")
            else:
                stages.append(EnhancerSpec(name, **overrides))
        return cls(tuple(stages))


def cascade(stages: CascadeSpec | list[EnhancerSpec], noisy: PcmSignal,
            params: FrameParams = FrameParams()) -> PcmSignal:
    """Run each stage waveform-to-waveform, in order.

    "A-B" means A first; every statistical stage re-estimates noise on its
    own input.
    """
    if not isinstance(stages, CascadeSpec):
        stages = CascadeSpec(tuple(stages))
    out = noisy
    for stage in stages.stages:
        out = enhance(out, stage, params)
    return out
