"""Modulation-domain wavelet denoising (ModWD).

The magnitude spectrogram is treated as K temporal trajectories, one per
acoustic-frequency bin. Each trajectory gets a one-level DWT; the detail
(high modulation-frequency) half is scaled by ``alpha`` and the trajectory
is rebuilt with the inverse DWT. The new magnitudes are recombined with the
untouched noisy phase and resynthesised.

At the 100 Hz default frame rate the approximation/detail split sits near
25 Hz of modulation frequency.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .dwt import BIOR37, BiorFilterBank, WaveletPair, dwt1, idwt1
from .errors import ConfigError, InconsistentPair, PayloadError, VersionError
from .signal_io import PcmSignal
from .stft import FrameParams, MagPhase, istft, stft

ALPHA_SWEEP = (0.0, 0.25, 0.5, 0.75)

PAYLOAD_HEADER = struct.Struct("<4I")  # n_bins, stored_len, original_len, fft_size
_PAYLOAD_DTYPES = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


@dataclass(frozen=True)
class ModwdConfig:
    alpha: float = 0.25
    frame_params: FrameParams = field(default_factory=FrameParams)
    bank: BiorFilterBank = BIOR37

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class WaveletSpectrogram:
    """Approximation and detail planes, shape (coeff_len, K), of an L x K magnitude plane."""

    pair: WaveletPair
    params: FrameParams

    @property
    def approx(self) -> np.ndarray:
        return self.pair.approx

    @property
    def detail(self) -> np.ndarray:
        return self.pair.detail

    @property
    def n_bins(self) -> int:
        return self.pair.approx.shape[1]

    @property
    def coeff_len(self) -> int:
        return self.pair.approx.shape[0]

    @property
    def original_len(self) -> int:
        return self.pair.original_len

    def row(self, k: int) -> WaveletPair:
        """Coefficients of the temporal trajectory of bin ``k``."""
        return WaveletPair(self.pair.approx[:, k], self.pair.detail[:, k], self.pair.original_len)


def decompose_rows(magnitude: np.ndarray, bank: BiorFilterBank = BIOR37,
                   params: FrameParams = FrameParams()) -> WaveletSpectrogram:
    """DWT of every bin's magnitude trajectory (along the frame axis)."""
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if magnitude.ndim != 2:
        raise ValueError("expected an L x K magnitude plane")
    return WaveletSpectrogram(dwt1(magnitude, bank), params)


def scale_detail(ws: WaveletSpectrogram, alpha: float) -> WaveletSpectrogram:
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    pair = WaveletPair(ws.approx, ws.detail * alpha, ws.original_len)
    return WaveletSpectrogram(pair, ws.params)


def reconstruct_rows(ws: WaveletSpectrogram, bank: BiorFilterBank = BIOR37,
                     clamp: bool = True) -> np.ndarray:
    """Inverse DWT of every row; negative magnitudes are clamped to zero."""
    if ws.approx.shape != ws.detail.shape:
        raise InconsistentPair("approximation and detail planes differ in shape")
    plane = idwt1(ws.pair, bank)
    if clamp:
        np.maximum(plane, 0.0, out=plane)
    return plane


def modwd_magnitude(mag: MagPhase, cfg: ModwdConfig) -> MagPhase:
    """Apply ModWD to a magnitude/phase spectrogram; phase is passed through.

    ``alpha == 1`` leaves the detail untouched, so the magnitudes are
    returned unchanged rather than pushed through an exact round trip.
    """
    if cfg.alpha == 1.0:
        return mag
    ws = scale_detail(decompose_rows(mag.magnitude, cfg.bank, mag.params), cfg.alpha)
    return mag.with_magnitude(reconstruct_rows(ws, cfg.bank))


def modwd_enhance(noisy: PcmSignal, cfg: ModwdConfig = ModwdConfig()) -> PcmSignal:
    """STFT -> per-bin DWT -> detail * alpha -> IDWT -> noisy phase -> ISTFT."""
    params = cfg.frame_params
    mag = stft(noisy, params).to_magphase()
    if mag.magnitude.shape[0] < 2:
        raise ConfigError("ModWD needs at least two frames")
    return istft(modwd_magnitude(mag, cfg), params)


# ---------------------------------------------------------------------------
# approximation-only payload


def serialize_approximation_payload(ws: WaveletSpectrogram, dtype="<f8",
                                    bank: BiorFilterBank = BIOR37) -> bytes:
    """Header + approximation plane only; the detail plane is dropped.

    Header: four little-endian uint32 (K, stored_len, original_len, fft_size).
    Body: ``stored_len x K`` floats, row-major. Approximation rows are
    mirror-symmetric at both ends, so the duplicated edge coefficients are
    not stored (``stored_len == bank.compact_len(original_len)``). The element
    width (float32 or float64) is recovered from the body size on read; only
    float64 restores the plane bit-exactly.
    """
    dtype = np.dtype(dtype)
    if dtype.itemsize not in _PAYLOAD_DTYPES:
        raise ValueError("payload dtype must be float32 or float64")
    core = bank.compact_approx(ws.approx, ws.original_len)
    header = PAYLOAD_HEADER.pack(ws.n_bins, core.shape[0], ws.original_len, ws.params.fft_size)
    body = np.ascontiguousarray(core, dtype=_PAYLOAD_DTYPES[dtype.itemsize]).tobytes()
    return header + body


def deserialize_approximation_payload(payload: bytes, params: FrameParams | None = None,
                                      bank: BiorFilterBank = BIOR37) -> WaveletSpectrogram:
    """Rebuild a :class:`WaveletSpectrogram` with an all-zero detail plane."""
    if len(payload) < PAYLOAD_HEADER.size:
        raise PayloadError(f"payload of {len(payload)} bytes is shorter than its header")
    n_bins, stored_len, original_len, fft_size = PAYLOAD_HEADER.unpack_from(payload)
    if (original_len < 2 or n_bins != fft_size // 2 + 1
            or stored_len != bank.compact_len(original_len)):
        raise VersionError(
            f"inconsistent header: K={n_bins}, stored_len={stored_len}, "
            f"L={original_len}, fft_size={fft_size}"
        )
    params = params or FrameParams()
    if params.fft_size != fft_size:
        raise VersionError(f"payload fft_size {fft_size} != configured {params.fft_size}")
    body = payload[PAYLOAD_HEADER.size :]
    count = n_bins * stored_len
    if len(body) % count or len(body) // count not in _PAYLOAD_DTYPES:
        raise PayloadError(f"body of {len(body)} bytes does not hold {count} floats")
    dtype = _PAYLOAD_DTYPES[len(body) // count]
    core = np.frombuffer(body, dtype=dtype).astype(np.float64).reshape(stored_len, n_bins)
    approx = bank.expand_approx(core, original_len)
    return WaveletSpectrogram(WaveletPair(approx, np.zeros_like(approx), original_len), params)


def payload_float_count(n_frames: int, n_bins: int = 129, bank: BiorFilterBank = BIOR37) -> int:
    return bank.compact_len(n_frames) * n_bins


def payload_float_ratio(n_frames: int, n_bins: int = 129, bank: BiorFilterBank = BIOR37) -> float:
    """Stored approximation coefficients relative to the full L x K plane."""
    return payload_float_count(n_frames, n_bins, bank) / (n_frames * n_bins)


def compress(noisy: PcmSignal, params: FrameParams = FrameParams(), bank: BiorFilterBank = BIOR37,
             dtype="<f8") -> tuple[bytes, np.ndarray]:
    """Sender side: returns (approximation payload, phase plane)."""
    mag = stft(noisy, params).to_magphase()
    ws = decompose_rows(mag.magnitude, bank, params)
    return serialize_approximation_payload(ws, dtype, bank), mag.phase


def decompress(payload: bytes, phase: np.ndarray, params: FrameParams = FrameParams(),
               bank: BiorFilterBank = BIOR37, sample_rate_hz: int = 8000) -> PcmSignal:
    """Receiver side: inverse DWT of the approximation, noisy phase, ISTFT."""
    ws = deserialize_approximation_payload(payload, params, bank)
    if phase.shape != (ws.original_len, ws.n_bins):
        raise PayloadError(f"phase plane {phase.shape} does not match payload")
    magnitude = reconstruct_rows(ws, bank)
    return istft(MagPhase(magnitude, phase, params, sample_rate_hz), params)


# ---------------------------------------------------------------------------
# spectrogram stages for plotting


@dataclass(frozen=True)
class SpectrogramStages:
    original: np.ndarray
    approximation: np.ndarray
    detail: np.ndarray
    reconstructed: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        return {
            "original": self.original,
            "approximation": self.approximation,
            "detail": self.detail,
            "reconstructed": self.reconstructed,
        }


def spectrogram_stages(noisy: PcmSignal, cfg: ModwdConfig = ModwdConfig()) -> SpectrogramStages:
    """Original, approximation, detail and reconstructed magnitude planes."""
    mag = stft(noisy, cfg.frame_params).to_magphase()
    ws = decompose_rows(mag.magnitude, cfg.bank, cfg.frame_params)
    rebuilt = reconstruct_rows(scale_detail(ws, cfg.alpha), cfg.bank)
    return SpectrogramStages(mag.magnitude, ws.approx.copy(), ws.detail.copy(), rebuilt)


def export_spectrogram_stages(noisy: PcmSignal, cfg: ModwdConfig, out_dir, fmt: str = "f32") -> dict:
    """Write the four planes as raw little-endian float32 grids or CSV.

    Rows are frames (or coefficient index); returns {stage: path}.
    """
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, plane in spectrogram_stages(noisy, cfg).as_dict().items():
        if fmt == "csv":
            path = out_dir / f"{name}.csv"
            np.savetxt(path, plane, delimiter=",", fmt="%.9g")
        elif fmt == "f32":
            path = out_dir / f"{name}_{plane.shape[0]}x{plane.shape[1]}.f32"
            plane.astype("<f4").tofile(path)
        else:
            raise ValueError(f"unknown stage format {fmt!r}")
        paths[name] = path
    return paths


def modulation_energy_above(plane: np.ndarray, fraction: float = 0.5) -> np.ndarray:
    """Per-bin temporal-modulation energy above ``fraction`` of the Nyquist rate."""
    spectrum = np.abs(np.fft.rfft(plane, axis=0)) ** 2
    freqs = np.fft.rfftfreq(plane.shape[0])  # cycles per frame, 0 .. 0.5
    return spectrum[freqs > 0.5 * fraction].sum(axis=0)
