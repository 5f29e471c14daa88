"""Mono WAV reading/writing and additive noise mixing at a target SNR."""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AllSamplesClipped,
    EmptyAudio,
    MalformedHeader,
    SilentInput,
    UnsupportedFormat,
)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_RATE = 8000

_FMT_PCM = 1
_FMT_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class PcmSignal:
    """Mono time-domain samples (nominally in [-1, 1]) at a fixed rate."""

    samples: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise UnsupportedFormat(f"expected mono samples, got shape {samples.shape}")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> PcmSignal:
        return PcmSignal(samples, self.sample_rate_hz)


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        yield cid, body
        pos += 8 + size + (size & 1)


def read_wav(path) -> PcmSignal:
    """Read a mono PCM16 or float32 WAV file, normalized to [-1, 1].

    16-bit samples are divided by 32768, so full-scale positive is
    32767/32768.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, body in _iter_chunks(data):
        if cid == b"fmt ":
            if len(body) < 16:
                raise MalformedHeader(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _FMT_EXTENSIBLE:
                if len(body) < 40:
                    raise MalformedHeader(f"{path}: truncated extensible fmt chunk")
                # first two bytes of the sub-format GUID carry the real tag
                (sub_tag,) = struct.unpack_from("<H", body, 24)
                fmt = (sub_tag,) + fmt[1:]
        elif cid == b"data":
            payload = body
    if fmt is None or payload is None:
        raise MalformedHeader(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _, _, bits = fmt
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, only mono is supported")
    if tag == _FMT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), 1.0 / 32768.0
    elif tag == _FMT_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedFormat(f"{path}: format tag {tag} with {bits} bits per sample")

    n = len(payload) // dtype.itemsize
    if n == 0:
        raise EmptyAudio(f"{path}: no audio samples")
    samples = np.frombuffer(payload[: n * dtype.itemsize], dtype=dtype).astype(np.float64) * scale
    return PcmSignal(samples, rate)


def quantize_pcm16(samples) -> tuple[np.ndarray, int]:
    """Round to 16-bit integers, hard-clipping; returns (ints, clip_count).

    Only samples whose magnitude exceeds 1.0 count as clipped.
    """
    x = np.asarray(samples, dtype=np.float64)
    clipped = int(np.count_nonzero(np.abs(x) > 1.0))
    ints = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    return ints, clipped


def write_wav(path, signal: PcmSignal, float32: bool = False) -> int:
    """Write ``signal`` as a mono WAV file and return the number of clipped samples.

    PCM16 is written by default; ``float32=True`` writes IEEE float samples
    (no clipping applied).
    """
    n = len(signal)
    if n == 0:
        raise EmptyAudio("refusing to write an empty signal")
    if float32:
        body = signal.samples.astype("<f4").tobytes()
        tag, bits, clipped = _FMT_FLOAT, 32, 0
    else:
        ints, clipped = quantize_pcm16(signal.samples)
        if clipped == n:
            raise AllSamplesClipped(f"all {n} samples exceed full scale")
        if clipped:
            logger.warning("%s: %d of %d samples clipped", path, clipped, n)
        body = ints.tobytes()
        tag, bits = _FMT_PCM, 16

    block = bits // 8
    rate = signal.sample_rate_hz
    fmt = struct.pack("<HHIIHH", tag, 1, rate, rate * block, block, bits)
    header = b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(body)) + b"WAVE"
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(body)) + body
    with open(path, "wb") as fh:
        fh.write(header + chunks)
    return clipped


def _power(x) -> float:
    return float(np.mean(np.square(x)))


def fit_noise_length(noise, n: int) -> np.ndarray:
    """Tile ``noise`` end-to-end (no crossfade) and cut to ``n`` samples."""
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape[0] < n:
        noise = np.tile(noise, -(-n // noise.shape[0]))
    return noise[:n]


def noise_gain(clean, noise, snr_db: float) -> float:
    """Scale g such that P(clean) / P(g * noise) == 10**(snr_db / 10)."""
    p_clean, p_noise = _power(clean), _power(noise)
    if p_clean == 0.0 or p_noise == 0.0:
        raise SilentInput("clean and noise must both have nonzero power")
    return math.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0)))


def mix_at_snr(clean: PcmSignal, noise: PcmSignal, snr_db: float) -> PcmSignal:
    """Return clean + g * noise at the requested full-utterance SNR.

    Powers are plain mean squares over the clean-signal length (no speech
    activity weighting). ``snr_db = inf`` returns the clean signal unchanged.
    """
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise ValueError(
            f"sample rates differ: {clean.sample_rate_hz} vs {noise.sample_rate_hz}"
        )
    if math.isinf(snr_db) and snr_db > 0:
        return clean.with_samples(clean.samples.copy())
    segment = fit_noise_length(noise.samples, len(clean))
    g = noise_gain(clean.samples, segment, snr_db)
    return clean.with_samples(clean.samples + g * segment)


def measured_snr_db(clean, noisy) -> float:
    clean = np.asarray(clean, dtype=np.float64)
    residual = np.asarray(noisy, dtype=np.float64) - clean
    return 10.0 * math.log10(_power(clean) / _power(residual))
