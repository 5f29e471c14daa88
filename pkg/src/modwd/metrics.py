"""Objective quality measures: segmental SNR, log-spectral distance, and a
hook for running an external (e.g. licensed PESQ) scorer."""

from __future__ import annotations

import re
import shlex
import subprocess
from dataclasses import dataclass, field

import numpy as np

from .errors import AllFramesSilent, LengthMismatch, ParseFailure, ProcessFailure
from .signal_io import PcmSignal
from .stft import FrameParams, stft

SEGSNR_MIN_DB = -10.0
SEGSNR_MAX_DB = 35.0
SEGSNR_FRAME_S = 0.020
SILENT_FRAME_ENERGY = 1e-10
LSD_EPS = 1e-8

NUMBER_PATTERN = r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?"


@dataclass
class QualityReport:
    utterance_id: str
    seg_snr_db: float
    lsd_db: float
    per_snr: dict[float, dict[str, float]] = field(default_factory=dict)


def _aligned(clean: PcmSignal, processed: PcmSignal, max_gap: int):
    if clean.sample_rate_hz != processed.sample_rate_hz:
        raise LengthMismatch(
            f"sample rates differ: {clean.sample_rate_hz} vs {processed.sample_rate_hz}"
        )
    gap = abs(len(clean) - len(processed))
    if gap > max_gap:
        raise LengthMismatch(f"lengths differ by {gap} samples (> {max_gap})")
    n = min(len(clean), len(processed))
    return clean.samples[:n], processed.samples[:n]


def segmental_snr(clean: PcmSignal, processed: PcmSignal, frame_s: float = SEGSNR_FRAME_S) -> float:
    """Mean per-frame SNR over non-overlapping frames, each clamped to [-10, 35] dB.

    Frames whose clean energy is below 1e-10 are skipped. Signals are compared
    at zero lag over their common length.
    """
    frame = int(round(frame_s * clean.sample_rate_hz))
    c, p = _aligned(clean, processed, frame)
    n_frames = c.shape[0] // frame
    c = c[: n_frames * frame].reshape(n_frames, frame)
    p = p[: n_frames * frame].reshape(n_frames, frame)
    signal_energy = np.sum(c * c, axis=1)
    error_energy = np.sum((c - p) ** 2, axis=1)
    active = signal_energy >= SILENT_FRAME_ENERGY
    if not np.any(active):
        raise AllFramesSilent("no clean frame has measurable energy")
    with np.errstate(divide="ignore"):
        snr = 10.0 * np.log10(signal_energy[active] / error_energy[active])
    return float(np.mean(np.clip(snr, SEGSNR_MIN_DB, SEGSNR_MAX_DB)))


def log_spectral_distance(clean: PcmSignal, processed: PcmSignal,
                          params: FrameParams = FrameParams(), eps: float = LSD_EPS) -> float:
    """RMS over all frames and bins of 20 log10((|C| + eps) / (|P| + eps))."""
    c, p = _aligned(clean, processed, params.frame_len)
    mc = np.abs(stft(clean.with_samples(c), params).values)
    mp = np.abs(stft(processed.with_samples(p), params).values)
    diff = 20.0 * np.log10((mc + eps) / (mp + eps))
    return float(np.sqrt(np.mean(diff * diff)))


def quality_report(utterance_id: str, clean: PcmSignal, processed: PcmSignal) -> QualityReport:
    return QualityReport(utterance_id, segmental_snr(clean, processed),
                         log_spectral_distance(clean, processed))


def external_score(command_template: str, clean_path, processed_path,
                   pattern: str = NUMBER_PATTERN, timeout: float | None = 300.0) -> float:
    """Run a user-supplied scorer and parse one number from its stdout.

    ``{clean}`` and ``{processed}`` in the template are replaced by the
    (shell-quoted) paths. If ``pattern`` has a capture group, the first group
    of the first match is used, otherwise the whole first match.
    """
    command = command_template.format(clean=shlex.quote(str(clean_path)),
                                      processed=shlex.quote(str(processed_path)))
    try:
        result = subprocess.run(shlex.split(command), capture_output=True, text=True,
                                timeout=timeout, check=False)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise ProcessFailure(f"could not run {command!r}: {exc}") from exc
    if result.returncode != 0:
        raise ProcessFailure(
            f"{command!r} exited with status {result.returncode}: {result.stderr.strip()}"
        )
    match = re.search(pattern, result.stdout)
    if match is None:
        raise ParseFailure(f"no score matching {pattern!r} in output {result.stdout!r}")
    text = match.group(1) if match.re.groups else match.group(0)
    try:
        return float(text)
    except ValueError as exc:
        raise ParseFailure(f"matched {text!r} is not a number") from exc
