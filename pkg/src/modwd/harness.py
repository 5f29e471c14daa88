"""Batch experiment grid: noisy-corpus mixing, enhancement runs, CSV reports."""

from __future__ import annotations

import csv
import glob
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .enhance import CascadeSpec, GainParams, SubtractionParams, cascade
from .errors import ConfigError, ModwdError
from .metrics import external_score, log_spectral_distance, segmental_snr
from .signal_io import PcmSignal, mix_at_snr, quantize_pcm16, read_wav, write_wav
from .stft import FrameParams

logger = logging.getLogger(__name__)

DEFAULT_SNRS = (0.0, 5.0, 10.0, 15.0, 20.0)
DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_METHODS = ("modwd",)

REPORT_FIELDS = ("utterance_id", "method", "alpha", "snr_db", "seg_snr_db", "lsd_db")


@dataclass
class RunConfig:
    clean: list[str] = field(default_factory=list)
    noise: str = ""
    snr: list[float] = field(default_factory=lambda: list(DEFAULT_SNRS))
    methods: list[str] = field(default_factory=lambda: list(DEFAULT_METHODS))
    alphas: list[float] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    out_dir: str = "out"
    report: str = ""
    jobs: int = 1
    write_audio: bool = True
    float_wav: bool = False
    external_metric: str = ""
    external_pattern: str = ""
    # frame analysis
    frame_len: int = 160
    hop: int = 80
    fft_size: int = 256
    window: str = "hamming"
    periodic_window: bool = False
    # enhancers
    dd_smoothing: float = 0.98
    gain_floor: float = 0.05
    xi_min: float = 10.0 ** (-2.5)
    noise_frames: int = 6
    ss_bands: int = 4
    ss_floor: float = 0.002
    ss_tweak_low: float = 1.0
    ss_tweak_mid: float = 2.5
    ss_tweak_high: float = 1.5

    @property
    def frame_params(self) -> FrameParams:
        return FrameParams(self.frame_len, self.hop, self.fft_size, self.window, self.periodic_window)

    @property
    def gain_params(self) -> GainParams:
        return GainParams(self.dd_smoothing, self.gain_floor, self.xi_min, self.noise_frames)

    @property
    def subtraction_params(self) -> SubtractionParams:
        return SubtractionParams(self.ss_bands, self.ss_floor, self.ss_tweak_low,
                                 self.ss_tweak_mid, self.ss_tweak_high, self.noise_frames)

    @property
    def report_path(self) -> Path:
        return Path(self.report) if self.report else Path(self.out_dir) / "report.csv"

    def clean_files(self) -> list[Path]:
        files: list[Path] = []
        for entry in self.clean:
            p = Path(entry)
            if p.is_dir():
                files.extend(sorted(p.glob("*.wav")))
            else:
                files.extend(Path(m) for m in sorted(glob.glob(entry)))
        return sorted(set(files))

    def validate(self, need_noise: bool = True) -> None:
        if not self.snr:
            raise ConfigError("snr grid is empty")
        if not self.methods:
            raise ConfigError("no methods configured")
        if not self.alphas:
            raise ConfigError("alpha grid is empty")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ConfigError(f"alpha {a} outside [0, 1]")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        # building these runs their own range checks
        _ = (self.frame_params, self.gain_params, self.subtraction_params, self.cells())
        if not self.clean_files():
            raise ConfigError(f"no clean WAV files match {self.clean!r}")
        if need_noise and not Path(self.noise).is_file():
            raise ConfigError(f"noise file {self.noise!r} does not exist")

    def cells(self) -> list[tuple[str, float | None, CascadeSpec]]:
        """Expand method tokens into (label, alpha, cascade) cells.

        A ``modwd`` stage without an explicit alpha is swept over the alpha
        grid; the alpha column is empty for cascades without ModWD.
        """
        out = []
        overrides = dict(gain=self.gain_params, subtraction=self.subtraction_params)
        for token in self.methods:
            parts = token.split("-")
            sweep = any(p.strip().lower() == "modwd" for p in parts)
            if sweep:
                for a in self.alphas:
                    filled = "-".join(f"modwd:{a:g}" if p.strip().lower() == "modwd" else p
                                      for p in parts)
                    out.append((token, a, CascadeSpec.parse(filled, **overrides)))
            else:
                spec = CascadeSpec.parse(token, **overrides)
                alphas = {s.alpha for s in spec.stages if s.kind == "modwd"}
                out.append((token, alphas.pop() if len(alphas) == 1 else None, spec))
        return out


_LIST_KEYS = {"clean", "snr", "methods", "alphas"}
_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _convert(name: str, raw: str, kind):
    raw = raw.strip()
    try:
        if name in _LIST_KEYS:
            items = [item.strip() for item in raw.split(",") if item.strip()]
            return [float(i) for i in items] if name in ("snr", "alphas") else items
        if kind is bool or kind == "bool":
            low = raw.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(raw)
        if kind is int or kind == "int":
            return int(raw)
        if kind is float or kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; lists are comma separated."""
    types = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw, types[key])
    return values


def load_config(path=None, **overrides) -> RunConfig:
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# corpus operations


def snr_tag(snr_db: float) -> str:
    return f"{snr_db:g}dB"


def noisy_name(utterance_id: str, snr_db: float) -> str:
    return f"{utterance_id}_{snr_tag(snr_db)}.wav"


def make_noisy(clean: PcmSignal, noise: PcmSignal, snr_db: float) -> PcmSignal:
    """Mix and round through 16-bit quantization, exactly as the written file holds it."""
    mixed = mix_at_snr(clean, noise, snr_db)
    ints, _ = quantize_pcm16(mixed.samples)
    return mixed.with_samples(ints.astype(np.float64) / 32768.0)


def run_mix(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    """Write every clean x SNR noisy file; returns (written, errors)."""
    cfg.validate()
    noise = read_wav(cfg.noise)
    out_dir = Path(cfg.out_dir) / "noisy"
    out_dir.mkdir(parents=True, exist_ok=True)
    written, errors = [], []
    for path in cfg.clean_files():
        try:
            clean = read_wav(path)
            for snr in cfg.snr:
                target = out_dir / noisy_name(path.stem, snr)
                write_wav(target, make_noisy(clean, noise, snr))
                written.append(target)
        except (ModwdError, OSError) as exc:
            errors.append(f"{path}: {exc}")
            logger.error("mix failed for %s: %s", path, exc)
    return written, errors


@dataclass(frozen=True)
class CellResult:
    utterance_id: str
    method: str
    alpha: float | None
    snr_db: float
    seg_snr_db: float = math.nan
    lsd_db: float = math.nan
    external: float | None = None
    error: str = ""

    def sort_key(self):
        return (self.utterance_id, self.method, -1.0 if self.alpha is None else self.alpha, self.snr_db)


def _enhanced_path(cfg: RunConfig, label: str, alpha, utterance_id: str, snr: float) -> Path:
    name = label.replace(":", "_")
    if alpha is not None and ":" not in label:
        name = f"{name}_a{alpha:g}"
    return Path(cfg.out_dir) / "enhanced" / name / noisy_name(utterance_id, snr)


def _run_utterance(cfg: RunConfig, clean_path: Path, noise: PcmSignal) -> list[CellResult]:
    utterance_id = clean_path.stem
    results = []
    try:
        clean = read_wav(clean_path)
    except (ModwdError, OSError) as exc:
        return [CellResult(utterance_id, label, alpha, snr, error=str(exc))
                for label, alpha, _ in cfg.cells() for snr in cfg.snr]
    params = cfg.frame_params
    for snr in cfg.snr:
        noisy = make_noisy(clean, noise, snr)
        for label, alpha, spec in cfg.cells():
            try:
                out = cascade(spec, noisy, params)
                ext = None
                target = _enhanced_path(cfg, label, alpha, utterance_id, snr)
                if cfg.write_audio or cfg.external_metric:
                    target.parent.mkdir(parents=True, exist_ok=True)
                    write_wav(target, out, float32=cfg.float_wav)
                if cfg.external_metric:
                    kwargs = {"pattern": cfg.external_pattern} if cfg.external_pattern else {}
                    ext = external_score(cfg.external_metric, clean_path, target, **kwargs)
                results.append(CellResult(utterance_id, label, alpha, snr,
                                          segmental_snr(clean, out),
                                          log_spectral_distance(clean, out, params), ext))
            except (ModwdError, OSError) as exc:
                logger.error("%s %s snr=%s failed: %s", utterance_id, label, snr, exc)
                results.append(CellResult(utterance_id, label, alpha, snr, error=str(exc)))
    return results


def run_enhance(cfg: RunConfig) -> list[CellResult]:
    """Run every (method, alpha, SNR) cell for every clean utterance.

    Noisy inputs are generated in memory with :func:`make_noisy`, so they are
    identical to the files :func:`run_mix` writes.
    """
    cfg.validate()
    noise = read_wav(cfg.noise)
    files = cfg.clean_files()
    if cfg.jobs == 1:
        chunks = [_run_utterance(cfg, f, noise) for f in files]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_run_utterance, [cfg] * len(files), files, [noise] * len(files)))
    results = sorted((r for chunk in chunks for r in chunk), key=CellResult.sort_key)
    write_report(results, cfg.report_path, with_external=bool(cfg.external_metric))
    return results


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6f}"
    return str(value)


def format_report(results: list[CellResult], with_external: bool = False) -> str:
    header = list(REPORT_FIELDS)
    if with_external:
        header.append("external_score")
    header.append("error")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in results:
        alpha = "" if r.alpha is None else f"{r.alpha:g}"
        row = [r.utterance_id, r.method, alpha, f"{r.snr_db:g}", _fmt(r.seg_snr_db), _fmt(r.lsd_db)]
        if with_external:
            row.append(_fmt(r.external))
        row.append(r.error)
        writer.writerow(row)
    return buf.getvalue()


def write_report(results: list[CellResult], path, with_external: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(results, with_external))
    return path


def summarize_report(path, metric: str = "seg_snr_db") -> str:
    """Mean of ``metric`` per (method, alpha) row and SNR column, plus an average column."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if not r.get("error")]
    if not rows:
        raise ConfigError(f"{path}: no successful rows")
    if metric not in rows[0]:
        raise ConfigError(f"{path}: no column {metric!r}")
    snrs = sorted({float(r["snr_db"]) for r in rows})
    groups: dict[tuple[str, str], dict[float, list[float]]] = {}
    for r in rows:
        cell = groups.setdefault((r["method"], r["alpha"]), {})
        cell.setdefault(float(r["snr_db"]), []).append(float(r[metric]))
    width = max(len(f"{m} a={a}" if a else m) for m, a in groups) + 2
    lines = [f"{metric}".ljust(width) + "".join(f"{snr_tag(s):>9}" for s in snrs) + f"{'Avg.':>9}"]
    for (method, alpha), cell in sorted(groups.items()):
        name = f"{method} a={alpha}" if alpha else method
        means = [float(np.mean(cell[s])) if s in cell else math.nan for s in snrs]
        lines.append(name.ljust(width) + "".join(f"{m:9.3f}" for m in means)
                     + f"{float(np.nanmean(means)):9.3f}")
    return "\n".join(lines)
