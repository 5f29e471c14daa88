"""Batch front-end for mixing, enhancing, scoring and compressing speech corpora.

Subcommands: mix, enhance, report, compress, decompress, stages.

Exit codes: 0 success, 1 some files/cells failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, ModwdError, PayloadError
from .harness import load_config, run_enhance, run_mix, summarize_report
from .pipeline import ModwdConfig, compress, decompress, export_spectrogram_stages
from .signal_io import read_wav, write_wav
from .stft import FrameParams

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2

logger = logging.getLogger("modwd")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--clean", action="append", help="clean WAV directory or glob (repeatable)")
    p.add_argument("--noise", help="noise WAV file (tiled if shorter than an utterance)")
    p.add_argument("--snr", type=_float_list, help="comma-separated mixing SNRs in dB")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--jobs", type=int, help="worker processes (one utterance per job)")


def _frame_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frame-len", type=int, default=160)
    p.add_argument("--hop", type=int, default=80)
    p.add_argument("--fft-size", type=int, default=256)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modwd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mix", help="write <utt>_<snr>dB.wav noisy files")
    _grid_args(p)

    p = sub.add_parser("enhance", help="run methods / cascades over the corpus and write a CSV report")
    _grid_args(p)
    p.add_argument("--method", action="append",
                   help="method or cascade token, e.g. ss, modwd, modwd:0.25-ss (repeatable)")
    p.add_argument("--alpha", type=_float_list, help="alpha grid for bare 'modwd' stages")
    p.add_argument("--report", help="CSV report path (default <out-dir>/report.csv)")
    p.add_argument("--external-metric", dest="external_metric",
                   help="command template with {clean} and {processed} placeholders")
    p.add_argument("--no-audio", dest="write_audio", action="store_const", const=False,
                   help="do not write enhanced WAV files")

    p = sub.add_parser("report", help="print mean metric per method and SNR")
    p.add_argument("csv")
    p.add_argument("--metric", default="seg_snr_db")

    p = sub.add_parser("compress", help="sender side: approximation payload + phase plane")
    p.add_argument("wav")
    p.add_argument("payload")
    p.add_argument("--phase", help="phase plane output (.npy; default <payload>.phase.npy)")
    p.add_argument("--float32", action="store_true", help="store float32 (lossy) coefficients")
    _frame_args(p)

    p = sub.add_parser("decompress", help="receiver side: rebuild the alpha=0 ModWD output")
    p.add_argument("payload")
    p.add_argument("wav")
    p.add_argument("--phase")
    p.add_argument("--rate", type=int, default=8000)
    p.add_argument("--float-wav", action="store_true", help="write IEEE float32 samples")
    _frame_args(p)

    p = sub.add_parser("stages", help="export original/approximation/detail/reconstructed planes")
    p.add_argument("wav")
    p.add_argument("out_dir")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--format", choices=("f32", "csv"), default="f32")
    _frame_args(p)
    return parser


def _phase_path(payload: str, phase: str | None) -> Path:
    return Path(phase) if phase else Path(payload + ".phase.npy")


def _frame_params(args) -> FrameParams:
    return FrameParams(args.frame_len, args.hop, args.fft_size)


def _grid_overrides(args) -> dict:
    keys = ("clean", "noise", "snr", "out_dir", "jobs", "alpha", "method", "report",
            "external_metric", "write_audio")
    renamed = {"alpha": "alphas", "method": "methods"}
    return {renamed.get(k, k): getattr(args, k) for k in keys if hasattr(args, k)}


def _run(args) -> int:
    if args.command == "mix":
        cfg = load_config(args.config, **_grid_overrides(args))
        written, errors = run_mix(cfg)
        print(f"wrote {len(written)} files to {Path(cfg.out_dir) / 'noisy'}")
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_PARTIAL if errors else EXIT_OK

    if args.command == "enhance":
        cfg = load_config(args.config, **_grid_overrides(args))
        results = run_enhance(cfg)
        failed = [r for r in results if r.error]
        print(f"{len(results)} cells, {len(failed)} failed; report: {cfg.report_path}")
        return EXIT_PARTIAL if failed else EXIT_OK

    if args.command == "report":
        print(summarize_report(args.csv, args.metric))
        return EXIT_OK

    if args.command == "compress":
        signal = read_wav(args.wav)
        payload, phase = compress(signal, _frame_params(args), dtype="<f4" if args.float32 else "<f8")
        Path(args.payload).write_bytes(payload)
        np.save(_phase_path(args.payload, args.phase), phase)
        full = phase.size
        print(f"payload {len(payload)} bytes; {(len(payload) - 16) // (4 if args.float32 else 8)}"
              f" of {full} magnitude floats")
        return EXIT_OK

    if args.command == "decompress":
        payload = Path(args.payload).read_bytes()
        try:
            phase = np.load(_phase_path(args.payload, args.phase))
        except (OSError, ValueError) as exc:
            raise PayloadError(f"cannot read phase plane: {exc}") from exc
        out = decompress(payload, phase, _frame_params(args), sample_rate_hz=args.rate)
        write_wav(args.wav, out, float32=args.float_wav)
        return EXIT_OK

    if args.command == "stages":
        signal = read_wav(args.wav)
        cfg = ModwdConfig(args.alpha, _frame_params(args))
        for name, path in export_spectrogram_stages(signal, cfg, args.out_dir, args.format).items():
            print(f"{name}: {path}")
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModwdError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
