"""Modulation-domain wavelet denoising for speech, with classical enhancers.

The core idea: take the magnitude spectrogram, run a one-level bior3.7 DWT
along time for every frequency bin, shrink the detail half by ``alpha``,
invert, and resynthesise with the noisy phase.
"""

from .dwt import BIOR37, BiorFilterBank, WaveletPair, dwt1, idwt1, make_bior37
from .enhance import (
    CascadeSpec,
    EnhancerSpec,
    GainParams,
    NoisePsd,
    SubtractionParams,
    cascade,
    enhance,
    estimate_noise_initial,
    log_stsa,
    log_stsa_gain,
    spectral_subtract_multiband,
    stsa_gain,
    stsa_mmse,
    wiener_filter,
    wiener_gain,
)
from .metrics import QualityReport, external_score, log_spectral_distance, segmental_snr
from .pipeline import (
    ALPHA_SWEEP,
    ModwdConfig,
    WaveletSpectrogram,
    compress,
    decompose_rows,
    decompress,
    deserialize_approximation_payload,
    export_spectrogram_stages,
    modwd_enhance,
    modwd_magnitude,
    reconstruct_rows,
    scale_detail,
    serialize_approximation_payload,
    spectrogram_stages,
)
from .signal_io import PcmSignal, mix_at_snr, read_wav, write_wav
from .stft import ComplexSpectrogram, FrameParams, MagPhase, hamming_window, istft, stft

__version__ = "0.1.0"
