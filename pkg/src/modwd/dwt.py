"""One-level biorthogonal DWT / inverse DWT along an array axis.

Naming: in "bior3.7" the 3 is the order of the synthesis (reconstruction)
B-spline lowpass ``[1, 3, 3, 1] * sqrt(2) / 8`` and the 7 is the order of the
dual analysis (decomposition) lowpass. The analysis highpass is therefore
short (4 taps, 3 vanishing moments) and the synthesis highpass long.
All four filters are stored zero-padded to a common length of 16.

Boundaries use half-sample symmetric extension (``... x1 x0 | x0 x1 ...``)
by ``filter_len - 1`` samples on each side, which gives perfect
reconstruction for every input length >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentPair, SequenceTooShort

_S = np.sqrt(2.0) / 8.0  # 0.1767766952966369

# analysis lowpass, dual of the cubic B-spline (symmetric, 16 taps)
_BIOR37_DEC_LO_HALF = (
    0.0030210861012608843,
    -0.009063258303782653,
    -0.01683176542131064,
    0.074663985074019,
    0.03133297870736289,
    -0.301159125922835,
    -0.02649924094534547,
    0.9516421218971786,
)


@dataclass(frozen=True)
class BiorFilterBank:
    name: str
    dec_lo: np.ndarray
    dec_hi: np.ndarray
    rec_lo: np.ndarray
    rec_hi: np.ndarray

    @property
    def filter_len(self) -> int:
        return self.dec_lo.shape[0]

    def coeff_len(self, n: int) -> int:
        """Length of each coefficient sequence for an input of length ``n``."""
        return (n + self.filter_len - 1) // 2

    @property
    def mirrored_edge(self) -> int:
        """Approximation coefficients at each end that duplicate interior ones.

        With half-sample symmetric extension and a symmetric analysis lowpass
        whose length is a multiple of 4, the approximation sequence is itself
        symmetric about index (filter_len - 4) / 4 at the start and about the
        matching point at the end. Zero when that structure is absent.
        """
        f = self.filter_len
        if f % 4 or not np.array_equal(self.dec_lo, self.dec_lo[::-1]):
            return 0
        return (f - 4) // 4

    def compact_len(self, n: int) -> int:
        """Number of approximation coefficients needed to restore all of them."""
        t = self.mirrored_edge
        if t == 0 or n < self.filter_len:
            return self.coeff_len(n)
        return self.coeff_len(n) - 2 * t

    def compact_approx(self, approx: np.ndarray, n: int) -> np.ndarray:
        """Drop the mirrored edge coefficients (see :meth:`expand_approx`)."""
        t = self.mirrored_edge
        if self.compact_len(n) == self.coeff_len(n):
            return approx
        return approx[t : approx.shape[0] - t]

    def expand_approx(self, core: np.ndarray, n: int) -> np.ndarray:
        """Inverse of :meth:`compact_approx` for an input of length ``n``."""
        t = self.mirrored_edge
        if self.compact_len(n) == self.coeff_len(n):
            return core
        left = core[t:0:-1]
        # whole-sample symmetry at the end for even n, half-sample for odd n
        skip = 2 if n % 2 == 0 else 3
        right = core[core.shape[0] - skip + 1 - t : core.shape[0] - skip + 1][::-1]
        return np.concatenate([left, core, right])

    def self_test(self, tol: float = 1e-10) -> None:
        """Raise ``AssertionError`` if the bank is not a valid PR pair."""
        if abs(self.dec_hi.sum()) > 1e-12:
            raise AssertionError(f"{self.name}: analysis highpass has nonzero DC gain")
        if abs(self.dec_lo.sum() - np.sqrt(2.0)) > 1e-12:
            raise AssertionError(f"{self.name}: analysis lowpass DC gain != sqrt(2)")
        rng = np.random.default_rng(0)
        for n in (2, 3, 8, 9, 32, 33):
            for seq in (np.eye(n)[0], rng.standard_normal(n)):
                err = np.max(np.abs(idwt1(dwt1(seq, self), self) - seq))
                if err > tol:
                    raise AssertionError(
                        f"{self.name}: reconstruction error {err:.3g} at length {n}"
                    )


def make_bior37() -> BiorFilterBank:
    """Embedded bior3.7 filters, checked by :meth:`BiorFilterBank.self_test`."""
    half = np.array(_BIOR37_DEC_LO_HALF)
    dec_lo = np.concatenate([half, half[::-1]])
    spline = np.zeros(16)
    spline[6:10] = [_S, 3 * _S, 3 * _S, _S]
    rec_lo = spline
    dec_hi = spline * np.array([-1.0, 1.0] * 8)
    rec_hi = dec_lo * np.array([1.0, -1.0] * 8)
    return BiorFilterBank("bior3.7", dec_lo, dec_hi, rec_lo, rec_hi)


@dataclass(frozen=True)
class WaveletPair:
    """Approximation and detail coefficients of a one-level DWT.

    Coefficients run along axis 0; trailing axes (e.g. frequency bins) are
    carried along untouched.
    """

    approx: np.ndarray
    detail: np.ndarray
    original_len: int

    def __post_init__(self):
        if self.approx.shape != self.detail.shape:
            raise InconsistentPair(
                f"approx {self.approx.shape} and detail {self.detail.shape} differ"
            )

    def scaled(self, approx_gain: float = 1.0, detail_gain: float = 1.0) -> WaveletPair:
        return WaveletPair(self.approx * approx_gain, self.detail * detail_gain, self.original_len)


def _filter_axis0(x: np.ndarray, taps: np.ndarray, start: int, count: int, step: int) -> np.ndarray:
    """y[i] = sum_j taps[j] * x[start + step*i - j]  (full convolution, sliced).

    Symmetric taps are applied as taps[j] * (x[p] + x[q]) over mirrored
    pairs, so outputs whose input windows are mirror images of each other
    come out bitwise equal.
    """
    out = np.zeros((count,) + x.shape[1:])
    stop = start + step * (count - 1) + 1
    f = taps.shape[0]
    if f % 2 == 0 and np.array_equal(taps, taps[::-1]):
        for j in range(f // 2):
            if taps[j] != 0.0:
                q = f - 1 - j
                out += taps[j] * (x[start - j : stop - j : step] + x[start - q : stop - q : step])
        return out
    for j, t in enumerate(taps):
        if t != 0.0:
            out += t * x[start - j : stop - j : step]
    return out


def dwt1(seq, bank: BiorFilterBank) -> WaveletPair:
    """One-level analysis along axis 0 with half-sample symmetric extension."""
    x = np.asarray(seq, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise SequenceTooShort(f"need at least 2 samples, got {n}")
    f = bank.filter_len
    pad = [(f - 1, f - 1)] + [(0, 0)] * (x.ndim - 1)
    # numpy keeps reflecting when f - 1 exceeds n
    ext = np.pad(x, pad, mode="symmetric")
    m = bank.coeff_len(n)
    approx = _filter_axis0(ext, bank.dec_lo, f, m, 2)
    detail = _filter_axis0(ext, bank.dec_hi, f, m, 2)
    return WaveletPair(approx, detail, n)


def idwt1(pair: WaveletPair, bank: BiorFilterBank) -> np.ndarray:
    """Inverse of :func:`dwt1`; output has ``pair.original_len`` samples."""
    m = pair.approx.shape[0]
    f = bank.filter_len
    if m != bank.coeff_len(pair.original_len):
        raise InconsistentPair(
            f"{m} coefficients cannot come from {pair.original_len} samples"
        )
    shape = (2 * m,) + pair.approx.shape[1:]
    up_a = np.zeros(shape)
    up_d = np.zeros(shape)
    up_a[::2] = pair.approx
    up_d[::2] = pair.detail
    # zero-extend on the left so negative indices of the full convolution read 0
    lead = [(f, 0)] + [(0, 0)] * (up_a.ndim - 1)
    up_a = np.pad(up_a, lead)
    up_d = np.pad(up_d, lead)
    n = pair.original_len
    start = f + f - 2
    out = _filter_axis0(up_a, bank.rec_lo, start, n, 1)
    out += _filter_axis0(up_d, bank.rec_hi, start, n, 1)
    return out


BIOR37 = make_bior37()
BIOR37.self_test()
