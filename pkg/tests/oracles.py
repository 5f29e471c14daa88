"""Independent reference computations used to check the fast code paths.

Nothing here imports the code under test.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def dft_direct(frame, n_fft):
    """Quadratic-time DFT of a zero-padded frame, one-sided bins."""
    x = np.zeros(n_fft)
    x[: len(frame)] = frame
    n = np.arange(n_fft)
    k = np.arange(n_fft // 2 + 1)[:, None]
    return (x[None, :] * np.exp(-2j * np.pi * k * n / n_fft)).sum(axis=1)


def bior37_dec_lo():
    """Analysis lowpass of bior3.7, derived from scratch.

    Unknowns: 8 taps of a symmetric length-16 filter h. Conditions: the
    product with the cubic B-spline synthesis lowpass [1,3,3,1]*sqrt(2)/8 is a
    halfband filter (centre 1, other even-offset taps 0), and the alternating
    sequence (-1)^j h[j] has vanishing odd centred moments 1, 3, 5, giving
    h seven zeros at z = -1.
    """
    g = np.array([1.0, 3.0, 3.0, 1.0]) * np.sqrt(2.0) / 8.0

    def fold(c):
        v = np.zeros(8)
        for j in range(16):
            v[min(j, 15 - j)] += c[j]
        return v

    rows, rhs = [], []
    for idx in (9, 11, 13, 15, 17):
        c = np.zeros(16)
        for j in range(16):
            if 0 <= idx - j < 4:
                c[j] += g[idx - j]
        rows.append(fold(c))
        rhs.append(1.0 if idx == 9 else 0.0)
    j = np.arange(16)
    for m in (1, 3, 5):
        rows.append(fold((-1.0) ** j * (j - 7.5) ** m))
        rhs.append(0.0)
    u = np.linalg.solve(np.array(rows), np.array(rhs))
    return np.concatenate([u, u[::-1]])


def _bessel_i_scaled(n, x):
    """exp(-x) * I_n(x) by quadrature of (1/pi) int_0^pi exp(x cos t) cos(n t) dt."""
    return mp.quad(lambda t: mp.e ** (x * mp.cos(t) - x) * mp.cos(n * t), [0, mp.pi]) / mp.pi


def stsa_gain_oracle(xi, gamma):
    xi, gamma = mp.mpf(xi), mp.mpf(gamma)
    nu = xi * gamma / (1 + xi)
    bracket = (1 + nu) * _bessel_i_scaled(0, nu / 2) + nu * _bessel_i_scaled(1, nu / 2)
    return float(mp.sqrt(mp.pi) / 2 * mp.sqrt(nu) / gamma * bracket)


def e1_oracle(x):
    """Exponential integral E1 by quadrature of exp(-t)/t over [x, inf)."""
    return float(mp.quad(lambda t: mp.e ** (-t) / t, [x, mp.inf]))


def log_stsa_gain_oracle(xi, gamma):
    nu = xi * gamma / (1 + xi)
    return float(mp.mpf(xi) / (1 + xi) * mp.e ** (mp.mpf(e1_oracle(nu)) / 2))


def modulation_energy_above_half_band(plane):
    """Per-row energy of the temporal DFT strictly above a quarter cycle per frame."""
    plane = np.asarray(plane, dtype=np.float64)
    energy = np.abs(np.fft.fft(plane, axis=0)) ** 2
    f = np.abs(np.fft.fftfreq(plane.shape[0]))
    return energy[f > 0.25].sum(axis=0)
