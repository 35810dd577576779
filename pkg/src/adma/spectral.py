"""Unitary DFT/IDFT, spectral rotation, and sparse recovery.

The channel's angle-domain representation is its unitary DFT; a diagonal
phase-ramp rotation shifts the underlying DTFT so that off-grid peaks line
up with DFT sample points. Power-of-two sizes use an in-house radix-2 FFT;
a direct O(M^2) evaluation is kept both as the general-size path and as an
independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass
class Spectrum:
    """Rotated DFT-domain channel: values = unitary_dft(rotate(h, phi))."""

    values: np.ndarray
    phi: float

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=32)
def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


@lru_cache(maxsize=64)
def _stage_twiddles(size: int) -> np.ndarray:
    half = size // 2
    return np.exp(-2j * np.pi * np.arange(half) / size)


def fft_radix2(x: np.ndarray) -> np.ndarray:
    """Unnormalized radix-2 DIT FFT along the last axis (length power of two)."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if not _is_pow2(n):
        raise ValueError(f"radix-2 FFT needs a power-of-two length, got {n}")
    y = x[..., _bit_reverse_indices(n)].copy()
    size = 2
    while size <= n:
        half = size // 2
        tw = _stage_twiddles(size)
        v = y.reshape(y.shape[:-1] + (n // size, size))
        t = v[..., half:] * tw
        v[..., half:] = v[..., :half] - t
        v[..., :half] += t
        size *= 2
    return y


@lru_cache(maxsize=16)
def dft_matrix(m: int) -> np.ndarray:
    """Unitary DFT matrix, [F]_pq = exp(-j 2 pi p q / m) / sqrt(m)."""
    p = np.arange(m)
    return np.exp(-2j * np.pi * np.outer(p, p) / m) / math.sqrt(m)


def dft_direct(h: np.ndarray) -> np.ndarray:
    """O(M^2) unitary DFT along the last axis (reference path, any length)."""
    h = np.asarray(h, dtype=np.complex128)
    return h @ dft_matrix(h.shape[-1]).T


def dft(h: np.ndarray) -> np.ndarray:
    """Unitary DFT along the last axis; radix-2 fast path for power-of-two sizes."""
    h = np.asarray(h, dtype=np.complex128)
    m = h.shape[-1]
    if _is_pow2(m):
        return fft_radix2(h) / math.sqrt(m)
    return dft_direct(h)


def idft(v: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT along the last axis."""
    return np.conj(dft(np.conj(np.asarray(v, dtype=np.complex128))))


def rotation_phasor(m: int, phi: float) -> np.ndarray:
    """Diagonal of the rotation matrix: exp(j * m * phi) for m = 0..M-1."""
    return np.exp(1j * phi * np.arange(m))


def rotate(h: np.ndarray, phi: float) -> np.ndarray:
    """Apply the phase-ramp rotation: element m scaled by exp(j*m*phi)."""
    h = np.asarray(h, dtype=np.complex128)
    return h * rotation_phasor(h.shape[-1], phi)


def rotated_spectrum(h: np.ndarray, phi: float) -> Spectrum:
    """DFT of the rotated channel, with the rotation phase recorded."""
    return Spectrum(values=dft(rotate(h, phi)), phi=float(phi))


def predicted_peak(theta_deg: float, m: int, d_over_lambda: float) -> int:
    """Nearest DFT bin to the angle's DTFT peak: round(M*(d/lambda)*sin(theta)) mod M."""
    if not -90.0 < theta_deg < 90.0:
        raise ValueError(f"theta must satisfy |theta| < 90 degrees, got {theta_deg}")
    b0 = np.rint(m * d_over_lambda * math.sin(math.radians(theta_deg)))
    return int(b0) % m


def idft_sparse(window_values: np.ndarray, window, phi: float, m: int) -> np.ndarray:
    """Recover a length-m vector from tau rotated-spectrum bins.

    Zero-pads the spectrum outside `window`, applies the unitary inverse
    DFT, then removes the rotation.
    """
    window = np.asarray(window, dtype=np.int64)
    vals = np.asarray(window_values, dtype=np.complex128)
    if window.ndim != 1 or vals.shape[-1] != window.shape[0]:
        raise ValueError("window and window_values lengths differ")
    if len(set(window.tolist())) != window.shape[0]:
        raise ValueError("duplicate indices in window")
    if window.min() < 0 or window.max() >= m:
        raise ValueError("window indices out of range")
    full = np.zeros(vals.shape[:-1] + (m,), dtype=np.complex128)
    full[..., window] = vals
    return idft(full) * np.conj(rotation_phasor(m, phi))
