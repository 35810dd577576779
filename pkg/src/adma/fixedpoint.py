"""Bit-accurate fixed[1,p,q] arithmetic and quantized pipeline kernels.

Values are signed integers at scale 2^-q with p integer bits and one sign
bit. Rounding is round-to-nearest with ties to even; overflow saturates at
+-(2^p - 2^-q). Complex multiplies compute full-precision products, round
once after accumulation, then saturate. Unit-modulus coefficient tables
(twiddles, rotation phasors, inverse-DFT entries) are quantized in the same
format as the data; the 1/sqrt(M) transform scale is realized by rounded
halvings plus one quantized 1/sqrt(2) multiply when log2(M) is odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import ConfigurationError


@dataclass(frozen=True)
class FixedFormat:
    """fixed[1,p,q]: one sign bit, p integer bits, q fractional bits."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ConfigurationError(f"p and q must be >= 0, got p={self.p}, q={self.q}")
        if self.p + self.q + 1 > 64:
            raise ConfigurationError(
                f"format fixed[1,{self.p},{self.q}] exceeds 64 bits")

    @property
    def step(self) -> float:
        return 2.0 ** -self.q

    @property
    def max_int(self) -> int:
        return (1 << (self.p + self.q)) - 1

    @property
    def max_value(self) -> float:
        """Saturation bound 2^p - 2^-q."""
        return self.max_int * self.step

    @property
    def wide(self) -> bool:
        """True when int64 cannot hold full-precision products safely."""
        return 2 * (self.p + self.q) + 12 > 63

    def __str__(self):
        return f"1,{self.p},{self.q}"


def parse_format(text: str) -> FixedFormat:
    """Parse '1,p,q' (optionally prefixed 'fixed:') into a FixedFormat."""
    body = text.strip()
    if body.startswith("fixed:"):
        body = body[len("fixed:"):]
    parts = [s.strip() for s in body.split(",")]
    if len(parts) != 3 or parts[0] != "1":
        raise ConfigurationError(f"expected format '1,p,q', got {text!r}")
    try:
        p, q = int(parts[1]), int(parts[2])
    except ValueError as e:
        raise ConfigurationError(f"expected format '1,p,q', got {text!r}") from e
    return FixedFormat(p=p, q=q)


# ---------------------------------------------------------------------------
# scalar/array quantization


def _int_dtype(fmt: FixedFormat):
    return object if fmt.wide else np.int64


def to_int(x, fmt: FixedFormat):
    """Round x to the nearest multiple of 2^-q (ties to even), saturate,
    return the scaled integer representation."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise ValueError("cannot quantize NaN")
    scaled = np.clip(np.rint(arr * (1 << fmt.q)), -fmt.max_int, fmt.max_int)
    out = np.asarray(scaled).astype(np.int64)
    if fmt.wide:
        out = out.astype(object)
    return out if out.ndim else out[()]


def from_int(v, fmt: FixedFormat):
    """Integer representation back to the real value it encodes."""
    arr = np.asarray(v, dtype=np.float64)
    out = arr * fmt.step
    return out if out.ndim else float(out)


def quantize(x, fmt: FixedFormat):
    """Nearest representable value under fixed[1,p,q]."""
    return from_int(to_int(x, fmt), fmt)


def _saturate(v, fmt: FixedFormat):
    return np.minimum(np.maximum(v, -fmt.max_int), fmt.max_int)


def _round_shift_even(v, shift: int):
    """Arithmetic right shift by `shift` with round-to-nearest, ties to even."""
    if shift == 0:
        return v
    base = v >> shift
    rem = v - (base << shift)
    half = 1 << (shift - 1)
    up = (rem > half) | ((rem == half) & ((base & 1) == 1))
    return base + up


# ---------------------------------------------------------------------------
# complex fixed arithmetic


@dataclass(frozen=True)
class FixedComplex:
    """Complex value as a pair of scaled integers under a shared format."""

    re: int
    im: int
    fmt: FixedFormat

    @classmethod
    def from_complex(cls, z, fmt: FixedFormat) -> "FixedComplex":
        z = complex(z)
        return cls(re=int(to_int(z.real, fmt)), im=int(to_int(z.imag, fmt)), fmt=fmt)

    @property
    def value(self) -> complex:
        return complex(self.re * self.fmt.step, self.im * self.fmt.step)


def fx_add(a: FixedComplex, b: FixedComplex, fmt: FixedFormat) -> FixedComplex:
    """Exact integer add with saturation."""
    return FixedComplex(re=int(_saturate(a.re + b.re, fmt)),
                        im=int(_saturate(a.im + b.im, fmt)), fmt=fmt)


def fx_mul(a: FixedComplex, b: FixedComplex, fmt: FixedFormat) -> FixedComplex:
    """4 real multiplies + 2 adds at full precision, one rounding, saturate."""
    rr, ii = _cmul(np.asarray(a.re, dtype=object), np.asarray(a.im, dtype=object),
                   np.asarray(b.re, dtype=object), np.asarray(b.im, dtype=object),
                   fmt)
    return FixedComplex(re=int(rr), im=int(ii), fmt=fmt)


def _cmul(ar, ai, br, bi, fmt: FixedFormat):
    """Complex multiply on integer arrays: full products, round after
    accumulation, saturate."""
    rr = _round_shift_even(ar * br - ai * bi, fmt.q)
    ri = _round_shift_even(ar * bi + ai * br, fmt.q)
    return _saturate(rr, fmt), _saturate(ri, fmt)


def qc_from_complex(x, fmt: FixedFormat):
    """Quantize a complex array to an integer (re, im) pair."""
    x = np.asarray(x, dtype=np.complex128)
    return to_int(x.real, fmt), to_int(x.imag, fmt)


def qc_to_complex(re, im, fmt: FixedFormat) -> np.ndarray:
    return np.asarray(from_int(re, fmt)) + 1j * np.asarray(from_int(im, fmt))


def qc_add(a, b, fmt: FixedFormat):
    return _saturate(a[0] + b[0], fmt), _saturate(a[1] + b[1], fmt)


def qc_mul(a, b, fmt: FixedFormat):
    return _cmul(a[0], a[1], b[0], b[1], fmt)


# ---------------------------------------------------------------------------
# quantized transform kernels


@lru_cache(maxsize=32)
def _bitrev(n: int) -> tuple:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return tuple(rev.tolist())


@lru_cache(maxsize=128)
def _twiddles_q(size: int, fmt: FixedFormat, inverse: bool):
    k = np.arange(size // 2)
    sign = 1.0 if inverse else -1.0
    w = np.exp(sign * 2j * np.pi * k / size)
    return qc_from_complex(w, fmt)


@lru_cache(maxsize=256)
def _phasor_q(m: int, phi: float, fmt: FixedFormat, conj: bool):
    sign = -1.0 if conj else 1.0
    ramp = np.exp(sign * 1j * phi * np.arange(m))
    return qc_from_complex(ramp, fmt)


@lru_cache(maxsize=16)
def _inv_sqrt2_q(fmt: FixedFormat) -> int:
    return int(to_int(1.0 / math.sqrt(2.0), fmt))


def rotate_q(re, im, phi: float, fmt: FixedFormat, conj: bool = False):
    """Elementwise multiply by the quantized rotation phasor exp(+-j*m*phi)."""
    pr, pi = _phasor_q(re.shape[-1], float(phi), fmt, conj)
    return _cmul(re, im, pr, pi, fmt)


def _scale_inv_sqrt2(re, im, fmt: FixedFormat):
    c = _inv_sqrt2_q(fmt)
    re = _saturate(_round_shift_even(re * c, fmt.q), fmt)
    im = _saturate(_round_shift_even(im * c, fmt.q), fmt)
    return re, im


def qfft(re, im, fmt: FixedFormat, inverse: bool = False):
    """Unitary-scaled radix-2 FFT on quantized data along the last axis.

    Butterflies quantize after each twiddle multiply; a rounded halving
    after every second stage plus one quantized 1/sqrt(2) multiply (when
    log2(M) is odd) realizes the 1/sqrt(M) scale while keeping intermediate
    magnitudes near the unitary trajectory.
    """
    n = re.shape[-1]
    bits = n.bit_length() - 1
    if 1 << bits != n:
        raise ValueError(f"quantized FFT needs a power-of-two length, got {n}")
    perm = list(_bitrev(n))
    re = re[..., perm].copy()
    im = im[..., perm].copy()
    stage = 0
    size = 2
    while size <= n:
        half = size // 2
        twr, twi = _twiddles_q(size, fmt, inverse)
        vr = re.reshape(re.shape[:-1] + (n // size, size))
        vi = im.reshape(im.shape[:-1] + (n // size, size))
        tr, ti = _cmul(vr[..., half:], vi[..., half:], twr, twi, fmt)
        vr[..., half:] = _saturate(vr[..., :half] - tr, fmt)
        vi[..., half:] = _saturate(vi[..., :half] - ti, fmt)
        vr[..., :half] = _saturate(vr[..., :half] + tr, fmt)
        vi[..., :half] = _saturate(vi[..., :half] + ti, fmt)
        stage += 1
        if stage % 2 == 0:
            re = _round_shift_even(re, 1)
            im = _round_shift_even(im, 1)
        size *= 2
    if bits % 2 == 1:
        re, im = _scale_inv_sqrt2(re, im, fmt)
    return re, im


def power_q(re, im, fmt: FixedFormat):
    """Quantized squared magnitude |re + j*im|^2 (rounded to the 2^-q grid;
    accumulated at full width, not saturated, matching a wide accumulator)."""
    return _round_shift_even(re * re + im * im, fmt.q)


@lru_cache(maxsize=16)
def _idft_table_q(m: int, fmt: FixedFormat):
    p = np.arange(m)
    w = np.exp(2j * np.pi * np.outer(p, p) / m)      # unit-modulus inverse-DFT entries
    return qc_from_complex(w, fmt)


def sparse_idft_q(wre, wim, windows, phis, fmt: FixedFormat, m: int):
    """Quantized sparse recovery: per-user (M x tau) multiply by the
    unit-modulus inverse-DFT columns, unitary scaling, then de-rotation.

    wre/wim: (K, tau) ints; windows: (K, tau) bin indices; phis: (K,).
    Returns (re, im) of shape (K, M).
    """
    tr, ti = _idft_table_q(m, fmt)
    windows = np.asarray(windows, dtype=np.int64)
    bits = m.bit_length() - 1
    if wre.dtype == object or fmt.wide:
        outs_r, outs_i = [], []
        for k in range(windows.shape[0]):
            cr = tr[:, windows[k]].astype(object)
            ci = ti[:, windows[k]].astype(object)
            vr, vi = wre[k], wim[k]
            outs_r.append((cr * vr - ci * vi).sum(axis=-1))
            outs_i.append((cr * vi + ci * vr).sum(axis=-1))
        acc_r = np.stack(outs_r)
        acc_i = np.stack(outs_i)
    else:
        cr = tr[:, windows]                          # (M, K, tau)
        ci = ti[:, windows]
        acc_r = np.einsum("mkt,kt->km", cr, wre) - np.einsum("mkt,kt->km", ci, wim)
        acc_i = np.einsum("mkt,kt->km", cr, wim) + np.einsum("mkt,kt->km", ci, wre)
    re = _round_shift_even(acc_r, fmt.q)             # products back to q fractional bits
    re = _round_shift_even(re, bits // 2)            # 2^-(bits//2) of the 1/sqrt(M) scale
    im = _round_shift_even(acc_i, fmt.q)
    im = _round_shift_even(im, bits // 2)
    re, im = _saturate(re, fmt), _saturate(im, fmt)
    if bits % 2 == 1:
        re, im = _scale_inv_sqrt2(re, im, fmt)
    out_r = np.empty_like(re)
    out_i = np.empty_like(im)
    for k in range(windows.shape[0]):
        out_r[k], out_i[k] = rotate_q(re[k], im[k], float(phis[k]), fmt, conj=True)
    return out_r, out_i


# ---------------------------------------------------------------------------
# magnitude statistics


@dataclass
class MagnitudeStats:
    """Per-draw maxima of the quantization-relevant signals."""

    max_h: np.ndarray          # largest |component| of h per draw
    max_spec: np.ndarray       # largest |component| of the rotated spectrum per draw
    max_abs: np.ndarray        # largest magnitude of the rotated spectrum per draw

    @property
    def overall_max(self) -> float:
        return float(max(self.max_h.max(), self.max_spec.max(), self.max_abs.max()))

    def histogram(self, bins: int = 50):
        data = np.concatenate([self.max_h, self.max_spec, self.max_abs])
        return np.histogram(data, bins=bins)


def magnitude_stats(h_samples, n_grid: int = 3) -> MagnitudeStats:
    """Maxima of |h| components, rotated-spectrum components, and rotated-
    spectrum magnitudes over a batch of channel vectors (rows)."""
    from . import spectral
    from .signature import phi_grid

    H = np.atleast_2d(np.asarray(h_samples, dtype=np.complex128))
    if H.shape[0] < 1:
        raise ValueError("need at least one sample")
    m = H.shape[-1]
    phis = phi_grid(n_grid, m)
    ramps = np.exp(1j * np.outer(phis, np.arange(m)))
    spectra = spectral.dft(H[:, None, :] * ramps[None, :, :])   # (n, n_grid, M)
    comp_h = np.maximum(np.abs(H.real), np.abs(H.imag)).max(axis=-1)
    comp_s = np.maximum(np.abs(spectra.real), np.abs(spectra.imag)).max(axis=(-1, -2))
    mag_s = np.abs(spectra).max(axis=(-1, -2))
    return MagnitudeStats(max_h=comp_h, max_spec=comp_s, max_abs=mag_s)


def run_quantized(config, channels, fmt: FixedFormat, method: str = "max3",
                  n_grid: int = 3, rng_seed=0):
    """Full preamble + uplink pipeline in quantized arithmetic.

    Convenience wrapper over the estimation pipeline with a fixed-point
    arithmetic mode; see estimation.run_pipeline.
    """
    from . import estimation

    return estimation.run_pipeline(config, channels, method=method, n_grid=n_grid,
                                   rng_seed=rng_seed, arithmetic=fmt)
