"""Spatial signature search: rotation phase and tau-bin window selection.

A user's signature is the pair (phi, window): the rotation phase drawn from
a small grid over [-pi/M, pi/M] and the tau cyclically-contiguous DFT bins
holding the most channel energy. The exact criterion scans every window for
every grid phase; three cheaper approximations (max1/max2/max3) reduce the
scan to peak picking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral


class DegenerateInputError(ValueError):
    """Zero-energy input cannot define a signature."""


@dataclass(frozen=True)
class SpatialSignature:
    """Selected rotation phase plus tau contiguous DFT indices."""

    phi: float
    window: tuple[int, ...]
    b_center: int
    score: float

    @property
    def start(self) -> int:
        return self.window[0]

    @property
    def tau(self) -> int:
        return len(self.window)


@dataclass(frozen=True)
class SearchConfig:
    """Phase-grid resolution and selection method."""

    n_grid: int = 3
    method: str = "exact"

    def __post_init__(self):
        if self.n_grid < 1 or self.n_grid % 2 == 0:
            raise ValueError(f"n_grid must be a positive odd integer, got {self.n_grid}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; pick one of {sorted(METHODS)}")


def phi_grid(n_grid: int, m: int) -> np.ndarray:
    """n_grid equally spaced rotation phases spanning [-pi/M, pi/M] inclusive."""
    if n_grid < 1:
        raise ValueError(f"n_grid must be >= 1, got {n_grid}")
    if n_grid == 1:
        return np.array([0.0])
    return np.linspace(-np.pi / m, np.pi / m, n_grid)


def window_from_start(start: int, tau: int, m: int) -> tuple[int, ...]:
    return tuple(int((start + i) % m) for i in range(tau))


def centered_window(b_center: int, tau: int, m: int) -> tuple[int, ...]:
    """Window {b - floor(tau/2), ..., b + ceil(tau/2) - 1} mod M."""
    return window_from_start((b_center - tau // 2) % m, tau, m)


def window_energies(a: np.ndarray, tau: int) -> np.ndarray:
    """Cyclic sliding-window sums along the last axis: out[s] = sum a[s:s+tau]."""
    m = a.shape[-1]
    ext = np.concatenate([a, a[..., : tau - 1]], axis=-1)
    cs = np.cumsum(ext, axis=-1)
    zero = np.zeros(a.shape[:-1] + (1,), dtype=cs.dtype)
    cs = np.concatenate([zero, cs], axis=-1)
    return cs[..., tau:] - cs[..., :m]


def energy_ratio(spectrum, window) -> float:
    """Fraction of spectral energy inside `window`, in [0, 1]."""
    values = spectrum.values if isinstance(spectrum, spectral.Spectrum) else spectrum
    values = np.asarray(values)
    total = float(np.sum(np.abs(values) ** 2))
    if total == 0.0:
        raise DegenerateInputError("zero spectrum has no energy ratio")
    idx = np.asarray(window, dtype=np.int64)
    return float(np.sum(np.abs(values[idx]) ** 2)) / total


def _rotated_power(h: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """|rotated spectrum|^2 for every grid phase: shape (n_grid, M)."""
    m = h.shape[-1]
    ramps = np.exp(1j * np.outer(phis, np.arange(m)))
    spectra = spectral.dft(h[np.newaxis, :] * ramps)
    return np.abs(spectra) ** 2


def _check_energy(h: np.ndarray):
    if not np.any(h):
        raise DegenerateInputError("zero-energy input has no signature")


def cyclic_midpoint(i: int, j: int, m: int) -> int:
    """Midpoint of the shortest arc between bins i and j, half-steps rounded
    toward the lower index; antipodal ties take the arc from min(i, j)."""
    d_fwd = (j - i) % m
    d_bwd = (i - j) % m
    if d_fwd < d_bwd:
        start, arc = i, d_fwd
    elif d_bwd < d_fwd:
        start, arc = j, d_bwd
    else:
        start, arc = min(i, j), d_fwd
    if arc % 2 == 1:
        # half-step tie: prefer the lower of the two candidate bins
        cands = ((start + arc // 2) % m, (start + arc // 2 + 1) % m)
        return min(cands)
    return (start + arc // 2) % m


def select_exact(power: np.ndarray, phis: np.ndarray, tau: int) -> SpatialSignature:
    """Exhaustive scan of all (phi, window) pairs maximizing the energy ratio."""
    m = power.shape[-1]
    if tau == m:
        # every window holds everything; ties resolve to the first grid phase
        # and the window starting at bin 0
        return SpatialSignature(phi=float(phis[0]), window=window_from_start(0, tau, m),
                                b_center=tau // 2 % m, score=1.0)
    totals = power.sum(axis=-1, keepdims=True)
    ratios = window_energies(power, tau) / totals
    flat = int(np.argmax(ratios))          # first occurrence: lowest phi, lowest start
    pi, start = divmod(flat, m)
    window = window_from_start(start, tau, m)
    return SpatialSignature(phi=float(phis[pi]), window=window,
                            b_center=(start + tau // 2) % m,
                            score=float(ratios[pi, start]))


def select_max1(power: np.ndarray, phis: np.ndarray, tau: int) -> SpatialSignature:
    """Largest single squared magnitude over all grid phases."""
    m = power.shape[-1]
    peaks = np.argmax(power, axis=-1)
    peak_vals = power[np.arange(power.shape[0]), peaks]
    pi = int(np.argmax(peak_vals))
    b = int(peaks[pi])
    return SpatialSignature(phi=float(phis[pi]), window=centered_window(b, tau, m),
                            b_center=b, score=float(peak_vals[pi]))


def select_max2(power: np.ndarray, phis: np.ndarray, tau: int) -> SpatialSignature:
    """Sum of the two largest squared magnitudes; center between the two peaks."""
    m = power.shape[-1]
    best = None
    for pi in range(power.shape[0]):
        a = power[pi]
        i1 = int(np.argmax(a))
        masked = a.copy()
        masked[i1] = -np.inf
        i2 = int(np.argmax(masked))
        score = float(a[i1] + a[i2])
        if best is None or score > best[0]:
            best = (score, pi, i1, i2)
    score, pi, i1, i2 = best
    b = cyclic_midpoint(i1, i2, m)
    return SpatialSignature(phi=float(phis[pi]), window=centered_window(b, tau, m),
                            b_center=b, score=score)


def select_max3(power: np.ndarray, phis: np.ndarray, tau: int) -> SpatialSignature:
    """Energy of the tau-window centered on each phase's peak bin (no division)."""
    m = power.shape[-1]
    energies = window_energies(power, tau)
    peaks = np.argmax(power, axis=-1)
    starts = (peaks - tau // 2) % m
    scores = energies[np.arange(power.shape[0]), starts]
    pi = int(np.argmax(scores))
    b = int(peaks[pi])
    return SpatialSignature(phi=float(phis[pi]), window=centered_window(b, tau, m),
                            b_center=b, score=float(scores[pi]))


_SELECTORS = {
    "exact": select_exact,
    "max1": select_max1,
    "max2": select_max2,
    "max3": select_max3,
}
METHODS = frozenset(_SELECTORS)


def _search(h: np.ndarray, tau: int, search: SearchConfig, method: str) -> SpatialSignature:
    h = np.asarray(h, dtype=np.complex128)
    m = h.shape[-1]
    if tau > m:
        raise ValueError(f"need tau <= M, got tau={tau}, M={m}")
    _check_energy(h)
    phis = phi_grid(search.n_grid, m)
    power = _rotated_power(h, phis)
    return _SELECTORS[method](power, phis, tau)


def signature_exact(h, tau: int, search: SearchConfig) -> SpatialSignature:
    return _search(h, tau, search, "exact")


def signature_max1(h, tau: int, search: SearchConfig) -> SpatialSignature:
    return _search(h, tau, search, "max1")


def signature_max2(h, tau: int, search: SearchConfig) -> SpatialSignature:
    return _search(h, tau, search, "max2")


def signature_max3(h, tau: int, search: SearchConfig) -> SpatialSignature:
    return _search(h, tau, search, "max3")


def find_signature(h, tau: int, search: SearchConfig) -> SpatialSignature:
    """Dispatch on search.method."""
    return _search(h, tau, search, search.method)


def reciprocity_map(sig_ul: SpatialSignature, lambda_ratio: float,
                    m: int) -> SpatialSignature:
    """Map an uplink signature to downlink via angle reciprocity.

    Window endpoints scale by lambda_ul/lambda_dl (floor the minimum, ceil
    the maximum); the downlink window is the tau-bin window centered on the
    scaled span. The rotation phase scales by the same ratio, clamped to
    [-pi/M, pi/M].
    """
    tau = sig_ul.tau
    q_min = sig_ul.start
    q_max = q_min + tau - 1                     # unwrapped endpoint
    qb_min = math.floor(lambda_ratio * q_min)
    qb_max = math.ceil(lambda_ratio * q_max)
    center = (qb_min + qb_max + 1) // 2
    window = centered_window(center % m, tau, m)
    bound = np.pi / m
    phi = min(max(lambda_ratio * sig_ul.phi, -bound), bound)
    return SpatialSignature(phi=float(phi), window=window,
                            b_center=center % m, score=sig_ul.score)
