"""Monte-Carlo MSE sweeps over SNR, search method, arithmetic mode, and
phase-grid size.

The sweep evaluates the preamble + UL pipeline with all randomness derived
from (seed, trial, snr index), so every method, mode, and grid size sees
identical channels and noise within a trial. Pilot despreading is applied
in its algebraically reduced form (orthogonal pilots make Y s_k / (L s_p^2)
equal to the user sum plus white noise of known variance), which is exact
and keeps large sweeps tractable; the structural matrix pipeline is the
same computation and is cross-checked in the tests.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import fixedpoint as fx
from . import spectral
from .channel import channel_from_rays
from .config import ConfigurationError, SystemConfig
from .fixedpoint import FixedFormat, parse_format
from .grouping import intervals_compatible
from .signature import METHODS, cyclic_midpoint, phi_grid, window_energies


@dataclass
class SweepSpec:
    """What to sweep: SNR points, trial count, methods, arithmetic modes,
    phase-grid sizes, and the master seed."""

    snr_list: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 10_000
    methods: tuple = ("exact",)
    modes: tuple = ("float",)
    n_grid_list: tuple = (3,)
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        for name, lst in (("snr_list", self.snr_list), ("methods", self.methods),
                          ("modes", self.modes), ("n_grid_list", self.n_grid_list)):
            if not lst:
                raise ConfigurationError(f"{name} must be nonempty")
        for mth in self.methods:
            if mth not in METHODS:
                raise ConfigurationError(f"unknown method {mth!r}")
        for mode in self.modes:
            if mode != "float":
                parse_format(mode)  # raises ConfigurationError if malformed
        for n in self.n_grid_list:
            if n < 1 or n % 2 == 0:
                raise ConfigurationError(f"n_grid must be positive odd, got {n}")


@dataclass
class SweepRow:
    snr_db: float
    method: str
    mode: str
    n_grid: int
    ensemble_mse: float
    mean_mse: float
    trials: int


CSV_HEADER = "snr_db,method,mode,n_grid,ensemble_mse,mean_mse,trials"


def rows_to_csv(rows) -> str:
    """Serialize rows with standard CSV quoting (mode names contain commas)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in rows:
        writer.writerow([repr(r.snr_db), r.method, r.mode, r.n_grid,
                         repr(r.ensemble_mse), repr(r.mean_mse), r.trials])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# batched drawing and selection


def draw_channel_batch(config: SystemConfig, rng: np.random.Generator):
    """Draw all K user channels at once: rays uniform around each user's
    nominal DOA, gains i.i.d. CN(0,1). Returns (h (K,M), angles, gains)."""
    thetas = np.asarray(config.user_thetas())
    p = config.P_rays
    angles = rng.uniform(thetas[:, None] - config.delta_theta_deg,
                         thetas[:, None] + config.delta_theta_deg,
                         size=(config.K, p))
    gains = (rng.standard_normal((config.K, p)) +
             1j * rng.standard_normal((config.K, p))) / math.sqrt(2.0)
    phase = 2.0 * np.pi * config.d_over_lambda_ul * np.sin(np.radians(angles))
    a = np.exp(1j * phase[..., None] * np.arange(config.M))
    h = np.einsum("kp,kpm->km", gains, a) / math.sqrt(p)
    return h, angles, gains


def channels_from_batch(config: SystemConfig, angles, gains, h=None):
    """UserChannel objects from a batch draw (for the structural pipeline).

    Passing the batch-computed `h` reuses its rows verbatim, so both
    pipelines see bit-identical channels; otherwise each row is rebuilt
    from the rays (equal to within a few ulp).
    """
    thetas = config.user_thetas()
    users = [channel_from_rays(thetas[k], angles[k], gains[k],
                               config.M, config.d_over_lambda_ul)
             for k in range(config.K)]
    if h is not None:
        for k, user in enumerate(users):
            user.h = np.array(h[k])
    return users


def _cnoise(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _midpoints_vec(i: np.ndarray, j: np.ndarray, m: int) -> np.ndarray:
    d_fwd = (j - i) % m
    d_bwd = (i - j) % m
    start = np.where(d_fwd < d_bwd, i, np.where(d_bwd < d_fwd, j, np.minimum(i, j)))
    arc = np.minimum(d_fwd, d_bwd)
    c1 = (start + arc // 2) % m
    c2 = (c1 + 1) % m
    return np.where(arc % 2 == 1, np.minimum(c1, c2), c1)


def select_batch(power: np.ndarray, tau: int, method: str):
    """Vectorized per-user signature selection on (K, n_grid, M) powers.

    Returns (phi_index, window_start, b_center) arrays of shape (K,).
    Matches the per-user selectors, including first-occurrence tie-breaks.
    """
    K, n, m = power.shape
    ar = np.arange(K)
    if method == "exact":
        if tau == m:
            z = np.zeros(K, dtype=np.int64)
            return z, z.copy(), np.full(K, tau // 2 % m, dtype=np.int64)
        ratios = window_energies(power, tau) / power.sum(axis=-1, keepdims=True)
        flat = ratios.reshape(K, -1).argmax(axis=1)
        pi, start = np.divmod(flat, m)
        return pi, start, (start + tau // 2) % m
    if method == "max1":
        peaks = power.argmax(axis=-1)
        vals = np.take_along_axis(power, peaks[..., None], axis=-1)[..., 0]
        pi = vals.argmax(axis=1)
        b = peaks[ar, pi]
        return pi, (b - tau // 2) % m, b
    if method == "max3":
        energies = window_energies(power, tau)
        peaks = power.argmax(axis=-1)
        starts = (peaks - tau // 2) % m
        scores = np.take_along_axis(energies, starts[..., None], axis=-1)[..., 0]
        pi = scores.argmax(axis=1)
        b = peaks[ar, pi]
        return pi, starts[ar, pi], b
    if method == "max2":
        i1 = power.argmax(axis=-1)
        v1 = np.take_along_axis(power, i1[..., None], axis=-1)[..., 0]
        masked = power.copy()
        np.put_along_axis(masked, i1[..., None], -np.inf, axis=-1)
        i2 = masked.argmax(axis=-1)
        v2 = np.take_along_axis(power, i2[..., None], axis=-1)[..., 0]
        pi = (v1 + v2).argmax(axis=1)
        b = _midpoints_vec(i1[ar, pi], i2[ar, pi], m)
        return pi, (b - tau // 2) % m, b
    raise ConfigurationError(f"unknown method {method!r}")


def greedy_grouping(starts: np.ndarray, b_centers: np.ndarray, tau: int,
                    omega: int, m: int) -> np.ndarray:
    """First-fit grouping on window starts, users taken in b_center order.

    Returns group index per user (same semantics as grouping.group_users)."""
    K = starts.shape[0]
    order = sorted(range(K), key=lambda k: (int(b_centers[k]), k))
    group_idx = np.empty(K, dtype=np.int64)
    groups: list[list[int]] = []
    for k in order:
        sk = int(starts[k])
        for g, members in enumerate(groups):
            if len(members) >= tau:
                continue
            if all(intervals_compatible(sk, tau, s, tau, omega, m) for s in members):
                members.append(sk)
                group_idx[k] = g
                break
        else:
            groups.append([sk])
            group_idx[k] = len(groups) - 1
    return group_idx


# ---------------------------------------------------------------------------
# per-trial evaluation


def _float_spectra_power(h_hat: np.ndarray, ramps: np.ndarray):
    """Rotated spectra for all users and grid phases: (K, n_grid, M)."""
    spectra = spectral.dft(h_hat[:, None, :] * ramps[None, :, :])
    return spectra, np.abs(spectra) ** 2


def _float_ul_estimates(y_user: np.ndarray, ramps: np.ndarray, pi: np.ndarray,
                        starts: np.ndarray, tau: int, sqrt_d: np.ndarray):
    """Rotate, transform, gather the window, recover, derotate — all users."""
    K, m = y_user.shape
    rot = ramps[pi]
    spectra = spectral.dft(y_user * rot) / sqrt_d[:, None]
    idx = (starts[:, None] + np.arange(tau)) % m
    vals = np.take_along_axis(spectra, idx, axis=1)
    full = np.zeros((K, m), dtype=np.complex128)
    np.put_along_axis(full, idx, vals, axis=1)
    return spectral.idft(full) * np.conj(rot)


def _quantized_power(h_hat: np.ndarray, phis: np.ndarray, fmt: FixedFormat):
    hq = fx.qc_from_complex(h_hat, fmt)
    rows = []
    for phi in phis:
        rr, ri = fx.rotate_q(hq[0], hq[1], float(phi), fmt)
        sr, si = fx.qfft(rr, ri, fmt)
        rows.append(fx.power_q(sr, si, fmt))
    return np.asarray(np.stack(rows, axis=1), dtype=np.float64)   # (K, n_grid, M)


def _quantized_ul_estimates(y_user: np.ndarray, phis: np.ndarray, pi: np.ndarray,
                            starts: np.ndarray, tau: int, sqrt_d: np.ndarray,
                            fmt: FixedFormat):
    K, m = y_user.shape
    yq_re, yq_im = fx.qc_from_complex(y_user, fmt)
    out_re = np.empty_like(yq_re)
    out_im = np.empty_like(yq_im)
    for gi, phi in enumerate(phis):
        sel = pi == gi
        if not np.any(sel):
            continue
        rr, ri = fx.rotate_q(yq_re[sel], yq_im[sel], float(phi), fmt)
        out_re[sel], out_im[sel] = rr, ri
    sre, sim = fx.qfft(out_re, out_im, fmt)
    idx = (starts[:, None] + np.arange(tau)) % m
    wre = np.take_along_axis(sre, idx, axis=1)
    wim = np.take_along_axis(sim, idx, axis=1)
    if not np.allclose(sqrt_d, 1.0):
        inv = np.array([int(fx.to_int(1.0 / s, fmt)) for s in sqrt_d])
        wre, wim = fx.qc_mul((wre, wim), (inv[:, None], np.zeros_like(inv[:, None])), fmt)
    re, im = fx.sparse_idft_q(wre, wim, idx, phis[pi], fmt, m)
    return fx.qc_to_complex(re, im, fmt)


def run_sweep(config: SystemConfig, spec: SweepSpec):
    """Monte-Carlo sweep; returns SweepRow list in canonical sorted order."""
    modes = [(mode, None if mode == "float" else parse_format(mode))
             for mode in spec.modes]
    d = config.ut_power / (config.L * config.sigma_p2)
    sqrt_d = np.full(config.K, math.sqrt(d))
    acc: dict[tuple, list] = {}

    for t in range(spec.trials):
        rng_ch = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(t, 0)))
        h, _, _ = draw_channel_batch(config, rng_ch)
        h_energy = float(np.sum(np.abs(h) ** 2))
        for si, snr in enumerate(spec.snr_list):
            noise_var = config.sigma_p2 * 10.0 ** (-snr / 10.0)
            rng_pre = np.random.default_rng(
                np.random.SeedSequence(spec.seed, spawn_key=(t, 1, si)))
            rng_ul = np.random.default_rng(
                np.random.SeedSequence(spec.seed, spawn_key=(t, 2, si)))
            pre_std = math.sqrt(noise_var / (d * config.L * config.sigma_p2))
            ul_std = math.sqrt(noise_var / (config.L * config.sigma_p2))
            h_hat = h + pre_std * _cnoise(rng_pre, h.shape)
            ul_noise = _cnoise(rng_ul, h.shape)     # row g backs group g

            for n_grid in spec.n_grid_list:
                phis = phi_grid(n_grid, config.M)
                ramps = np.exp(1j * np.outer(phis, np.arange(config.M)))
                powers = {}
                for mode, fmt in modes:
                    if fmt is None:
                        _, powers[mode] = _float_spectra_power(h_hat, ramps)
                    else:
                        powers[mode] = _quantized_power(h_hat, phis, fmt)
                for method in spec.methods:
                    for mode, fmt in modes:
                        pi, starts, b_centers = select_batch(powers[mode],
                                                             config.tau, method)
                        group_idx = greedy_grouping(starts, b_centers, config.tau,
                                                    config.omega, config.M)
                        g_count = int(group_idx.max()) + 1
                        y = np.zeros((g_count, config.M), dtype=np.complex128)
                        np.add.at(y, group_idx, sqrt_d[:, None] * h)
                        y += ul_std * ul_noise[:g_count]
                        y_user = y[group_idx]
                        if fmt is None:
                            h_est = _float_ul_estimates(y_user, ramps, pi, starts,
                                                        config.tau, sqrt_d)
                        else:
                            h_est = _quantized_ul_estimates(y_user, phis, pi, starts,
                                                            config.tau, sqrt_d, fmt)
                        err = float(np.sum(np.abs(h - h_est) ** 2))
                        ratios = (np.sum(np.abs(h - h_est) ** 2, axis=1) /
                                  np.sum(np.abs(h) ** 2, axis=1))
                        key = (float(snr), method, mode, n_grid)
                        slot = acc.setdefault(key, [0.0, 0.0, 0.0, 0])
                        slot[0] += err
                        slot[1] += h_energy
                        slot[2] += float(ratios.sum())
                        slot[3] += config.K

    rows = [SweepRow(snr_db=k[0], method=k[1], mode=k[2], n_grid=k[3],
                     ensemble_mse=v[0] / v[1], mean_mse=v[2] / v[3],
                     trials=spec.trials)
            for k, v in acc.items()]
    rows.sort(key=lambda r: (r.snr_db, r.method, r.mode, r.n_grid))
    return rows


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
