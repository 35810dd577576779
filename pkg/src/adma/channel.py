"""Finite-scattering channel generation, pilots, and received-signal synthesis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError, SystemConfig


@dataclass
class UserChannel:
    """One user's ray set and the resulting length-M channel vector."""

    theta_center: float           # nominal DOA (degrees)
    ray_angles: np.ndarray        # per-ray DOA (degrees)
    ray_gains: np.ndarray         # per-ray complex gains
    h: np.ndarray                 # length-M channel vector


@dataclass
class TrainingMatrix:
    """L x tau pilot matrix with orthogonal columns, s_i^H s_i = L*sigma_p2."""

    S: np.ndarray

    @property
    def L(self) -> int:
        return self.S.shape[0]

    @property
    def tau(self) -> int:
        return self.S.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.S[:, i]


def array_manifold(theta_deg, m: int, d_over_lambda: float) -> np.ndarray:
    """ULA steering vector(s): element i is exp(j*2*pi*(d/lambda)*i*sin(theta)).

    `theta_deg` may be a scalar or an array; the antenna axis is last.
    """
    theta = np.asarray(theta_deg, dtype=np.float64)
    if np.any(np.abs(theta) >= 90.0):
        raise ValueError("array_manifold requires |theta| < 90 degrees")
    phase = 2.0 * np.pi * d_over_lambda * np.sin(np.radians(theta))
    return np.exp(1j * np.multiply.outer(phase, np.arange(m)))


def channel_from_rays(theta_center: float, ray_angles, ray_gains,
                      m: int, d_over_lambda: float) -> UserChannel:
    """Build a channel h = (1/sqrt(P)) * sum_p gain_p * a(theta_p)."""
    angles = np.asarray(ray_angles, dtype=np.float64)
    gains = np.asarray(ray_gains, dtype=np.complex128)
    if angles.shape != gains.shape or angles.ndim != 1:
        raise ValueError("ray_angles and ray_gains must be 1-D of equal length")
    a = array_manifold(angles, m, d_over_lambda)       # (P, M)
    h = gains @ a / math.sqrt(angles.shape[0])
    return UserChannel(theta_center=float(theta_center), ray_angles=angles,
                       ray_gains=gains, h=h)


def gen_channel(config: SystemConfig, theta_center: float, rng_seed) -> UserChannel:
    """Draw one user channel: rays uniform in [theta-dtheta, theta+dtheta],
    gains i.i.d. circular complex Gaussian with unit variance.
    """
    dtheta = config.delta_theta_deg
    if not (-90.0 < theta_center - dtheta and theta_center + dtheta < 90.0):
        raise ValueError(
            f"theta_center {theta_center} +- {dtheta} leaves (-90, 90) degrees")
    rng = np.random.default_rng(rng_seed)
    p = config.P_rays
    angles = rng.uniform(theta_center - dtheta, theta_center + dtheta, size=p)
    gains = (rng.standard_normal(p) + 1j * rng.standard_normal(p)) / math.sqrt(2.0)
    return channel_from_rays(theta_center, angles, gains,
                             config.M, config.d_over_lambda_ul)


def gen_channel_dl(config: SystemConfig, ul_channel: UserChannel,
                   rng_seed) -> UserChannel:
    """Downlink channel sharing the UL ray geometry: same angles, fresh
    gains, element spacing rescaled to the DL wavelength."""
    rng = np.random.default_rng(rng_seed)
    p = ul_channel.ray_angles.shape[0]
    gains = (rng.standard_normal(p) + 1j * rng.standard_normal(p)) / math.sqrt(2.0)
    d_over_lambda_dl = config.d_over_lambda_ul * config.lambda_ratio
    return channel_from_rays(ul_channel.theta_center, ul_channel.ray_angles,
                             gains, config.M, d_over_lambda_dl)


def gen_training_matrix(L: int, tau: int, sigma_p2: float) -> TrainingMatrix:
    """tau columns of the L-point DFT matrix, scaled so s_i^H s_i = L*sigma_p2."""
    if tau > L:
        raise ConfigurationError(f"need tau <= L, got tau={tau}, L={L}")
    l = np.arange(L)
    k = np.arange(tau)
    S = math.sqrt(sigma_p2) * np.exp(-2j * np.pi * np.outer(l, k) / L)
    return TrainingMatrix(S=S)


def power_scaling(config: SystemConfig) -> np.ndarray:
    """Per-user scalars d_k = P_k^ut / (L * sigma_p2), one per user."""
    d = config.ut_power / (config.L * config.sigma_p2)
    return np.full(config.K, d, dtype=np.float64)


def _complex_noise(rng: np.random.Generator, shape, noise_var: float) -> np.ndarray:
    if noise_var == 0.0:
        return np.zeros(shape, dtype=np.complex128)
    scale = math.sqrt(noise_var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def received_preamble(channels, S: np.ndarray, d, noise_var: float,
                      rng_seed) -> np.ndarray:
    """Received M x L matrix Y = sum_i sqrt(d_i) h_i s_i^H + N for one pilot group."""
    S = np.asarray(S, dtype=np.complex128)
    d = np.asarray(d, dtype=np.float64)
    if len(channels) != S.shape[1] or len(channels) != d.shape[0]:
        raise ValueError(
            f"expected one channel and one d per pilot column: "
            f"{len(channels)} channels, S has {S.shape[1]} columns, d has {d.shape[0]}")
    H = np.stack([ch.h for ch in channels], axis=1)      # (M, n)
    Y = (H * np.sqrt(d)) @ S.conj().T
    rng = np.random.default_rng(rng_seed)
    return Y + _complex_noise(rng, Y.shape, noise_var)


def received_ul(assignment, channels, S: np.ndarray, d, noise_var: float,
                rng_seed) -> np.ndarray:
    """Received M x L matrix when every user in group g transmits pilot s_g."""
    S = np.asarray(S, dtype=np.complex128)
    d = np.asarray(d, dtype=np.float64)
    K = len(channels)
    seen = [0] * K
    for g, users in enumerate(assignment.groups):
        for k in users:
            if not 0 <= k < K:
                raise ValueError(f"user id {k} out of range")
            seen[k] += 1
    if any(c != 1 for c in seen):
        bad = next(k for k, c in enumerate(seen) if c != 1)
        raise ValueError(f"user {bad} appears in {seen[bad]} groups; need exactly 1")
    if assignment.g_count > S.shape[1]:
        raise ValueError(
            f"{assignment.g_count} groups but only {S.shape[1]} pilot columns")
    M = channels[0].h.shape[0]
    Y = np.zeros((M, S.shape[0]), dtype=np.complex128)
    for g, users in enumerate(assignment.groups):
        for k in users:
            Y += math.sqrt(d[k]) * np.outer(channels[k].h, S[:, g].conj())
    rng = np.random.default_rng(rng_seed)
    return Y + _complex_noise(rng, Y.shape, noise_var)
