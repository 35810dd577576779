"""Three-stage estimation pipeline: preamble LS, grouped UL training, and
reciprocity-mapped DL training, with MSE scoring.

Every stage runs in double-precision or, when an arithmetic format is
given, with the stored signals and transform datapaths quantized
(post-LS values, rotation, FFT, squared magnitudes, sparse recovery).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fixedpoint as fx
from . import spectral
from .channel import (gen_training_matrix, power_scaling, received_preamble,
                      received_ul)
from .config import SystemConfig
from .grouping import GroupAssignment, cluster_identical, group_users
from .signature import (SearchConfig, SpatialSignature, _SELECTORS, phi_grid,
                        find_signature)

Arithmetic = "float | fixedpoint.FixedFormat"


@dataclass
class EstimationResult:
    """Per-user channel estimates and MSE for one pipeline stage."""

    stage: str                       # "preamble" | "UL" | "DL"
    h_est: np.ndarray                # (K, M) estimates
    signatures: list                 # per-user SpatialSignature used
    mse_per_user: np.ndarray         # per-user ||h - h_hat||^2 / ||h||^2

    def __post_init__(self):
        if self.stage not in ("preamble", "UL", "DL"):
            raise ValueError(f"bad stage tag {self.stage!r}")
        if not np.all(np.isfinite(self.h_est)):
            raise ValueError("non-finite channel estimate")

    @property
    def mean_mse(self) -> float:
        return float(self.mse_per_user.mean())


def mse(h_true, h_est) -> float:
    """Per-trial normalized error ||h - h_hat||^2 / ||h||^2."""
    h_true = np.asarray(h_true)
    h_est = np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise ValueError("length mismatch")
    den = float(np.sum(np.abs(h_true) ** 2))
    if den == 0.0:
        raise ValueError("zero-norm reference channel")
    return float(np.sum(np.abs(h_true - h_est) ** 2)) / den


def ensemble_mse(pairs) -> float:
    """Ratio of expectations: sum ||h - h_hat||^2 over sum ||h||^2."""
    num = 0.0
    den = 0.0
    for h_true, h_est in pairs:
        h_true = np.asarray(h_true)
        num += float(np.sum(np.abs(h_true - np.asarray(h_est)) ** 2))
        den += float(np.sum(np.abs(h_true) ** 2))
    if den == 0.0:
        raise ValueError("zero-norm reference channels")
    return num / den


# ---------------------------------------------------------------------------
# stage primitives


def preamble_ls(Y: np.ndarray, s_k: np.ndarray, d_k: float, L: int,
                sigma_p2: float) -> np.ndarray:
    """LS estimate h_hat = Y s_k / (sqrt(d_k) L sigma_p2)."""
    if d_k <= 0:
        raise ValueError(f"d_k must be positive, got {d_k}")
    return np.asarray(Y) @ np.asarray(s_k) / (math.sqrt(d_k) * L * sigma_p2)


def group_extract(Y: np.ndarray, s_g: np.ndarray, L: int,
                  sigma_p2: float) -> np.ndarray:
    """Per-group despread y_g = Y s_g / (L sigma_p2)."""
    return np.asarray(Y) @ np.asarray(s_g) / (L * sigma_p2)


def ul_extract(y_g: np.ndarray, phi_k: float, window_k, d_k: float) -> np.ndarray:
    """Windowed rotated spectrum of the group vector, scaled by 1/sqrt(d_k)."""
    spec = spectral.dft(spectral.rotate(y_g, phi_k)) / math.sqrt(d_k)
    return spec[np.asarray(window_k, dtype=np.int64)]


def ul_recover(window_values, window, phi: float, m: int) -> np.ndarray:
    """Recover the length-M channel estimate from its windowed spectrum."""
    return spectral.idft_sparse(window_values, window, phi, m)


# ---------------------------------------------------------------------------
# quantized signature search / extraction helpers


def _signature_quantized(h_hat: np.ndarray, tau: int, search: SearchConfig,
                         method: str, fmt) -> SpatialSignature:
    m = h_hat.shape[-1]
    phis = phi_grid(search.n_grid, m)
    hq = fx.qc_from_complex(h_hat, fmt)
    rows = []
    for phi in phis:
        rr, ri = fx.rotate_q(hq[0], hq[1], float(phi), fmt)
        sr, si = fx.qfft(rr, ri, fmt)
        rows.append(fx.power_q(sr, si, fmt))
    power = np.asarray(np.stack(rows), dtype=np.float64)
    if not power.any():
        from .signature import DegenerateInputError
        raise DegenerateInputError("quantized spectrum is identically zero")
    return _SELECTORS[method](power, phis, tau)


def _ul_estimates_quantized(y_groups, group_idx, signatures, d, fmt,
                            m: int) -> np.ndarray:
    """Quantized rotation + FFT + window gather + sparse recovery for all users."""
    K = len(signatures)
    tau = signatures[0].tau
    wre = np.empty((K, tau), dtype=object)
    wim = np.empty((K, tau), dtype=object)
    windows = np.empty((K, tau), dtype=np.int64)
    phis = np.empty(K, dtype=np.float64)
    for k in range(K):
        sig = signatures[k]
        yq = fx.qc_from_complex(y_groups[group_idx[k]], fmt)
        rr, ri = fx.rotate_q(yq[0], yq[1], sig.phi, fmt)
        sr, si = fx.qfft(rr, ri, fmt)
        idx = np.asarray(sig.window, dtype=np.int64)
        vr, vi = sr[idx], si[idx]
        if d[k] != 1.0:
            vr, vi = fx.qc_mul((vr, vi), (fx.to_int(1.0 / math.sqrt(d[k]), fmt), 0), fmt)
        wre[k], wim[k] = vr, vi
        windows[k] = idx
        phis[k] = sig.phi
    if not fmt.wide:
        wre = wre.astype(np.int64)
        wim = wim.astype(np.int64)
    re, im = fx.sparse_idft_q(wre, wim, windows, phis, fmt, m)
    return fx.qc_to_complex(re, im, fmt)


# ---------------------------------------------------------------------------
# pipeline stages


def _seedseq(rng_seed) -> np.random.SeedSequence:
    if isinstance(rng_seed, np.random.SeedSequence):
        return rng_seed
    return np.random.SeedSequence(rng_seed)


def _preamble_partition(K: int, tau: int) -> list[list[int]]:
    """User-id order partition into ceil(K/tau) preamble groups of <= tau."""
    return [list(range(i, min(i + tau, K))) for i in range(0, K, tau)]


def run_preamble(config: SystemConfig, channels, method: str = "exact",
                 n_grid: int = 3, rng_seed=0, arithmetic="float"):
    """Signature acquisition: grouped LS estimates, signature search per user,
    center-sorted greedy grouping. Returns (signatures, assignment)."""
    if len(channels) != config.K:
        raise ValueError(f"expected {config.K} channels, got {len(channels)}")
    search = SearchConfig(n_grid=n_grid, method=method)
    d = power_scaling(config)
    seeds = _seedseq(rng_seed).spawn(len(_preamble_partition(config.K, config.tau)))
    signatures: list[SpatialSignature | None] = [None] * config.K
    for gi, users in enumerate(_preamble_partition(config.K, config.tau)):
        S = gen_training_matrix(config.L, len(users), config.sigma_p2).S
        Y = received_preamble([channels[k] for k in users], S, d[users],
                              config.noise_var, seeds[gi])
        for j, k in enumerate(users):
            h_hat = preamble_ls(Y, S[:, j], d[k], config.L, config.sigma_p2)
            if arithmetic == "float":
                signatures[k] = find_signature(h_hat, config.tau, search)
            else:
                signatures[k] = _signature_quantized(h_hat, config.tau, search,
                                                     method, arithmetic)
    order = sorted(range(config.K), key=lambda k: (signatures[k].b_center, k))
    assignment = group_users([signatures[k] for k in order], config.omega,
                             config.tau, config.M, user_ids=order)
    return signatures, assignment


def run_ul_training(config: SystemConfig, channels, signatures,
                    assignment: GroupAssignment, rng_seed=0,
                    arithmetic="float") -> EstimationResult:
    """Grouped uplink training: synthesize the receive matrix, despread per
    group, extract and recover per user, score MSE."""
    d = power_scaling(config)
    S = gen_training_matrix(config.L, assignment.g_count, config.sigma_p2).S
    Y = received_ul(assignment, channels, S, d, config.noise_var, rng_seed)
    y_groups = [group_extract(Y, S[:, g], config.L, config.sigma_p2)
                for g in range(assignment.g_count)]
    group_of = assignment.group_of
    group_idx = [group_of[k] for k in range(config.K)]
    if arithmetic == "float":
        h_est = np.empty((config.K, config.M), dtype=np.complex128)
        for k in range(config.K):
            sig = signatures[k]
            w = ul_extract(y_groups[group_idx[k]], sig.phi, sig.window, d[k])
            h_est[k] = ul_recover(w, sig.window, sig.phi, config.M)
    else:
        h_est = _ul_estimates_quantized(y_groups, group_idx, signatures, d,
                                        arithmetic, config.M)
    errors = np.array([mse(channels[k].h, h_est[k]) for k in range(config.K)])
    return EstimationResult(stage="UL", h_est=h_est, signatures=list(signatures),
                            mse_per_user=errors)


def run_dl_training(config: SystemConfig, channels_dl, signatures_ul,
                    lambda_ratio: float | None = None, rng_seed=0,
                    arithmetic="float") -> EstimationResult:
    """Downlink training via reciprocity: map UL signatures to DL, cluster
    identical signatures onto shared pilots, group clusters, then run the
    UL-style pipeline on the DL-wavelength channels."""
    from .signature import reciprocity_map

    if lambda_ratio is None:
        lambda_ratio = config.lambda_ratio
    sigs_dl = [reciprocity_map(s, lambda_ratio, config.M) for s in signatures_ul]
    clusters = cluster_identical(sigs_dl)
    reps = [(sigs_dl[c[0]].b_center, ci) for ci, c in enumerate(clusters)]
    reps.sort()
    cluster_assignment = group_users([sigs_dl[clusters[ci][0]] for _, ci in reps],
                                     config.omega, config.tau, config.M,
                                     user_ids=[ci for _, ci in reps])
    user_groups = [[u for ci in grp for u in clusters[ci]]
                   for grp in cluster_assignment.groups]
    assignment = GroupAssignment(groups=user_groups)
    result = run_ul_training(config, channels_dl, sigs_dl, assignment,
                             rng_seed=rng_seed, arithmetic=arithmetic)
    return EstimationResult(stage="DL", h_est=result.h_est,
                            signatures=result.signatures,
                            mse_per_user=result.mse_per_user)


def run_pipeline(config: SystemConfig, channels, method: str = "exact",
                 n_grid: int = 3, rng_seed=0, arithmetic="float"):
    """Preamble followed by UL training. Returns (signatures, assignment, result)."""
    seeds = _seedseq(rng_seed).spawn(2)
    signatures, assignment = run_preamble(config, channels, method=method,
                                          n_grid=n_grid, rng_seed=seeds[0],
                                          arithmetic=arithmetic)
    result = run_ul_training(config, channels, signatures, assignment,
                             rng_seed=seeds[1], arithmetic=arithmetic)
    return signatures, assignment, result
