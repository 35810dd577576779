"""Monte-Carlo sweep harness: batched kernels against the per-user pipeline.

The sweep uses vectorized selection, grouping, and estimation kernels; each
one is checked here against the structural per-user implementation on
identical inputs.
"""

import math

import numpy as np
import pytest

from adma import sweep as sw
from adma.config import ConfigurationError, SystemConfig
from adma.estimation import run_ul_training, ul_extract, ul_recover
from adma.fixedpoint import FixedFormat
from adma.grouping import GroupAssignment, group_users
from adma.signature import (SpatialSignature, _SELECTORS, cyclic_midpoint,
                            phi_grid, window_from_start)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        sw.SweepSpec(trials=0)
    with pytest.raises(ConfigurationError):
        sw.SweepSpec(snr_list=())
    with pytest.raises(ConfigurationError):
        sw.SweepSpec(methods=("bogus",))
    with pytest.raises(ConfigurationError):
        sw.SweepSpec(modes=("fixed:2,8,6",))
    with pytest.raises(ConfigurationError):
        sw.SweepSpec(n_grid_list=(4,))


def test_rows_to_csv_quotes_modes():
    row = sw.SweepRow(snr_db=0.0, method="exact", mode="fixed:1,8,6",
                      n_grid=3, ensemble_mse=0.5, mean_mse=0.5, trials=1)
    text = sw.rows_to_csv([row])
    lines = text.splitlines()
    assert lines[0] == sw.CSV_HEADER
    assert '"fixed:1,8,6"' in lines[1]


def test_write_sweep_csv_roundtrip(tmp_path):
    import csv

    row = sw.SweepRow(snr_db=10.0, method="max2", mode="float", n_grid=3,
                      ensemble_mse=0.125, mean_mse=0.25, trials=7)
    path = tmp_path / "sweep.csv"
    sw.write_sweep_csv(path, [row])
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["method"] == "max2"
    assert float(rows[0]["ensemble_mse"]) == 0.125
    assert int(rows[0]["trials"]) == 7


def test_channels_from_batch_consistency(paper_config):
    rng = np.random.default_rng(0)
    h, angles, gains = sw.draw_channel_batch(paper_config, rng)
    users = sw.channels_from_batch(paper_config, angles, gains)
    for k in range(paper_config.K):
        assert np.allclose(users[k].h, h[k], atol=1e-12)
    exact = sw.channels_from_batch(paper_config, angles, gains, h=h)
    for k in range(paper_config.K):
        assert np.array_equal(exact[k].h, h[k])


def test_midpoints_vec_matches_scalar():
    m = 16
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    got = sw._midpoints_vec(i.ravel(), j.ravel(), m)
    want = [cyclic_midpoint(int(a), int(b), m)
            for a, b in zip(i.ravel(), j.ravel())]
    assert got.tolist() == want


@pytest.mark.parametrize("method", ["exact", "max1", "max2", "max3"])
def test_select_batch_matches_per_user(rng, method):
    m, tau, n_grid, K = 32, 6, 3, 40
    power = rng.random((K, n_grid, m))
    phis = phi_grid(n_grid, m)
    pi, starts, centers = sw.select_batch(power, tau, method)
    for k in range(K):
        sig = _SELECTORS[method](power[k], phis, tau)
        assert phis[pi[k]] == sig.phi, k
        assert starts[k] == sig.start, k
        assert centers[k] == sig.b_center, k


def test_select_batch_ties_match_per_user():
    m, tau, n_grid = 8, 2, 3
    power = np.ones((3, n_grid, m))
    phis = phi_grid(n_grid, m)
    for method in ("exact", "max1", "max2", "max3"):
        pi, starts, centers = sw.select_batch(power, tau, method)
        sig = _SELECTORS[method](power[0], phis, tau)
        assert np.all(phis[pi] == sig.phi)
        assert np.all(starts == sig.start)


def test_select_batch_full_window():
    m = 8
    power = np.random.default_rng(0).random((4, 3, m))
    pi, starts, centers = sw.select_batch(power, m, "exact")
    sig = _SELECTORS["exact"](power[0], phi_grid(3, m), m)
    assert np.all(starts == sig.start) and np.all(centers == sig.b_center)


def test_greedy_grouping_matches_group_users(rng):
    m, tau, omega = 64, 4, 2
    for _ in range(100):
        K = int(rng.integers(2, 20))
        starts = rng.integers(0, m, size=K)
        centers = (starts + tau // 2) % m
        group_idx = sw.greedy_grouping(starts, centers, tau, omega, m)
        order = sorted(range(K), key=lambda k: (int(centers[k]), k))
        sigs = [SpatialSignature(phi=0.0,
                                 window=window_from_start(int(starts[k]), tau, m),
                                 b_center=int(centers[k]), score=1.0)
                for k in order]
        asg = group_users(sigs, omega, tau, m, user_ids=order)
        assert asg.group_of == {k: int(group_idx[k]) for k in range(K)}


def test_float_ul_estimates_match_per_user(rng):
    m, tau, K = 64, 8, 6
    phis = phi_grid(3, m)
    ramps = np.exp(1j * np.outer(phis, np.arange(m)))
    y_user = rng.standard_normal((K, m)) + 1j * rng.standard_normal((K, m))
    pi = rng.integers(0, 3, size=K)
    starts = rng.integers(0, m, size=K)
    sqrt_d = np.full(K, math.sqrt(2.0))
    got = sw._float_ul_estimates(y_user, ramps, pi, starts, tau, sqrt_d)
    for k in range(K):
        window = window_from_start(int(starts[k]), tau, m)
        w = ul_extract(y_user[k], float(phis[pi[k]]), window, 2.0)
        ref = ul_recover(w, window, float(phis[pi[k]]), m)
        assert np.allclose(got[k], ref, atol=1e-12)


def test_quantized_ul_estimates_high_precision(rng):
    """At high fractional precision the quantized kernel tracks the float one."""
    m, tau, K = 32, 4, 5
    fmt = FixedFormat(8, 24)
    phis = phi_grid(3, m)
    ramps = np.exp(1j * np.outer(phis, np.arange(m)))
    y_user = rng.standard_normal((K, m)) + 1j * rng.standard_normal((K, m))
    pi = rng.integers(0, 3, size=K)
    starts = rng.integers(0, m, size=K)
    sqrt_d = np.ones(K)
    flt = sw._float_ul_estimates(y_user, ramps, pi, starts, tau, sqrt_d)
    qnt = sw._quantized_ul_estimates(y_user, phis, pi, starts, tau, sqrt_d, fmt)
    assert np.max(np.abs(flt - qnt)) < 1e-3


def test_quantized_power_high_precision(rng):
    m, K = 32, 4
    fmt = FixedFormat(8, 24)
    h = rng.standard_normal((K, m)) + 1j * rng.standard_normal((K, m))
    phis = phi_grid(3, m)
    ramps = np.exp(1j * np.outer(phis, np.arange(m)))
    _, flt = sw._float_spectra_power(h, ramps)
    qnt = sw._quantized_power(h, phis, fmt) * fmt.step
    assert np.max(np.abs(flt - qnt)) < 1e-3


def test_run_sweep_deterministic_csv_bytes(small_config):
    spec = sw.SweepSpec(snr_list=(10.0,), trials=1, methods=("exact",),
                        modes=("float",), seed=42)
    a = sw.rows_to_csv(sw.run_sweep(small_config, spec))
    b = sw.rows_to_csv(sw.run_sweep(small_config, spec))
    assert a == b


def test_run_sweep_row_ordering(small_config):
    spec = sw.SweepSpec(snr_list=(10.0, 0.0), trials=1,
                        methods=("max1", "exact"), modes=("float",), seed=1)
    rows = sw.run_sweep(small_config, spec)
    keys = [(r.snr_db, r.method, r.mode, r.n_grid) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 4


def test_noiseless_fast_path_matches_structural(small_config):
    """With the same channels and the selection produced by the fast path,
    the structural pipeline computes the same noiseless estimates."""
    cfg = small_config
    cfg.snr_db = math.inf
    rng = np.random.default_rng(np.random.SeedSequence(5, spawn_key=(0, 0)))
    h, angles, gains = sw.draw_channel_batch(cfg, rng)
    chans = sw.channels_from_batch(cfg, angles, gains, h=h)

    phis = phi_grid(3, cfg.M)
    ramps = np.exp(1j * np.outer(phis, np.arange(cfg.M)))
    _, power = sw._float_spectra_power(h, ramps)
    pi, starts, centers = sw.select_batch(power, cfg.tau, "exact")
    group_idx = sw.greedy_grouping(starts, centers, cfg.tau, cfg.omega, cfg.M)
    g_count = int(group_idx.max()) + 1
    y = np.zeros((g_count, cfg.M), dtype=np.complex128)
    np.add.at(y, group_idx, h)
    fast = sw._float_ul_estimates(y[group_idx], ramps, pi, starts, cfg.tau,
                                  np.ones(cfg.K))

    sigs = [SpatialSignature(phi=float(phis[pi[k]]),
                             window=window_from_start(int(starts[k]), cfg.tau, cfg.M),
                             b_center=int(centers[k]), score=1.0)
            for k in range(cfg.K)]
    groups = [[] for _ in range(g_count)]
    for k in range(cfg.K):
        groups[group_idx[k]].append(k)
    structural = run_ul_training(cfg, chans, sigs,
                                 GroupAssignment(groups=groups), rng_seed=0)
    assert np.allclose(fast, structural.h_est, atol=1e-9)
