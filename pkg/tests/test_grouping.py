"""Pilot-sharing group assignment and the bitonic sorting network."""

import csv

import numpy as np
import pytest

from adma.grouping import (GroupAssignment, bitonic_sort, cluster_identical,
                           group_users, intervals_compatible, validate_grouping,
                           windows_compatible, write_assignment_csv)
from adma.signature import SpatialSignature, window_from_start


def make_sig(start, tau, m, phi=0.0):
    return SpatialSignature(phi=phi, window=window_from_start(start, tau, m),
                            b_center=(start + tau // 2) % m, score=1.0)


def test_bitonic_sort_matches_reference(rng):
    for _ in range(200):
        n = int(rng.integers(1, 33))
        keys = rng.integers(0, 100, size=n).tolist()
        trace = bitonic_sort(keys)
        assert trace.sorted_keys == sorted(keys)


def test_bitonic_sort_stage_count_power_of_two():
    for k in (2, 4, 8, 16, 32):
        lk = k.bit_length() - 1
        trace = bitonic_sort(list(range(k))[::-1])
        assert trace.stage_count == lk * (lk + 1) // 2
        assert trace.comparator_count == (k // 2) * trace.stage_count


def test_bitonic_sort_trivial_inputs():
    assert bitonic_sort([]).sorted_keys == []
    assert bitonic_sort([5]).comparator_count == 0


def brute_force_compatible(sa, ta, sb, tb, omega, m):
    """Reference: enumerate every bin pair of the two cyclic windows."""
    wa = [(sa + i) % m for i in range(ta)]
    wb = [(sb + i) % m for i in range(tb)]
    if set(wa) & set(wb):
        return False
    dist = min(min((a - b) % m, (b - a) % m) for a in wa for b in wb)
    return dist >= omega


def test_intervals_compatible_matches_brute_force():
    m, tau, omega = 16, 3, 2
    for sa in range(m):
        for sb in range(m):
            assert intervals_compatible(sa, tau, sb, tau, omega, m) == \
                brute_force_compatible(sa, tau, sb, tau, omega, m)


def test_intervals_compatible_mixed_sizes():
    m = 32
    for sa in range(m):
        for sb in range(m):
            for omega in (0, 1, 3):
                assert intervals_compatible(sa, 4, sb, 7, omega, m) == \
                    brute_force_compatible(sa, 4, sb, 7, omega, m)


def test_windows_compatible_wrapper():
    a = make_sig(0, 4, 32)
    b = make_sig(8, 4, 32)
    c = make_sig(4, 4, 32)
    assert windows_compatible(a, b, 2, 32)
    assert not windows_compatible(a, c, 2, 32)   # adjacent: distance 1 < omega
    assert windows_compatible(a, make_sig(5, 4, 32), 2, 32)  # distance 2 = omega


def test_group_users_requires_sorted_centers():
    sigs = [make_sig(8, 4, 32), make_sig(0, 4, 32)]
    with pytest.raises(ValueError, match="sorted"):
        group_users(sigs, 2, 4, 32)


def test_group_users_greedy_first_fit():
    m, tau, omega = 32, 4, 2
    sigs = [make_sig(s, tau, m) for s in (0, 8, 16, 24)]
    asg = group_users(sigs, omega, tau, m)
    assert asg.groups == [[0, 1, 2, 3]]
    # an incompatible fifth user opens a second group
    sigs5 = sigs + [make_sig(25, tau, m)]
    asg5 = group_users(sigs5, omega, tau, m)
    assert asg5.g_count == 2
    assert asg5.groups[1] == [4]


def test_group_users_respects_cap():
    m = 64
    sigs = [make_sig(s, 2, m) for s in range(0, 32, 8)]   # all compatible
    asg = group_users(sigs, 2, 2, m)                      # cap = tau = 2
    assert all(len(g) <= 2 for g in asg.groups)
    assert sorted(u for g in asg.groups for u in g) == [0, 1, 2, 3]


def test_group_users_latest_only_differs():
    """The hardware mode checks only the newest member, so it can admit a
    user that conflicts with an older one."""
    # user 2's window {13,14,15} keeps the guard distance to user 1's
    # {6,7,8} but sits one bin from user 0's {0,1,2} across the wrap
    m, tau, omega = 16, 3, 2
    sigs = [make_sig(0, tau, m), make_sig(6, tau, m), make_sig(13, tau, m)]
    full = group_users(sigs, omega, tau, m)
    hw = group_users(sigs, omega, tau, m, latest_only=True)
    ok_full, _ = validate_grouping(full, sigs, omega, m)
    assert ok_full
    assert full.groups != hw.groups
    ok_hw, pair = validate_grouping(hw, sigs, omega, m)
    assert not ok_hw


def test_group_users_custom_ids():
    m, tau = 32, 4
    sigs = [make_sig(0, tau, m), make_sig(8, tau, m)]
    asg = group_users(sigs, 2, tau, m, user_ids=[7, 3])
    assert asg.groups == [[7, 3]]
    assert asg.group_of == {7: 0, 3: 0}


def test_group_users_output_validates(rng):
    m, tau, omega = 64, 4, 2
    for _ in range(100):
        starts = sorted(rng.integers(0, m, size=10).tolist())
        sigs = sorted((make_sig(s, tau, m) for s in starts),
                      key=lambda s: s.b_center)
        asg = group_users(sigs, omega, tau, m)
        ok, pair = validate_grouping(asg, sigs, omega, m)
        assert ok, pair


def test_validate_grouping_catches_violations():
    m, tau, omega = 32, 4, 2
    sigs = [make_sig(0, tau, m), make_sig(2, tau, m)]     # overlapping
    bad = GroupAssignment(groups=[[0, 1]])
    ok, pair = validate_grouping(bad, sigs, omega, m)
    assert not ok and pair == (0, 1)
    sigs2 = [make_sig(0, tau, m), make_sig(4, tau, m)]    # disjoint, distance 1
    ok2, pair2 = validate_grouping(GroupAssignment(groups=[[0, 1]]), sigs2,
                                   omega, m)
    assert not ok2 and pair2 == (0, 1)


def test_cluster_identical():
    m, tau = 32, 4
    sigs = [make_sig(0, tau, m), make_sig(8, tau, m), make_sig(0, tau, m),
            make_sig(0, tau, m, phi=0.01)]
    clusters = cluster_identical(sigs)
    assert [0, 2] in clusters
    assert [1] in clusters
    assert [3] in clusters      # same window, different phi


def test_dl_clustering_never_increases_groups(rng):
    """Grouping cluster representatives can only merge identical signatures,
    never split compatible ones."""
    m, tau, omega = 32, 4, 1
    for _ in range(200):
        starts = rng.integers(0, m, size=6)
        sigs = sorted((make_sig(int(s), tau, m) for s in starts),
                      key=lambda s: s.b_center)
        direct = group_users(sigs, omega, tau, m)
        clusters = cluster_identical(sigs)
        reps = sorted(range(len(clusters)),
                      key=lambda ci: sigs[clusters[ci][0]].b_center)
        clustered = group_users([sigs[clusters[ci][0]] for ci in reps],
                                omega, tau, m, user_ids=reps)
        assert clustered.g_count <= direct.g_count


def test_write_assignment_csv(tmp_path):
    m, tau = 32, 4
    sigs = [make_sig(0, tau, m, phi=0.01), make_sig(8, tau, m)]
    asg = group_users(sigs, 2, tau, m)
    path = tmp_path / "assignment.csv"
    write_assignment_csv(path, asg, sigs)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert rows[0]["user_id"] == "0"
    assert rows[0]["group_id"] == rows[1]["group_id"]
    assert rows[0]["window_start"] == "0"
    assert float(rows[0]["phi"]) == pytest.approx(0.01)
    assert rows[1]["b_center"] == "10"
