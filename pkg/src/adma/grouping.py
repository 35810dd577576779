"""Pilot-sharing group assignment and the bitonic sorting network model.

Users whose signature windows are disjoint and separated by at least the
guard interval can reuse one training sequence. Users arrive sorted by
window center and are placed greedily into the first compatible group,
mirroring the serial systolic builder; by default every current member is
checked, with a hardware-faithful mode that compares only against the most
recent member.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .signature import SpatialSignature


@dataclass
class GroupAssignment:
    """Partition of user ids into pilot-sharing groups."""

    groups: list[list[int]]

    @property
    def g_count(self) -> int:
        return len(self.groups)

    @property
    def group_of(self) -> dict[int, int]:
        return {k: g for g, users in enumerate(self.groups) for k in users}


@dataclass
class SortTrace:
    """Result of one pass through the bitonic merging network."""

    sorted_keys: list
    comparator_count: int
    stage_count: int


def bitonic_sort(keys) -> SortTrace:
    """Sort keys ascending with a bitonic merging network.

    Non-power-of-two inputs are padded with a +inf sentinel. Records the
    number of compare-exchange operations and parallel comparator stages;
    for K a power of two the stage count is log2(K)*(log2(K)+1)/2.
    """
    keys = list(keys)
    n0 = len(keys)
    if n0 <= 1:
        return SortTrace(sorted_keys=keys, comparator_count=0, stage_count=0)
    n = 1 << (n0 - 1).bit_length()
    a = keys + [math.inf] * (n - n0)
    comparators = 0
    stages = 0
    k = 2
    while k <= n:
        j = k // 2
        while j >= 1:
            stages += 1
            for i in range(n):
                l = i ^ j
                if l > i:
                    ascending = (i & k) == 0
                    comparators += 1
                    if (a[i] > a[l]) == ascending:
                        a[i], a[l] = a[l], a[i]
            j //= 2
        k *= 2
    return SortTrace(sorted_keys=a[:n0], comparator_count=comparators,
                     stage_count=stages)


def intervals_compatible(sa: int, ta: int, sb: int, tb: int,
                         omega: int, m: int) -> bool:
    """Cyclic intervals [sa, sa+ta) and [sb, sb+tb) (mod m) are disjoint and
    their closest bins are at least omega apart."""
    if (sb - sa) % m < ta or (sa - sb) % m < tb:
        return False
    gap = min((sb - (sa + ta - 1)) % m, (sa - (sb + tb - 1)) % m)
    return gap >= omega


def windows_compatible(sig_a: SpatialSignature, sig_b: SpatialSignature,
                       omega: int, m: int) -> bool:
    """Disjoint windows with min cyclic bin distance >= omega."""
    return intervals_compatible(sig_a.start, sig_a.tau, sig_b.start, sig_b.tau,
                                omega, m)


def group_users(signatures, omega: int, tau: int, m: int,
                user_ids=None, latest_only: bool = False) -> GroupAssignment:
    """Greedy first-fit grouping of signatures sorted ascending by b_center.

    Each user joins the lowest-index group whose members it is compatible
    with (all members by default; only the most recent with latest_only,
    matching the systolic compare element), capped at tau users per group.
    """
    sigs = list(signatures)
    if user_ids is None:
        user_ids = list(range(len(sigs)))
    centers = [s.b_center for s in sigs]
    if centers != sorted(centers):
        raise ValueError("signatures must be sorted ascending by b_center")
    groups: list[list[int]] = []
    members: list[list[SpatialSignature]] = []
    for uid, sig in zip(user_ids, sigs):
        placed = False
        for g in range(len(groups)):
            if len(groups[g]) >= tau:
                continue
            check = members[g][-1:] if latest_only else members[g]
            if all(windows_compatible(sig, other, omega, m) for other in check):
                groups[g].append(uid)
                members[g].append(sig)
                placed = True
                break
        if not placed:
            groups.append([uid])
            members.append([sig])
    return GroupAssignment(groups=groups)


def cluster_identical(signatures) -> list[list[int]]:
    """Partition user indices into clusters with exactly equal (window, phi)."""
    clusters: dict[tuple, list[int]] = {}
    for k, sig in enumerate(signatures):
        clusters.setdefault((sig.window, sig.phi), []).append(k)
    return list(clusters.values())


def validate_grouping(assignment: GroupAssignment, signatures, omega: int,
                      m: int) -> tuple[bool, tuple[int, int] | None]:
    """Check every intra-group pair for window disjointness and guard distance.

    Independent of the greedy builder: distances are evaluated over all
    tau x tau bin pairs of each pair of windows. Returns (ok, first violating
    user pair or None).
    """
    for users in assignment.groups:
        for i in range(len(users)):
            wi = np.asarray(signatures[users[i]].window)
            for j in range(i + 1, len(users)):
                wj = np.asarray(signatures[users[j]].window)
                if np.intersect1d(wi, wj).size:
                    return False, (users[i], users[j])
                diff = np.abs(wi[:, None] - wj[None, :]) % m
                dist = np.minimum(diff, m - diff).min()
                if dist < omega:
                    return False, (users[i], users[j])
    return True, None


def write_assignment_csv(path, assignment: GroupAssignment, signatures) -> None:
    """Serialize an assignment: user_id, group_id, b_center, window_start, phi."""
    group_of = assignment.group_of
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["user_id", "group_id", "b_center", "window_start", "phi"])
        for uid in sorted(group_of):
            sig = signatures[uid]
            w.writerow([uid, group_of[uid], sig.b_center, sig.start, repr(sig.phi)])
