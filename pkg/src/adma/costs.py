"""Analytic latency and resource models of the pipelined estimator.

Counts are per module instance; the FFT instance count depends on whether
the rotation search is kept (tau + K instances) or dropped (tau), which is
the only difference between the two architecture variants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .config import SystemConfig

VARIANTS = ("with_rotation", "without_rotation")

MODULES = ("LS", "FFT", "ABS", "Max-Selection", "Sorting", "Grouping",
           "Extraction", "IFFT")


@dataclass
class ModuleCost:
    multipliers: int = 0        # complex multipliers
    adders: int = 0             # complex adders
    comparators: int = 0        # real comparators
    registers: int = 0


@dataclass
class CostReport:
    """Per-module resource counts and cycle counts for one variant."""

    variant: str
    resources: dict[str, ModuleCost] = field(default_factory=dict)
    latency: dict[str, int | None] = field(default_factory=dict)
    processing: dict[str, int] = field(default_factory=dict)
    fft_instances: int | None = None
    extraction_latency_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


def _check_pow2(config: SystemConfig):
    for name, n in (("M", config.M), ("K", config.K)):
        if n & (n - 1):
            warnings.warn(f"{name}={n} is not a power of two; "
                          "cost formulas assume powers of two", stacklevel=3)


def _log2(n: int) -> int:
    return int(round(math.log2(n)))


def latency_report(config: SystemConfig, variant: str = "with_rotation") -> CostReport:
    """Per-module latency (one data package) and processing time (M packages),
    in clock cycles."""
    _check_pow2(config)
    M, K, L, tau = config.M, config.K, config.L, config.tau
    lk = _log2(K)
    report = CostReport(variant=variant)
    report.latency = {
        "LS": L - 1,
        "FFT": M - 1,
        "Max-Selection": M,
        "Sorting": None,                    # network output is fully pipelined
        "Grouping": None,
        "Extraction": None,                 # bin-position dependent, see range
        "IFFT": tau,
    }
    report.processing = {
        "LS": L + M,
        "FFT": 2 * M - 1,
        "Max-Selection": M,
        "Sorting": lk * (lk + 1) // 2,
        "Grouping": K + tau,
        "IFFT": M + tau,
    }
    report.extraction_latency_range = (0, M - 1)
    return report


def extraction_latency(signature) -> int:
    """Cycles until the last window bin has streamed past the extractor."""
    return max(signature.window)


def resource_report(config: SystemConfig, variant: str = "with_rotation") -> CostReport:
    """Per-module complex multipliers/adders, real comparators, and registers."""
    _check_pow2(config)
    M, K, L, tau = config.M, config.K, config.L, config.tau
    lm, lk = _log2(M), _log2(K)
    report = CostReport(variant=variant)
    report.resources = {
        "LS": ModuleCost(multipliers=L, adders=L, registers=L - 1),
        "FFT": ModuleCost(multipliers=lm - 1, adders=2 * lm, registers=M - 1),
        "ABS": ModuleCost(multipliers=1),
        "Max-Selection": ModuleCost(comparators=1, registers=1),
        "Sorting": ModuleCost(comparators=K * lk,
                              registers=K * lk * (lk + 1) // 2),
        "Grouping": ModuleCost(adders=1, comparators=tau, registers=2 * tau),
        "Extraction": ModuleCost(comparators=1),
        "IFFT": ModuleCost(multipliers=tau, adders=tau, registers=tau - 1),
    }
    report.fft_instances = tau + K if variant == "with_rotation" else tau
    return report
