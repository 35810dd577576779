"""Analytic latency and resource reports."""

import pytest

from adma.costs import (CostReport, VARIANTS, extraction_latency,
                        latency_report, resource_report)
from adma.signature import SpatialSignature, window_from_start


def test_latency_report_values(fpga_config):
    rep = latency_report(fpga_config)
    assert rep.latency["LS"] == 3
    assert rep.latency["FFT"] == 127
    assert rep.latency["Max-Selection"] == 128
    assert rep.latency["Sorting"] is None
    assert rep.latency["IFFT"] == 4
    assert rep.processing["LS"] == 132
    assert rep.processing["FFT"] == 255
    assert rep.processing["Sorting"] == 10
    assert rep.processing["Grouping"] == 20
    assert rep.processing["IFFT"] == 132
    assert rep.extraction_latency_range == (0, 127)


def test_resource_report_values(fpga_config):
    rep = resource_report(fpga_config)
    assert rep.resources["LS"].multipliers == 4
    assert rep.resources["FFT"].multipliers == 6
    assert rep.resources["FFT"].adders == 14
    assert rep.resources["FFT"].registers == 127
    assert rep.resources["ABS"].multipliers == 1
    assert rep.resources["Sorting"].comparators == 64
    assert rep.resources["Sorting"].registers == 160
    assert rep.resources["Grouping"].comparators == 4
    assert rep.resources["IFFT"].multipliers == 4


def test_fft_instances_by_variant(fpga_config):
    with_rot = resource_report(fpga_config, "with_rotation")
    without = resource_report(fpga_config, "without_rotation")
    assert with_rot.fft_instances == fpga_config.tau + fpga_config.K == 20
    assert without.fft_instances == fpga_config.tau == 4


def test_report_rejects_unknown_variant():
    with pytest.raises(ValueError):
        CostReport(variant="bogus")
    assert VARIANTS == ("with_rotation", "without_rotation")


def test_extraction_latency_is_last_window_bin():
    sig = SpatialSignature(phi=0.0, window=window_from_start(60, 8, 64),
                           b_center=0, score=1.0)
    assert extraction_latency(sig) == 63


def test_non_power_of_two_warns(fpga_config):
    fpga_config.K = 12
    with pytest.warns(UserWarning, match="power of two"):
        latency_report(fpga_config)
