"""Angle-division multiple access channel estimation for massive MIMO.

Sparse DFT-domain signature search with spectral rotation, guard-interval
user grouping, LS-based preamble/UL/DL training, bit-accurate fixed-point
execution, Monte-Carlo MSE sweeps, and analytic latency/resource models.
"""

from .channel import (UserChannel, array_manifold, channel_from_rays,
                      gen_channel, gen_channel_dl, gen_training_matrix,
                      power_scaling, received_preamble, received_ul)
from .config import ConfigurationError, SystemConfig, load_config, parse_config
from .costs import CostReport, latency_report, resource_report
from .estimation import (EstimationResult, ensemble_mse, group_extract, mse,
                         preamble_ls, run_dl_training, run_pipeline,
                         run_preamble, run_ul_training, ul_extract, ul_recover)
from .fixedpoint import (FixedComplex, FixedFormat, fx_add, fx_mul,
                         magnitude_stats, parse_format, quantize, run_quantized)
from .grouping import (GroupAssignment, SortTrace, bitonic_sort,
                       cluster_identical, group_users, validate_grouping)
from .signature import (SearchConfig, SpatialSignature, energy_ratio, phi_grid,
                        reciprocity_map, signature_exact, signature_max1,
                        signature_max2, signature_max3)
from .spectral import (Spectrum, dft, dft_direct, idft, idft_sparse,
                       predicted_peak, rotate, rotated_spectrum)
from .sweep import SweepSpec, run_sweep, write_sweep_csv

__version__ = "0.1.0"
