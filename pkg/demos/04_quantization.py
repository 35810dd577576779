"""Sizing the fixed-point datapath.

The hardware runs the rotation, FFT, window selection, and recovery in
fixed[1,p,q]: one sign bit, p integer bits, q fractional bits, with
round-to-nearest-even and saturation at +/-(2^p - 2^-q). Two questions
decide the format:

  1. How many integer bits? Look at the largest magnitudes the datapath
     ever sees across many channel draws.
  2. How many fractional bits? Sweep q and watch the estimation MSE
     approach the floating-point reference.
"""

import numpy as np

from adma.config import SystemConfig
from adma.fixedpoint import magnitude_stats
from adma.sweep import SweepSpec, draw_channel_batch, run_sweep

cfg = SystemConfig()

# --- integer bits: empirical magnitude range -------------------------------
draws = []
for t in range(40):
    rng = np.random.default_rng(np.random.SeedSequence(4, spawn_key=(t,)))
    h, _, _ = draw_channel_batch(cfg, rng)
    draws.append(h)
stats = magnitude_stats(np.concatenate(draws), n_grid=3)
print(f"largest magnitude over {sum(d.shape[0] for d in draws)} channel "
      f"draws: {stats.overall_max:.2f}")
print(f"  -> p = 8 integer bits (headroom to {2**8}) is comfortably safe\n")

# --- fractional bits: MSE vs the float reference ---------------------------
spec = SweepSpec(snr_list=(0.0, 10.0, 20.0), trials=150, methods=("max3",),
                 modes=("float", "fixed:1,8,5", "fixed:1,8,6", "fixed:1,8,7"),
                 seed=4)
rows = run_sweep(cfg, spec)
table = {(r.snr_db, r.mode): r.ensemble_mse for r in rows}

modes = ("float", "fixed:1,8,7", "fixed:1,8,6", "fixed:1,8,5")
print(f"ensemble MSE, {spec.trials} draws, max3 selection\n")
print("SNR(dB) " + "".join(f"{m:>14}" for m in modes))
for snr in spec.snr_list:
    print(f"{snr:7.0f} " + "".join(f"{table[(snr, m)]:14.5f}" for m in modes))

print("\npenalty vs float (dB):")
print("SNR(dB) " + "".join(f"{m:>14}" for m in modes[1:]))
for snr in spec.snr_list:
    ref = table[(snr, "float")]
    print(f"{snr:7.0f} " + "".join(
        f"{10 * np.log10(table[(snr, m)] / ref):14.3f}" for m in modes[1:]))

print("\nsix fractional bits already sit within ~1 dB of float; "
      "five bits visibly degrade.")
