"""Command-line entry point.

Subcommands:
  simulate  one scenario, full preamble/UL/DL pipeline, per-user CSV
  sweep     Monte-Carlo MSE sweep over SNR/method/mode/grid, CSV
  cost      analytic latency and resource reports for both variants, CSV
  stats     magnitude statistics of the quantization-relevant signals, CSV

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import costs, estimation, fixedpoint, sweep
from .channel import gen_channel, gen_channel_dl
from .config import ConfigurationError, load_config


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="adma", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario key=value file")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    p_sim = sub.add_parser("simulate", help="one full pipeline run, per-user CSV")
    common(p_sim)
    p_sim.add_argument("--mode", default="float", help="float or fixed:1,p,q")
    p_sim.add_argument("--method", default="exact",
                       choices=("exact", "max1", "max2", "max3"))
    p_sim.add_argument("--n-grid", type=int, default=3)

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo MSE sweep, CSV")
    common(p_sweep)
    p_sweep.add_argument("--snr", default="0,5,10,15,20",
                         help="comma-separated SNR points in dB")
    p_sweep.add_argument("--trials", type=int, default=10_000)
    p_sweep.add_argument("--methods", default="exact",
                         help="comma-separated subset of exact,max1,max2,max3")
    p_sweep.add_argument("--modes", default="float",
                         help="comma-separated: float and/or fixed:1,p,q")
    p_sweep.add_argument("--n-grid", default="3", help="comma-separated grid sizes")

    p_cost = sub.add_parser("cost", help="latency and resource reports, CSV")
    common(p_cost)
    p_cost.add_argument("--variant", default=None, choices=("rot", "norot"),
                        help="restrict to one variant (default: both)")

    p_stats = sub.add_parser("stats", help="magnitude statistics, CSV")
    common(p_stats)
    p_stats.add_argument("--draws", type=int, default=1000)
    p_stats.add_argument("--bins", type=int, default=50)
    return parser


def _emit(out_path, text: str):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _arithmetic(mode: str):
    return "float" if mode == "float" else fixedpoint.parse_format(mode)


def _cmd_simulate(args) -> str:
    config = load_config(args.config)
    arithmetic = _arithmetic(args.mode)
    seeds = np.random.SeedSequence(args.seed).spawn(4)
    ch_seeds = seeds[0].spawn(config.K)
    dl_seeds = seeds[1].spawn(config.K)
    thetas = config.user_thetas()
    channels = [gen_channel(config, thetas[k], ch_seeds[k]) for k in range(config.K)]
    signatures, assignment, ul = estimation.run_pipeline(
        config, channels, method=args.method, n_grid=args.n_grid,
        rng_seed=seeds[2], arithmetic=arithmetic)
    channels_dl = [gen_channel_dl(config, channels[k], dl_seeds[k])
                   for k in range(config.K)]
    dl = estimation.run_dl_training(config, channels_dl, signatures,
                                    config.lambda_ratio, rng_seed=seeds[3],
                                    arithmetic=arithmetic)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "user", "stage", "snr_db", "method",
                     "arithmetic_mode", "mse"])
    for result in (ul, dl):
        for k in range(config.K):
            writer.writerow([0, k, result.stage, repr(config.snr_db),
                             args.method, args.mode,
                             repr(float(result.mse_per_user[k]))])
    return buf.getvalue()


def _parse_modes(text: str) -> tuple:
    """Split a mode list on commas, keeping 'fixed:1,p,q' specs intact."""
    tokens = [s.strip() for s in text.split(",") if s.strip()]
    modes = []
    i = 0
    while i < len(tokens):
        if tokens[i].startswith("fixed:"):
            if i + 2 >= len(tokens):
                raise ConfigurationError(f"truncated fixed-point mode in {text!r}")
            modes.append(",".join(tokens[i:i + 3]))
            i += 3
        else:
            modes.append(tokens[i])
            i += 1
    return tuple(modes)


def _cmd_sweep(args) -> str:
    config = load_config(args.config)
    try:
        snr = tuple(float(s) for s in args.snr.split(",") if s.strip())
        n_grids = tuple(int(s) for s in args.n_grid.split(",") if s.strip())
    except ValueError as e:
        raise ConfigurationError(f"bad numeric list: {e}") from e
    spec = sweep.SweepSpec(
        snr_list=snr, trials=args.trials,
        methods=tuple(s.strip() for s in args.methods.split(",") if s.strip()),
        modes=_parse_modes(args.modes), n_grid_list=n_grids, seed=args.seed)
    rows = sweep.run_sweep(config, spec)
    return sweep.rows_to_csv(rows)


def _cmd_cost(args) -> str:
    config = load_config(args.config)
    variants = {"rot": ("with_rotation",), "norot": ("without_rotation",)}.get(
        args.variant, costs.VARIANTS)
    lines = ["variant,module,metric,value"]
    for variant in variants:
        res = costs.resource_report(config, variant)
        lat = costs.latency_report(config, variant)
        for module, cost in res.resources.items():
            lines.append(f"{variant},{module},multipliers,{cost.multipliers}")
            lines.append(f"{variant},{module},adders,{cost.adders}")
            lines.append(f"{variant},{module},comparators,{cost.comparators}")
            lines.append(f"{variant},{module},registers,{cost.registers}")
        for module, cycles in lat.latency.items():
            if cycles is not None:
                lines.append(f"{variant},{module},latency,{cycles}")
        for module, cycles in lat.processing.items():
            lines.append(f"{variant},{module},processing,{cycles}")
        lo, hi = lat.extraction_latency_range
        lines.append(f"{variant},Extraction,latency_min,{lo}")
        lines.append(f"{variant},Extraction,latency_max,{hi}")
        lines.append(f"{variant},FFT,instances,{res.fft_instances}")
    return "\n".join(lines) + "\n"


def _cmd_stats(args) -> str:
    config = load_config(args.config)
    seeds = np.random.SeedSequence(args.seed).spawn(args.draws)
    thetas = config.user_thetas()
    hs = np.stack([gen_channel(config, thetas[i % config.K], seeds[i]).h
                   for i in range(args.draws)])
    stats = fixedpoint.magnitude_stats(hs)
    counts, edges = stats.histogram(bins=args.bins)
    lines = ["bin_lo,bin_hi,count"]
    for i, c in enumerate(counts):
        lines.append(f"{float(edges[i])!r},{float(edges[i + 1])!r},{int(c)}")
    lines.append(f"# overall_max,{float(stats.overall_max)!r}")
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "cost": _cmd_cost,
    "stats": _cmd_stats,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        text = _COMMANDS[args.command](args)
        _emit(args.out, text)
        return 0
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
