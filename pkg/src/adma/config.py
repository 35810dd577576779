"""Scenario configuration and plain-text config file loading."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


class ConfigurationError(ValueError):
    """Invalid scenario parameters or config file contents."""


# Default nominal user directions (degrees), cycled over users.
DEFAULT_THETA_CENTERS = (-48.59, -14.48, 14.48, 48.59)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass
class SystemConfig:
    """All scenario parameters for one simulation setup.

    M antennas at the base station (ULA), K single-antenna users, training
    sequences of length L, and tau pilot sequences / signature window size.
    """

    M: int = 128                      # BS antennas (power of two)
    K: int = 32                       # users
    L: int = 64                       # training sequence length
    tau: int = 16                     # signature size / pilots the BS handles
    d_over_lambda_ul: float = 0.5     # element spacing in UL wavelengths
    lambda_ratio: float = 1.0         # lambda_ul / lambda_dl
    sigma_p2: float = 1.0             # pilot symbol power (linear)
    snr_db: float = 10.0              # training SNR, 10*log10(sigma_p2 / noise_var)
    omega: int = 2                    # guard interval between signatures (bins)
    P_rays: int = 100                 # rays per user
    delta_theta_deg: float = 2.0      # half angular spread per user (degrees)
    ut_power: float | None = None     # per-user UL training energy; None -> d_k = 1
    theta_centers_deg: tuple[float, ...] = field(default_factory=lambda: DEFAULT_THETA_CENTERS)

    def __post_init__(self):
        if self.ut_power is None:
            # default makes the per-user power scaling d_k = ut_power/(L*sigma_p2) = 1
            self.ut_power = float(self.L) * float(self.sigma_p2)
        self.theta_centers_deg = tuple(float(t) for t in self.theta_centers_deg)
        self.validate()

    def validate(self):
        c = self
        if not (c.M >= c.tau >= 1):
            raise ConfigurationError(f"need M >= tau >= 1, got M={c.M}, tau={c.tau}")
        if not _is_pow2(c.M):
            raise ConfigurationError(f"M must be a power of two, got {c.M}")
        if c.L < c.tau:
            raise ConfigurationError(f"need L >= tau, got L={c.L}, tau={c.tau}")
        if c.K < 1:
            raise ConfigurationError(f"need K >= 1, got {c.K}")
        if not (0.0 < c.d_over_lambda_ul <= 0.5):
            raise ConfigurationError(
                f"d_over_lambda_ul must be in (0, 0.5], got {c.d_over_lambda_ul}")
        if c.P_rays < 1:
            raise ConfigurationError(f"need P_rays >= 1, got {c.P_rays}")
        if c.omega < 0:
            raise ConfigurationError(f"need omega >= 0, got {c.omega}")
        if c.sigma_p2 <= 0:
            raise ConfigurationError(f"sigma_p2 must be positive, got {c.sigma_p2}")
        if c.lambda_ratio <= 0:
            raise ConfigurationError(f"lambda_ratio must be positive, got {c.lambda_ratio}")
        if c.ut_power <= 0:
            raise ConfigurationError(f"ut_power must be positive, got {c.ut_power}")
        if c.delta_theta_deg < 0:
            raise ConfigurationError(f"delta_theta_deg must be >= 0, got {c.delta_theta_deg}")
        if not c.theta_centers_deg:
            raise ConfigurationError("theta_centers_deg must be nonempty")
        for t in c.theta_centers_deg:
            if not -90.0 < t < 90.0:
                raise ConfigurationError(f"theta center {t} outside (-90, 90)")

    @property
    def noise_var(self) -> float:
        """Per-element noise variance implied by the training SNR."""
        return self.sigma_p2 * 10.0 ** (-self.snr_db / 10.0)

    def user_thetas(self) -> list[float]:
        """Nominal DOA for each of the K users (centers cycled)."""
        cs = self.theta_centers_deg
        return [cs[k % len(cs)] for k in range(self.K)]


_INT_FIELDS = {"M", "K", "L", "tau", "omega", "P_rays"}
_FLOAT_FIELDS = {"d_over_lambda_ul", "lambda_ratio", "sigma_p2", "snr_db",
                 "delta_theta_deg", "ut_power"}


def parse_config(text: str) -> SystemConfig:
    """Parse `key = value` lines into a SystemConfig.

    Blank lines and `#` comments are ignored; unknown keys are rejected.
    """
    known = {f.name for f in fields(SystemConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_FIELDS:
                values[key] = int(val)
            elif key in _FLOAT_FIELDS:
                values[key] = float(val)
            elif key == "theta_centers_deg":
                values[key] = tuple(float(v) for v in val.split(",") if v.strip())
            else:
                values[key] = val
        except ValueError as e:
            raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {val!r}") from e
    try:
        return SystemConfig(**values)
    except TypeError as e:
        raise ConfigurationError(str(e)) from e


def load_config(path) -> SystemConfig:
    """Read a plain-text key-value scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}") from e
    return parse_config(text)
