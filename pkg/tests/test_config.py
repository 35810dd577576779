"""SystemConfig validation and plain-text config parsing."""

import math

import pytest

from adma.config import ConfigurationError, SystemConfig, load_config, parse_config


def test_defaults_are_valid():
    cfg = SystemConfig()
    assert cfg.M == 128 and cfg.K == 32 and cfg.L == 64 and cfg.tau == 16


def test_default_ut_power_gives_unit_scaling():
    cfg = SystemConfig(L=32, sigma_p2=2.0)
    assert cfg.ut_power == pytest.approx(64.0)
    assert cfg.ut_power / (cfg.L * cfg.sigma_p2) == pytest.approx(1.0)


def test_noise_var_follows_snr():
    cfg = SystemConfig(sigma_p2=2.0, snr_db=10.0)
    assert cfg.noise_var == pytest.approx(0.2)
    assert SystemConfig(snr_db=0.0).noise_var == pytest.approx(1.0)
    assert SystemConfig(snr_db=math.inf).noise_var == 0.0


def test_user_thetas_cycles_centers():
    cfg = SystemConfig(K=6, theta_centers_deg=(-30.0, 0.0, 30.0))
    assert cfg.user_thetas() == [-30.0, 0.0, 30.0, -30.0, 0.0, 30.0]


@pytest.mark.parametrize("kwargs", [
    dict(M=96),                       # not a power of two
    dict(M=8, tau=16),                # tau > M
    dict(L=8, tau=16),                # L < tau
    dict(K=0),
    dict(d_over_lambda_ul=0.0),
    dict(d_over_lambda_ul=0.6),
    dict(P_rays=0),
    dict(omega=-1),
    dict(sigma_p2=0.0),
    dict(lambda_ratio=0.0),
    dict(ut_power=-1.0),
    dict(delta_theta_deg=-0.1),
    dict(theta_centers_deg=()),
    dict(theta_centers_deg=(95.0,)),
])
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        SystemConfig(**kwargs)


def test_configuration_error_is_value_error():
    assert issubclass(ConfigurationError, ValueError)


def test_parse_config_basic():
    cfg = parse_config("""
    # scenario
    M = 64
    K = 4          # users
    L = 16
    tau = 8
    snr_db = 5.5
    theta_centers_deg = -20, 0, 20
    """)
    assert (cfg.M, cfg.K, cfg.L, cfg.tau) == (64, 4, 16, 8)
    assert cfg.snr_db == pytest.approx(5.5)
    assert cfg.theta_centers_deg == (-20.0, 0.0, 20.0)


def test_parse_config_unknown_key():
    with pytest.raises(ConfigurationError, match="unknown key"):
        parse_config("M = 64\nbogus = 3\n")


def test_parse_config_duplicate_key():
    with pytest.raises(ConfigurationError, match="duplicate"):
        parse_config("M = 64\nM = 32\n")


def test_parse_config_bad_value():
    with pytest.raises(ConfigurationError, match="bad value"):
        parse_config("M = sixty-four\n")


def test_parse_config_missing_equals():
    with pytest.raises(ConfigurationError, match="key = value"):
        parse_config("M 64\n")


def test_parse_config_validates_result():
    with pytest.raises(ConfigurationError):
        parse_config("M = 96\n")


def test_load_config(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text("M = 32\nK = 2\nL = 8\ntau = 4\n")
    cfg = load_config(path)
    assert (cfg.M, cfg.K, cfg.L, cfg.tau) == (32, 2, 8, 4)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(tmp_path / "nope.cfg")
