import pytest
from hypothesis import given, strategies as st

from chialvo.config import (DEFAULTS, MAP_PARAM_KEYS, ConfigError, emit_config,
                            format_value, parse_config)


def test_empty_text_is_all_defaults():
    cfg = parse_config("")
    assert cfg.values == DEFAULTS
    assert set(cfg.applied_defaults) == set(DEFAULTS)


def test_parse_basic_types_and_comments():
    cfg = parse_config("""
# map block
a = 0.75
n_points = 11        # inline comment
hub_in_ring = false
param = c
""")
    assert cfg.get("a") == 0.75
    assert cfg.get("n_points") == 11
    assert cfg.get("hub_in_ring") is False
    assert cfg.get("param") == "c"
    assert "a" not in cfg.applied_defaults
    assert "b" in cfg.applied_defaults


def test_bool_spellings():
    for raw, want in (("true", True), ("1", True), ("yes", True),
                      ("false", False), ("0", False), ("no", False)):
        assert parse_config(f"hub_in_ring = {raw}").get("hub_in_ring") is want
    with pytest.raises(ConfigError):
        parse_config("hub_in_ring = maybe")


def test_int_keys_reject_floats():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("n_points = 10.5")
    # but float keys accept integer literals
    assert parse_config("start = 2").get("start") == 2.0
    assert isinstance(parse_config("start = 2").get("start"), float)


def test_error_messages_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("a = 0.5\nb = 0.4\nwhat is this\n")
    with pytest.raises(ConfigError, match="line 2.*unknown key"):
        parse_config("a = 0.5\nbogus = 1\n")


def test_overrides_win_and_are_validated():
    cfg = parse_config("a = 0.1\n", overrides=("a=0.9", "seed=7"))
    assert cfg.get("a") == 0.9
    assert cfg.get("seed") == 7
    with pytest.raises(ConfigError, match="override 1"):
        parse_config("", overrides=("nope=1",))
    with pytest.raises(ConfigError, match="override 2"):
        parse_config("", overrides=("a=0.5", "just-a-word"))


def test_map_params_extraction():
    cfg = parse_config("k = 7.6\nbeta = 0.2\n")
    p = cfg.map_params()
    assert p.k == 7.6 and p.beta == 0.2
    assert p.a == DEFAULTS["a"]
    assert MAP_PARAM_KEYS == ("a", "b", "c", "k0", "k", "alpha", "beta", "k1", "k2")


def test_network_params_extraction():
    cfg = parse_config("N = 40\nR = 4\nsigma = 0.01\nmu = -0.001\nhub_in_ring = 0\n")
    net = cfg.network_params()
    assert (net.N, net.R, net.sigma, net.mu) == (40, 4, 0.01, -0.001)
    assert net.hub_in_ring is False
    assert net.map.a == DEFAULTS["a"]


def test_thresholds_extraction():
    th = parse_config("coh_threshold = 0.2\nmin_run = 3\n").thresholds()
    assert th.coh_threshold == 0.2 and th.min_run == 3


def test_emit_round_trip():
    cfg = parse_config("a = 0.123456789012345\nn_points = 33\nhub_in_ring = false\n")
    text = emit_config(cfg)
    again = parse_config(text)
    assert again.values == cfg.values
    # emission order is the canonical DEFAULTS order
    keys = [ln.split("=")[0].strip() for ln in text.splitlines()]
    assert keys == list(DEFAULTS)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip_is_exact(v):
    cfg = parse_config(f"start = {format_value(float(v))}\n")
    assert cfg.get("start") == v


@given(st.integers(min_value=-10**12, max_value=10**12))
def test_int_round_trip_is_exact(n):
    assert parse_config(f"seed = {n}\n").get("seed") == n


def test_format_value_spellings():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(0.1) == "0.1"
    assert format_value(7) == "7"
