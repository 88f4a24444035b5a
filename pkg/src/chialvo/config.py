"""Flat `key = value` run configuration.

Every tunable in the toolkit is a scalar or a small enum, so a flat
namespace beats nesting: one parser, one defaults table, one echo
format.  Unknown keys are rejected rather than ignored because a typo
that silently falls back to a default is the worst failure mode a
reproducibility tool can have.
"""

from dataclasses import dataclass


class ConfigError(Exception):
    """Bad configuration input; maps to exit code 2 in the CLI."""


# name -> default; the default's type is the key's type.  Enum-valued
# keys are validated where they are consumed.
DEFAULTS = {
    # map parameters
    "a": 0.5,
    "b": 0.4,
    "c": 0.89,
    "k0": -0.44,
    "k": 0.0,
    "alpha": 0.1,
    "beta": 0.1,
    "k1": 0.1,
    "k2": 0.2,
    # orbit schedule
    "n_transient": 10000,
    "n_keep": 1000,
    "period_tol": 1e-6,
    "max_period": 64,
    "ic_x": 0.5,
    "ic_y": 0.5,
    "ic_phi": 0.0,
    # root solving
    "x_min": -5.0,
    "x_max": 15.0,
    "grid_n": 20001,
    "root_tol": 1e-10,
    # 1D/2D sweeps
    "param": "k",
    "start": 0.0,
    "stop": 0.0,
    "n_points": 201,
    "direction": "forward",
    "ic_policy": "inherit-final",
    "cluster_tol": 1e-4,
    "param2": "c",
    "start2": 0.0,
    "stop2": 0.0,
    "n_points2": 201,
    "lyap_iter": 30000,
    # lyapunov
    "n_iter": 100000,
    # continuation
    "free_param": "a",
    "step0": 1e-3,
    "step_min": 1e-8,
    "step_max": 0.1,
    "n_max": 2000,
    # critical sets / preimages
    "map_dim": 2,
    "window_x_min": -2.0,
    "window_x_max": 12.0,
    "window_y_min": -2.0,
    "window_y_max": 2.0,
    "window_phi_min": -0.5,
    "window_phi_max": 0.5,
    "contour_n": 201,
    "image": False,
    "target_x": 1.0,
    "target_y": 0.0,
    "target_phi": 0.0,
    "search_x_min": -10.0,
    "search_x_max": 20.0,
    "search_grid_n": 40001,
    # basins
    "basin_x_min": -3.0,
    "basin_x_max": 3.0,
    "basin_y_min": -1.0,
    "basin_y_max": 21.0,
    "nx": 1000,
    "ny": 1000,
    "phi0": 0.0,
    "max_iter": 50000,
    "match_tol": 1e-4,
    "bbox_window": 2000,
    # network
    "N": 100,
    "R": 10,
    "sigma": 0.0,
    "mu": 0.0,
    "hub_in_ring": True,
    "seed": 0,
    "net_n_transient": 5000,
    "n_record": 500,
    "stride": 1,
    "window_w": 7,
    "eps": 0.01,
    "sync_threshold": 0.01,
    "sync_frac": 0.8,
    "coh_threshold": 0.08,
    "chimera_frac_lo": 0.05,
    "min_run": 5,
    "cluster_eps": 0.01,
    "max_clusters": 6,
    "tight_diameter": 0.05,
    # x-k scans
    "k_min": -3.0,
    "k_max": 0.0,
    "n_k": 31,
    "seed_policy": "same",
    "xk_n_transient": 500,
    "emit": "field",
}

MAP_PARAM_KEYS = ("a", "b", "c", "k0", "k", "alpha", "beta", "k1", "k2")


@dataclass
class RunConfig:
    values: dict
    applied_defaults: tuple

    def get(self, name):
        return self.values[name]

    def map_params(self):
        from .params import MapParams
        return MapParams(**{k: self.values[k] for k in MAP_PARAM_KEYS})

    def network_params(self):
        from .params import NetworkParams
        return NetworkParams(map=self.map_params(), N=self.values["N"],
                             R=self.values["R"], sigma=self.values["sigma"],
                             mu=self.values["mu"],
                             hub_in_ring=self.values["hub_in_ring"])

    def thresholds(self):
        from .network import ClassifierThresholds
        v = self.values
        return ClassifierThresholds(
            sync_threshold=v["sync_threshold"], sync_frac=v["sync_frac"],
            coh_threshold=v["coh_threshold"],
            chimera_frac_lo=v["chimera_frac_lo"], min_run=v["min_run"],
            cluster_eps=v["cluster_eps"], max_clusters=v["max_clusters"],
            tight_diameter=v["tight_diameter"])


def _parse_value(key, raw, lineno):
    default = DEFAULTS[key]
    raw = raw.strip()
    if isinstance(default, bool):
        low = raw.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"line {lineno}: key {key!r} needs a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: key {key!r} needs an integer, got {raw!r}") from None
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: key {key!r} needs a number, got {raw!r}") from None
    return raw


def parse_config(text, overrides=()):
    """Parse `key = value` lines into a RunConfig.

    overrides is a sequence of "key=value" strings (command-line --set
    entries) applied after the text, winning over it.  The returned
    config lists which keys fell back to defaults, for the header echo.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.rstrip()!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw, lineno)
    for n, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"override {n}: expected key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"override {n}: unknown key {key!r}")
        values[key] = _parse_value(key, raw, n)
    applied = tuple(k for k in DEFAULTS if k not in values)
    for k in applied:
        values[k] = DEFAULTS[k]
    return RunConfig(values, applied)


def format_value(v):
    """Canonical text form; floats use the shortest round-trip repr."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_config(cfg):
    """Canonical `key = value` text; parse(emit(cfg)) equals cfg."""
    lines = [f"{k} = {format_value(cfg.values[k])}" for k in DEFAULTS]
    return "\n".join(lines) + "\n"
