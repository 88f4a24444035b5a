"""Command-line front end: every analysis as a CSV-emitting subcommand.

Output files are self-describing: a `#` header carries the tool
version, the full effective configuration, and the seed, so re-running
with the echoed config reproduces the data section byte for byte.
Worker count is deliberately NOT echoed (and never changes bytes);
it is execution scheduling, not configuration.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 divergence-only result under --require-bounded.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import (ConfigError, DEFAULTS, MAP_PARAM_KEYS, parse_config,
                     format_value)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DIVERGED = 4

SUBCOMMANDS = ("fixed-points", "orbit", "lyapunov", "lyapunov-sweep",
               "bifurcation", "sweep2d", "continue", "critical-set",
               "preimages", "basin", "network", "xk-scan")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _check_param(name):
    if name not in MAP_PARAM_KEYS:
        raise ConfigError(f"not a map parameter: {name!r}")
    return name


def _header(cfg, command, columns):
    lines = [f"# chialvo {__version__}",
             f"# command = {command}",
             f"# seed = {cfg.values['seed']}",
             "# config:"]
    for k in DEFAULTS:
        lines.append(f"#   {k} = {format_value(cfg.values[k])}")
    lines.append("# columns: " + ",".join(columns))
    return lines


def _emit(args, cfg, command, columns, rows, trailer=()):
    lines = _header(cfg, command, columns)
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(trailer)
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep_spec(cfg, second_axis=False, ic_policy=None):
    from .sweeps import SweepSpec
    v = cfg.values
    suffix = "2" if second_axis else ""
    try:
        return SweepSpec(v["param" + suffix], v["start" + suffix],
                         v["stop" + suffix], v["n_points" + suffix],
                         direction=v["direction"],
                         n_transient=v["n_transient"], n_keep=v["n_keep"],
                         ic_policy=ic_policy or v["ic_policy"],
                         ic=(v["ic_x"], v["ic_y"], v["ic_phi"]))
    except ValueError as e:
        raise ConfigError(str(e)) from None


def cmd_fixed_points(args, cfg):
    from .fixed_points import find_fixed_points, classify
    v = cfg.values
    base = cfg.map_params()
    _check_param(v["param"])
    if v["start"] == v["stop"]:
        sweep_values = [getattr(base, v["param"])]
    else:
        sweep_values = np.linspace(v["start"], v["stop"], v["n_points"])
    rows = []
    for val in sweep_values:
        p = base.with_(**{v["param"]: float(val)})
        for fp in find_fixed_points(p, v["x_min"], v["x_max"], v["grid_n"],
                                    v["root_tol"]):
            rep = classify(p, fp)
            l1, l2, l3 = rep.eigenvalues
            rows.append((val, fp.x, fp.y, fp.phi, l1.real, l1.imag,
                         l2.real, l2.imag, l3.real, l3.imag,
                         rep.classification))
    cols = (v["param"], "x", "y", "phi", "re_l1", "im_l1", "re_l2", "im_l2",
            "re_l3", "im_l3", "type")
    return _emit(args, cfg, "fixed-points", cols, rows)


def cmd_orbit(args, cfg):
    from .orbits import iterate
    v = cfg.values
    traj = iterate(cfg.map_params(), (v["ic_x"], v["ic_y"], v["ic_phi"]),
                   v["n_transient"], v["n_keep"])
    trailer = []
    if traj.diverged:
        if args.require_bounded:
            print(f"orbit diverged at step {traj.divergence_step}",
                  file=sys.stderr)
            return EXIT_DIVERGED
        trailer.append(f"# diverged at step {traj.divergence_step}")
    base = v["n_transient"]
    rows = [(base + 1 + i, s[0], s[1], s[2])
            for i, s in enumerate(traj.states)]
    return _emit(args, cfg, "orbit", ("n", "x", "y", "phi"), rows, trailer)


def cmd_lyapunov(args, cfg):
    from .lyapunov import lyapunov_spectrum
    v = cfg.values
    p = cfg.map_params()
    _check_param(v["param"])
    spec = lyapunov_spectrum(p, (v["ic_x"], v["ic_y"], v["ic_phi"]),
                             v["n_transient"], v["n_iter"])
    rows = [(getattr(p, v["param"]),) + spec.exponents]
    return _emit(args, cfg, "lyapunov", (v["param"], "l1", "l2", "l3"), rows)


def cmd_lyapunov_sweep(args, cfg):
    from .sweeps import lyapunov_sweep
    data = lyapunov_sweep(cfg.map_params(), _sweep_spec(cfg),
                          n_iter=cfg.values["n_iter"])
    rows = [(data.values[i], data.spectra[i, 0], data.spectra[i, 1],
             data.spectra[i, 2]) for i in range(len(data.values))]
    cols = (cfg.values["param"], "l1", "l2", "l3")
    return _emit(args, cfg, "lyapunov-sweep", cols, rows)


def cmd_bifurcation(args, cfg):
    from .sweeps import bifurcation_sweep
    data = bifurcation_sweep(cfg.map_params(), _sweep_spec(cfg),
                             cluster_tol=cfg.values["cluster_tol"])
    rows = []
    for i, val in enumerate(data.values):
        d = 1 if data.diverged[i] else 0
        for t in range(data.x.shape[1]):
            rows.append((val, t, data.x[i, t], d))
    cols = (cfg.values["param"], "iterate_index", "x", "diverged")
    return _emit(args, cfg, "bifurcation", cols, rows)


def cmd_sweep2d(args, cfg):
    from .sweeps import sweep2d
    v = cfg.values
    spec_u = _sweep_spec(cfg, ic_policy="fixed-ic")
    spec_v = _sweep_spec(cfg, second_axis=True, ic_policy="fixed-ic")
    data = sweep2d(cfg.map_params(), spec_u, spec_v, tol=v["period_tol"],
                   max_period=v["max_period"], lyap_iter=v["lyap_iter"])
    rows = []
    for i, u in enumerate(data.us):
        for j, w in enumerate(data.vs):
            rows.append((u, w, data.lmax[i, j], data.period_class[i, j]))
    cols = (v["param"], v["param2"], "lmax", "period_class")
    return _emit(args, cfg, "sweep2d", cols, rows)


def cmd_continue(args, cfg):
    from .fixed_points import find_fixed_points
    from .continuation import continue_branch, detect_codim1
    v = cfg.values
    p = cfg.map_params()
    _check_param(v["free_param"])
    roots = find_fixed_points(p, v["x_min"], v["x_max"], v["grid_n"],
                              v["root_tol"])
    if not roots:
        raise ArithmeticError("no fixed point found to start the branch")
    # seed from the root closest to ic_x
    start = min(roots, key=lambda fp: abs(fp.x - v["ic_x"]))
    branch = continue_branch(p, v["free_param"], start, step0=v["step0"],
                             step_min=v["step_min"], step_max=v["step_max"],
                             n_max=v["n_max"],
                             direction=1 if v["direction"] == "forward" else -1)
    events = detect_codim1(branch)
    rows = []
    for i, bp in enumerate(branch.points):
        rows.append((i, bp.param, bp.state[0], bp.state[1], bp.state[2],
                     1 if bp.stability else 0, bp.test_lp, bp.test_pd,
                     bp.test_ns))
    trailer = [f"# event,{e.kind},{_fmt(e.param)},{_fmt(e.state[0])},"
               f"{_fmt(e.state[1])},{_fmt(e.state[2])}" for e in events]
    cols = ("arclength_index", v["free_param"], "x", "y", "phi", "stable",
            "test_lp", "test_pd", "test_ns")
    return _emit(args, cfg, "continue", cols, rows, trailer)


def cmd_critical_set(args, cfg):
    from .critical import extract_lc2, lc2_image, sample_lc3
    v = cfg.values
    if v["map_dim"] == 2:
        cs = extract_lc2(v["a"], v["b"],
                         ((v["window_x_min"], v["window_x_max"]),
                          (v["window_y_min"], v["window_y_max"])),
                         v["contour_n"])
        pts = (lc2_image(v["a"], v["b"], v["c"], v["k0"], cs)
               if v["image"] else cs.points)
        rows = [tuple(p) for p in pts]
        cols = ("x", "y")
    elif v["map_dim"] == 3:
        cs = sample_lc3(cfg.map_params(),
                        ((v["window_x_min"], v["window_x_max"]),
                         (v["window_y_min"], v["window_y_max"]),
                         (v["window_phi_min"], v["window_phi_max"])),
                        v["contour_n"])
        rows = [tuple(p) for p in cs.points]
        cols = ("x", "y", "phi")
    else:
        raise ConfigError(f"map_dim must be 2 or 3, got {v['map_dim']}")
    return _emit(args, cfg, "critical-set", cols, rows)


def cmd_preimages(args, cfg):
    from .critical import preimages
    v = cfg.values
    p = cfg.map_params()
    rng = (v["search_x_min"], v["search_x_max"])
    if v["map_dim"] == 2:
        target = (v["target_x"], v["target_y"])
        cols = ("tx", "ty", "count")
    elif v["map_dim"] == 3:
        target = (v["target_x"], v["target_y"], v["target_phi"])
        cols = ("tx", "ty", "tphi", "count")
    else:
        raise ConfigError(f"map_dim must be 2 or 3, got {v['map_dim']}")
    pre = preimages(p, target, rng, v["search_grid_n"], v["root_tol"])
    rows = [target + (len(pre),)]
    trailer = ["# preimage," + ",".join(_fmt(c) for c in q) for q in pre]
    return _emit(args, cfg, "preimages", cols, rows, trailer)


def cmd_basin(args, cfg):
    from .basins import compute_basin, BasinRunConfig
    v = cfg.values
    run = BasinRunConfig(max_iter=v["max_iter"], tol=v["period_tol"],
                         max_period=v["max_period"], match_tol=v["match_tol"],
                         lyap_iter=v["lyap_iter"],
                         bbox_window=v["bbox_window"])
    grid = compute_basin(cfg.map_params(),
                         ((v["basin_x_min"], v["basin_x_max"]),
                          (v["basin_y_min"], v["basin_y_max"])),
                         v["nx"], v["ny"], v["phi0"], run)
    if args.require_bounded and np.all(grid.labels == -1):
        print("basin grid is divergence-only", file=sys.stderr)
        return EXIT_DIVERGED
    rows = []
    for ix in range(grid.nx):
        for iy in range(grid.ny):
            rows.append((ix, iy, grid.x_centers[ix], grid.y_centers[iy],
                         grid.labels[ix, iy]))
    trailer = []
    for label, rec in enumerate(grid.catalog):
        if rec.kind == "chaotic":
            b = rec.bounding_box
            info = ",".join(_fmt(c) for c in
                            (rec.max_lyapunov, b[0, 0], b[0, 1], b[1, 0],
                             b[1, 1], b[2, 0], b[2, 1]))
        else:
            info = ",".join(_fmt(c) for p in rec.points for c in p)
        trailer.append(f"# catalog,{label},{rec.kind},{rec.period},{info}")
    cols = ("ix", "iy", "x0", "y0", "label")
    return _emit(args, cfg, "basin", cols, rows, trailer)


def cmd_network(args, cfg):
    from .network import simulate_network, coherence_profile_and_classify
    v = cfg.values
    emit = v["emit"]
    if emit not in ("field", "end", "recurrence"):
        raise ConfigError(f"emit must be field, end or recurrence, got {emit!r}")
    net = cfg.network_params()
    field = simulate_network(net, v["seed"], v["net_n_transient"],
                             v["n_record"], v["stride"])
    trailer = []
    if field.diverged:
        if args.require_bounded:
            print(f"network run diverged at step {field.divergence_step}",
                  file=sys.stderr)
            return EXIT_DIVERGED
        trailer.append(f"# diverged at step {field.divergence_step}")
        diag = None
    else:
        diag = coherence_profile_and_classify(field, v["window_w"],
                                              cfg.thresholds())
        trailer.extend([
            f"# class = {diag.state_class}",
            f"# sync_error = {_fmt(diag.sync_error)}",
            f"# cluster_count = {diag.cluster_count}",
        ])
    if emit == "field":
        rows = []
        n_rec = field.x.shape[1]
        for r in range(n_rec):
            t = field.n_transient + (r + 1) * field.stride
            for node in range(net.N):
                rows.append((t, node, field.x[node, r]))
        cols = ("t", "node", "x")
    elif emit == "end":
        rows = [(node, field.finals[node, 0], field.finals[node, 1],
                 field.finals[node, 2]) for node in range(net.N)]
        cols = ("node", "x_end", "y_end", "phi_end")
    else:
        if diag is None:
            raise ArithmeticError("no recurrence matrix for a diverged run")
        rows = [(i, j, int(diag.recurrence[i, j]))
                for i in range(net.N) for j in range(net.N)]
        cols = ("i", "j", "bit")
    return _emit(args, cfg, "network", cols, rows, trailer)


def cmd_xk_scan(args, cfg):
    from .network import xk_scan, cluster_count
    v = cfg.values
    net = cfg.network_params()
    if v["seed_policy"] not in ("same", "per-k"):
        raise ConfigError(f"seed_policy must be same or per-k, got {v['seed_policy']!r}")
    results = xk_scan(net, (v["k_min"], v["k_max"]), v["n_k"], seed=v["seed"],
                      seed_policy=v["seed_policy"],
                      n_transient=v["xk_n_transient"], n_record=v["n_record"],
                      stride=v["stride"])
    rows = []
    trailer = []
    any_bounded = False
    for k, field in results:
        if field.diverged:
            trailer.append(f"# k = {_fmt(k)} diverged at step {field.divergence_step}")
            for node in range(net.N):
                rows.append((k, node, float("nan")))
            continue
        any_bounded = True
        cc = cluster_count(field.x, v["eps"])
        trailer.append(f"# k = {_fmt(k)} cluster_count = {cc}")
        for node in range(net.N):
            rows.append((k, node, field.finals[node, 0]))
    if args.require_bounded and not any_bounded:
        print("every scanned k diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return _emit(args, cfg, "xk-scan", ("k", "node", "x_end"), rows, trailer)


HANDLERS = {
    "fixed-points": cmd_fixed_points,
    "orbit": cmd_orbit,
    "lyapunov": cmd_lyapunov,
    "lyapunov-sweep": cmd_lyapunov_sweep,
    "bifurcation": cmd_bifurcation,
    "sweep2d": cmd_sweep2d,
    "continue": cmd_continue,
    "critical-set": cmd_critical_set,
    "preimages": cmd_preimages,
    "basin": cmd_basin,
    "network": cmd_network,
    "xk-scan": cmd_xk_scan,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="chialvo",
        description="Analysis toolkit for the flux-coupled Chialvo neuron map")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a single config key (repeatable; wins over --config)")
        p.add_argument("--output", help="output CSV path (default stdout)")
        p.add_argument("--seed", type=int, help="override the seed key")
        p.add_argument("--workers", type=int,
                       help="numba thread count (default: CHIALVO_WORKERS or numba's own)")
        p.add_argument("--require-bounded", action="store_true",
                       help="exit 4 when the result is divergence-only")
    return parser


def _load_config(args):
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
    cfg = parse_config(text, args.set)
    if args.seed is not None:
        cfg.values["seed"] = args.seed
    return cfg


def _set_workers(args):
    n = args.workers
    if n is None:
        env = os.environ.get("CHIALVO_WORKERS")
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ConfigError(f"CHIALVO_WORKERS must be an integer, got {env!r}") from None
    if n is not None:
        if n < 1:
            raise ConfigError("worker count must be at least 1")
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _set_workers(args)
        cfg = _load_config(args)
        return HANDLERS[args.command](args, cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
