"""One- and two-parameter brute-force scans.

1D sweeps default to inherit-final seeding (the final state at one
parameter value seeds the next), which is what makes forward and
backward runs disagree under multistability.  2D grids are fixed-ic so
cells stay independent and the grid parallelizes without changing
output bytes.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .params import PARAM_NAMES
from ._kernels import sweep1d_kernel, sweep2d_kernel, lyap_kernel

DEFAULT_IC = (0.5, 0.5, 0.0)
CLUSTER_TOL_DEFAULT = 1e-4
SWEEP2D_MAX_SIDE = 2000
# k0 values the bubble family is observed at (periodic bubbles appear
# at 0.44 and turn chaotic by 0.45)
BUBBLE_K0_VALUES = (0.44, 0.441, 0.444, 0.446, 0.449, 0.45)


@dataclass(frozen=True)
class SweepSpec:
    param_name: str
    start: float
    stop: float
    n_points: int
    direction: str = "forward"          # forward | backward
    n_transient: int = 10000
    n_keep: int = 100
    ic_policy: str = "inherit-final"    # inherit-final | fixed-ic
    ic: tuple = DEFAULT_IC

    def __post_init__(self):
        if self.param_name not in PARAM_NAMES:
            raise ValueError(f"unknown parameter {self.param_name!r}")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")
        if self.start == self.stop:
            raise ValueError("start and stop must differ")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"direction must be forward or backward, got {self.direction!r}")
        if self.ic_policy not in ("fixed-ic", "inherit-final"):
            raise ValueError(f"unknown ic_policy {self.ic_policy!r}")

    def values(self):
        """Parameter values in walk order."""
        v = np.linspace(self.start, self.stop, self.n_points)
        return v if self.direction == "forward" else v[::-1].copy()


@dataclass
class BifurcationData:
    values: np.ndarray        # (n_points,) in walk order
    x: np.ndarray             # (n_points, n_keep), NaN rows where diverged
    diverged: np.ndarray      # (n_points,) bool
    branch_counts: np.ndarray  # (n_points,) int, 0 where diverged
    finals: np.ndarray        # (n_points, 3) state that seeds the next cell


@dataclass
class LyapunovSweepData:
    values: np.ndarray        # (n_points,)
    spectra: np.ndarray       # (n_points, 3), NaN rows where diverged
    diverged: np.ndarray


@dataclass
class Sweep2DData:
    us: np.ndarray
    vs: np.ndarray
    period_class: np.ndarray  # (nu, nv) int: -1 diverged, 0 aperiodic, p periodic
    lmax: np.ndarray          # (nu, nv), finite only on aperiodic cells


def count_branches(x_values, cluster_tol=CLUSTER_TOL_DEFAULT):
    """Number of 1D single-linkage clusters at cluster_tol."""
    v = np.sort(np.asarray(x_values, dtype=float))
    if v.size == 0:
        raise ValueError("no values to cluster")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    if v.size == 1:
        return 1
    return int(1 + np.count_nonzero(np.diff(v) > cluster_tol))


def _pv(params):
    return np.array(params.astuple())


def bifurcation_sweep(base_params, spec, cluster_tol=CLUSTER_TOL_DEFAULT):
    """Walk the parameter, keep the last n_keep x values per cell.

    A divergent cell gets a NaN row and, under inherit-final, the next
    cell is reseeded from the spec's initial condition so one blow-up
    does not blank the rest of the scan.
    """
    values = spec.values()
    n = spec.n_points
    kept = np.empty((n, spec.n_keep))
    diverged = np.zeros(n, dtype=np.bool_)
    finals = np.empty((n, 3))
    ix, iy, iphi = (float(v) for v in spec.ic)
    sweep1d_kernel(_pv(base_params), PARAM_NAMES.index(spec.param_name),
                   values, ix, iy, iphi, spec.n_transient, spec.n_keep,
                   spec.ic_policy == "inherit-final", ix, iy, iphi,
                   kept, diverged, finals)
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if not diverged[i]:
            counts[i] = count_branches(kept[i], cluster_tol)
    return BifurcationData(values, kept, diverged, counts, finals)


def lyapunov_sweep(base_params, spec, n_iter=100000):
    """One Lyapunov spectrum per parameter value under the ic policy."""
    values = spec.values()
    pidx = PARAM_NAMES.index(spec.param_name)
    pbase = _pv(base_params)
    spectra = np.full((spec.n_points, 3), np.nan)
    diverged = np.zeros(spec.n_points, dtype=np.bool_)
    x, y, phi = (float(v) for v in spec.ic)
    for i, val in enumerate(values):
        pv = pbase.copy()
        pv[pidx] = val
        if spec.ic_policy == "fixed-ic":
            x, y, phi = (float(v) for v in spec.ic)
        l1, l2, l3, _, status, fx, fy, fphi = lyap_kernel(
            pv, x, y, phi, spec.n_transient, n_iter)
        if status != 0:
            diverged[i] = True
            x, y, phi = (float(v) for v in spec.ic)
            continue
        spectra[i] = sorted((l1, l2, l3), reverse=True)
        x, y, phi = fx, fy, fphi
    return LyapunovSweepData(values, spectra, diverged)


def sweep2d(base_params, spec_u, spec_v, tol=1e-6, max_period=64, lyap_iter=30000):
    """Fixed-ic classification grid over two parameters.

    Each cell records the minimal period (capped at max_period; 0 means
    aperiodic, -1 diverged) and, for aperiodic cells only, the largest
    Lyapunov exponent.
    """
    if spec_u.n_points > SWEEP2D_MAX_SIDE or spec_v.n_points > SWEEP2D_MAX_SIDE:
        raise ValueError(f"grid side exceeds {SWEEP2D_MAX_SIDE}")
    if spec_u.param_name == spec_v.param_name:
        raise ValueError("the two axes must sweep different parameters")
    us = np.linspace(spec_u.start, spec_u.stop, spec_u.n_points)
    vs = np.linspace(spec_v.start, spec_v.stop, spec_v.n_points)
    n = spec_u.n_points * spec_v.n_points
    pclass = np.empty(n, dtype=np.int64)
    lmax = np.empty(n)
    x, y, phi = (float(v) for v in spec_u.ic)
    sweep2d_kernel(_pv(base_params), PARAM_NAMES.index(spec_u.param_name), us,
                   PARAM_NAMES.index(spec_v.param_name), vs,
                   x, y, phi, spec_u.n_transient, tol, max_period, lyap_iter,
                   pclass, lmax)
    shape = (spec_u.n_points, spec_v.n_points)
    return Sweep2DData(us, vs, pclass.reshape(shape), lmax.reshape(shape))


def multistability_witness(data_fwd, data_bwd, x_tol=1e-3):
    """Parameter values where forward and backward kept-x sets disagree.

    Two cells disagree when either diverges alone or their kept x
    ranges differ by more than x_tol in min or max.  A nonempty result
    is the multistability witness used for the hysteresis check.
    """
    vals = []
    bwd_by_value = {float(v): i for i, v in enumerate(data_bwd.values)}
    for i, v in enumerate(data_fwd.values):
        j = bwd_by_value.get(float(v))
        if j is None:
            continue
        da, db = data_fwd.diverged[i], data_bwd.diverged[j]
        if da != db:
            vals.append(float(v))
            continue
        if da:
            continue
        fa, fb = data_fwd.x[i], data_bwd.x[j]
        if (abs(fa.min() - fb.min()) > x_tol or abs(fa.max() - fb.max()) > x_tol):
            vals.append(float(v))
    return vals


def bubble_family(base_params, k0_values=BUBBLE_K0_VALUES, k_start=-8.0,
                  k_stop=-6.0, n_points=401, **spec_kw):
    """Family of k-sweeps at stepped k0: the periodic/chaotic bubble data.

    Returns [(k0, BifurcationData), ...]; plotting branch_counts per k
    shows bubbles as local maxima that appear and merge as k0 steps up.
    """
    out = []
    for k0 in k0_values:
        spec = SweepSpec("k", k_start, k_stop, n_points, **spec_kw)
        out.append((k0, bifurcation_sweep(base_params.with_(k0=k0), spec)))
    return out
