"""Orbit iteration, divergence handling, period detection, fingerprints.

An orbit is iterated for a transient that is thrown away, then a kept
tail that every later analysis works on.  Divergence (non-finite state
or |x| beyond DIVERGENCE_THRESHOLD) is data, not an error: it is how
white regions of parameter/initial-condition scans are produced.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .maps import step3

DIVERGENCE_THRESHOLD = 1e6
N_TRANSIENT_DEFAULT = 10000
N_KEEP_DEFAULT = 1000
PERIOD_TOL_DEFAULT = 1e-6
MAX_PERIOD_DEFAULT = 64


@dataclass
class Trajectory:
    states: np.ndarray          # (m, 3) kept tail, finite rows only
    diverged: bool
    divergence_step: Optional[int]   # 1-based map application index


@dataclass
class AttractorRecord:
    kind: str                   # fixed-point | periodic | chaotic | diverged
    period: int
    points: Optional[np.ndarray]     # (period, 3) cycle in phase order
    max_lyapunov: Optional[float]
    bounding_box: Optional[np.ndarray]   # (3, 2) per-coordinate min/max


def _bad(s):
    x, y, phi = s
    return (not (math.isfinite(x) and math.isfinite(y) and math.isfinite(phi))
            or abs(x) > DIVERGENCE_THRESHOLD)


def iterate(params, ic, n_transient=N_TRANSIENT_DEFAULT, n_keep=N_KEEP_DEFAULT):
    """Run the 3D map and keep the last n_keep states.

    The initial condition itself is not recorded.  On divergence the
    trajectory stops at the offending step; states recorded before it
    are all finite.
    """
    if n_transient < 0 or n_keep < 1:
        raise ValueError("need n_transient >= 0 and n_keep >= 1")
    s = (float(ic[0]), float(ic[1]), float(ic[2]))
    total = n_transient + n_keep
    kept = []
    for n in range(1, total + 1):
        s = step3(params, s)
        if _bad(s):
            return Trajectory(np.array(kept).reshape(-1, 3), True, n)
        if n > n_transient:
            kept.append(s)
    return Trajectory(np.array(kept), False, None)


def detect_period(traj, tol=PERIOD_TOL_DEFAULT, max_period=MAX_PERIOD_DEFAULT):
    """Smallest period p <= max_period of the kept tail, or None.

    p qualifies only if every pair of states p apart agrees within tol
    in the max norm, so the returned value is the minimal period of the
    whole tail, not of a lucky subsequence.
    """
    if traj.diverged:
        raise ValueError("diverged trajectory has no period")
    tail = traj.states
    if len(tail) < 3 * max_period:
        raise ValueError(f"tail too short for max_period={max_period}: "
                         f"need {3 * max_period} states, have {len(tail)}")
    for p in range(1, max_period + 1):
        d = np.abs(tail[p:] - tail[:-p]).max()
        if d < tol:
            return p
    return None


def canonical_cycle(points):
    """Rotate a cycle so the lexicographically smallest point is first."""
    arr = np.asarray(points)
    best = 0
    for i in range(1, len(arr)):
        if tuple(arr[i]) < tuple(arr[best]):
            best = i
    return np.roll(arr, -best, axis=0)


def _bbox(tail):
    return np.stack([tail.min(axis=0), tail.max(axis=0)], axis=1)


def fingerprint(params, ic, n_transient=N_TRANSIENT_DEFAULT, n_keep=N_KEEP_DEFAULT,
                tol=PERIOD_TOL_DEFAULT, max_period=MAX_PERIOD_DEFAULT):
    """Classify the attractor reached from ic.

    Period 1 is reported as kind fixed-point; an aperiodic bounded
    orbit is reported as chaotic, carrying the largest Lyapunov
    exponent measured from the end of the run.
    """
    traj = iterate(params, ic, n_transient, n_keep)
    if traj.diverged:
        return AttractorRecord("diverged", 0, None, None, None)
    p = detect_period(traj, tol, max_period)
    box = _bbox(traj.states)
    if p is not None:
        pts = canonical_cycle(traj.states[-p:])
        kind = "fixed-point" if p == 1 else "periodic"
        return AttractorRecord(kind, p, pts, None, box)
    from .lyapunov import lyapunov_spectrum
    lam = lyapunov_spectrum(params, tuple(traj.states[-1]), n_transient=0, n_iter=30000)
    return AttractorRecord("chaotic", 0, None, float(lam[0]), box)


def _cycles_align(a, b, match_tol):
    p = len(a)
    for r in range(p):
        if np.abs(a - np.roll(b, r, axis=0)).max() <= match_tol:
            return True
    return False


def _overlap_fraction(box_a, box_b, floor):
    fracs = []
    for i in range(box_a.shape[0]):
        lo = max(box_a[i, 0], box_b[i, 0])
        hi = min(box_a[i, 1], box_b[i, 1])
        inter = max(0.0, hi - lo)
        wa = box_a[i, 1] - box_a[i, 0]
        wb = box_b[i, 1] - box_b[i, 0]
        denom = max(wa, wb, floor)
        fracs.append(inter / denom)
    return min(fracs)


def match_attractor(record, catalog, match_tol=1e-4):
    """Index of the catalog entry this record belongs to, or None.

    Periodic records require equal period and point-set alignment under
    some cyclic rotation; chaotic records require at least 80% bounding
    box overlap in every coordinate (overlap measured against the wider
    of the two boxes, with match_tol as a width floor so point-like
    boxes compare sanely).
    """
    if record.kind == "diverged":
        raise ValueError("diverged records are not matchable")
    for i, entry in enumerate(catalog):
        if record.kind == "chaotic":
            if entry.kind != "chaotic":
                continue
            if _overlap_fraction(record.bounding_box, entry.bounding_box, match_tol) >= 0.8:
                return i
        else:
            if entry.kind == "chaotic" or entry.period != record.period:
                continue
            if _cycles_align(record.points, entry.points, match_tol):
                return i
    return None
