"""Basin-of-attraction grids with a deterministic attractor catalog.

Cells are classified in two phases.  A parallel kernel produces one
orbit signature per cell (period, cycle representative, tail bounding
box, final state) with no shared state, so any worker partitioning
yields the same signatures.  A sequential arbiter then walks cells in
row-major order and commits catalog growth, which fixes label indices
regardless of how phase one was scheduled.

Labels: -2 unresolved (bounded but neither periodic nor verifiably
chaotic within budget), -1 divergent, >= 0 catalog index.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .maps import step3
from .orbits import AttractorRecord, canonical_cycle
from ._kernels import basin_kernel, lyap_kernel

_KIND_ORDER = {"fixed-point": 0, "periodic": 1, "chaotic": 2}


@dataclass
class BasinRunConfig:
    max_iter: int = 50000
    tol: float = 1e-6
    max_period: int = 64
    match_tol: float = 1e-4
    lyap_iter: int = 30000
    bbox_window: int = 2000


@dataclass
class BasinGrid:
    window: tuple             # ((x_min, x_max), (y_min, y_max))
    nx: int
    ny: int
    phi0: float
    labels: np.ndarray        # (nx, ny)
    catalog: list             # of AttractorRecord
    x_centers: np.ndarray
    y_centers: np.ndarray


def _overlap_ok(box_a, box_b, floor):
    # per-coordinate |intersection| / wider box >= 0.8, all coordinates
    for i in range(3):
        lo = max(box_a[2 * i], box_b[2 * i])
        hi = min(box_a[2 * i + 1], box_b[2 * i + 1])
        inter = hi - lo
        if inter < 0.0:
            inter = 0.0
        denom = max(box_a[2 * i + 1] - box_a[2 * i],
                    box_b[2 * i + 1] - box_b[2 * i], floor)
        if inter / denom < 0.8:
            return False
    return True


def _box32(b6):
    return np.array([[b6[0], b6[1]], [b6[2], b6[3]], [b6[4], b6[5]]])


def compute_basin(params, window, nx, ny, phi0=0.0, run_config=None):
    """Classify every cell-center initial condition of the window.

    The full iteration budget is always spent (divergence is the only
    early exit), so a cell's signature cannot depend on when its
    attractor was first seen.  An aperiodic cell only becomes a chaotic
    catalog entry if its measured largest Lyapunov exponent is
    positive; bounded aperiodic orbits that fail that bar are labeled
    unresolved, and their boxes are cached so the exponent is not
    re-measured for every look-alike cell.
    """
    if nx < 2 or ny < 2:
        raise ValueError("need nx, ny >= 2")
    cfg = run_config or BasinRunConfig()
    (x0, x1), (y0, y1) = window
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    x_centers = x0 + dx * (np.arange(nx) + 0.5)
    y_centers = y0 + dy * (np.arange(ny) + 0.5)
    ncell = nx * ny
    xs = np.repeat(x_centers, ny)
    ys = np.tile(y_centers, nx)

    status = np.empty(ncell, dtype=np.int64)
    period = np.empty(ncell, dtype=np.int64)
    rep = np.empty((ncell, 3))
    bbox = np.empty((ncell, 6))
    final = np.empty((ncell, 3))
    pv = np.array(params.astuple())
    basin_kernel(pv, xs, ys, float(phi0), cfg.max_iter, cfg.tol,
                 cfg.max_period, cfg.bbox_window, status, period, rep, bbox, final)

    labels = np.empty(ncell, dtype=np.int64)
    catalog = []
    neg_cache = []
    for ci in range(ncell):
        st = status[ci]
        if st == 2:
            labels[ci] = -1
            continue
        if st == 0:
            p = int(period[ci])
            r = rep[ci]
            match = None
            for idx, e in enumerate(catalog):
                if e.kind == "chaotic" or e.period != p:
                    continue
                d = np.abs(e.points - r).max(axis=1).min()
                if d <= cfg.match_tol:
                    match = idx
                    break
            if match is None:
                pts = [tuple(r)]
                s = tuple(r)
                for _ in range(p - 1):
                    s = step3(params, s)
                    pts.append(s)
                pts = canonical_cycle(np.array(pts))
                kind = "fixed-point" if p == 1 else "periodic"
                catalog.append(AttractorRecord(kind, p, pts, None, _box32(bbox[ci])))
                match = len(catalog) - 1
            labels[ci] = match
            continue
        # aperiodic: try the chaotic catalog, then the negative cache,
        # and only then pay for a Lyapunov measurement
        b = bbox[ci]
        match = None
        for idx, e in enumerate(catalog):
            if e.kind != "chaotic":
                continue
            eb = e.bounding_box
            if _overlap_ok(b, (eb[0, 0], eb[0, 1], eb[1, 0], eb[1, 1],
                               eb[2, 0], eb[2, 1]), cfg.match_tol):
                match = idx
                break
        if match is not None:
            labels[ci] = match
            continue
        if any(_overlap_ok(b, nb, cfg.match_tol) for nb in neg_cache):
            labels[ci] = -2
            continue
        res = lyap_kernel(pv, final[ci, 0], final[ci, 1], final[ci, 2],
                          0, cfg.lyap_iter)
        if res[4] == 0 and res[0] > 0.0:
            catalog.append(AttractorRecord("chaotic", 0, None, float(res[0]),
                                           _box32(b)))
            labels[ci] = len(catalog) - 1
        else:
            neg_cache.append(b.copy())
            labels[ci] = -2

    # stable output order: catalog sorted by (kind, period), labels remapped
    order = sorted(range(len(catalog)),
                   key=lambda i: (_KIND_ORDER[catalog[i].kind], catalog[i].period, i))
    remap = np.empty(len(catalog) + 2, dtype=np.int64)
    remap[0] = -2
    remap[1] = -1
    for new, old in enumerate(order):
        remap[old + 2] = new
    labels = remap[labels + 2]
    catalog = [catalog[i] for i in order]
    return BasinGrid(window, nx, ny, float(phi0), labels.reshape(nx, ny),
                     catalog, x_centers, y_centers)


def basin_statistics(grid):
    """Cell count and fraction per label; counts sum to nx*ny."""
    total = grid.nx * grid.ny
    out = {}
    for label in sorted(np.unique(grid.labels)):
        n = int(np.count_nonzero(grid.labels == label))
        out[int(label)] = (n, n / total)
    return out


def boundary_mask(grid):
    """Cells having a differently-labeled 4-neighbor."""
    lab = grid.labels
    mask = np.zeros_like(lab, dtype=bool)
    mask[1:, :] |= lab[1:, :] != lab[:-1, :]
    mask[:-1, :] |= lab[:-1, :] != lab[1:, :]
    mask[:, 1:] |= lab[:, 1:] != lab[:, :-1]
    mask[:, :-1] |= lab[:, :-1] != lab[:, 1:]
    return mask


def locate_multistable_k(base_params, k_values, ic_window=((-3.0, 3.0), (-1.0, 21.0)),
                         phi0=0.0, n_restarts=3, seed=0,
                         n_transient=20000, n_keep=1000):
    """Scan k for coexisting attractors via random-restart fingerprints.

    For each k, n_restarts initial conditions are drawn from ic_window
    (seeded, documented generator) and fingerprinted; distinct bounded
    attractors are counted through match_attractor.  Returns a list of
    (k, catalog) sorted as scanned plus the k with the most coexisting
    attractors (ties: first scanned).
    """
    from .orbits import fingerprint, match_attractor
    from .rng import Xoshiro256StarStar

    rng = Xoshiro256StarStar(seed)
    (ix0, ix1), (iy0, iy1) = ic_window
    results = []
    best_k = None
    best_n = -1
    for k in k_values:
        p = base_params.with_(k=float(k))
        catalog = []
        for _ in range(n_restarts):
            ic = (rng.random() * (ix1 - ix0) + ix0,
                  rng.random() * (iy1 - iy0) + iy0, phi0)
            rec = fingerprint(p, ic, n_transient=n_transient, n_keep=n_keep)
            if rec.kind == "diverged":
                continue
            if match_attractor(rec, catalog) is None:
                catalog.append(rec)
        results.append((float(k), catalog))
        if len(catalog) > best_n:
            best_n = len(catalog)
            best_k = float(k)
    return results, best_k
