"""Critical sets of the non-invertible maps and preimage counting.

The folding locus LC_{-1} is the zero set of the Jacobian determinant;
its forward image LC separates regions whose points have different
numbers of preimages.  For the 2D map the locus is the pair of lines
x = 0 and x = 2a/(a - b), independent of y because the exponential
factor never vanishes.
"""

from dataclasses import dataclass

import numpy as np

from .maps import step2, memductance, _exp

X_SEARCH_DEFAULT = (-10.0, 20.0)
GRID_N_DEFAULT = 40001
ROOT_TOL_DEFAULT = 1e-10


@dataclass
class CriticalSet:
    dimension: str        # curve | surface
    points: np.ndarray    # (n, 2) or (n, 3) samples on the zero set
    residuals: np.ndarray


def lc_residual2(a, b, s2):
    """det of the 2D Jacobian at s2: e^(y-x) * (2ax - ax^2 + bx^2)."""
    x, y = s2
    e = _exp(y - x)
    return e * (2.0 * x - x * x) * a + b * x * x * e


def lc_residual3(params, s):
    """det of the 3D Jacobian at s (plain determinant, no sign flip)."""
    x, y, phi = s
    e = _exp(y - x)
    j00 = e * (2.0 * x - x * x) + params.k * memductance(params.alpha, params.beta, phi)
    j01 = x * x * e
    j02 = 6.0 * params.k * params.beta * x * phi
    return (-params.a * params.k2 * j00
            - params.b * params.k2 * j01
            - params.a * params.k1 * j02)


def extract_lc2(a, b, window, grid_n=201):
    """Marching-squares zero contour of lc_residual2 on the window.

    window is ((x_min, x_max), (y_min, y_max)).  Returns edge-crossing
    points found by linear interpolation along grid edges; the set is a
    scatter sample of the folding lines, not an ordered polyline.
    """
    (x0, x1), (y0, y1) = window
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    f = np.empty((grid_n, grid_n))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            f[i, j] = lc_residual2(a, b, (x, y))
    pts = []
    # horizontal edges (varying x at fixed y)
    for j in range(grid_n):
        row = f[:, j]
        for i in range(grid_n - 1):
            fa, fb = row[i], row[i + 1]
            if fa == 0.0:
                pts.append((xs[i], ys[j]))
            elif (fa < 0.0) != (fb < 0.0):
                t = fa / (fa - fb)
                pts.append((xs[i] + t * (xs[i + 1] - xs[i]), ys[j]))
    # vertical edges
    for i in range(grid_n):
        col = f[i, :]
        for j in range(grid_n - 1):
            fa, fb = col[j], col[j + 1]
            if (fa < 0.0) != (fb < 0.0) and fa != 0.0:
                t = fa / (fa - fb)
                pts.append((xs[i], ys[j] + t * (ys[j + 1] - ys[j])))
    if not pts:
        return CriticalSet("curve", np.empty((0, 2)), np.empty(0))
    arr = np.array(pts)
    res = np.array([lc_residual2(a, b, p) for p in arr])
    return CriticalSet("curve", arr, res)


def lc2_image(a, b, c, k0, cs):
    """Forward image of an LC_{-1} sample set: the LC curve."""
    pts = np.array([step2(a, b, c, k0, p) for p in cs.points])
    return pts.reshape(-1, 2)


def sample_lc3(params, window, grid_n=41, tol=1e-8):
    """Scatter samples of the 3D critical surface det J = 0.

    Scans x-direction grid segments at fixed (y, phi) and bisects each
    sign change; emitted as loose points (x, y, phi) with residuals.
    """
    (x0, x1), (y0, y1), (p0, p1) = window
    xs = np.linspace(x0, x1, grid_n)
    pts = []
    for y in np.linspace(y0, y1, grid_n):
        for phi in np.linspace(p0, p1, grid_n):
            f_prev = lc_residual3(params, (xs[0], y, phi))
            for i in range(1, grid_n):
                f_cur = lc_residual3(params, (xs[i], y, phi))
                if (f_prev < 0.0) != (f_cur < 0.0):
                    lo, hi, flo = xs[i - 1], xs[i], f_prev
                    for _ in range(80):
                        mid = 0.5 * (lo + hi)
                        fm = lc_residual3(params, (mid, y, phi))
                        if abs(fm) <= tol:
                            lo = hi = mid
                            break
                        if (fm < 0.0) == (flo < 0.0):
                            lo, flo = mid, fm
                        else:
                            hi = mid
                    pts.append((0.5 * (lo + hi), y, phi))
                f_prev = f_cur
    if not pts:
        return CriticalSet("surface", np.empty((0, 3)), np.empty(0))
    arr = np.array(pts)
    res = np.array([lc_residual3(params, p) for p in arr])
    return CriticalSet("surface", arr, res)


def _bracketed_roots(h, x_range, grid_n, tol):
    lo, hi = x_range
    xs = np.linspace(lo, hi, grid_n)
    vals = np.array([h(x) for x in xs])
    roots = []
    for i in range(grid_n - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(xs[i])
            continue
        if (fa < 0.0) != (fb < 0.0):
            a_, b_ = xs[i], xs[i + 1]
            for _ in range(200):
                mid = 0.5 * (a_ + b_)
                fm = h(mid)
                if abs(fm) <= tol or b_ - a_ < 1e-15 * max(1.0, abs(mid)):
                    break
                if (fm < 0.0) == (fa < 0.0):
                    a_, fa = mid, fm
                else:
                    b_ = mid
            roots.append(0.5 * (a_ + b_))
    if vals[-1] == 0.0:
        roots.append(xs[-1])
    merged = []
    for r in sorted(roots):
        if merged and abs(r - merged[-1]) <= 10.0 * max(tol, 1e-12):
            continue
        merged.append(r)
    return merged


def preimages(params, target, x_search_range=X_SEARCH_DEFAULT,
              grid_n=GRID_N_DEFAULT, tol=ROOT_TOL_DEFAULT):
    """All preimages of target under the 2D (len-2 target) or 3D map.

    The linear y (and phi) components invert exactly, leaving one
    transcendental equation in x:

        y = (y' - c + b*x)/a            phi = (k1*x - phi')/k2

    whose bracketed roots over x_search_range are refined by bisection.
    Completeness is only up to the grid resolution over the search
    range, which covers the attractor boxes with margin.
    """
    a, b, c, k0 = params.a, params.b, params.c, params.k0
    if len(target) == 2:
        if a == 0.0:
            raise ValueError("a = 0 makes the y elimination singular")
        tx, ty = target

        def h(x):
            y = (ty - c + b * x) / a
            return x * x * _exp(y - x) + k0 - tx

        roots = _bracketed_roots(h, x_search_range, grid_n, tol)
        return [(x, (ty - c + b * x) / a) for x in roots]
    if len(target) == 3:
        if a == 0.0:
            raise ValueError("a = 0 makes the y elimination singular")
        if params.k2 == 0.0:
            raise ValueError("k2 = 0 makes the phi elimination singular")
        tx, ty, tphi = target
        k, alpha, beta = params.k, params.alpha, params.beta
        k1, k2 = params.k1, params.k2

        def h(x):
            y = (ty - c + b * x) / a
            phi = (k1 * x - tphi) / k2
            return (x * x * _exp(y - x) + k0
                    + k * x * memductance(alpha, beta, phi) - tx)

        roots = _bracketed_roots(h, x_search_range, grid_n, tol)
        return [(x, (ty - c + b * x) / a, (k1 * x - tphi) / k2) for x in roots]
    raise ValueError("target must have 2 or 3 components")


def count_preimages(params, target, x_search_range=X_SEARCH_DEFAULT,
                    grid_n=GRID_N_DEFAULT, tol=ROOT_TOL_DEFAULT):
    return len(preimages(params, target, x_search_range, grid_n, tol))
