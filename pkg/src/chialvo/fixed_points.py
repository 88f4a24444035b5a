"""Fixed points of the 3D map and their linear stability.

The fixed-point condition reduces to a single transcendental equation
in x after eliminating y and phi:

    y = (b*x - c)/(a - 1)
    phi = k1*x/(1 + k2)

so the scalar residual is

    F(x) = x^2 exp(((b - a + 1)x - c)/(a - 1)) + k0
           + k*x*(alpha + 3*beta*k1^2*x^2/(1 + k2)^2) - x.

The (1 + k2)^2 denominator follows from substituting the phi relation
into the memductance; every root returned here is re-checked against
the full 3D map, which pins that form down empirically.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .maps import jacobian3, _exp

X_MIN_DEFAULT = -5.0
X_MAX_DEFAULT = 15.0
GRID_N_DEFAULT = 20001
TOL_DEFAULT = 1e-10


@dataclass(frozen=True)
class FixedPoint:
    x: float
    y: float
    phi: float
    residual: float

    def state(self):
        return (self.x, self.y, self.phi)


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: tuple
    classification: str
    has_complex_pair: bool


def fp_residual(params, x):
    """Scalar fixed-point residual F(x); roots are fixed-point x values."""
    if params.a == 1.0:
        raise ValueError("a = 1 makes the fixed-point equation singular")
    y = (params.b * x - params.c) / (params.a - 1.0)
    q = params.k1 / (1.0 + params.k2)
    m = params.alpha + 3.0 * params.beta * (q * x) ** 2
    return x * x * _exp(y - x) + params.k0 + params.k * x * m - x


def _fp_residual_prime(params, x):
    g = ((params.b - params.a + 1.0) * x - params.c) / (params.a - 1.0)
    gp = (params.b - params.a + 1.0) / (params.a - 1.0)
    q = params.k1 / (1.0 + params.k2)
    return ((2.0 * x + x * x * gp) * _exp(g)
            + params.k * params.alpha + 9.0 * params.k * params.beta * q * q * x * x
            - 1.0)


def _lift(params, x):
    y = (params.b * x - params.c) / (params.a - 1.0)
    phi = params.k1 * x / (1.0 + params.k2)
    return FixedPoint(x, y, phi, fp_residual(params, x))


def _bisect(params, lo, hi, f_lo, tol):
    # plain bisection; unconditionally convergent on a sign change
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = fp_residual(params, mid)
        if abs(f_mid) <= tol or hi - lo < 1e-15 * max(1.0, abs(mid)):
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_polish(params, x, lo, hi):
    for _ in range(8):
        f = fp_residual(params, x)
        fp = _fp_residual_prime(params, x)
        if fp == 0.0:
            break
        x_new = x - f / fp
        if not (lo <= x_new <= hi):
            break
        if x_new == x:
            break
        x = x_new
    return x


def find_fixed_points(params, x_min=X_MIN_DEFAULT, x_max=X_MAX_DEFAULT,
                      grid_n=GRID_N_DEFAULT, tol=TOL_DEFAULT):
    """All roots of fp_residual on [x_min, x_max], lifted to (x, y, phi).

    Brackets sign changes on a uniform grid, refines each bracket by
    bisection to |residual| <= tol, then Newton-polishes the last few
    digits.  Roots closer than 10*tol in x are merged.  Grid intervals
    where |F| dips below sqrt(tol) without a sign change raise a
    "possible tangency" warning so near-fold roots are not silently
    missed.
    """
    if not (x_min < x_max):
        raise ValueError("need x_min < x_max")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    xs = np.linspace(x_min, x_max, grid_n)
    fs = np.array([fp_residual(params, x) for x in xs])

    roots = []
    for i in range(grid_n - 1):
        if fs[i] == 0.0:
            roots.append(xs[i])
            continue
        if (fs[i] < 0.0) != (fs[i + 1] < 0.0):
            r = _bisect(params, xs[i], xs[i + 1], fs[i], tol)
            roots.append(_newton_polish(params, r, xs[i], xs[i + 1]))
    if fs[-1] == 0.0:
        roots.append(xs[-1])

    roots.sort()
    merged = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= 10.0 * tol:
            continue
        merged.append(r)

    # tangency scan: local minima of |F| below sqrt(tol) that produced
    # no bracket and sit away from every accepted root
    near = math.sqrt(tol)
    absf = np.abs(fs)
    for i in range(1, grid_n - 1):
        if absf[i] < near and absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1]:
            sign_change = (fs[i - 1] < 0.0) != (fs[i] < 0.0) or (fs[i] < 0.0) != (fs[i + 1] < 0.0)
            if sign_change:
                continue
            dx = xs[1] - xs[0]
            if any(abs(xs[i] - r) < 2.0 * dx for r in merged):
                continue
            warnings.warn(f"possible tangency of the fixed-point residual near x = {xs[i]:.8g}")

    return [_lift(params, r) for r in merged]


def classify(params, fp):
    """Eigenvalues of the 3D Jacobian at fp, classified by moduli vs 1."""
    lam = np.linalg.eigvals(jacobian3(params, fp.state()))
    order = np.lexsort((-lam.imag, -lam.real))
    lam = lam[order]
    moduli = np.abs(lam)
    if np.all(moduli < 1.0):
        kind = "stable"
    elif np.all(moduli > 1.0):
        kind = "repelling"
    else:
        kind = "saddle"
    has_pair = bool(np.any(np.abs(lam.imag) > 1e-12 * max(1.0, float(moduli.max()))))
    return StabilityReport(tuple(complex(v) for v in lam), kind, has_pair)
