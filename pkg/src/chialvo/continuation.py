"""Pseudo-arclength continuation of fixed-point branches.

The continuation variable is arclength in (state, parameter) space, so
branches pass through folds where the parameter itself turns around.
Codimension-1 events are located from test-function sign changes
between consecutive branch points and refined by bisection along the
branch.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .maps import step3, jacobian3

STEP0_DEFAULT = 1e-3
STEP_MIN_DEFAULT = 1e-8
STEP_MAX_DEFAULT = 0.1
CORRECTOR_TOL = 1e-10
CORRECTOR_MAX_ITER = 25
NS_MODULUS_BAND = 0.05
EVENT_PARAM_TOL = 1e-8


@dataclass
class BranchPoint:
    param: float
    state: tuple
    eigenvalues: tuple
    test_lp: float
    test_pd: float
    test_ns: float
    stability: bool
    u: np.ndarray = field(repr=False, default=None)   # raw (x, y, phi, param)


@dataclass
class Branch:
    points: list
    base_params: object
    free_param: str

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class BifurcationEvent:
    kind: str          # LP | PD | NS
    param: float
    state: tuple
    bracket: tuple     # (BranchPoint, BranchPoint)


def _dstep_dparam(params, s, name):
    """Analytic derivative of step3 with respect to one scalar parameter."""
    x, y, phi = s
    if name == "a":
        return np.array([0.0, y, 0.0])
    if name == "b":
        return np.array([0.0, -x, 0.0])
    if name == "c":
        return np.array([0.0, 1.0, 0.0])
    if name == "k0":
        return np.array([1.0, 0.0, 0.0])
    if name == "k":
        return np.array([x * (params.alpha + 3.0 * params.beta * phi * phi), 0.0, 0.0])
    if name == "alpha":
        return np.array([params.k * x, 0.0, 0.0])
    if name == "beta":
        return np.array([3.0 * params.k * x * phi * phi, 0.0, 0.0])
    if name == "k1":
        return np.array([0.0, 0.0, x])
    if name == "k2":
        return np.array([0.0, 0.0, -phi])
    raise ValueError(f"cannot continue in parameter {name!r}")


def _G(base, name, u):
    p = base.with_(**{name: float(u[3])})
    s = (u[0], u[1], u[2])
    return np.array(step3(p, s)) - np.array(s)


def _G_jac(base, name, u):
    """3x4 Jacobian of G in (x, y, phi, param)."""
    p = base.with_(**{name: float(u[3])})
    s = (u[0], u[1], u[2])
    out = np.empty((3, 4))
    out[:, :3] = jacobian3(p, s) - np.eye(3)
    out[:, 3] = _dstep_dparam(p, s, name)
    return out


def _tangent(base, name, u, prev=None):
    """Unit null vector of the 3x4 extended Jacobian, oriented along prev."""
    A = _G_jac(base, name, u)
    _, _, vt = np.linalg.svd(A)
    t = vt[-1]
    if prev is not None and np.dot(t, prev) < 0.0:
        t = -t
    elif prev is None and t[3] < 0.0:
        t = -t
    return t


def _correct(base, name, u, t, anchor):
    """Newton on G = 0 plus the hyperplane through anchor normal to t."""
    for _ in range(CORRECTOR_MAX_ITER):
        g = _G(base, name, u)
        h = np.dot(u - anchor, t)
        if max(np.abs(g).max(), abs(h)) <= CORRECTOR_TOL:
            return u
        A = np.empty((4, 4))
        A[:3] = _G_jac(base, name, u)
        A[3] = t
        try:
            du = np.linalg.solve(A, np.concatenate([g, [h]]))
        except np.linalg.LinAlgError:
            return None
        u = u - du
        if not np.all(np.isfinite(u)):
            return None
    return None


def _branch_point(base, name, u):
    p = base.with_(**{name: float(u[3])})
    J = jacobian3(p, (u[0], u[1], u[2]))
    lam = np.linalg.eigvals(J)
    order = np.lexsort((-lam.imag, -lam.real))
    lam = lam[order]
    test_lp = float(np.linalg.det(J - np.eye(3)))
    test_pd = float(np.linalg.det(J + np.eye(3)))
    prod = 1.0 + 0.0j
    for i in range(3):
        for j in range(i + 1, 3):
            prod *= lam[i] * lam[j] - 1.0
    stable = bool(np.all(np.abs(lam) < 1.0))
    return BranchPoint(float(u[3]), (float(u[0]), float(u[1]), float(u[2])),
                       tuple(complex(v) for v in lam),
                       test_lp, test_pd, float(prod.real), stable,
                       np.asarray(u, dtype=float).copy())


def continue_branch(base_params, free_param, start, step0=STEP0_DEFAULT,
                    step_min=STEP_MIN_DEFAULT, step_max=STEP_MAX_DEFAULT,
                    n_max=2000, direction=1):
    """Trace the fixed-point branch through (state, param) space.

    start is a FixedPoint at base_params' value of free_param.
    direction picks the initial orientation (+1 walks the parameter up
    first).  The branch terminates on corrector failure below step_min,
    on a singular extended Jacobian, or after n_max points.
    """
    p0 = float(getattr(base_params, free_param))
    u = np.array([start.x, start.y, start.phi, p0])
    if np.abs(_G(base_params, free_param, u)).max() > 1e-6:
        raise ValueError("start does not satisfy the fixed-point equation")
    # polish the seed onto the branch at fixed parameter
    t_seed = np.array([0.0, 0.0, 0.0, 1.0])
    u_fixed = _correct(base_params, free_param, u, t_seed, u.copy())
    if u_fixed is not None:
        u = u_fixed
    t = _tangent(base_params, free_param, u)
    if direction < 0:
        t = -t
    points = [_branch_point(base_params, free_param, u)]
    ds = step0
    while len(points) < n_max:
        pred = u + ds * t
        u_new = _correct(base_params, free_param, pred, t, pred)
        if u_new is None:
            ds *= 0.5
            if ds < step_min:
                warnings.warn(f"corrector failed below step_min at param "
                              f"{u[3]:.8g}; branch terminated")
                break
            continue
        t = _tangent(base_params, free_param, u_new, prev=t)
        u = u_new
        points.append(_branch_point(base_params, free_param, u))
        if ds < step_max:
            ds = min(ds * 1.3, step_max)
    return Branch(points, base_params, free_param)


def _test_value(bp, kind):
    if kind == "LP":
        return bp.test_lp
    if kind == "PD":
        return bp.test_pd
    return bp.test_ns


def _has_band_pair(bp):
    for lam in bp.eigenvalues:
        if abs(lam.imag) > 1e-9 and abs(abs(lam) - 1.0) <= NS_MODULUS_BAND:
            return True
    return False


def _refine_event(base, name, bp_lo, bp_hi, kind):
    u_lo = bp_lo.u.copy()
    u_hi = bp_hi.u.copy()
    f_lo = _test_value(bp_lo, kind)
    for _ in range(120):
        if np.abs(u_hi - u_lo).max() <= 1e-11 and abs(u_hi[3] - u_lo[3]) <= EVENT_PARAM_TOL:
            break
        mid = 0.5 * (u_lo + u_hi)
        t = u_hi - u_lo
        norm = np.linalg.norm(t)
        if norm == 0.0:
            break
        t /= norm
        u_mid = _correct(base, name, mid, t, mid)
        if u_mid is None:
            break
        f_mid = _test_value(_branch_point(base, name, u_mid), kind)
        if f_mid == 0.0:
            u_lo = u_hi = u_mid
            break
        if (f_mid < 0.0) == (f_lo < 0.0):
            u_lo, f_lo = u_mid, f_mid
        else:
            u_hi = u_mid
    u = 0.5 * (u_lo + u_hi)
    return BifurcationEvent(kind, float(u[3]),
                            (float(u[0]), float(u[1]), float(u[2])),
                            (bp_lo, bp_hi))


def detect_codim1(branch):
    """LP/PD/NS events along a continued branch.

    LP and PD come from sign changes of det(J -/+ I).  The NS product
    test also vanishes when two real eigenvalues are mutual inverses,
    so a sign change only counts when a bracketing endpoint carries a
    complex pair with modulus within the screening band of 1.
    """
    if len(branch) < 2:
        raise ValueError("need at least 2 branch points")
    base, name = branch.base_params, branch.free_param
    events = []
    for a, b in zip(branch.points, branch.points[1:]):
        for kind in ("LP", "PD", "NS"):
            fa, fb = _test_value(a, kind), _test_value(b, kind)
            if not (np.isfinite(fa) and np.isfinite(fb)):
                continue
            if fa == 0.0 or (fa < 0.0) == (fb < 0.0):
                continue
            if kind == "NS" and not (_has_band_pair(a) or _has_band_pair(b)):
                continue
            events.append(_refine_event(base, name, a, b, kind))
    events.sort(key=lambda e: e.param)
    for e1, e2 in zip(events, events[1:]):
        if abs(e1.param - e2.param) <= EVENT_PARAM_TOL:
            warnings.warn(f"events {e1.kind} and {e2.kind} coincide at param "
                          f"{e1.param:.10g} within {EVENT_PARAM_TOL}")
    return events
