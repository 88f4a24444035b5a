"""Hot loops compiled with numba.

Every kernel is deterministic and worker-count independent: parallel
loops write disjoint output slots and carry no cross-cell reductions,
so the thread count can never change output bytes.  No fastmath
anywhere, bit reproducibility is a shipped contract.

Map parameters travel as a 9-vector pv = (a, b, c, k0, k, alpha, beta,
k1, k2) in MapParams field order.
"""

import math

import numpy as np
from numba import njit, prange

# must equal orbits.DIVERGENCE_THRESHOLD (asserted in the test suite)
DIV = 1e6


@njit(cache=True)
def _bad3(x, y, phi):
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(phi)):
        return True
    return abs(x) > DIV


@njit(cache=True)
def _step(pv, x, y, phi):
    xn = x * x * math.exp(y - x) + pv[3] + pv[4] * x * (pv[5] + 3.0 * pv[6] * phi * phi)
    yn = pv[0] * y - pv[1] * x + pv[2]
    pn = pv[7] * x - pv[8] * phi
    return xn, yn, pn


@njit(cache=True)
def lyap_kernel(pv, x, y, phi, n_transient, n_iter):
    """QR-reorthonormalized Lyapunov sums along one orbit.

    Returns (l1, l2, l3, mean_log_absdet, status, fx, fy, fphi) where
    the li are per-step means of log|R_ii| (unsorted: column order of
    the evolving frame), status is 0 ok / 1 diverged / 2 degenerate,
    and (fx, fy, fphi) is the final state.  mean_log_absdet is taken
    along the same orbit, so the volume identity sum(li) == mean
    log|det J| can be checked without re-running.
    """
    for _ in range(n_transient):
        x, y, phi = _step(pv, x, y, phi)
        if _bad3(x, y, phi):
            return (0.0, 0.0, 0.0, 0.0, 1, x, y, phi)
    a = pv[0]; b = pv[1]
    k = pv[4]; alpha = pv[5]; beta = pv[6]
    k1 = pv[7]; k2 = pv[8]
    # orthonormal frame, columns of q, started at the identity
    q00 = 1.0; q01 = 0.0; q02 = 0.0
    q10 = 0.0; q11 = 1.0; q12 = 0.0
    q20 = 0.0; q21 = 0.0; q22 = 1.0
    s0 = 0.0; s1 = 0.0; s2 = 0.0; sd = 0.0
    for _ in range(n_iter):
        e = math.exp(y - x)
        j00 = e * (2.0 * x - x * x) + k * (alpha + 3.0 * beta * phi * phi)
        j01 = x * x * e
        j02 = 6.0 * k * beta * x * phi
        # remaining rows are (-b, a, 0) and (k1, 0, -k2)
        det = -a * k2 * j00 - b * k2 * j01 - a * k1 * j02
        x, y, phi = _step(pv, x, y, phi)
        if _bad3(x, y, phi):
            return (0.0, 0.0, 0.0, 0.0, 1, x, y, phi)
        # z = J @ q, column by column
        z00 = j00 * q00 + j01 * q10 + j02 * q20
        z10 = -b * q00 + a * q10
        z20 = k1 * q00 - k2 * q20
        z01 = j00 * q01 + j01 * q11 + j02 * q21
        z11 = -b * q01 + a * q11
        z21 = k1 * q01 - k2 * q21
        z02 = j00 * q02 + j01 * q12 + j02 * q22
        z12 = -b * q02 + a * q12
        z22 = k1 * q02 - k2 * q22
        # modified Gram-Schmidt; R diagonal is nonnegative by construction
        r00 = math.sqrt(z00 * z00 + z10 * z10 + z20 * z20)
        if r00 == 0.0:
            return (0.0, 0.0, 0.0, 0.0, 2, x, y, phi)
        q00 = z00 / r00; q10 = z10 / r00; q20 = z20 / r00
        r01 = q00 * z01 + q10 * z11 + q20 * z21
        w0 = z01 - r01 * q00
        w1 = z11 - r01 * q10
        w2 = z21 - r01 * q20
        r11 = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
        if r11 == 0.0:
            return (0.0, 0.0, 0.0, 0.0, 2, x, y, phi)
        q01 = w0 / r11; q11 = w1 / r11; q21 = w2 / r11
        r02 = q00 * z02 + q10 * z12 + q20 * z22
        r12 = q01 * z02 + q11 * z12 + q21 * z22
        v0 = z02 - r02 * q00 - r12 * q01
        v1 = z12 - r02 * q10 - r12 * q11
        v2 = z22 - r02 * q20 - r12 * q21
        r22 = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
        if r22 == 0.0:
            return (0.0, 0.0, 0.0, 0.0, 2, x, y, phi)
        q02 = v0 / r22; q12 = v1 / r22; q22 = v2 / r22
        ad = abs(det)
        if ad == 0.0:
            return (0.0, 0.0, 0.0, 0.0, 2, x, y, phi)
        s0 += math.log(r00)
        s1 += math.log(r11)
        s2 += math.log(r22)
        sd += math.log(ad)
    inv = 1.0 / n_iter
    return (s0 * inv, s1 * inv, s2 * inv, sd * inv, 0, x, y, phi)


@njit(cache=True)
def _min_period(tail, tol, max_period):
    """Smallest p <= max_period with max-norm recurrence < tol over the
    whole tail, 0 if none."""
    m = tail.shape[0]
    for p in range(1, max_period + 1):
        ok = True
        for i in range(m - p):
            if (abs(tail[i + p, 0] - tail[i, 0]) >= tol
                    or abs(tail[i + p, 1] - tail[i, 1]) >= tol
                    or abs(tail[i + p, 2] - tail[i, 2]) >= tol):
                ok = False
                break
        if ok:
            return p
    return 0


@njit(cache=True)
def _classify_cell(pv, x, y, phi, n_transient, tol, max_period, lyap_iter):
    """(period_class, lmax) for one initial condition.

    period_class: -1 diverged, 0 aperiodic, p >= 1 the minimal period.
    lmax is only computed (and finite) for aperiodic cells.
    """
    for _ in range(n_transient):
        x, y, phi = _step(pv, x, y, phi)
        if _bad3(x, y, phi):
            return -1, np.nan
    m = 3 * max_period
    tail = np.empty((m, 3))
    for i in range(m):
        x, y, phi = _step(pv, x, y, phi)
        if _bad3(x, y, phi):
            return -1, np.nan
        tail[i, 0] = x
        tail[i, 1] = y
        tail[i, 2] = phi
    p = _min_period(tail, tol, max_period)
    if p > 0:
        return p, np.nan
    r = lyap_kernel(pv, x, y, phi, 0, lyap_iter)
    if r[4] != 0:
        return -1, np.nan
    return 0, r[0]


@njit(cache=True, parallel=True)
def sweep2d_kernel(pbase, uidx, us, vidx, vs, x0, y0, phi0,
                   n_transient, tol, max_period, lyap_iter, pclass, lmax):
    """Fixed-ic 2D grid; cell (i, j) lives at flat index i*len(vs)+j."""
    nv = vs.shape[0]
    n = us.shape[0] * nv
    for idx in prange(n):
        i = idx // nv
        j = idx - i * nv
        pv = pbase.copy()
        pv[uidx] = us[i]
        pv[vidx] = vs[j]
        pc, lm = _classify_cell(pv, x0, y0, phi0, n_transient, tol, max_period, lyap_iter)
        pclass[idx] = pc
        lmax[idx] = lm


@njit(cache=True)
def sweep1d_kernel(pbase, pidx, values, x0, y0, phi0, n_transient, n_keep,
                   inherit, rx, ry, rphi, kept_x, diverged, finals):
    """Walk the parameter values in array order, recording kept x values.

    Under inherit the final state of one cell seeds the next; after a
    divergent cell the chain restarts from the reseed state (rx, ry,
    rphi).  Diverged cells get NaN rows.
    """
    n = values.shape[0]
    x = x0; y = y0; phi = phi0
    for i in range(n):
        pv = pbase.copy()
        pv[pidx] = values[i]
        if not inherit:
            x = x0; y = y0; phi = phi0
        bad = False
        for _ in range(n_transient):
            x, y, phi = _step(pv, x, y, phi)
            if _bad3(x, y, phi):
                bad = True
                break
        if not bad:
            for t in range(n_keep):
                x, y, phi = _step(pv, x, y, phi)
                if _bad3(x, y, phi):
                    bad = True
                    break
                kept_x[i, t] = x
        if bad:
            diverged[i] = True
            for t in range(n_keep):
                kept_x[i, t] = np.nan
            x = rx; y = ry; phi = rphi
        finals[i, 0] = x
        finals[i, 1] = y
        finals[i, 2] = phi


@njit(cache=True, parallel=True)
def basin_kernel(pv, xs, ys, phi0, max_iter, tol, max_period, bbox_window,
                 status, period, rep, bbox, final):
    """Per-cell orbit signatures for the basin arbiter.

    Runs the full max_iter budget (divergence is the only early exit),
    then detects the minimal period on the last 3*max_period states and
    reports a lex-min cycle representative, the bounding box of the
    last bbox_window states, and the final state.  status: 0 periodic,
    1 aperiodic, 2 diverged.
    """
    ncell = xs.shape[0]
    m = 3 * max_period
    for ci in prange(ncell):
        x = xs[ci]; y = ys[ci]; phi = phi0
        buf = np.empty((m, 3))
        pos = 0
        bx0 = 1e300; bx1 = -1e300
        by0 = 1e300; by1 = -1e300
        bp0 = 1e300; bp1 = -1e300
        start_bbox = max_iter - bbox_window
        div = False
        for t in range(1, max_iter + 1):
            x, y, phi = _step(pv, x, y, phi)
            if _bad3(x, y, phi):
                div = True
                break
            buf[pos, 0] = x; buf[pos, 1] = y; buf[pos, 2] = phi
            pos += 1
            if pos == m:
                pos = 0
            if t > start_bbox:
                if x < bx0: bx0 = x
                if x > bx1: bx1 = x
                if y < by0: by0 = y
                if y > by1: by1 = y
                if phi < bp0: bp0 = phi
                if phi > bp1: bp1 = phi
        if div:
            status[ci] = 2
            period[ci] = 0
            continue
        tail = np.empty((m, 3))
        for i in range(m):
            j = pos + i
            if j >= m:
                j -= m
            tail[i, 0] = buf[j, 0]; tail[i, 1] = buf[j, 1]; tail[i, 2] = buf[j, 2]
        p = _min_period(tail, tol, max_period)
        bbox[ci, 0] = bx0; bbox[ci, 1] = bx1
        bbox[ci, 2] = by0; bbox[ci, 3] = by1
        bbox[ci, 4] = bp0; bbox[ci, 5] = bp1
        final[ci, 0] = x; final[ci, 1] = y; final[ci, 2] = phi
        period[ci] = p
        if p > 0:
            status[ci] = 0
            bi = m - p
            for i in range(m - p + 1, m):
                less = False
                if tail[i, 0] < tail[bi, 0]:
                    less = True
                elif tail[i, 0] == tail[bi, 0]:
                    if tail[i, 1] < tail[bi, 1]:
                        less = True
                    elif tail[i, 1] == tail[bi, 1] and tail[i, 2] < tail[bi, 2]:
                        less = True
                if less:
                    bi = i
            rep[ci, 0] = tail[bi, 0]; rep[ci, 1] = tail[bi, 1]; rep[ci, 2] = tail[bi, 2]
        else:
            status[ci] = 1
            rep[ci, 0] = x; rep[ci, 1] = y; rep[ci, 2] = phi


@njit(cache=True)
def network_kernel(pv, sigma, mu, N, R, hub_in_ring, x, y, phi,
                   n_transient, n_record, stride, out_x):
    """Synchronous ring-star stepping; x, y, phi are advanced in place.

    Node 0 is the hub: its x update carries the star sum mu*(S - N*x0)
    and no ring term.  Every other node gets the hub pull mu*(x0 - xm)
    plus the nonlocal ring sum over R neighbors per side; with
    hub_in_ring the window wraps over all N nodes, otherwise over the
    N-1 non-hub nodes.  Records x after commit for the last n_record
    strided steps.  Returns the 1-based first divergent step, 0 if none.
    """
    xn = np.empty(N)
    yn = np.empty(N)
    pn = np.empty(N)
    cr = sigma / (2.0 * R)
    total = n_transient + n_record * stride
    rec = 0
    for t in range(1, total + 1):
        S = 0.0
        for i in range(N):
            S += x[i]
        for node in range(N):
            xi = x[node]
            f = (xi * xi * math.exp(y[node] - xi) + pv[3]
                 + pv[4] * xi * (pv[5] + 3.0 * pv[6] * phi[node] * phi[node]))
            if node == 0:
                xn[0] = f + mu * (S - N * xi)
            else:
                s = 0.0
                if hub_in_ring:
                    for j in range(-R, R + 1):
                        w = node + j
                        if w < 0:
                            w += N
                        elif w >= N:
                            w -= N
                        s += x[w] - xi
                else:
                    Nr = N - 1
                    for j in range(-R, R + 1):
                        w = node - 1 + j
                        if w < 0:
                            w += Nr
                        elif w >= Nr:
                            w -= Nr
                        s += x[w + 1] - xi
                xn[node] = f + mu * (x[0] - xi) + cr * s
            yn[node] = pv[0] * y[node] - pv[1] * xi + pv[2]
            pn[node] = pv[7] * xi - pv[8] * phi[node]
        for i in range(N):
            if _bad3(xn[i], yn[i], pn[i]):
                return t
        for i in range(N):
            x[i] = xn[i]; y[i] = yn[i]; phi[i] = pn[i]
        if t > n_transient and (t - n_transient) % stride == 0 and rec < n_record:
            for i in range(N):
                out_x[rec, i] = x[i]
            rec += 1
    return 0
