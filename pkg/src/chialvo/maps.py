"""The 2D and 3D neuron maps, their memductance term and Jacobians.

Everything here is a pure function of its arguments.  The exponential
saturates to inf instead of raising, matching C (and the compiled
kernels') semantics: a non-finite state is the caller's divergence
signal (see orbits.iterate), not an exception.
"""

import math

import numpy as np


def _exp(v):
    # math.exp raises OverflowError where C exp returns inf; divergence
    # must come back as data, so saturate
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def memductance(alpha, beta, phi):
    """Flux-controlled memductance alpha + 3*beta*phi**2."""
    return alpha + 3.0 * beta * phi * phi


def step2(a, b, c, k0, s2):
    """One step of the 2D map (no flux coupling)."""
    x, y = s2
    return (x * x * _exp(y - x) + k0,
            a * y - b * x + c)


def step3(p, s):
    """One step of the 3D flux-coupled map.

    p is a MapParams, s a (x, y, phi) triple.  The induced current
    k*x*M(phi) enters the x update only; y and phi updates are linear.
    """
    x, y, phi = s
    return (x * x * _exp(y - x) + p.k0 + p.k * x * memductance(p.alpha, p.beta, phi),
            p.a * y - p.b * x + p.c,
            p.k1 * x - p.k2 * phi)


def jacobian2(a, b, s2):
    x, y = s2
    e = _exp(y - x)
    return np.array([[e * (2.0 * x - x * x), x * x * e],
                     [-b, a]])


def jacobian3(p, s):
    """3x3 Jacobian of step3.  Rows 2 and 3 are constant in the state."""
    x, y, phi = s
    e = _exp(y - x)
    return np.array([
        [e * (2.0 * x - x * x) + p.k * memductance(p.alpha, p.beta, phi),
         x * x * e,
         6.0 * p.k * p.beta * x * phi],
        [-p.b, p.a, 0.0],
        [p.k1, 0.0, -p.k2],
    ])
