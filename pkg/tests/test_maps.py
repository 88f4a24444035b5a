import math

import numpy as np
import pytest

from chialvo import MapParams, memductance, step2, step3, jacobian2, jacobian3
from chialvo.rng import Xoshiro256StarStar


def test_memductance_hand_value():
    assert memductance(0.1, 0.1, 0.0) == 0.1
    assert memductance(0.1, 0.2, 0.5) == pytest.approx(0.1 + 3 * 0.2 * 0.25)


def test_step3_at_origin():
    p = MapParams()
    assert step3(p, (0.0, 0.0, 0.0)) == (p.k0, p.c, 0.0)


def test_step3_reduces_to_step2_when_uncoupled():
    p = MapParams(k=0.0)
    s = (0.3, -0.7, 0.25)
    x2, y2 = step2(p.a, p.b, p.c, p.k0, (s[0], s[1]))
    x3, y3, phi3 = step3(p, s)
    assert (x3, y3) == (x2, y2)
    assert phi3 == p.k1 * s[0] - p.k2 * s[2]


def test_exp_saturates_instead_of_raising():
    # divergence must come back as data, not as OverflowError
    p = MapParams()
    x, y, phi = step3(p, (-1e5, 4e4, 0.0))
    assert math.isinf(x)
    assert math.isfinite(y) and math.isfinite(phi)


def _fd_jacobian(f, s, h=1e-6):
    s = np.asarray(s, dtype=float)
    n = s.size
    f0 = np.asarray(f(s))
    out = np.empty((f0.size, n))
    for j in range(n):
        hp = h * max(1.0, abs(s[j]))
        sp, sm = s.copy(), s.copy()
        sp[j] += hp
        sm[j] -= hp
        out[:, j] = (np.asarray(f(sp)) - np.asarray(f(sm))) / (2.0 * hp)
    return out


def test_jacobian3_matches_finite_differences():
    p = MapParams(k=2.0, beta=0.2)
    rng = Xoshiro256StarStar(42)
    for _ in range(200):
        s = (rng.random() * 5 - 2, rng.random() * 5 - 2, rng.random() - 0.5)
        J = jacobian3(p, s)
        J_fd = _fd_jacobian(lambda v: step3(p, tuple(v)), s)
        scale = max(1.0, np.abs(J).max())
        assert np.abs(J - J_fd).max() / scale < 1e-5


def test_jacobian2_matches_finite_differences():
    p = MapParams()
    rng = Xoshiro256StarStar(43)
    for _ in range(200):
        s = (rng.random() * 5 - 2, rng.random() * 5 - 2)
        J = jacobian2(p.a, p.b, s)
        J_fd = _fd_jacobian(lambda v: step2(p.a, p.b, p.c, p.k0, tuple(v)), s)
        scale = max(1.0, np.abs(J).max())
        assert np.abs(J - J_fd).max() / scale < 1e-5


def test_jacobian3_constant_rows():
    # y and phi updates are linear, so rows 2 and 3 never depend on the state
    p = MapParams(k=-1.3)
    J1 = jacobian3(p, (0.1, 0.2, 0.3))
    J2 = jacobian3(p, (-2.0, 5.0, -0.4))
    assert np.array_equal(J1[1:], J2[1:])
    assert J1[1].tolist() == [-p.b, p.a, 0.0]
    assert J1[2].tolist() == [p.k1, 0.0, -p.k2]


def test_params_validation():
    with pytest.raises(ValueError):
        MapParams(a=float("nan"))
    with pytest.raises(ValueError):
        MapParams(k=float("inf"))
    p = MapParams().with_(k=3.0)
    assert p.k == 3.0 and p.a == 0.5
