"""Root finding and stability classification for the 3D map.

The published coordinates used below as loose cross-checks carry 4-6
printed digits; tight tolerances are regression values frozen from this
implementation.
"""

import math
import warnings

import numpy as np
import pytest

from chialvo import MapParams, step3
from chialvo.fixed_points import classify, find_fixed_points, fp_residual


P0 = MapParams()


def resub_error(params, fp):
    s = fp.state()
    img = step3(params, s)
    return max(abs(img[i] - s[i]) for i in range(3))


def test_single_root_at_k_zero():
    fps = find_fixed_points(P0)
    assert len(fps) == 1
    assert fps[0].x == pytest.approx(-0.1787206682, abs=1e-8)
    # published coordinates, loose
    assert fps[0].x == pytest.approx(-0.178714, abs=5e-4)
    assert fps[0].y == pytest.approx(1.9230, abs=5e-4)
    assert fps[0].phi == pytest.approx(-0.0149, abs=5e-4)


def test_root_counts_along_k():
    # the middle pair is born at a fold near k = 4.1929278, so the
    # k = 4.17026 slice still has two roots
    for k, n in ((0.0, 1), (2.3, 2), (4.17026, 2), (7.6, 4)):
        assert len(find_fixed_points(P0.with_(k=k))) == n


def test_resubstitution_through_full_map():
    for k in (0.0, 2.3, 4.17026, 7.6):
        p = P0.with_(k=k)
        for fp in find_fixed_points(p):
            assert resub_error(p, fp) <= 1e-9
            assert abs(fp.residual) <= 1e-9


def test_alternative_denominator_fails_resubstitution():
    # An alternative algebraic reduction divides the cubic term by
    # (1 + k2**2) instead of (1 + k2)**2.  Its roots do not survive
    # re-substitution through the full map, which is what pins down
    # the form used in fp_residual.
    p = P0.with_(k=7.6)

    def alt_residual(x):
        y = (p.b * x - p.c) / (p.a - 1.0)
        m = p.alpha + 3.0 * p.beta * p.k1 ** 2 * x ** 2 / (1.0 + p.k2 ** 2)
        return x * x * math.exp(y - x) + p.k0 + p.k * x * m - x

    xs = np.linspace(-5.0, 15.0, 20001)
    fs = np.array([alt_residual(x) for x in xs])
    roots = []
    for i in range(len(xs) - 1):
        if (fs[i] < 0.0) != (fs[i + 1] < 0.0):
            lo, hi, f_lo = xs[i], xs[i + 1], fs[i]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if (alt_residual(mid) < 0.0) == (f_lo < 0.0):
                    lo, f_lo = mid, alt_residual(mid)
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    assert len(roots) == 4
    for r in roots:
        y = (p.b * r - p.c) / (p.a - 1.0)
        phi = p.k1 * r / (1.0 + p.k2)
        img = step3(p, (r, y, phi))
        err = max(abs(img[0] - r), abs(img[1] - y), abs(img[2] - phi))
        assert err > 1e-6


def test_fold_pair_birth_and_tangency_warning():
    k_fold = 4.192927835
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        below = find_fixed_points(P0.with_(k=k_fold - 1e-6))
    assert len(below) == 2
    assert any("tangency" in str(w.message) for w in caught)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        above = find_fixed_points(P0.with_(k=k_fold + 1e-4))
    assert len(above) == 4
    assert not caught


def test_k76_reference_roots():
    fps = find_fixed_points(P0.with_(k=7.6))
    xs = [fp.x for fp in fps]
    expected = (-0.2117686215, 0.4605378106, 1.7550489879, 4.5592965057)
    assert xs == pytest.approx(expected, abs=1e-8)


def test_grid_refinement_stability():
    coarse = find_fixed_points(P0.with_(k=7.6))
    fine = find_fixed_points(P0.with_(k=7.6), grid_n=40001)
    assert len(coarse) == len(fine)
    for c, f in zip(coarse, fine):
        assert abs(c.x - f.x) < 1e-9


def test_classify_k76():
    p = P0.with_(k=7.6)
    fps = find_fixed_points(p)
    reports = [classify(p, fp) for fp in fps]
    kinds = [r.classification for r in reports]
    assert kinds == ["saddle", "saddle", "stable", "saddle"]
    # the stable point owes its stability to a contracting complex pair
    assert reports[2].has_complex_pair
    assert not reports[0].has_complex_pair
    # eigenvalues come back sorted by descending real part
    for r in reports:
        re = [v.real for v in r.eigenvalues]
        assert re == sorted(re, reverse=True)


def test_third_eigenvalue_decouples_at_k_zero():
    # with k = 0 the x row loses its phi entry, so -k2 is exact
    fps = find_fixed_points(P0)
    lam = classify(P0, fps[0]).eigenvalues
    assert min(abs(v - (-P0.k2)) for v in lam) < 1e-12


def test_residual_sign_structure():
    # the lone k = 0 root sits in (-1, 0): F(-1) > 0 > F(0) = k0
    assert fp_residual(P0, -1.0) > 0.0
    assert fp_residual(P0, 0.0) == pytest.approx(P0.k0)


def test_argument_validation():
    with pytest.raises(ValueError):
        find_fixed_points(P0, x_min=2.0, x_max=-2.0)
    with pytest.raises(ValueError):
        find_fixed_points(P0, grid_n=1)
    with pytest.raises(ValueError):
        find_fixed_points(P0, tol=0.0)
    with pytest.raises(ValueError):
        find_fixed_points(P0.with_(a=1.0))
