import numpy as np
import pytest

from chialvo import MapParams, jacobian3, step2, step3
from chialvo.critical import (count_preimages, extract_lc2, lc2_image,
                              lc_residual2, lc_residual3, preimages, sample_lc3)
from chialvo.rng import Xoshiro256StarStar


P0 = MapParams()


def test_lc2_zero_lines_are_exact():
    # det vanishes on x = 0 and x = 2a/(a-b) identically in y
    for y in (-1.0, 0.0, 2.5):
        assert lc_residual2(0.5, 0.4, (0.0, y)) == 0.0
        assert lc_residual2(0.5, 0.4, (10.0, y)) == 0.0
        assert lc_residual2(0.6, 0.3, (4.0, y)) == 0.0
    assert lc_residual2(0.5, 0.4, (5.0, 0.0)) != 0.0


def test_extract_lc2_finds_both_lines():
    cs = extract_lc2(0.5, 0.4, ((-2.0, 12.0), (-1.0, 1.0)), grid_n=141)
    assert cs.dimension == "curve"
    assert len(cs.points) > 0
    x = cs.points[:, 0]
    near0 = np.abs(x) < 0.02
    near10 = np.abs(x - 10.0) < 0.02
    assert (near0 | near10).all()
    assert near0.any() and near10.any()
    assert np.abs(cs.residuals).max() < 0.05


def test_lc2_image_of_first_fold_line():
    # the x = 0 fold line maps onto the vertical line x' = k0
    cs = extract_lc2(0.5, 0.4, ((-0.5, 0.5), (-1.0, 1.0)), grid_n=101)
    img = lc2_image(0.5, 0.4, 0.89, -0.44, cs)
    assert img.shape == (len(cs.points), 2)
    assert np.abs(img[:, 0] - (-0.44)).max() < 1e-3


def test_lc3_residual_matches_plain_determinant():
    p = P0.with_(k=2.0, beta=0.2)
    rng = Xoshiro256StarStar(3)
    for _ in range(100):
        s = (rng.random() * 6 - 2, rng.random() * 6 - 2, rng.random() - 0.5)
        det = float(np.linalg.det(jacobian3(p, s)))
        assert lc_residual3(p, s) == pytest.approx(det, rel=1e-9, abs=1e-12)


def test_sample_lc3_points_sit_on_surface():
    p = P0.with_(k=1.0)
    cs = sample_lc3(p, ((-2.0, 12.0), (-1.0, 1.0), (-0.3, 0.3)), grid_n=11)
    assert cs.dimension == "surface"
    assert len(cs.points) > 0
    assert np.abs(cs.residuals).max() < 1e-6


def test_preimage_counts_across_fold():
    # targets on either side of the LC image have 3 and 1 preimages
    assert count_preimages(P0, (1.0, 0.0)) == 3
    assert count_preimages(P0, (3.0, 0.0)) == 1


def test_preimages_remap_to_target_2d():
    for target in ((1.0, 0.0), (3.0, 0.0)):
        pres = preimages(P0, target)
        assert len(pres) == count_preimages(P0, target)
        for s in pres:
            img = step2(P0.a, P0.b, P0.c, P0.k0, s)
            assert max(abs(img[0] - target[0]), abs(img[1] - target[1])) < 1e-8


def test_preimages_3d_roundtrip():
    p = P0.with_(k=7.6)
    rng = Xoshiro256StarStar(17)
    for _ in range(20):
        s = (rng.random() * 4 - 1, rng.random() * 4 - 1, rng.random() - 0.5)
        target = step3(p, s)
        pres = preimages(p, target)
        errs = [max(abs(q[i] - s[i]) for i in range(3)) for q in pres]
        assert min(errs) < 1e-6
        for q in pres:
            img = step3(p, q)
            assert max(abs(img[i] - target[i]) for i in range(3)) < 1e-8


def test_preimage_validation():
    with pytest.raises(ValueError):
        preimages(P0.with_(a=0.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        preimages(P0.with_(k2=0.0), (1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        preimages(P0, (1.0,))
