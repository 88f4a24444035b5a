import numpy as np
import pytest
from hypothesis import given, strategies as st

from chialvo import MapParams
from chialvo.sweeps import (BUBBLE_K0_VALUES, SweepSpec, bifurcation_sweep,
                            bubble_family, count_branches, lyapunov_sweep,
                            multistability_witness, sweep2d)


P0 = MapParams()


class TestSweepSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepSpec("zeta", 0.0, 1.0, 10)
        with pytest.raises(ValueError):
            SweepSpec("k", 0.0, 1.0, 1)
        with pytest.raises(ValueError):
            SweepSpec("k", 1.0, 1.0, 10)
        with pytest.raises(ValueError):
            SweepSpec("k", 0.0, 1.0, 10, direction="sideways")
        with pytest.raises(ValueError):
            SweepSpec("k", 0.0, 1.0, 10, ic_policy="random")

    def test_walk_order(self):
        fwd = SweepSpec("k", 0.0, 1.0, 5).values()
        bwd = SweepSpec("k", 0.0, 1.0, 5, direction="backward").values()
        assert np.array_equal(fwd, np.linspace(0.0, 1.0, 5))
        assert np.array_equal(bwd, fwd[::-1])


class TestCountBranches:
    def test_examples(self):
        assert count_branches([0.0, 0.5, 1.0]) == 3
        assert count_branches([1.0, 1.0, 1.0]) == 1
        assert count_branches([0.3]) == 1
        # tolerance chains: single linkage, not diameter
        assert count_branches([0.0, 5e-5, 1e-4, 2.0], cluster_tol=1e-4) == 2

    def test_errors(self):
        with pytest.raises(ValueError):
            count_branches([])
        with pytest.raises(ValueError):
            count_branches([1.0, float("nan")])

    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=40),
           st.permutations(range(40)))
    def test_permutation_invariant(self, vals, perm):
        shuffled = [vals[i % len(vals)] for i in perm[:len(vals)]]
        assert count_branches(shuffled) == count_branches(sorted(shuffled))

    def test_counts_p6_window(self):
        spec = SweepSpec("k", -1.61, -1.59, 3, n_transient=20000, n_keep=120,
                         ic_policy="fixed-ic")
        d = bifurcation_sweep(P0, spec)
        assert d.branch_counts[0] == 6


def test_fixed_ic_sweep_is_direction_independent():
    fwd = bifurcation_sweep(P0, SweepSpec("k", -1.7, -1.5, 9, n_transient=5000,
                                          ic_policy="fixed-ic"))
    bwd = bifurcation_sweep(P0, SweepSpec("k", -1.7, -1.5, 9, n_transient=5000,
                                          ic_policy="fixed-ic", direction="backward"))
    assert np.array_equal(fwd.x, bwd.x[::-1])
    assert np.array_equal(fwd.branch_counts, bwd.branch_counts[::-1])


def test_divergent_cells_are_nan_rows():
    # high k diverges from the default seed; the scan must keep going
    spec = SweepSpec("k", 0.0, 30.0, 16, n_transient=2000, n_keep=20)
    d = bifurcation_sweep(P0, spec)
    assert d.diverged.any() and not d.diverged.all()
    assert np.isnan(d.x[d.diverged]).all()
    assert (d.branch_counts[d.diverged] == 0).all()
    assert (d.branch_counts[~d.diverged] >= 1).all()


def test_period_doubling_corridor():
    # branch counts walk 10 -> 20 -> large through the corridor
    spec = SweepSpec("k", -3.8, -3.7, 41, n_transient=30000, n_keep=192)
    d = bifurcation_sweep(P0, spec)
    c = d.branch_counts
    assert (c[:13] == 10).all()
    assert (c[13:18] == 20).all()
    assert c.max() > 150
    assert (c[18:] > 100).sum() >= 15


def test_hysteresis_witness_is_sign_sensitive():
    # the default offset supports multistable structure over k in (-8, 2);
    # flipping its sign collapses everything onto one fixed point and
    # the forward/backward disagreement vanishes
    def witness(c):
        base = P0.with_(c=c)
        f = bifurcation_sweep(base, SweepSpec("k", -8.0, 2.0, 101, n_transient=20000))
        b = bifurcation_sweep(base, SweepSpec("k", -8.0, 2.0, 101, n_transient=20000,
                                              direction="backward"))
        return multistability_witness(f, b)

    assert len(witness(0.89)) > 50
    assert witness(-0.89) == []


def test_lyapunov_sweep_sign_flip_at_window_edge():
    spec = SweepSpec("k", -1.75, -1.55, 21, ic_policy="fixed-ic", n_transient=20000)
    d = lyapunov_sweep(P0, spec, n_iter=30000)
    i60 = int(np.argmin(np.abs(d.values - (-1.60))))
    i59 = int(np.argmin(np.abs(d.values - (-1.59))))
    assert d.spectra[i60, 0] < -0.1          # periodic window
    assert d.spectra[i59, 0] > 0.3           # chaos next door
    assert not d.diverged.any()
    # rows are sorted spectra
    assert (np.diff(d.spectra[~d.diverged]) <= 1e-15).all()


def test_lyapunov_sweep_divergent_rows_are_nan():
    spec = SweepSpec("k", 0.0, 30.0, 6, n_transient=2000)
    d = lyapunov_sweep(P0, spec, n_iter=2000)
    assert d.diverged.any()
    assert np.isnan(d.spectra[d.diverged]).all()


class TestSweep2D:
    def test_p6_patch(self):
        su = SweepSpec("k", -1.64, -1.60, 3, ic_policy="fixed-ic", n_transient=20000)
        sv = SweepSpec("c", 0.885, 0.895, 3, ic_policy="fixed-ic", n_transient=20000)
        g = sweep2d(P0, su, sv)
        assert g.period_class.tolist() == [[6, 6, 6], [6, 6, 0], [6, 6, 0]]
        # aperiodic cells carry a finite exponent, periodic cells do not
        aper = g.period_class == 0
        assert np.isfinite(g.lmax[aper]).all()

    def test_degenerate_span_is_uniform(self):
        tu = SweepSpec("k", -1.62, -1.62 + 1e-12, 2, ic_policy="fixed-ic",
                       n_transient=20000)
        tv = SweepSpec("c", 0.89, 0.89 + 1e-12, 2, ic_policy="fixed-ic",
                       n_transient=20000)
        g = sweep2d(P0, tu, tv)
        assert (g.period_class == 6).all()

    def test_validation(self):
        su = SweepSpec("k", 0.0, 1.0, 3)
        with pytest.raises(ValueError):
            sweep2d(P0, su, SweepSpec("k", 0.0, 2.0, 3))
        with pytest.raises(ValueError):
            sweep2d(P0, SweepSpec("k", 0.0, 1.0, 2001), SweepSpec("c", 0.0, 1.0, 3))


def test_bubble_family_shape_and_flat_regime():
    fam = bubble_family(P0, n_transient=20000)
    assert [k0 for k0, _ in fam] == list(BUBBLE_K0_VALUES)
    # at positive k0 the sampled k window is uniformly period-1: the
    # bubble structure lives elsewhere in parameter space, and this
    # flatness is itself a frozen observation
    for _, d in fam:
        assert not d.diverged.any()
        assert (d.branch_counts == 1).all()
