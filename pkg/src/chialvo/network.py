"""Ring-star network simulation and spatiotemporal diagnostics.

Node 0 is the hub: its membrane update carries the star sum over all
nodes and, exactly as the update rule is written, no ring term.  All
other nodes feel the hub pull plus the nonlocal ring sum over R
neighbors per side.  Classification works on the recorded tail of the
run, never on a single snapshot: burst phases make snapshots flip
between looking coherent and looking scattered, while tail-averaged
profiles separate the regimes cleanly.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .params import MapParams, NetworkParams
from .rng import Xoshiro256StarStar
from ._kernels import network_kernel

# parameter point used by the network studies
NETWORK_REGIME_PARAMS = MapParams(a=0.89, b=0.6, c=0.28, k0=0.04, k=3.5,
                                  alpha=0.1, beta=0.2, k1=0.1, k2=0.2)

N_TRANSIENT_DEFAULT = 5000
N_RECORD_DEFAULT = 500
XK_N_TRANSIENT_DEFAULT = 500
IC_X_RANGE = (0.0, 1.0)
IC_Y_RANGE = (0.0, 1.0)
IC_PHI_RANGE = (-0.1, 0.1)


@dataclass(frozen=True)
class ClassifierThresholds:
    """Frozen classification constants; calibrated once on the ring
    regimes at the default schedule and stored in config."""
    sync_threshold: float = 0.01    # sync_error bound for SYNC
    sync_frac: float = 0.8          # coherent-node fraction for SYNC
    coh_threshold: float = 0.08     # per-node profile bound for "coherent"
    chimera_frac_lo: float = 0.05   # minimum coherent fraction for CHIMERA
    min_run: int = 5                # contiguous nodes per chimera region
    cluster_eps: float = 0.01       # recurrence distance bound
    max_clusters: int = 6           # CLUSTERED upper cluster count
    tight_diameter: float = 0.05    # max in-cluster spread for CLUSTERED


@dataclass
class SpatiotemporalField:
    x: np.ndarray                  # (N, n_record) recorded membrane values
    finals: np.ndarray             # (N, 3) final states
    seed: int
    stride: int
    n_transient: int
    diverged: bool
    divergence_step: Optional[int]
    net: NetworkParams


@dataclass
class NetworkDiagnostics:
    sync_error: float
    cluster_count: int
    coherence_profile: np.ndarray  # (N,)
    state_class: str               # SYNC | ASYNC | CHIMERA | CLUSTERED
    recurrence: np.ndarray         # (N, N) uint8


def network_step(net, states):
    """One synchronous step; reference implementation for the kernel.

    states is (N, 3); every new value is computed from the time-n
    snapshot.
    """
    p = net.map
    N, R = net.N, net.R
    x, y, phi = states[:, 0], states[:, 1], states[:, 2]
    fx = x * x * np.exp(y - x) + p.k0 + p.k * x * (p.alpha + 3.0 * p.beta * phi * phi)
    new = np.empty_like(states)
    new[:, 1] = p.a * y - p.b * x + p.c
    new[:, 2] = p.k1 * x - p.k2 * phi
    new[0, 0] = fx[0] + net.mu * (x.sum() - N * x[0])
    cr = net.sigma / (2.0 * R)
    for m in range(1, N):
        s = 0.0
        if net.hub_in_ring:
            for j in range(-R, R + 1):
                s += x[(m + j) % N] - x[m]
        else:
            for j in range(-R, R + 1):
                s += x[((m - 1 + j) % (N - 1)) + 1] - x[m]
        new[m, 0] = fx[m] + net.mu * (x[0] - x[m]) + cr * s
    return new


def initial_conditions(net, seed):
    """Per-node ICs from the documented seeded generator.

    Draw order is fixed (all x, then all y, then all phi) so the same
    seed always produces the same network state.
    """
    rng = Xoshiro256StarStar(seed)
    x = np.array(rng.uniform(*IC_X_RANGE, net.N))
    y = np.array(rng.uniform(*IC_Y_RANGE, net.N))
    phi = np.array(rng.uniform(*IC_PHI_RANGE, net.N))
    return x, y, phi


def simulate_network(net, seed, n_transient=N_TRANSIENT_DEFAULT,
                     n_record=N_RECORD_DEFAULT, stride=1):
    """Run the network from seeded random ICs and record the x tail."""
    if n_record < 1:
        raise ValueError("n_record must be at least 1")
    x, y, phi = initial_conditions(net, seed)
    out = np.empty((n_record, net.N))
    pv = np.array(net.map.astuple())
    div = network_kernel(pv, net.sigma, net.mu, net.N, net.R,
                         net.hub_in_ring, x, y, phi,
                         n_transient, n_record, stride, out)
    finals = np.stack([x, y, phi], axis=1)
    return SpatiotemporalField(out.T.copy(), finals, int(seed), stride,
                               n_transient, div > 0, div if div > 0 else None, net)


def sync_error(field):
    """Time average of the population standard deviation of x."""
    if field.diverged:
        raise ValueError("diverged run has no synchronization error")
    return float(field.x.std(axis=0).mean())


def _pairwise_max_dist(x):
    """(N, N) max-over-time |x_i - x_j|; x is (N,) or (N, T)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    d = np.abs(arr[:, None, :] - arr[None, :, :]).max(axis=2)
    return d


def recurrence_matrix(final_states, eps=0.01):
    """Binary closeness matrix of the nodes.

    Accepts a length-N snapshot or an (N, T) tail; with a tail, two
    nodes count as recurrent only if they stay within eps at every
    recorded step, which keeps slowly drifting phase clusters apart.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return (_pairwise_max_dist(final_states) <= eps).astype(np.uint8)


def cluster_count(final_states, eps=0.01):
    """Connected components of the recurrence graph (union-find)."""
    R = recurrence_matrix(final_states, eps)
    n = R.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if R[i, j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    return len({find(i) for i in range(n)})


def coherence_profile(field, window_w=7):
    """Per-node local std of x over window_w ring neighbors, averaged
    over the recorded tail."""
    if window_w < 3 or window_w % 2 == 0:
        raise ValueError("window_w must be odd and at least 3")
    N = field.x.shape[0]
    h = window_w // 2
    idx = (np.arange(N)[:, None] + np.arange(-h, h + 1)[None, :]) % N
    return field.x[idx].std(axis=1).mean(axis=1)


def _max_circular_run(mask):
    """Longest circular run of True in a boolean vector."""
    n = mask.size
    if mask.all():
        return n
    if not mask.any():
        return 0
    # rotate so the vector starts on a False, then count linear runs
    start = int(np.argmin(mask))
    rolled = np.roll(mask, -start)
    best = cur = 0
    for v in rolled:
        if v:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
    return best


def _cluster_members(R):
    n = R.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if R[i, j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def coherence_profile_and_classify(field, window_w=7, thresholds=None):
    """Full diagnostics with the SYNC / CLUSTERED / CHIMERA / ASYNC call.

    Checked in that order: a run is SYNC on a tiny global spread or a
    large coherent-node fraction; CLUSTERED when the tail splits into a
    few tight recurrence components; CHIMERA when coherent and
    incoherent node runs of at least min_run nodes coexist; ASYNC
    otherwise.
    """
    th = thresholds or ClassifierThresholds()
    prof = coherence_profile(field, window_w)
    se = sync_error(field)
    R = recurrence_matrix(field.x, th.cluster_eps)
    members = _cluster_members(R)
    cc = len(members)
    dmax = _pairwise_max_dist(field.x)

    coh = prof < th.coh_threshold
    frac_coh = float(coh.mean())

    if se < th.sync_threshold or frac_coh >= th.sync_frac:
        cls = "SYNC"
    else:
        tight = all(
            (dmax[np.ix_(g, g)].max() <= th.tight_diameter) for g in members)
        if 2 <= cc <= th.max_clusters and tight:
            cls = "CLUSTERED"
        elif (th.chimera_frac_lo <= frac_coh < th.sync_frac
              and _max_circular_run(coh) >= th.min_run
              and _max_circular_run(~coh) >= th.min_run):
            cls = "CHIMERA"
        else:
            cls = "ASYNC"
    return NetworkDiagnostics(se, cc, prof, cls, R)


def xk_scan(net_base, k_range, n_k, seed=0, seed_policy="same",
            n_transient=XK_N_TRANSIENT_DEFAULT, n_record=N_RECORD_DEFAULT,
            stride=1):
    """One simulation per k over k_range; returns [(k, field), ...].

    seed_policy "same" reuses the seed for every k so the scan varies
    only the parameter; "per-k" offsets the seed by the k index.  The
    short default transient is deliberate: the multi-cluster states
    this scan looks for are long transients that a long settle time
    washes out into full synchrony.
    """
    if n_k < 2:
        raise ValueError("n_k must be at least 2")
    if seed_policy not in ("same", "per-k"):
        raise ValueError(f"unknown seed_policy {seed_policy!r}")
    ks = np.linspace(k_range[0], k_range[1], n_k)
    out = []
    for i, k in enumerate(ks):
        s = seed if seed_policy == "same" else seed + i
        net = replace(net_base, map=net_base.map.with_(k=float(k)))
        out.append((float(k), simulate_network(net, s, n_transient,
                                               n_record, stride)))
    return out


def scan_negative_mu_chimera(net_base, mu_values=None, seed=0,
                             n_transient=N_TRANSIENT_DEFAULT,
                             n_record=N_RECORD_DEFAULT):
    """Scan weak negative hub couplings for a chimera-classified run.

    Returns (first_hit, results): first_hit is (mu, field, diagnostics)
    for the first CHIMERA classification, or None when the whole scan
    classifies otherwise; results lists (mu, state_class) for every run.
    """
    if mu_values is None:
        mu_values = np.linspace(-0.001, -0.0001, 10)
    results = []
    first = None
    for mu in mu_values:
        net = replace(net_base, mu=float(mu))
        field = simulate_network(net, seed, n_transient, n_record)
        if field.diverged:
            results.append((float(mu), "DIVERGED"))
            continue
        diag = coherence_profile_and_classify(field)
        results.append((float(mu), diag.state_class))
        if first is None and diag.state_class == "CHIMERA":
            first = (float(mu), field, diag)
    return first, results
