"""Parameter records shared by every analysis module."""

import math
from dataclasses import dataclass, replace, fields


@dataclass(frozen=True)
class MapParams:
    """All scalar parameters of the flux-coupled neuron map.

    a, b, c, k0 are the classic map parameters (recovery time constant,
    activation dependence, offset, bias).  k scales the induced current,
    alpha/beta are the memductance coefficients, k1/k2 the linear flux
    dynamics.
    """

    a: float = 0.5
    b: float = 0.4
    c: float = 0.89
    k0: float = -0.44
    k: float = 0.0
    alpha: float = 0.1
    beta: float = 0.1
    k1: float = 0.1
    k2: float = 0.2

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"parameter {f.name} must be finite, got {v!r}")

    def with_(self, **kw):
        return replace(self, **kw)

    def astuple(self):
        return (self.a, self.b, self.c, self.k0, self.k,
                self.alpha, self.beta, self.k1, self.k2)


PARAM_NAMES = tuple(f.name for f in fields(MapParams))


@dataclass(frozen=True)
class NetworkParams:
    """Ring-star network description: N nodes, R ring neighbors per side.

    sigma is the ring coupling strength, mu the hub coupling strength.
    hub_in_ring keeps node 1 as a regular ring member in addition to its
    hub role; the alternative reading (hub outside a ring of N-1 nodes)
    is selectable because the equations leave the ring membership of the
    hub unstated.
    """

    map: MapParams
    N: int = 100
    R: int = 10
    sigma: float = 0.0
    mu: float = 0.0
    hub_in_ring: bool = True

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("need at least 3 nodes")
        if not (1 <= self.R <= (self.N - 1) // 2):
            raise ValueError(f"R must lie in [1, (N-1)/2], got R={self.R} for N={self.N}")
