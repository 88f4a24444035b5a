"""Analysis toolkit for the flux-coupled Chialvo neuron map."""

from .params import MapParams, NetworkParams
from .maps import memductance, step2, step3, jacobian2, jacobian3

__version__ = "0.1.0"

__all__ = [
    "MapParams",
    "NetworkParams",
    "memductance",
    "step2",
    "step3",
    "jacobian2",
    "jacobian3",
    "__version__",
]
