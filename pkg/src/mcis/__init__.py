"""MC-IS network toolkit: constructive simulator plus closed-form capacity/delay bounds.

A network of n single-interface nodes and b multi-interface base stations shares
C channels (C_A ad hoc + C_I infrastructure) and W bits/sec of bandwidth
(W = W_A + 2*W_I).  Traffic follows the H-max-hop rule: destinations within
H hops are reached over multi-hop ad hoc routes, everything else relays
through the wired backbone via the nearest base stations.
"""

__version__ = "0.1.0"

from .model import BoundsConstants, NetworkConfig, connectivity_radius, validate_config

__all__ = [
    "BoundsConstants",
    "NetworkConfig",
    "connectivity_radius",
    "validate_config",
    "__version__",
]
