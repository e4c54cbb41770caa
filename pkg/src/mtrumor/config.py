"""Resource caps for the exact backends.

The exact-rational and exact-integer machinery is deliberately capped: the
d_j recursion costs O(j^2) big-integer operations and the rational PMF keeps
denominators of order n^(2n).  Caps can be overridden programmatically or via
MTRUMOR_* environment variables (see `ResourceCaps.from_env`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ResourceCaps:
    rational_max: int = 300      # exact-fraction PMF
    float_max: int = 5000        # log-space PMF with exact d_j
    dp_max: int = 2000           # jump-chain DP oracle, O(n^2) states
    dj_max: int = 5000           # exact d_j table
    handover: int = 2000         # exact/asymptotic cross-check index
    endpoint_exact_j: int = 64   # exact d_j kept for the right-tail layer at huge n

    _ENV = {
        "rational_max": "MTRUMOR_RATIONAL_MAX",
        "float_max": "MTRUMOR_FLOAT_MAX",
        "dp_max": "MTRUMOR_DP_MAX",
        "dj_max": "MTRUMOR_DJ_MAX",
        "handover": "MTRUMOR_HANDOVER",
        "endpoint_exact_j": "MTRUMOR_ENDPOINT_J",
    }

    def __post_init__(self):
        for name in ("rational_max", "float_max", "dp_max", "dj_max",
                     "handover", "endpoint_exact_j"):
            if getattr(self, name) < 1:
                raise ValueError(f"cap {name} must be positive")

    @classmethod
    def from_env(cls) -> "ResourceCaps":
        caps = cls()
        overrides = {}
        for field, var in cls._ENV.items():
            raw = os.environ.get(var)
            if raw is not None:
                overrides[field] = int(float(raw))
        return replace(caps, **overrides) if overrides else caps


DEFAULT_CAPS = ResourceCaps()
