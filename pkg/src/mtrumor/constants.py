"""Model constants for the Maki-Thompson rumour process.

Everything downstream hangs off the limiting ignorant proportion x_inf, the
root of x*exp(2*(1-x)) = 1 in (0, 1/2).  The solver is a bisection-bracketed
Newton iteration; no general Lambert-W machinery is needed for a single
branch value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class ModelConstants:
    """Closed-form constants derived from the fixed point x_inf.

    sigma2 is the limiting variance of sqrt(n)*(X_n/n - x_inf); varrho the
    additive constant in the large-deviation rate; kappa, alpha, beta the
    constants of the d_j growth law alpha*kappa*beta^j*j^(j+1/2).
    """

    x_inf: float
    v_inf: float
    sigma2: float
    varrho: float
    kappa: float
    alpha: float
    beta: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def fixed_point_residual(x: float) -> float:
    return x * math.exp(2.0 * (1.0 - x)) - 1.0


def solve_fixed_point(tolerance: float = 1e-14, max_iter: int = 200) -> float:
    """Root of x*exp(2*(1-x)) = 1 in (0, 1/2), |residual| <= tolerance.

    Newton from the midpoint of (0, 0.5), kept inside a shrinking sign-change
    bracket; any step leaving the bracket is replaced by bisection.  Fully
    deterministic.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi = 0.0, 0.5
    x = 0.25
    for _ in range(max_iter):
        r = fixed_point_residual(x)
        if abs(r) <= tolerance:
            return x
        if r > 0:
            hi = x
        else:
            lo = x
        # f'(x) = exp(2(1-x)) * (1 - 2x), positive on (0, 1/2)
        step = r / (math.exp(2.0 * (1.0 - x)) * (1.0 - 2.0 * x))
        nxt = x - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        x = nxt
    raise RuntimeError(
        f"fixed-point solver did not reach |residual| <= {tolerance} "
        f"in {max_iter} iterations"
    )


def derive_constants(x_inf: float) -> ModelConstants:
    """Populate all model constants from a solved x_inf in (0, 1/2)."""
    if not 0.0 < x_inf < 0.5:
        raise ValueError(f"x_inf must lie in (0, 1/2), got {x_inf}")
    v = 1.0 - x_inf
    sigma2 = x_inf * v / (1.0 - 2.0 * x_inf)
    varrho = 2.0 + math.log(x_inf * v)
    kappa = 2.0 - 1.0 / v
    alpha = math.sqrt(1.0 / (2.0 * math.pi * (2.0 * v - 1.0)))
    beta = 1.0 / (math.e * v * (1.0 - v))
    return ModelConstants(
        x_inf=x_inf, v_inf=v, sigma2=sigma2, varrho=varrho,
        kappa=kappa, alpha=alpha, beta=beta,
    )


@lru_cache(maxsize=None)
def default_constants(tolerance: float = 1e-14) -> ModelConstants:
    return derive_constants(solve_fixed_point(tolerance))
