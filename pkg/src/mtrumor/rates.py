"""Rate functions for the deviation principles of the final ignorant count.

rate_h is the large-deviation rate on [0, 1); rate_H its extension (+inf
outside [0, 1) and exactly at 1, although the left limit at 1 is zero);
rate_J(x) = x^2/(2 sigma^2) is the moderate-deviation rate.  x*log(x) at
x = 0 is defined as 0 by continuity.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import ModelConstants, default_constants


def _xlogx(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def rate_h(x, constants: ModelConstants | None = None):
    """h(x) = x log x + (1-x)(varrho - log(1-x)) on [0, 1); vectorized."""
    c = constants or default_constants()
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("rate_h is defined on [0, 1); use rate_H outside")
    out = _xlogx(arr) + (1.0 - arr) * (c.varrho - np.log1p(-arr))
    return float(out) if out.ndim == 0 else out


def rate_H(x, constants: ModelConstants | None = None):
    """Extended rate: h on [0, 1), +inf otherwise including exactly at 1."""
    c = constants or default_constants()
    arr = np.asarray(x, dtype=float)
    out = np.full(arr.shape, np.inf)
    inside = (arr >= 0.0) & (arr < 1.0)
    if np.any(inside):
        out[inside] = rate_h(arr[inside], c)
    return float(out) if out.ndim == 0 else out


def rate_J(x, constants: ModelConstants | None = None):
    """Moderate-deviation rate x^2/(2 sigma^2); finite everywhere."""
    c = constants or default_constants()
    arr = np.asarray(x, dtype=float)
    out = arr * arr / (2.0 * c.sigma2)
    return float(out) if out.ndim == 0 else out


def rate_h_prime(x, constants: ModelConstants | None = None):
    """Analytic h'(x) = log x + log(1-x) + 2 - varrho on (0, 1)."""
    c = constants or default_constants()
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("h' evaluated on (0, 1) only")
    out = np.log(arr) + np.log1p(-arr) + 2.0 - c.varrho
    return float(out) if out.ndim == 0 else out


def lattice_point(n: int, z: float, b_n: float,
                  constants: ModelConstants | None = None) -> int:
    """k_n(z) = floor(n*x_inf + z*b_n*sqrt(n)); may fall outside {0..n-1}."""
    c = constants or default_constants()
    return math.floor(n * c.x_inf + z * b_n * math.sqrt(n))


def point_log_prob_prediction(n: int, z: float, b_n: float,
                              constants: ModelConstants | None = None) -> float:
    """Leading prediction -log(n)/2 - z^2 b_n^2/(2 sigma^2) for
    log P(X_n = k_n(z)); the neglected term is o(b_n^2)."""
    if n < 2 or b_n <= 0:
        raise ValueError("need n >= 2 and b_n > 0")
    c = constants or default_constants()
    return -0.5 * math.log(n) - z * z * b_n * b_n / (2.0 * c.sigma2)


def quadratic_bound_radius(constants: ModelConstants | None = None,
                           step: float = 1e-4,
                           bound_coeff: float | None = None) -> float:
    """Largest grid radius r with h(u) >= bound_coeff*(u - x_inf)^2 for all
    grid u with |u - x_inf| <= r, searched at the given grid step inside
    (0, min(x_inf, 1 - x_inf)).  Default bound_coeff is 1/(4 sigma^2),
    half the local curvature, so r comes out well away from zero.
    """
    c = constants or default_constants()
    coeff = bound_coeff if bound_coeff is not None else 1.0 / (4.0 * c.sigma2)
    r_cap = min(c.x_inf, 1.0 - c.x_inf)
    m = int(r_cap / step) - 1
    if m < 1:
        raise ValueError("step too coarse for the admissible radius")
    offs = step * np.arange(1.0, m + 1.0)
    ok = np.ones(m, dtype=bool)
    for side in (-1.0, 1.0):
        u = c.x_inf + side * offs
        ok &= rate_h(u, c) >= coeff * (u - c.x_inf) ** 2
    bad = np.nonzero(~ok)[0]
    good_upto = m if bad.size == 0 else int(bad[0])
    if good_upto < 1:
        raise RuntimeError("quadratic bound fails at the first grid point")
    return float(offs[good_upto - 1])


def h_derivatives_check(step: float = 1e-4,
                        constants: ModelConstants | None = None) -> tuple[float, float]:
    """Central finite differences (h', h'') of the rate at x_inf."""
    if not 0.0 < step < 1e-2:
        raise ValueError("step must lie in (0, 1e-2)")
    c = constants or default_constants()
    x = c.x_inf
    hm, h0, hp = (rate_h(v, c) for v in (x - step, x, x + step))
    h1 = (hp - hm) / (2.0 * step)
    h2 = (hp - 2.0 * h0 + hm) / (step * step)
    return h1, h2
