"""Final-size distribution of the rumour process.

For a population of n+1 with one initial spreader, the number of initially
ignorant individuals who ever hear the rumour is V_n in {1..n}, and the final
ignorant count is X_n = n - V_n with

    P(V_n = j) = (n-1)!/(n-j)! * d_j / n^(2j),
    P(X_n = k) = P(V_n = n - k),   k in {0..n-1}.

Backends
--------
rational      exact fractions end to end (n <= caps.rational_max);
              normalization and the endpoint identity P(X_n = n-1) = n^-2
              hold exactly, not just to tolerance.
float_formula log-space evaluation with lgamma and exact-integer ln d_j
              (n <= caps.float_max).
asymptotic_d  log-space evaluation with the d_j growth law; any n, evaluated
              lazily per k.  A small exact table covers the right-tail layer
              j <= caps.endpoint_exact_j, where the growth law is weakest.
              Pointwise relative accuracy is O(1/j), so normalization is only
              O(1/n) accurate; this backend exists for tail and point queries
              at n far beyond exact reach.
dp_oracle     forward absorption-probability propagation over the embedded
              jump chain; independent of the d_j formula and used to
              cross-validate it.

All probability arithmetic is in log space (log-sum-exp); nothing here ever
forms a bare product of n-sized factorials in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import gammaln, logsumexp

from .automata import AutomataTable, asymptotic_log_d, get_table, hybrid_log_d
from .config import DEFAULT_CAPS, ResourceCaps
from .constants import ModelConstants, default_constants

BACKENDS = ("rational", "float_formula", "asymptotic_d", "dp_oracle")

RATE_FORMULA = "formula"          # stifling rate j*(n-i)
RATE_PAPER_LITERAL = "paper_literal"  # stifling rate j*(n+1-i)


def log_pmf_V(n: int, j, table: AutomataTable | None = None,
              constants: ModelConstants | None = None):
    """ln P(V_n = j) = lgamma(n) - lgamma(n-j+1) + ln d_j - 2j ln n.

    Uses exact ln d_j where the table covers j and the growth law beyond;
    vectorized over j.
    """
    j_arr = np.asarray(j)
    if np.any(j_arr < 1) or np.any(j_arr > n):
        raise ValueError(f"j outside support 1..{n}")
    jf = j_arr.astype(float)
    out = (gammaln(n) - gammaln(n - jf + 1.0)
           + hybrid_log_d(j_arr, table, constants) - 2.0 * jf * math.log(n))
    return float(out) if out.ndim == 0 else out


@dataclass
class FinalSizeDistribution:
    """Log-space PMF of X_n, tagged with its backend.

    The support is {0..support_size-1}; support_size equals n except for the
    dp oracle under the paper-literal rate convention, where X_n = n is
    reachable.  Dense storage is materialized for the exact backends; the
    asymptotic backend computes per k on demand (pure evaluation, safe under
    concurrent reads).  `fractions[k]` is populated only by exact backends.
    """

    n: int
    backend: str
    constants: ModelConstants
    _logpmf_fn: Callable[[np.ndarray], np.ndarray]
    support_size: int = 0
    _dense: np.ndarray | None = None
    fractions: list[Fraction] | None = None

    def __post_init__(self):
        if self.support_size == 0:
            self.support_size = self.n

    def log_pmf(self, k):
        k_arr = np.asarray(k)
        if np.any(k_arr < 0) or np.any(k_arr > self.support_size - 1):
            raise ValueError(f"k outside support 0..{self.support_size - 1}")
        if self._dense is not None:
            out = self._dense[k_arr]
        else:
            out = self._logpmf_fn(k_arr)
        return float(out) if np.ndim(out) == 0 else out

    def pmf(self, k):
        return np.exp(self.log_pmf(k))

    def dense_log_pmf(self) -> np.ndarray:
        if self._dense is None:
            if self.support_size > 5_000_000:
                raise ValueError(
                    f"refusing to materialize n={self.n} points "
                    f"(backend {self.backend})"
                )
            self._dense = np.asarray(
                self._logpmf_fn(np.arange(self.support_size, dtype=np.int64)),
                dtype=float,
            )
        return self._dense

    def normalization_error(self) -> float:
        if self.fractions is not None:
            return float(abs(sum(self.fractions) - 1))
        return abs(math.expm1(float(logsumexp(self.dense_log_pmf()))))

    def mean_variance(self) -> tuple[float, float]:
        lp = self.dense_log_pmf()
        p = np.exp(lp)
        k = np.arange(self.support_size, dtype=float)
        mean = float(np.dot(k, p))
        var = float(np.dot((k - mean) ** 2, p))
        return mean, var

    def cdf(self) -> np.ndarray:
        return np.cumsum(np.exp(self.dense_log_pmf()))


def _rational_pmf_V(n: int, table: AutomataTable) -> list[Fraction]:
    """Exact P(V_n = j) for j = 1..n."""
    out = []
    ff = 1                      # (n-1)!/(n-j)!
    npow = n * n                # n^(2j)
    for j in range(1, n + 1):
        out.append(Fraction(ff * table.d(j), npow))
        ff *= n - j
        npow *= n * n
    return out


def distribution(n: int, backend: str = "auto",
                 table: AutomataTable | None = None,
                 constants: ModelConstants | None = None,
                 caps: ResourceCaps = DEFAULT_CAPS,
                 convention: str = RATE_FORMULA) -> FinalSizeDistribution:
    """Full (or lazily evaluated) log-PMF of X_n.

    backend "auto" picks rational for n <= caps.rational_max, float_formula
    up to caps.float_max, asymptotic_d beyond.  `convention` only affects the
    dp_oracle backend.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = constants or default_constants()
    if backend == "auto":
        backend = pick_backend(n, caps)

    if backend == "rational":
        if n > caps.rational_max:
            raise ValueError(
                f"rational backend capped at n={caps.rational_max}, got {n}"
            )
        tab = table or get_table(n, caps)
        pv = _rational_pmf_V(n, tab)
        fracs = [pv[n - k - 1] for k in range(n)]  # k = n - j
        total = sum(fracs)
        if total != 1:
            raise RuntimeError(f"rational PMF for n={n} sums to {total} != 1")
        dense = np.array(
            [math.log(f.numerator) - math.log(f.denominator) for f in fracs]
        )
        return FinalSizeDistribution(
            n=n, backend="rational", constants=c,
            _logpmf_fn=lambda k: dense[k], _dense=dense, fractions=fracs,
        )

    if backend == "float_formula":
        if n > caps.float_max:
            raise ValueError(
                f"float_formula backend capped at n={caps.float_max}, got {n}"
            )
        tab = table or get_table(n, caps)
        ks = np.arange(n, dtype=np.int64)
        dense = np.asarray(log_pmf_V(n, n - ks, tab, c), dtype=float)
        return FinalSizeDistribution(
            n=n, backend="float_formula", constants=c,
            _logpmf_fn=lambda k: dense[k], _dense=dense,
        )

    if backend == "asymptotic_d":
        tab = table or _endpoint_table(caps)

        def lazy(k):
            return log_pmf_V(n, n - np.asarray(k), tab, c)

        return FinalSizeDistribution(
            n=n, backend="asymptotic_d", constants=c, _logpmf_fn=lazy,
        )

    if backend == "dp_oracle":
        return dp_distribution(n, convention=convention, constants=c, caps=caps)

    raise ValueError(f"unknown backend {backend!r}")


def pick_backend(n: int, caps: ResourceCaps = DEFAULT_CAPS) -> str:
    if n <= caps.rational_max:
        return "rational"
    if n <= caps.float_max:
        return "float_formula"
    return "asymptotic_d"


def _endpoint_table(caps: ResourceCaps) -> AutomataTable:
    """Exact d_j for the right-tail layer only; the asymptotic backend must
    not silently borrow a larger cached table."""
    j = min(caps.endpoint_exact_j, caps.dj_max)
    return get_table(j, caps).restrict(j)


def dp_distribution(n: int, convention: str = RATE_FORMULA,
                    exact: bool = False,
                    constants: ModelConstants | None = None,
                    caps: ResourceCaps = DEFAULT_CAPS) -> FinalSizeDistribution:
    """Absorption distribution of the embedded jump chain from (n, 1).

    Forward probability propagation over states (i, j); within an ignorant
    level i the conversion probability p = i/(i+s) is constant (the spreader
    count cancels), so the total mass passing through (i, j) satisfies the
    reversed one-step recursion through[j] = in[j] + q*through[j+1].

    With exact=True the propagation runs in Fractions (small n only); the
    result then equals the rational formula PMF identically under the
    "formula" rate convention.

    Support note: under the paper-literal convention V_n = 0 is reachable
    (the first spreader may stifle immediately), i.e. X_n = n; the returned
    PMF is over {0..n} in that case.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > caps.dp_max:
        raise ValueError(f"dp_oracle backend capped at n={caps.dp_max}, got {n}")
    if convention not in (RATE_FORMULA, RATE_PAPER_LITERAL):
        raise ValueError(f"unknown rate convention {convention!r}")
    c = constants or default_constants()

    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    absorbed = [zero] * (n + 1)
    incoming = [zero] * (n + 3)   # index j, level i = n
    incoming[1] = one
    for i in range(n, -1, -1):
        j_top = n + 1 - i
        if i == 0:
            p = zero
        else:
            s = (n - i) if convention == RATE_FORMULA else (n + 1 - i)
            p = Fraction(i, i + s) if exact else i / (i + s)
        q = one - p
        through = [zero] * (j_top + 2)
        acc = zero
        for j in range(j_top, 0, -1):
            acc = incoming[j] + q * acc
            through[j] = acc
        absorbed[i] += q * through[1]
        if i > 0:
            nxt = [zero] * (n + 3)
            for j in range(1, j_top + 1):
                t = through[j]
                if t:
                    nxt[j + 1] = p * t
            incoming = nxt

    support = n + 1 if convention == RATE_PAPER_LITERAL else n
    probs = absorbed[:support]
    if exact:
        total = sum(probs)
        if total != 1:
            raise RuntimeError(f"exact DP mass for n={n} sums to {total}")
        dense = np.array([
            math.log(f.numerator) - math.log(f.denominator) if f else -np.inf
            for f in probs
        ])
        fracs = [Fraction(f) for f in probs]
    else:
        arr = np.asarray(probs, dtype=float)
        with np.errstate(divide="ignore"):
            dense = np.log(arr)
        fracs = None

    return FinalSizeDistribution(
        n=n, backend="dp_oracle", constants=c,
        _logpmf_fn=lambda k: dense[k], support_size=support,
        _dense=dense, fractions=fracs,
    )


@dataclass
class TailResult:
    log_prob: float
    backend: str
    trunc_log_bound: float  # recorded upper estimate of truncated mass, -inf if none


def tail_log_prob(n: int, z: float, b_n: float, side: str = "both",
                  table: AutomataTable | None = None,
                  constants: ModelConstants | None = None,
                  caps: ResourceCaps = DEFAULT_CAPS) -> float:
    """ln P of the requested tail of Z_n = (X_n - n*x_inf)/(b_n*sqrt(n)).

    Sums exact lattice probabilities for |k - n*x_inf| >= z*b_n*sqrt(n),
    side-restricted as requested; -inf if the tail set is empty.
    """
    return tail_log_prob_detail(n, z, b_n, side, table, constants, caps).log_prob


def tail_log_prob_detail(n: int, z: float, b_n: float, side: str = "both",
                         table: AutomataTable | None = None,
                         constants: ModelConstants | None = None,
                         caps: ResourceCaps = DEFAULT_CAPS) -> TailResult:
    if z <= 0 or b_n <= 0:
        raise ValueError("z and b_n must be positive")
    if side not in ("left", "right", "both"):
        raise ValueError(f"unknown side {side!r}")
    c = constants or default_constants()
    center = n * c.x_inf
    a = z * b_n * math.sqrt(n)
    k_left = math.floor(center - a)           # k <= center - a
    k_right = math.ceil(center + a)           # k >= center + a

    if n <= caps.float_max:
        dist = distribution(n, "auto", table=table, constants=c, caps=caps)
        lp = dist.dense_log_pmf()
        parts = []
        if side in ("left", "both") and k_left >= 0:
            parts.append(logsumexp(lp[: min(k_left, n - 1) + 1]))
        if side in ("right", "both") and k_right <= n - 1:
            parts.append(logsumexp(lp[max(k_right, 0):]))
        log_p = float(logsumexp(parts)) if parts else -np.inf
        return TailResult(log_p, dist.backend, -np.inf)

    return _windowed_tail(n, side, k_left, k_right, a, c, caps)


def _windowed_tail(n: int, side: str, k_left: int, k_right: int, a: float,
                   c: ModelConstants, caps: ResourceCaps) -> TailResult:
    """Tail sum at huge n: Gaussian-scale window plus the exact endpoint layer.

    The window |k - n*x_inf| <= max(4a, 50*sqrt(n)) captures the moderate
    range; beyond it the mass is bounded by a Gaussian-tail estimate (from
    the local quadratic lower bound on the rate function), the fixed-distance
    region by n*exp(-n*h(edge)), and the remaining right-tail layer by twice
    its first term.  These estimates are recorded in trunc_log_bound for
    attribution; the endpoint layer j <= caps.endpoint_exact_j is summed
    exactly.
    """
    tab = _endpoint_table(caps)
    center = n * c.x_inf
    W = max(4.0 * a, 50.0 * math.sqrt(n))
    s2 = c.sigma2
    parts: list[float] = []
    bounds: list[float] = []

    def logpmf_range(lo: int, hi: int) -> float:
        if hi < lo:
            return -np.inf
        ks = np.arange(lo, hi + 1, dtype=np.int64)
        return float(logsumexp(log_pmf_V(n, n - ks, tab, c)))

    def gauss_beyond(offset: float) -> float:
        # mass of sum_{|k-center| >= offset} 2*n^{-1/2}*exp(-(k-center)^2/(4*s2*n)),
        # valid while offset/n stays inside the quadratic-bound radius
        off = min(offset, 0.15 * n)
        rate = off / (2.0 * s2 * n)
        return (math.log(2.0) - 0.5 * math.log(n) - off * off / (4.0 * s2 * n)
                - math.log(-math.expm1(-rate)))

    if side in ("left", "both") and k_left >= 0:
        lo = max(0, math.floor(center - W))
        parts.append(logpmf_range(lo, k_left))
        if lo > 0:
            bounds.append(gauss_beyond(center - lo))
    if side in ("right", "both") and k_right <= n - 1:
        hi = min(n - 1, math.ceil(center + W))
        parts.append(logpmf_range(k_right, hi))
        if hi < n - 1:
            # endpoint layer j <= j_end, exactly
            j_end = min(caps.endpoint_exact_j, n - 1 - hi)
            parts.append(logpmf_range(n - j_end, n - 1))
            bounds.append(gauss_beyond(hi - center))
            lo_gap = hi + 1
            hi_gap = n - j_end - 1
            if hi_gap >= lo_gap:
                # fixed-distance region: pmf <= ~ n^{-1/2} exp(-n h(x)) with the
                # minimum of h attained at the gap edges
                from .rates import rate_h
                h_edge = min(rate_h(lo_gap / n, c), rate_h(hi_gap / n, c))
                bounds.append(math.log(hi_gap - lo_gap + 1.0)
                              + math.log(2.0) - 0.5 * math.log(n)
                              - n * h_edge)
                # layer remainder beyond the exact block, geometric margin 2
                if n - j_end - 1 >= k_right:
                    bounds.append(math.log(2.0)
                                  + float(log_pmf_V(n, j_end + 1, tab, c)))

    log_p = float(logsumexp(parts)) if parts else -np.inf
    trunc = float(logsumexp(bounds)) if bounds else -np.inf
    return TailResult(log_p, "asymptotic_d", trunc)


def left_layer_log_prob(n: int, delta: float,
                        table: AutomataTable | None = None,
                        constants: ModelConstants | None = None,
                        caps: ResourceCaps = DEFAULT_CAPS) -> float:
    """ln P(V_n <= delta*n), the near-endpoint layer of the final size.

    The layer is dominated by its first terms (successive ratios are of
    order beta*e*j/n), so exact d_j beyond caps.endpoint_exact_j buys
    nothing; the growth law covers the remainder.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    c = constants or default_constants()
    j_hi = min(n, math.floor(delta * n + 1e-9))
    if j_hi < 1:
        return -np.inf
    tab = table or _endpoint_table(caps)
    js = np.arange(1, j_hi + 1, dtype=np.int64)
    return float(logsumexp(log_pmf_V(n, js, tab, c)))


def moments(n: int, backend: str = "auto",
            table: AutomataTable | None = None,
            constants: ModelConstants | None = None,
            caps: ResourceCaps = DEFAULT_CAPS) -> tuple[float, float]:
    """Exact mean and variance of X_n from the PMF."""
    dist = distribution(n, backend, table=table, constants=constants, caps=caps)
    return dist.mean_variance()
