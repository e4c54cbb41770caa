"""Convergence tables for the limit theorems of the final ignorant count.

Each table is a DeviationReport: rows of (n, b_n, param, empirical, target)
plus the backend that produced the row and, where a lattice window was
truncated, a recorded bound on the neglected mass.  Empirical rates are
deterministic (exact computation, no sampling), so rows are reproducible
bit for bit given the backend and grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtr  # standard normal CDF, vectorized

from . import exact_dist
from .automata import get_table
from .config import DEFAULT_CAPS, ResourceCaps
from .constants import ModelConstants, default_constants
from .rates import lattice_point, rate_h


@dataclass(frozen=True)
class ScaleChoice:
    """Moderate-deviation scale b_n; built-ins satisfy b_n -> inf and
    b_n^2/log(n) -> 0."""

    name: str
    fn: Callable[[float], float]

    def b(self, n: float) -> float:
        return self.fn(float(n))

    def validity_probe(self, n_grid) -> np.ndarray:
        """b_n^2/log(n) sampled on the grid; decreasing for valid scales."""
        return np.array([self.b(n) ** 2 / math.log(n) for n in n_grid])


SCALES = {
    "log_quarter": ScaleChoice("log_quarter", lambda n: math.log(n) ** 0.25),
    "loglog_half": ScaleChoice("loglog_half",
                               lambda n: math.sqrt(math.log(math.log(n)))),
}


def scale_by_name(name: str) -> ScaleChoice:
    try:
        return SCALES[name]
    except KeyError:
        raise ValueError(f"unknown scale {name!r}; known: {sorted(SCALES)}")


@dataclass
class ReportRow:
    check: str
    n: float
    b_n: float
    param: float
    empirical: float
    target: float
    backend: str
    trunc_log_bound: float = -math.inf


_COLUMNS = ("check", "n", "b_n", "param", "empirical", "target",
            "backend", "trunc_log_bound")


@dataclass
class DeviationReport:
    kind: str
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, **kw) -> None:
        self.rows.append(ReportRow(**kw))

    def finalize(self) -> "DeviationReport":
        self.rows.sort(key=lambda r: (r.n, r.param))
        return self

    def column(self, name: str, param: float | None = None) -> list:
        rows = self.rows if param is None else [
            r for r in self.rows if r.param == param
        ]
        return [getattr(r, name) for r in rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.check,
                f"{r.n:.17g}", f"{r.b_n:.17g}", f"{r.param:.17g}",
                f"{r.empirical:.17g}", f"{r.target:.17g}",
                r.backend, f"{r.trunc_log_bound:.17g}",
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str = "parsed") -> "DeviationReport":
        rdr = csv.reader(io.StringIO(text))
        header = next(rdr)
        if tuple(header) != _COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rep = cls(kind=kind)
        for rec in rdr:
            rep.add(check=rec[0], n=float(rec[1]), b_n=float(rec[2]),
                    param=float(rec[3]), empirical=float(rec[4]),
                    target=float(rec[5]), backend=rec[6],
                    trunc_log_bound=float(rec[7]))
        return rep

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "columns": list(_COLUMNS),
            "rows": [[r.check, r.n, r.b_n, r.param, r.empirical, r.target,
                      r.backend, r.trunc_log_bound] for r in self.rows],
        })


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Half the L1 distance between two PMFs on a common index set."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("PMFs must share a shape")
    return 0.5 * float(np.abs(p - q).sum())


def mdp_table(z_list, scale: ScaleChoice, n_grid,
              constants: ModelConstants | None = None,
              caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Empirical vs target two-sided moderate-deviation rate.

    empirical = log P(|Z_n| >= z)/b_n^2, target = -z^2/(2 sigma^2).
    """
    c = constants or default_constants()
    rep = DeviationReport(kind="mdp")
    for n in n_grid:
        n = int(n)
        b = scale.b(n)
        for z in z_list:
            if z <= 0:
                raise ValueError("z must be positive")
            res = exact_dist.tail_log_prob_detail(n, z, b, "both",
                                                  constants=c, caps=caps)
            rep.add(check="mdp", n=n, b_n=b, param=z,
                    empirical=res.log_prob / (b * b),
                    target=-z * z / (2.0 * c.sigma2),
                    backend=res.backend,
                    trunc_log_bound=res.trunc_log_bound)
    return rep.finalize()


def ldp_table(x_list, n_grid,
              constants: ModelConstants | None = None,
              caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Empirical vs target large-deviation rate at fixed proportions.

    For x below the limit proportion the event is {X_n <= x n}, above it
    {X_n >= x n}; empirical = -log P/n, target = h(x).
    """
    c = constants or default_constants()
    rep = DeviationReport(kind="ldp")
    for n in n_grid:
        n = int(n)
        dist = exact_dist.distribution(n, "auto", constants=c, caps=caps)
        lp = dist.dense_log_pmf()
        cum = np.logaddexp.accumulate(lp)
        for x in x_list:
            if not 0.0 < x < 1.0 or x == c.x_inf:
                raise ValueError("x must lie in (0,1) away from x_inf")
            edge = x * n
            if x < c.x_inf:
                k = math.floor(edge + 1e-9)
                log_p = float(cum[k])
            else:
                k = math.ceil(edge - 1e-9)
                tail = lp[k:]
                log_p = float(np.logaddexp.reduce(tail))
            rep.add(check="ldp", n=n, b_n=math.nan, param=x,
                    empirical=-log_p / n, target=float(rate_h(x, c)),
                    backend=dist.backend)
    return rep.finalize()


def clt_check(n_grid, constants: ModelConstants | None = None,
              caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Kolmogorov-Smirnov distance between the exact CDF of
    (X_n - n*x_inf)/sqrt(n) and the centered normal with variance sigma^2."""
    c = constants or default_constants()
    sigma = c.sigma
    rep = DeviationReport(kind="clt")
    for n in n_grid:
        n = int(n)
        dist = exact_dist.distribution(n, "auto", constants=c, caps=caps)
        F = dist.cdf()
        ks = np.arange(n, dtype=float)
        w = (ks - n * c.x_inf) / math.sqrt(n)
        Phi = ndtr(w / sigma)
        below = np.concatenate(([0.0], F[:-1]))
        d = float(np.max(np.maximum(np.abs(F - Phi), np.abs(below - Phi))))
        rep.add(check="clt", n=n, b_n=math.nan, param=math.nan,
                empirical=d, target=0.0, backend=dist.backend)
    return rep.finalize()


def endpoint_probe(n_grid, scale: ScaleChoice,
                   constants: ModelConstants | None = None,
                   caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Rows (n, P(X_n = n-1), n^-2, cost) where cost = -2 log(n)/b_n^2 is the
    log-cost of the all-but-one-ignorant event on the b_n^2 scale."""
    c = constants or default_constants()
    rep = DeviationReport(kind="endpoint")
    for n in n_grid:
        n = int(n)
        b = scale.b(n)
        if n <= caps.rational_max:
            dist = exact_dist.distribution(n, "rational", constants=c, caps=caps)
            p = float(dist.fractions[n - 1])
            backend = "rational"
        else:
            p = math.exp(exact_dist.log_pmf_V(
                n, 1, get_table(1, caps), c))
            backend = "float_formula"
        cost = -2.0 * math.log(n) / (b * b)
        rep.add(check="endpoint", n=n, b_n=b, param=cost,
                empirical=p, target=n ** -2.0, backend=backend)
    return rep.finalize()


def local_mdp_check(z_list, scale: ScaleChoice, n_grid,
                    constants: ModelConstants | None = None,
                    caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Normalized local error
    (log P(X_n = k_n(z)) + log(n)/2 + z^2 b_n^2/(2 sigma^2))/b_n^2,
    which must tend to zero along the grid."""
    c = constants or default_constants()
    rep = DeviationReport(kind="local_mdp")
    for n in n_grid:
        n = int(n)
        b = scale.b(n)
        dist = exact_dist.distribution(n, "auto", constants=c, caps=caps)
        for z in z_list:
            k = lattice_point(n, z, b, c)
            if not 0 <= k <= n - 1:
                rep.add(check="local_mdp", n=n, b_n=b, param=z,
                        empirical=math.nan, target=0.0,
                        backend="out_of_support")
                continue
            val = (dist.log_pmf(k) + 0.5 * math.log(n)
                   + z * z * b * b / (2.0 * c.sigma2)) / (b * b)
            rep.add(check="local_mdp", n=n, b_n=b, param=z,
                    empirical=val, target=0.0, backend=dist.backend)
    return rep.finalize()


def tightness_check(L_list, scale: ScaleChoice, n_grid,
                    delta: float = 0.1, radius: float | None = None,
                    constants: ModelConstants | None = None,
                    caps: ResourceCaps = DEFAULT_CAPS) -> DeviationReport:
    """Two families of rows backing the exponential-tightness estimate.

    moderate_window: (1/b_n^2) log P(L < |Z_n| <= r*sqrt(n)/b_n) against the
    Gaussian-type bound -L^2/(8 sigma^2).
    endpoint_poly: n * P(V_n <= delta*n) against the grid maximum, which a
    single constant must dominate.
    """
    from .rates import quadratic_bound_radius
    c = constants or default_constants()
    r = radius if radius is not None else quadratic_bound_radius(c)
    rep = DeviationReport(kind="tightness")
    for n in n_grid:
        n = int(n)
        b = scale.b(n)
        for L in L_list:
            if L <= 0:
                raise ValueError("L must be positive")
            hi_z = r * math.sqrt(n) / b
            if hi_z <= L:
                rep.add(check="moderate_window", n=n, b_n=b, param=L,
                        empirical=-math.inf,
                        target=-L * L / (8.0 * c.sigma2),
                        backend="empty_window")
                continue
            res_lo = exact_dist.tail_log_prob_detail(n, L, b, "both",
                                                     constants=c, caps=caps)
            res_hi = exact_dist.tail_log_prob_detail(n, hi_z, b, "both",
                                                     constants=c, caps=caps)
            # window mass = P(|Z|>=L) - P(|Z|>=r sqrt(n)/b)
            if res_hi.log_prob == -math.inf:
                window = res_lo.log_prob
            else:
                window = res_lo.log_prob + math.log(
                    -math.expm1(res_hi.log_prob - res_lo.log_prob))
            rep.add(check="moderate_window", n=n, b_n=b, param=L,
                    empirical=window / (b * b),
                    target=-L * L / (8.0 * c.sigma2),
                    backend=res_lo.backend,
                    trunc_log_bound=res_lo.trunc_log_bound)
    layer = []
    for n in n_grid:
        n = int(n)
        lp = exact_dist.left_layer_log_prob(n, delta, constants=c, caps=caps)
        layer.append((n, n * math.exp(lp)))
    bound = max(v for _, v in layer) if layer else math.nan
    for n, v in layer:
        rep.add(check="endpoint_poly", n=n, b_n=scale.b(n), param=delta,
                empirical=v, target=bound, backend="float_formula")
    return rep.finalize()
