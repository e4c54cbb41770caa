"""Exact and asymptotic evaluation of the d_j sequence.

d_1 = 1 and, for j >= 2,

    d_j = j^(2j)/(j-1)! - sum_{i=1}^{j-1} j^(2(j-i))/(j-i)! * d_i.

The subtraction cancels all but a factor exp(-(1 - log(beta))*j) of the lead
term, so floating evaluation of the recursion is hopeless; everything here is
exact integer arithmetic.  Multiplying through by (j-1)! gives

    (j-1)! * d_j = j^(2j) - sum_i w_i d_i,
    w_i = (j-1)!/(j-i)! * j^(2(j-i)),  w_1 = j^(2(j-1)),
    w_{i+1} = w_i * (j-i) / j^2            (exact division),

which stays in integers end to end.  The inner sum is evaluated in blocks:
within a block of size g the weights differ from the block head only by small
falling-factorial-over-j^2 ratios, so a block costs one large*large product
instead of g of them.  gmpy2 integers carry the big arithmetic.

Integrality of d_j is not obvious from the recursion; it is asserted at every
assignment and a failure raises rather than silently continuing.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpz, divexact

from .config import DEFAULT_CAPS, ResourceCaps
from .constants import ModelConstants, default_constants

_BLOCK = 32


def _compute_values(j_max: int, block: int = _BLOCK) -> list:
    """d_1..d_{j_max} as gmpy2 mpz, integrality asserted per index."""
    d = [mpz(0), mpz(1)]
    fact = mpz(1)                      # (j-1)!
    for j in range(2, j_max + 1):
        fact *= j - 1
        j2 = mpz(j) * j
        w = mpz(j) ** (2 * (j - 1))    # weight of the i = 1 term
        s = mpz(0)
        i = 1
        while i <= j - 1:
            b = min(block, j - i)
            if b == 1:
                s += w * d[i]
                if i + 1 <= j - 1:
                    w = divexact(w * (j - i), j2)
                i += 1
                continue
            acc = mpz(0)
            ff = mpz(1)                # falling factorial (j-i)...(j-i-delta+1)
            p = j2 ** (b - 1)          # j^(2(b-1-delta))
            for delta in range(b):
                acc += p * ff * d[i + delta]
                if delta + 1 < b:
                    ff *= j - i - delta
                    p = divexact(p, j2)
            s += divexact(w, j2 ** (b - 1)) * acc
            if i + b <= j - 1:
                ff *= j - i - b + 1
                w = divexact(w * ff, j2 ** b)
            i += b
        num = mpz(j) ** (2 * j) - s
        q, r = divmod(num, fact)
        if r != 0 or q <= 0:
            raise RuntimeError(
                f"d_{j} recursion did not reduce to a positive integer "
                f"(remainder {r}); implementation bug"
            )
        if q <= d[j - 1] and j > 1:
            raise RuntimeError(f"d_{j} is not strictly larger than d_{j-1}")
        d.append(q)
    return d[1:]


def log_of_int(x) -> float:
    """Natural log of an arbitrary-size positive integer."""
    # math.log accepts CPython ints of any size; route mpz through int
    return math.log(int(x))


@dataclass
class AutomataTable:
    """Exact d_j values with their natural logs.

    values[j-1] is d_j as a Python int; log_values[j-1] = ln d_j.
    """

    j_max: int
    values: list[int]
    log_values: np.ndarray
    backend: str = "exact"

    def d(self, j: int) -> int:
        self._check_range(j)
        return self.values[j - 1]

    def log_d(self, j: int) -> float:
        self._check_range(j)
        return float(self.log_values[j - 1])

    def _check_range(self, j: int) -> None:
        if not 1 <= j <= self.j_max:
            raise ValueError(f"j={j} outside exact table range 1..{self.j_max}")

    def restrict(self, j_max: int) -> "AutomataTable":
        """View of the first j_max entries (shared storage)."""
        if j_max > self.j_max:
            raise ValueError(f"cannot restrict to {j_max} > {self.j_max}")
        return AutomataTable(j_max=j_max, values=self.values[:j_max],
                             log_values=self.log_values[:j_max],
                             backend=self.backend)


def compute_exact(j_max: int, caps: ResourceCaps = DEFAULT_CAPS,
                  block: int = _BLOCK) -> AutomataTable:
    """Exact table of d_1..d_{j_max}; refuses j_max beyond caps.dj_max."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    if j_max > caps.dj_max:
        raise ValueError(
            f"j_max={j_max} exceeds exact d_j cap {caps.dj_max} "
            f"(override via MTRUMOR_DJ_MAX)"
        )
    vals = _compute_values(j_max, block=block)
    logs = np.array([log_of_int(v) for v in vals], dtype=float)
    return AutomataTable(j_max=j_max, values=[int(v) for v in vals],
                         log_values=logs, backend="exact")


_table_lock = threading.Lock()
_cached_table: AutomataTable | None = None


def get_table(j_max: int, caps: ResourceCaps = DEFAULT_CAPS) -> AutomataTable:
    """Process-wide table cache; grows monotonically, never recomputes.

    The returned table may cover more than j_max; callers that must not see
    exact values beyond their request should `restrict` it.
    """
    global _cached_table
    with _table_lock:
        if _cached_table is None or _cached_table.j_max < j_max:
            _cached_table = compute_exact(j_max, caps=caps)
        return _cached_table


def asymptotic_log_d(j, constants: ModelConstants | None = None):
    """ln of the growth law alpha*kappa*beta^j*j^(j+1/2); vectorized in j."""
    c = constants or default_constants()
    j = np.asarray(j, dtype=float)
    out = (math.log(c.alpha * c.kappa) + j * math.log(c.beta)
           + (j + 0.5) * np.log(j))
    return float(out) if out.ndim == 0 else out


def log_d(j: int, backend: str = "exact",
          table: AutomataTable | None = None,
          constants: ModelConstants | None = None) -> float:
    """ln d_j from the requested backend."""
    if backend == "exact":
        if table is None:
            raise ValueError("exact backend requires a computed table")
        return table.log_d(j)
    if backend == "asymptotic":
        if j < 1:
            raise ValueError("j must be >= 1")
        return float(asymptotic_log_d(j, constants))
    raise ValueError(f"unknown backend {backend!r}")


def hybrid_log_d(j, table: AutomataTable | None,
                 constants: ModelConstants | None = None):
    """Exact ln d_j where the table covers j, asymptotic beyond; vectorized."""
    j_arr = np.asarray(j)
    out = asymptotic_log_d(j_arr, constants)
    if table is not None:
        out = np.asarray(out, dtype=float)
        exact = (j_arr >= 1) & (j_arr <= table.j_max)
        if np.any(exact):
            idx = j_arr[exact].astype(np.int64) - 1
            if out.ndim == 0:
                out = table.log_values[int(idx)]
            else:
                out[exact] = table.log_values[idx]
    return float(out) if np.ndim(out) == 0 else out


def asymptotic_ratio(j: int, table: AutomataTable,
                     constants: ModelConstants | None = None) -> float:
    """d_j / (alpha*kappa*beta^j*j^(j+1/2)), evaluated in log space."""
    return math.exp(table.log_d(j) - float(asymptotic_log_d(j, constants)))
