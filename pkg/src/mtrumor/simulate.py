"""Sampling the rumour process.

Final sizes come from the embedded jump chain: holding times do not affect
absorption probabilities, so skipping them is a large constant-factor win.
Full continuous-time trajectories (exponential holding times) are available
separately.

Reproducibility contract: a batch is split across `streams` substreams
spawned from SeedSequence(seed); stream s always owns the same slice of the
batch, so results depend on (seed, streams, m) only, never on how many
worker threads execute the streams.

Two rate conventions are supported.  "formula" uses stifling rate j*(n-i)
(the initiating spreader meets one of the n-i OTHER informed individuals),
under which the jump chain reproduces the exact final-size distribution.
"paper_literal" uses j*(n+1-i), under which the first spreader can stifle
immediately (V_n = 0) and the n = 2 distribution differs measurably; it is
kept for comparison only.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

RATE_FORMULA = "formula"
RATE_PAPER_LITERAL = "paper_literal"
_CONVENTIONS = (RATE_FORMULA, RATE_PAPER_LITERAL)


@dataclass(frozen=True)
class SimConfig:
    n: int
    rate_convention: str = RATE_FORMULA
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.streams < 1:
            raise ValueError("streams must be >= 1")
        if self.rate_convention not in _CONVENTIONS:
            raise ValueError(f"unknown rate convention {self.rate_convention!r}")


@dataclass(frozen=True)
class ChainState:
    ignorants: int
    spreaders: int
    population: int  # n + 1, conserved

    def __post_init__(self):
        if self.ignorants < 0 or self.spreaders < 0:
            raise ValueError("negative compartment")
        if self.ignorants + self.spreaders > self.population:
            raise ValueError("compartments exceed population")

    @property
    def stiflers(self) -> int:
        return self.population - self.ignorants - self.spreaders

    @property
    def absorbing(self) -> bool:
        return self.spreaders == 0


@dataclass
class Trajectory:
    n: int
    events: list[tuple[float, int, int]]  # (time, ignorants, spreaders)
    absorption_time: float

    def final_ignorants(self) -> int:
        return self.events[-1][1]


def _stifle_pool(n: int, i, convention: str):
    return (n - i) if convention == RATE_FORMULA else (n + 1 - i)


def step_probabilities(state: ChainState, convention: str = RATE_FORMULA) -> tuple[float, float]:
    """(p_convert, p_stifle) for the next jump; the spreader count cancels."""
    if convention not in _CONVENTIONS:
        raise ValueError(f"unknown rate convention {convention!r}")
    if state.absorbing:
        raise ValueError("no transition out of an absorbing state")
    n = state.population - 1
    i = state.ignorants
    s = _stifle_pool(n, i, convention)
    p = i / (i + s)
    return p, 1.0 - p


def _spawn_rngs(seed: int, streams: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s)
            for s in np.random.SeedSequence(seed).spawn(streams)]


def _final_sizes(n: int, m: int, rng: np.random.Generator,
                 convention: str) -> np.ndarray:
    """m final X values by running all chains in lockstep from (n, 1)."""
    i = np.full(m, n, dtype=np.int64)
    j = np.ones(m, dtype=np.int64)
    active = np.arange(m)
    while active.size:
        ia = i[active]
        s = _stifle_pool(n, ia, convention)
        p_conv = ia / (ia + s)
        conv = rng.random(active.size) < p_conv
        idx_c = active[conv]
        i[idx_c] -= 1
        j[idx_c] += 1
        j[active[~conv]] -= 1
        active = active[j[active] > 0]
    return i


def sample_final_size(config: SimConfig) -> int:
    """One draw of X_n; deterministic given the seed."""
    rng = _spawn_rngs(config.seed, config.streams)[0]
    return int(_final_sizes(config.n, 1, rng, config.rate_convention)[0])


def _stream_slices(m: int, streams: int) -> list[int]:
    bounds = [m * t // streams for t in range(streams + 1)]
    return [bounds[t + 1] - bounds[t] for t in range(streams)]


def sample_batch(config: SimConfig, m: int, threads: int = 1) -> np.ndarray:
    """Histogram (length n+1) of m final-size draws, merged across streams.

    Identical output for fixed (seed, streams, m) regardless of `threads`.
    Index k counts draws with X_n = k; index n is reachable only under the
    paper-literal convention.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rngs = _spawn_rngs(config.seed, config.streams)
    sizes = _stream_slices(m, config.streams)
    nbins = config.n + 1

    def run(t: int) -> np.ndarray:
        if sizes[t] == 0:
            return np.zeros(nbins, dtype=np.int64)
        finals = _final_sizes(config.n, sizes[t], rngs[t], config.rate_convention)
        return np.bincount(finals, minlength=nbins)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(config.streams)))
    else:
        parts = [run(t) for t in range(config.streams)]
    out = np.zeros(nbins, dtype=np.int64)
    for part in parts:
        out += part
    return out


def sample_trajectory(config: SimConfig) -> Trajectory:
    """Full continuous-time path from (n, 1) to absorption.

    Holding time in (i, j) is exponential with total rate i*j + j*s, where s
    is the stifling pool of the active convention; the jump is chosen by
    step_probabilities.
    """
    rng = _spawn_rngs(config.seed, config.streams)[0]
    n = config.n
    i, j = n, 1
    t = 0.0
    events: list[tuple[float, int, int]] = [(0.0, i, j)]
    while j > 0:
        s = _stifle_pool(n, i, config.rate_convention)
        total_rate = i * j + j * s
        t += rng.exponential(1.0 / total_rate)
        if rng.random() < i / (i + s):
            i -= 1
            j += 1
        else:
            j -= 1
        events.append((t, i, j))
    return Trajectory(n=n, events=events, absorption_time=t)
