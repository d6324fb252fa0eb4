"""Monte Carlo check of exact probabilities: sample X, form Y = A X,
compare the hit frequency of a target b against pmf via a z-score."""

from __future__ import annotations

import math
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .intlinalg import int_vector
from .kernels import check_seed, hits_block, sample_block
from .model import PoissonModel
from .pmf import pmf

__all__ = ["RngState", "SampleReport", "sample_x", "sample_many", "verify"]


class RngState:
    """Stream position: a fixed seed plus the index of the next sample.

    Counter-based, so a state at any index can be constructed directly;
    drawing never mutates global state.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed, counter: int = 0):
        self.seed = check_seed(seed)
        counter = operator.index(counter)
        if counter < 0:
            raise InputError("counter must be >= 0")
        self.counter = counter

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, counter={self.counter})"


def sample_x(rates, state: RngState, backend=None) -> np.ndarray:
    """One vector of independent Poisson(rates) draws; advances state."""
    block = sample_block(rates, state.seed, state.counter, state.counter + 1, backend=backend)
    state.counter += 1
    return block[0]


def sample_many(rates, seed, n_samples: int, start: int = 0, backend=None) -> np.ndarray:
    """(n_samples, n) draws with sample indices [start, start + n_samples).

    Equals stacking sample_x calls from the same starting state.
    """
    n_samples = operator.index(n_samples)
    if n_samples < 0:
        raise InputError("n_samples must be >= 0")
    return sample_block(rates, seed, start, start + n_samples, backend=backend)


@dataclass(frozen=True)
class SampleReport:
    """z_score is NaN when the exact probability is 0 or 1 (the normal
    approximation has no spread there).  n_shards records the layout of
    contiguous sample blocks; results do not depend on it."""

    b: tuple
    exact_prob: float
    empirical_prob: float
    n_samples: int
    z_score: float
    seed: int
    hits: int
    n_shards: int


def _shard_bounds(n: int, shards: int):
    return [(i * n // shards, (i + 1) * n // shards) for i in range(shards)]


def verify(model: PoissonModel, b, n_samples: int, seed, threads: int = 1, backend=None) -> SampleReport:
    """Draw n_samples of X, count exact hits Y == b, report the z-score
    of the empirical frequency against pmf(model, b).

    Reproducible: the result depends only on (model, b, n_samples,
    seed), not on threads, which merely shards the counter range.
    """
    n_samples = operator.index(n_samples)
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    threads = operator.index(threads)
    if threads < 1:
        raise InputError("threads must be >= 1")
    seed = check_seed(seed)
    bv = int_vector(b)
    if bv.shape[0] != model.m_full:
        raise InputError(f"observation length {bv.shape[0]} != row count {model.m_full}")
    target = tuple(int(x) for x in bv)

    exact = pmf(model, target).prob
    rates = model.rates_full
    amat = model.a_full

    shards = _shard_bounds(n_samples, min(threads, n_samples))
    if len(shards) == 1:
        hits = hits_block(amat, target, rates, seed, 0, n_samples, backend=backend)
    else:
        with ThreadPoolExecutor(max_workers=len(shards)) as pool:
            futs = [
                pool.submit(hits_block, amat, target, rates, seed, lo, hi, backend=backend)
                for lo, hi in shards
            ]
            hits = sum(f.result() for f in futs)

    empirical = hits / n_samples
    if 0.0 < exact < 1.0:
        z = (empirical - exact) / math.sqrt(exact * (1.0 - exact) / n_samples)
    else:
        z = math.nan
    return SampleReport(
        b=target,
        exact_prob=exact,
        empirical_prob=empirical,
        n_samples=n_samples,
        z_score=z,
        seed=seed,
        hits=hits,
        n_shards=len(shards),
    )
