"""Monte Carlo estimates of the law of ``X_d``, computed two independent ways.

The geometric route samples ``d + 2`` Gaussian points in ``R^d`` and reads off
the smaller side of their Radon partition. The demon route samples ``d + 2``
Gaussians on the line and counts how many exceed their mean.

Work is cut into fixed blocks of ``BLOCK_SIZE`` samples. Block ``b`` always
draws from substream ``(seed, stream_id(method, param, b))`` no matter which
worker runs it, and tallies are merged by summation, so results are identical
for every worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError
from .geometry import batch_min_side
from .numerics import DEFAULT_TOL, RngStream
from .youden import SplitDistribution, demon_counts, xd_law_from_demon

DEFAULT_SEED = 1864
DEFAULT_CI_LEVEL = 0.95
BLOCK_SIZE = 1 << 15
WORKERS_ENV = "RADONDEMON_WORKERS"

_METHOD_TAGS = {"geometric": 1, "demon": 2}

# Empirical distribution of X_d from 1000 samples per row, as published.
TABLE1 = {
    2: {1: 0.341, 2: 0.659},
    3: {1: 0.091, 2: 0.909},
    4: {1: 0.031, 2: 0.460, 3: 0.509},
    5: {1: 0.008, 2: 0.180, 3: 0.812},
    6: {1: 0.000, 2: 0.074, 3: 0.475, 4: 0.451},
}


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return 1
    workers = int(value)
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return workers


def stream_id(method: str, param: int, block: int) -> int:
    return (_METHOD_TAGS[method] << 56) | (param << 40) | block


def wilson_ci(count: int, total: int, level: float = DEFAULT_CI_LEVEL) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if not 0 <= count <= total or total <= 0:
        raise ValueError(f"need 0 <= count <= total and total > 0, got {count}/{total}")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = count / total
    z2 = z * z
    denom = 1 + z2 / total
    center = (p + z2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z2 / (4 * total * total)) / denom
    lo = 0.0 if count == 0 else max(0.0, center - half)
    hi = 1.0 if count == total else min(1.0, center + half)
    return lo, hi


@dataclass
class EstimateResult:
    distribution: SplitDistribution
    counts: dict
    ci: dict
    seed: int
    method: str
    workers: int = 1
    rejections: int = 0
    ci_level: float = DEFAULT_CI_LEVEL
    wall_time: float = 0.0

    @property
    def d(self) -> int:
        return self.distribution.d

    @property
    def samples(self) -> int:
        return self.distribution.sample_count

    @property
    def mass(self) -> dict:
        return self.distribution.mass


@dataclass
class DemonEstimate:
    """Empirical ``P(n, k)`` for ``k = 1 .. n - 1``."""

    n: int
    counts: dict
    ci: dict
    seed: int
    samples: int
    workers: int = 1
    rejections: int = 0
    ci_level: float = DEFAULT_CI_LEVEL
    wall_time: float = 0.0
    method: str = field(default="demon-pnk", init=False)

    @property
    def frequency(self) -> dict:
        return {k: c / self.samples for k, c in self.counts.items()}


def _blocks(samples: int):
    return [(b, min(BLOCK_SIZE, samples - b * BLOCK_SIZE)) for b in range(math.ceil(samples / BLOCK_SIZE))]


def _run_blocks(samples: int, workers: int, job: Callable[[int, int], tuple[np.ndarray, int]]):
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    blocks = _blocks(samples)
    if workers == 1:
        results = [job(b, size) for b, size in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda bs: job(*bs), blocks))
    tally = sum(r[0] for r in results)
    rejections = sum(r[1] for r in results)
    return tally, rejections


def _geometric_block(d: int, seed: int, tol: float):
    n = d + 2

    def job(block: int, size: int):
        rng = RngStream(seed, stream_id("geometric", d, block))
        sides = np.empty(size, dtype=np.int64)
        todo = np.arange(size)
        rejected = 0
        while todo.size:
            sides_now, degenerate = batch_min_side(rng.normal((todo.size, n, d)), tol)
            sides[todo[~degenerate]] = sides_now[~degenerate]
            rejected += int(degenerate.sum())
            todo = todo[degenerate]
        return np.bincount(sides, minlength=n // 2 + 1), rejected

    return job


def _demon_block(n: int, seed: int):
    def job(block: int, size: int):
        rng = RngStream(seed, stream_id("demon", n, block))
        above = demon_counts(n, size, rng)
        return np.bincount(above, minlength=n + 1), 0

    return job


def _xd_result(d, tally, samples, seed, method, workers, rejections, ci_level, started) -> EstimateResult:
    counts = {k: int(tally[k]) for k in SplitDistribution.support(d)}
    if sum(counts.values()) != samples:
        raise AssertionError("tally does not account for every sample")
    dist = SplitDistribution(d, {k: c / samples for k, c in counts.items()}, samples)
    ci = {k: wilson_ci(c, samples, ci_level) for k, c in counts.items()}
    return EstimateResult(dist, counts, ci, seed, method, workers, rejections, ci_level, time.perf_counter() - started)


def estimate_xd_geometric(
    d: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    ci_level: float = DEFAULT_CI_LEVEL,
    tol: float = DEFAULT_TOL,
) -> EstimateResult:
    """Estimate the law of ``X_d`` from Radon partitions of Gaussian clouds."""
    if d < 2:
        raise ValueError("d must be at least 2")
    started = time.perf_counter()
    tally, rejections = _run_blocks(samples, workers, _geometric_block(d, seed, tol))
    return _xd_result(d, tally, samples, seed, "geometric", workers, rejections, ci_level, started)


def _above_mean_tally(n: int, samples: int, seed: int, workers: int) -> np.ndarray:
    tally, _ = _run_blocks(samples, workers, _demon_block(n, seed))
    if tally[0] or tally[n]:
        raise AssertionError("sample mean fell outside the sample range")
    return tally


def estimate_xd_demon(
    d: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    ci_level: float = DEFAULT_CI_LEVEL,
) -> EstimateResult:
    """Estimate the law of ``X_d`` by folding the demon's above-mean counts for ``n = d + 2``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    started = time.perf_counter()
    n = d + 2
    above = _above_mean_tally(n, samples, seed, workers)
    folded = np.zeros(n // 2 + 1, dtype=np.int64)
    for k in range(1, n):
        folded[min(k, n - k)] += above[k]
    result = _xd_result(d, folded, samples, seed, "demon", workers, 0, ci_level, started)
    # the fold must agree with the library's distribution-level translation
    law = xd_law_from_demon(d, {k: above[k] / samples for k in range(1, n)}, samples)
    if not np.allclose(law.as_array(), result.distribution.as_array(), rtol=0, atol=1e-12):
        raise AssertionError("count fold disagrees with xd_law_from_demon")
    return result


def estimate_pnk(
    n: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    ci_level: float = DEFAULT_CI_LEVEL,
) -> DemonEstimate:
    """Empirical ``P(n, k)``: frequency of exactly ``k`` samples above the mean."""
    if n < 2:
        raise ValueError("n must be at least 2")
    started = time.perf_counter()
    above = _above_mean_tally(n, samples, seed, workers)
    counts = {k: int(above[k]) for k in range(1, n)}
    ci = {k: wilson_ci(c, samples, ci_level) for k, c in counts.items()}
    return DemonEstimate(n, counts, ci, seed, samples, workers, 0, ci_level, time.perf_counter() - started)


def compare_distributions(a: SplitDistribution, b: SplitDistribution) -> tuple[float, float]:
    """Total variation distance and Pearson chi-square of ``a`` against ``b``.

    The chi-square treats ``b`` as the reference law and ``a``'s sample count
    as the number of trials: ``sum((N a_k - N b_k)^2 / (N b_k))``. It is NaN
    when ``a`` carries no sample count, and infinite when ``a`` puts mass
    where ``b`` has none.
    """
    if a.d != b.d:
        raise DimensionMismatchError(f"distributions are for d={a.d} and d={b.d}")
    pa, pb = a.as_array(), b.as_array()
    tv = 0.5 * float(np.abs(pa - pb).sum())
    total = a.sample_count
    if total == 0:
        return tv, float("nan")
    chi2 = 0.0
    for x, y in zip(pa, pb):
        if y == 0:
            if x > 0:
                return tv, float("inf")
            continue
        chi2 += (total * x - total * y) ** 2 / (total * y)
    return tv, chi2


def reproduce_table1(
    samples: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    dims=tuple(TABLE1),
    ci_level: float = DEFAULT_CI_LEVEL,
) -> dict[int, EstimateResult]:
    return {d: estimate_xd_geometric(d, samples, seed, workers, ci_level) for d in dims}
