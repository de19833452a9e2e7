"""Youden's demon: where the sample mean falls among Gaussian order statistics.

``P(n, k)`` is the probability that exactly ``k`` of ``n`` i.i.d. standard
normals exceed their sample mean. Because the Gale dual of ``d + 2`` Gaussian
points in ``R^d`` is a centered Gaussian sample on the line, the law of the
smaller Radon side ``X_d`` is a folding of ``P(d + 2, .)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidDistributionError, UnknownIdentifierError
from .numerics import RngStream

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class DemonOutcome:
    n: int
    above_mean: int


@dataclass(frozen=True)
class ExactValue:
    identifier: str
    value: float
    closed_form: str


@dataclass(frozen=True)
class SplitDistribution:
    """Law of ``X_d`` over ``k = 1 .. (d + 2) // 2``.

    Missing ``k`` are filled with zero mass.
    """

    d: int
    mass: Mapping[int, float] = field(default_factory=dict)
    sample_count: int = 0

    def __post_init__(self):
        support = self.support(self.d)
        extra = set(self.mass) - set(support)
        if extra:
            raise InvalidDistributionError(f"k values {sorted(extra)} outside 1..{support[-1]} for d={self.d}")
        mass = {k: float(self.mass.get(k, 0.0)) for k in support}
        if any(v < 0 for v in mass.values()):
            raise InvalidDistributionError("negative mass")
        if abs(sum(mass.values()) - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(f"masses sum to {sum(mass.values())!r}, not 1")
        object.__setattr__(self, "mass", mass)

    @staticmethod
    def support(d: int) -> list[int]:
        if d < 1:
            raise ValueError("d must be at least 1")
        return list(range(1, (d + 2) // 2 + 1))

    def __getitem__(self, k: int) -> float:
        return self.mass[k]

    def as_array(self) -> np.ndarray:
        return np.array([self.mass[k] for k in self.support(self.d)])


def above_mean_count(values: Sequence[float]) -> int:
    """Number of values strictly above their arithmetic mean."""
    z = np.asarray(values, dtype=float)
    return int(np.count_nonzero(z > z.mean()))


def demon_counts(n: int, count: int, rng: RngStream) -> np.ndarray:
    """Above-mean counts for ``count`` independent samples of ``n`` normals.

    A sample where some value equals the mean in floating point is discarded
    and redrawn from the same stream.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    out = np.empty(count, dtype=np.int64)
    todo = np.arange(count)
    while todo.size:
        z = rng.normal((todo.size, n))
        mean = z.mean(axis=1, keepdims=True)
        tied = np.any(z == mean, axis=1)
        out[todo[~tied]] = np.count_nonzero(z[~tied] > mean[~tied], axis=1)
        todo = todo[tied]
    return out


def demon_count(n: int, rng: RngStream) -> DemonOutcome:
    return DemonOutcome(n, int(demon_counts(n, 1, rng)[0]))


_CLOSED_FORMS = {
    "P42": (lambda: 6 / math.pi * math.asin(1 / 3), "(6/pi) * arcsin(1/3)"),
    "P52": (lambda: 0.25 + 5 / (2 * math.pi) * math.asin(1 / 4), "1/4 + (5/(2*pi)) * arcsin(1/4)"),
    "X3_CONVEX": (lambda: 0.5 + 5 / math.pi * math.asin(1 / 4), "1/2 + (5/pi) * arcsin(1/4)"),
}


def closed_form(identifier: str) -> ExactValue:
    """Known exact values.

    ``P42`` and ``P52`` are ``P(4, 2)`` and ``P(5, 2)``; ``X3_CONVEX`` is the
    probability that five Gaussian points in ``R^3`` are in convex position,
    which equals ``2 * P(5, 2)``.
    """
    try:
        fn, text = _CLOSED_FORMS[identifier]
    except KeyError:
        raise UnknownIdentifierError(f"unknown identifier {identifier!r}; known: {sorted(_CLOSED_FORMS)}") from None
    return ExactValue(identifier, fn(), text)


def known_identifiers() -> list[str]:
    return sorted(_CLOSED_FORMS)


def log_asymptotic_pnk(n: int, k: int) -> float:
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n - 1, got n={n}, k={k}")
    log_inner = (
        (n - k - 1) * math.log(k)
        + (n - 2 * k)
        - math.log(2)
        - 2 * math.lgamma(k + 1)
        - (n - 3 * k - 1) * math.log(n)
        - (n - k) * math.log(2 * math.pi)
    )
    return 0.5 * log_inner


def asymptotic_pnk(n: int, k: int) -> float:
    """Large-``n`` approximation to ``P(n, k)`` for fixed ``k``:

        sqrt(k^(n-k-1) e^(n-2k) / (2 (k!)^2 n^(n-3k-1) (2 pi)^(n-k)))

    Accumulated in log space, so it stays finite far beyond where the factors
    themselves overflow.
    """
    return math.exp(log_asymptotic_pnk(n, k))


def asymptotic_xd_tail(d: int) -> float:
    """Asymptotic ``Pr(X_d = 1)``, i.e. one minus the convex-position probability."""
    return 2.0 * asymptotic_pnk(d + 2, 1)


def xd_law_from_demon(d: int, p: Mapping[int, float], sample_count: int = 0) -> SplitDistribution:
    """Fold the above-mean law for ``n = d + 2`` into the law of ``X_d``.

    ``Pr(X_d = k) = p(k) + p(d + 2 - k)``, except at the even split
    ``2k = d + 2`` where both events are the same and only ``p(k)`` counts.
    """
    n = d + 2
    extra = set(p) - set(range(1, n))
    if extra:
        raise InvalidDistributionError(f"above-mean counts {sorted(extra)} impossible for n={n}")
    probs = {k: float(p.get(k, 0.0)) for k in range(1, n)}
    total = sum(probs.values())
    if any(v < 0 for v in probs.values()) or abs(total - 1.0) > NORMALIZATION_TOL:
        raise InvalidDistributionError(f"input is not a probability vector (sum {total!r})")
    mass = {}
    for k in SplitDistribution.support(d):
        mass[k] = probs[k] if 2 * k == n else probs[k] + probs[n - k]
    return SplitDistribution(d, mass, sample_count)
