"""Exhaustive classification of bipartitions, plus the closed-form counts.

Each of the ``2^(n-1)`` bipartitions of a small cloud is decided with exact
rational linear programming, so no floating tolerance enters the answer once
the coordinates have been rationalised from their decimal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from . import _exactlp
from .errors import DegenerateInputError, DimensionMismatchError
from .geometry import PointCloud, SignPattern, is_general_position

MAX_POINTS = 16


@dataclass(frozen=True)
class SeparationCensus:
    n: int
    dim: int
    radon: frozenset = field(default_factory=frozenset)
    affine: frozenset = field(default_factory=frozenset)
    linear: frozenset = field(default_factory=frozenset)

    def counts(self) -> tuple[int, int, int]:
        return len(self.radon), len(self.affine), len(self.linear)


def cover_counts(n: int, d: int) -> tuple[int, int, int]:
    """Numbers of Radon partitions, affine separations and linear separations
    of ``n`` points in general position in ``R^d``.

    >>> cover_counts(4, 2)
    (1, 7, 4)
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    radon = sum(comb(n - 1, i) for i in range(d + 1, n))
    affine = sum(comb(n - 1, i) for i in range(0, d + 1))
    linear = sum(comb(n - 1, i) for i in range(0, d))
    return radon, affine, linear


def canonical_bipartitions(n: int):
    """All ``2^(n-1)`` canonical sign patterns, index 0 always on the '+' side."""
    for mask in range(1 << (n - 1)):
        yield SignPattern((1,) + tuple(-1 if mask >> i & 1 else 1 for i in range(n - 1)), canonical=True)


def _separable(points, signs, with_offset: bool) -> bool:
    # margin-1 strict separation: s_i (w . x_i + b) - t_i = 1 with w = w+ - w-, b = b+ - b-, t >= 0
    n = len(points)
    rows = []
    for i, (x, s) in enumerate(zip(points, signs)):
        row = [s * c for c in x] + [-s * c for c in x]
        if with_offset:
            row += [s, -s]
        row += [-1 if k == i else 0 for k in range(n)]
        rows.append(row)
    return _exactlp.feasible(rows, [1] * n)


def _rational_rows(cloud: PointCloud):
    return [[_exactlp.rationalize(float(v)) for v in row] for row in cloud.coords]


def enumerate_separations(cloud: PointCloud, check_general_position: bool = True) -> SeparationCensus:
    """Classify every canonical bipartition of ``cloud``.

    A bipartition is an affine separation when some hyperplane strictly
    separates its sides (the split with an empty side counts), a Radon
    partition otherwise, and a linear separation when the hyperplane can be
    taken through the origin.
    """
    if cloud.n > MAX_POINTS:
        raise ValueError(f"exhaustive census is limited to {MAX_POINTS} points")
    if check_general_position and not is_general_position(cloud):
        raise DegenerateInputError("census requires points in general position")
    pts = _rational_rows(cloud)
    radon, affine, linear = set(), set(), set()
    for pattern in canonical_bipartitions(cloud.n):
        if _separable(pts, pattern.signs, with_offset=True):
            affine.add(pattern)
            if _separable(pts, pattern.signs, with_offset=False):
                linear.add(pattern)
        else:
            radon.add(pattern)
    return SeparationCensus(cloud.n, cloud.dim, frozenset(radon), frozenset(affine), frozenset(linear))


def hulls_intersect_oracle(a: PointCloud, b: PointCloud) -> bool:
    """Decide exactly whether conv(a) and conv(b) meet.

    Feasibility of ``sum(lam_i a_i) = sum(mu_j b_j)`` with ``lam, mu`` convex
    weights, solved over the rationals.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"clouds live in R^{a.dim} and R^{b.dim}")
    if a.n + b.n > MAX_POINTS:
        raise ValueError(f"oracle is limited to {MAX_POINTS} points in total")
    pa, pb = _rational_rows(a), _rational_rows(b)
    rows = [[p[k] for p in pa] + [-q[k] for q in pb] for k in range(a.dim)]
    rows.append([1] * a.n + [0] * b.n)
    rows.append([0] * a.n + [1] * b.n)
    return _exactlp.feasible(rows, [0] * a.dim + [1, 1])


def partition_hulls_intersect(cloud: PointCloud, pattern: SignPattern) -> bool:
    """Oracle verdict for the two sides of ``pattern``; an empty side never intersects."""
    if not pattern.plus or not pattern.minus:
        return False
    return hulls_intersect_oracle(cloud.subset(pattern.plus), cloud.subset(pattern.minus))
