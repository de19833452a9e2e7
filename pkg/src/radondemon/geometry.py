"""Point clouds, Radon partitions and Gale duals.

Every construction here goes through the *lifted matrix* of a cloud: the
``(dim + 1) x n`` matrix whose columns are the points with a 1 appended. Its
right kernel encodes the affine dependencies of the points, so its sign
patterns are the Radon partitions.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError
from .numerics import DEFAULT_TOL, hadamard_scale, null_space, signed_minors


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``n`` points in ``R^dim``, stored as an ``(n, dim)`` float array."""

    coords: np.ndarray
    centered: bool = False

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValueError(f"coords must be an (n, dim) array with n, dim >= 1, got shape {coords.shape}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.centered:
            sums = np.abs(coords.sum(axis=0))
            scale = max(1.0, float(np.abs(coords).max()))
            if np.any(sums > 1e-9 * coords.shape[0] * scale):
                raise ValueError("cloud flagged centered but its barycenter is not the origin")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def lifted(self) -> np.ndarray:
        """The ``(dim + 1) x n`` lifted matrix."""
        return np.vstack([self.coords.T, np.ones(self.n)])

    def centered_lifted(self) -> np.ndarray:
        """Lifted matrix of the cloud translated to barycenter zero.

        Its maximal minors equal those of :meth:`lifted`, but its row norms
        (and so the Hadamard bound used for tolerances) do not grow with a
        translation of the cloud.
        """
        return np.vstack([(self.coords - self.coords.mean(axis=0)).T, np.ones(self.n)])

    def subset(self, indices: Iterable[int]) -> "PointCloud":
        return PointCloud(self.coords[list(indices)])

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.coords.shape == other.coords.shape and bool(np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash((self.coords.shape, self.coords.tobytes()))

    # CSV: first line "n,dim", then one comma-separated row per point.

    def to_csv(self) -> str:
        lines = [f"{self.n},{self.dim}"]
        lines += [",".join(repr(float(x)) for x in row) for row in self.coords]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "PointCloud":
        rows = [line.strip() for line in io.StringIO(text) if line.strip() and not line.lstrip().startswith("#")]
        if not rows:
            raise ValueError("empty point cloud CSV")
        try:
            n, dim = (int(tok) for tok in rows[0].split(","))
        except ValueError as exc:
            raise ValueError(f"bad header {rows[0]!r}; expected 'n,dim'") from exc
        body = [[float(tok) for tok in row.split(",")] for row in rows[1:]]
        if len(body) != n or any(len(row) != dim for row in body):
            raise ValueError(f"header declares {n} points in R^{dim}, body does not match")
        return cls(np.array(body, dtype=float).reshape(n, dim))

    @classmethod
    def read_csv(cls, path) -> "PointCloud":
        return cls.from_csv(Path(path).read_text())

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


@dataclass(frozen=True)
class SignPattern:
    """A bipartition of ``range(n)`` written as a tuple of +1/-1 labels.

    Patterns ``p`` and ``-p`` describe the same bipartition; the canonical
    representative has ``+1`` at index 0.
    """

    signs: tuple
    canonical: bool = False

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs or any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be a nonempty sequence of +1/-1")
        if self.canonical and signs[0] != 1:
            signs = tuple(-s for s in signs)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_vector(cls, v: Sequence[float], canonical: bool = True) -> "SignPattern":
        return cls(tuple(1 if x >= 0 else -1 for x in v), canonical=canonical)

    @classmethod
    def from_sides(cls, n: int, plus: Iterable[int], canonical: bool = True) -> "SignPattern":
        plus = set(plus)
        return cls(tuple(1 if i in plus else -1 for i in range(n)), canonical=canonical)

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        return cls(tuple(1 if ch == "+" else -1 for ch in text.strip()), canonical=True)

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def plus(self) -> tuple:
        return tuple(i for i, s in enumerate(self.signs) if s > 0)

    @property
    def minus(self) -> tuple:
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    def canonicalize(self) -> "SignPattern":
        return SignPattern(self.signs, canonical=True)

    def permuted(self, perm: Sequence[int]) -> "SignPattern":
        """Pattern of the cloud whose i-th point is the old point ``perm[i]``."""
        return SignPattern(tuple(self.signs[j] for j in perm), canonical=self.canonical)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)


def min_side(p: SignPattern) -> int:
    plus = sum(1 for s in p.signs if s > 0)
    return min(plus, p.n - plus)


def _require_radon_shape(cloud: PointCloud) -> None:
    if cloud.n != cloud.dim + 2:
        raise ValueError(f"need exactly dim + 2 = {cloud.dim + 2} points, got {cloud.n}")


def radon_partition(cloud: PointCloud, tol: float = DEFAULT_TOL) -> SignPattern:
    """Unique Radon partition of ``dim + 2`` points in general position.

    The signed maximal minors of the lifted matrix form its kernel vector; a
    coordinate that vanishes relative to the Hadamard bound means the points
    are not in general position.
    """
    _require_radon_shape(cloud)
    m = cloud.centered_lifted()
    v = signed_minors(m)
    if np.any(np.abs(v) <= tol * hadamard_scale(m)):
        raise DegenerateInputError("points are not in general position")
    return SignPattern.from_vector(v)


def batch_min_side(points: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``min_side(radon_partition(.))`` over a stack of clouds.

    ``points`` has shape ``(batch, dim + 2, dim)``. Returns the min-side
    counts and a boolean mask of degenerate clouds (whose counts are junk).
    """
    batch, n, dim = points.shape
    if n != dim + 2:
        raise ValueError("each cloud needs dim + 2 points")
    centered = points - points.mean(axis=1, keepdims=True)
    m = np.concatenate([np.swapaxes(centered, 1, 2), np.ones((batch, 1, n))], axis=1)
    v = signed_minors(m)
    degenerate = np.any(np.abs(v) <= tol * hadamard_scale(m)[:, None], axis=1)
    plus = np.count_nonzero(v > 0, axis=1)
    return np.minimum(plus, n - plus), degenerate


def is_convex_position(cloud: PointCloud, tol: float = DEFAULT_TOL) -> bool:
    """True when no point lies in the hull of the others, i.e. the Radon split is not 1 vs rest."""
    return min_side(radon_partition(cloud, tol)) >= 2


def is_general_position(cloud: PointCloud, tol: float = DEFAULT_TOL) -> bool:
    """Every ``dim + 1`` of the points are affinely independent.

    Each maximal minor of the lifted matrix is compared against ``tol`` times
    the product of the row norms of its submatrix.
    """
    m = cloud.centered_lifted()
    rows = cloud.dim + 1
    if cloud.n <= rows:
        s = np.linalg.svd(m, compute_uv=False)
        return bool(s[-1] > tol * s[0])
    combos = np.array(list(itertools.combinations(range(cloud.n), rows)))
    subs = np.moveaxis(m[:, combos], 1, 0)  # (num_combos, rows, rows)
    dets = np.abs(np.linalg.det(subs))
    return bool(np.all(dets > tol * hadamard_scale(subs)))


def gale_dual(cloud: PointCloud, tol: float = DEFAULT_TOL) -> PointCloud:
    """Gale dual: the rows of an orthonormal basis of ker(lifted matrix).

    Returns ``n`` points in ``R^(n - dim - 1)``. They have barycenter zero
    because every kernel vector is orthogonal to the all-ones row.
    """
    if cloud.n <= cloud.dim + 1:
        raise ValueError(f"Gale dual needs more than dim + 1 = {cloud.dim + 1} points")
    basis = null_space(cloud.centered_lifted(), tol)
    expected = cloud.n - cloud.dim - 1
    if basis.shape[1] != expected:
        raise DegenerateInputError(
            f"lifted matrix is rank deficient: kernel dimension {basis.shape[1]}, expected {expected}"
        )
    return PointCloud(basis, centered=True)
