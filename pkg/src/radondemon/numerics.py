"""Seeded random streams and the small dense linear algebra everything else uses.

Random numbers come from numpy's Philox4x64 counter-based generator. A stream
is keyed by ``(seed, stream_id)``: the 128-bit Philox key is
``seed | stream_id << 64``, so distinct stream ids give disjoint, reproducible
sequences no matter which worker consumes them. Normal variates use numpy's
ziggurat sampler (``Generator.standard_normal``), an exact-distribution method,
which keeps every result bit-reproducible for a given numpy release.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, RankAmbiguityError

DEFAULT_TOL = 1e-9

_U64 = (1 << 64) - 1


@dataclass
class RngStream:
    """A deterministic substream of normal variates.

    ``counter`` exposes the low 128 bits of the Philox block counter; it
    advances as values are drawn.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed <= _U64 and 0 <= self.stream_id <= _U64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self.generator = np.random.Generator(np.random.Philox(key=self.seed | (self.stream_id << 64)))

    @property
    def counter(self) -> int:
        words = self.generator.bit_generator.state["state"]["counter"]
        return int(words[0]) | (int(words[1]) << 64)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def normal(self, shape) -> np.ndarray:
        return self.generator.standard_normal(shape)


def gaussian_stream(rng: RngStream, count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. standard normal variates from ``rng``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return rng.normal(count)


def null_space(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the right kernel of ``m``, one basis vector per column.

    Singular values at or below ``tol * s_max`` count as zero. A singular value
    inside ``(tol * s_max / 10, tol * s_max * 10)`` makes the rank ambiguous and
    raises :class:`RankAmbiguityError`.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    cols = m.shape[1]
    if s.size == 0 or s[0] == 0.0:
        return np.eye(cols)
    threshold = tol * s[0]
    near = (s > threshold / 10) & (s < threshold * 10)
    if near.any():
        raise RankAmbiguityError(
            f"singular value {s[near][0]:.3e} is within a decade of the rank threshold {threshold:.3e}"
        )
    rank = int(np.count_nonzero(s > threshold))
    return vh[rank:].T.copy()


def haar_orthogonal(dim: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed ``dim x dim`` orthogonal matrix.

    QR of a Gaussian matrix, with columns flipped so that R has a positive
    diagonal; without that correction the distribution is not Haar.
    """
    return haar_orthogonal_batch(dim, 1, rng)[0]


def haar_orthogonal_batch(dim: int, count: int, rng: RngStream) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be at least 1")
    out = np.empty((count, dim, dim))
    todo = np.arange(count)
    while todo.size:
        z = rng.normal((todo.size, dim, dim))
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r, axis1=-2, axis2=-1)
        ok = np.all(diag != 0.0, axis=-1)
        out[todo[ok]] = q[ok] * np.sign(diag[ok])[:, None, :]
        todo = todo[~ok]
    return out


def _drop_column_index(cols: int) -> np.ndarray:
    return np.array([[j for j in range(cols) if j != i] for i in range(cols)])


def signed_minors(m: np.ndarray) -> np.ndarray:
    """``v_i = (-1)^i det(m without column i)`` over the last two axes.

    Works on a single ``(r, r+1)`` matrix or any stack of them.
    """
    m = np.asarray(m, dtype=float)
    r, c = m.shape[-2:]
    if c != r + 1:
        raise ValueError(f"expected shape (r, r+1), got {(r, c)}")
    minors = m[..., _drop_column_index(c)]  # (..., r, c, r)
    minors = np.moveaxis(minors, -2, -3)  # (..., c, r, r)
    signs = np.where(np.arange(c) % 2 == 0, 1.0, -1.0)
    return signs * np.linalg.det(minors)


def hadamard_scale(m: np.ndarray) -> np.ndarray:
    """Product of row norms: an upper bound on the magnitude of every maximal minor."""
    return np.prod(np.linalg.norm(m, axis=-1), axis=-1)


def cofactor_kernel(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Kernel vector of an ``(r, r+1)`` matrix from its signed maximal minors.

    Raises :class:`DegenerateInputError` when any minor falls below
    ``tol`` times the Hadamard bound of the matrix. For a lifted point matrix
    that is exactly a failure of general position.
    """
    m = np.asarray(m, dtype=float)
    v = signed_minors(m)
    small = np.abs(v) <= tol * hadamard_scale(m)[..., None]
    if small.any():
        raise DegenerateInputError("vanishing maximal minor: columns are not in general position")
    return v
