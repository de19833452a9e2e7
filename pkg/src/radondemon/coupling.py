"""Centered Gaussian clouds and a coupling that makes them Gale dual.

``rho(n, d)``: ``n`` i.i.d. standard Gaussian points in ``R^d`` translated to
barycenter zero. ``nu(n, d)``: ``n`` i.i.d. Gaussian columns in ``R^d`` with
covariance ``I - J/d``, i.e. each orthogonal to the all-ones vector.

The coupling draws a primal cloud ``X ~ rho(n, d)`` and an independent
``W ~ rho(n, m)`` with ``m = n - d - 1``, then moves the column space of ``W``
onto the kernel of the lifted primal matrix by an orthogonal map of ``R^n``
fixing the all-ones vector. The rotation within the target subspace is Haar
random, so the result ``Y`` is again ``rho(n, m)`` distributed, and its rows
are a Gale dual of ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .census import enumerate_separations
from .geometry import PointCloud, SignPattern
from .numerics import DEFAULT_TOL, RngStream, haar_orthogonal_batch, signed_minors


@dataclass(frozen=True)
class CoupledPair:
    primal: PointCloud
    dual: PointCloud
    source: np.ndarray = field(default=None, repr=False, compare=False)  # the pre-rotation W

    @property
    def n(self) -> int:
        return self.primal.n


def sample_rho_batch(n: int, d: int, count: int, rng: RngStream) -> np.ndarray:
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    z = rng.normal((count, n, d))
    return z - z.mean(axis=1, keepdims=True)


def sample_rho(n: int, d: int, rng: RngStream) -> PointCloud:
    return PointCloud(sample_rho_batch(n, d, 1, rng)[0], centered=True)


def sample_nu(n: int, d: int, rng: RngStream) -> np.ndarray:
    """``d x n`` matrix whose columns are i.i.d. ``N(0, I - J/d)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    z = rng.normal((d, n))
    return z - z.mean(axis=0, keepdims=True)


def _full_rank(r: np.ndarray, tol: float) -> np.ndarray:
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    return diag.min(axis=-1) > tol * np.maximum(diag.max(axis=-1), 1e-300)


def couple_gale_batch(n: int, d: int, count: int, rng: RngStream, tol: float = DEFAULT_TOL):
    """Vectorised coupling. Returns ``(X, Y, W)`` stacks of shapes
    ``(count, n, d)``, ``(count, n, m)``, ``(count, n, m)``."""
    if not 1 <= d <= n - 2:
        raise ValueError(f"need 1 <= d <= n - 2, got n={n}, d={d}")
    m = n - d - 1
    xs = np.empty((count, n, d))
    ys = np.empty((count, n, m))
    ws = np.empty((count, n, m))
    todo = np.arange(count)
    while todo.size:
        k = todo.size
        x = sample_rho_batch(n, d, k, rng)
        w = sample_rho_batch(n, m, k, rng)
        lifted = np.concatenate([x, np.ones((k, n, 1))], axis=2)
        q_full, r_lift = np.linalg.qr(lifted, mode="complete")
        kernel = q_full[:, :, d + 1 :]  # orthonormal basis of the complement of span(lifted)
        _, r_w = np.linalg.qr(w)  # w = q_w r_w, so coordinates of w in the basis q_w are r_w
        ok = _full_rank(r_lift[:, : d + 1, :], tol) & _full_rank(r_w, tol)
        haar = haar_orthogonal_batch(m, k, rng)
        y = kernel @ haar @ r_w
        xs[todo[ok]], ys[todo[ok]], ws[todo[ok]] = x[ok], y[ok], w[ok]
        todo = todo[~ok]
    return xs, ys, ws


def couple_gale(n: int, d: int, rng: RngStream, tol: float = DEFAULT_TOL) -> CoupledPair:
    x, y, w = couple_gale_batch(n, d, 1, rng, tol)
    return CoupledPair(PointCloud(x[0], centered=True), PointCloud(y[0], centered=True), w[0])


def normalized_inner_products(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``|<y_col, l_col>| / (|y_col| |l_col|)`` between dual columns and lifted primal columns."""
    lifted = np.concatenate([x, np.ones(x.shape[:-1] + (1,))], axis=-1)
    dots = np.swapaxes(y, -1, -2) @ lifted
    norms = np.linalg.norm(y, axis=-2)[..., :, None] * np.linalg.norm(lifted, axis=-2)[..., None, :]
    return np.abs(dots) / norms


@dataclass
class CouplingReport:
    n: int
    d: int
    draws: int
    max_inner_product: float
    max_gram_error: float
    coordinate_variance: np.ndarray  # one entry per dual coordinate, pooled over points
    cross_covariance: np.ndarray  # one entry per dual coordinate, pooled over adjacent point pairs
    coordinate_skewness: np.ndarray
    coordinate_mean: np.ndarray
    sign_agreement: float | None = None  # only for n = d + 2
    census_draws: int = 0
    census_pass_rate: float | None = None

    @property
    def target_variance(self) -> float:
        return 1 - 1 / self.n

    @property
    def target_covariance(self) -> float:
        return -1 / self.n


def _sign_agreement(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    lifted_t = np.concatenate([np.swapaxes(x, 1, 2), np.ones((x.shape[0], 1, x.shape[1]))], axis=1)
    v = np.sign(signed_minors(lifted_t))
    s = np.sign(y[:, :, 0])
    return np.all(v == s, axis=1) | np.all(v == -s, axis=1)


def verify_coupling(
    n: int,
    d: int,
    draws: int,
    rng: RngStream,
    census_draws: int | None = None,
    chunk: int = 1 << 14,
) -> CouplingReport:
    """Check the coupling on ``draws`` samples.

    Exactness (orthogonality, Gram preservation) is checked on every draw;
    the distributional claim through pooled moments of the dual. The census
    correspondence is run on the first ``census_draws`` draws (default:
    ``min(draws, 50)`` when ``n <= 8``, else none).
    """
    if draws < 1:
        raise ValueError("draws must be at least 1")
    if census_draws is None:
        census_draws = min(draws, 50) if n <= 8 else 0
    m = n - d - 1
    max_inner = 0.0
    max_gram = 0.0
    s1 = np.zeros((n, m))
    s2 = np.zeros((n, m))
    s3 = np.zeros((n, m))
    cross = np.zeros(m)
    agree = 0
    census_ok = 0
    census_done = 0
    done = 0
    while done < draws:
        k = min(chunk, draws - done)
        x, y, w = couple_gale_batch(n, d, k, rng)
        max_inner = max(max_inner, float(normalized_inner_products(x, y).max()))
        gram_y = np.swapaxes(y, 1, 2) @ y
        gram_w = np.swapaxes(w, 1, 2) @ w
        scale = np.abs(gram_w).max(axis=(1, 2), keepdims=True)
        max_gram = max(max_gram, float((np.abs(gram_y - gram_w) / scale).max()))
        s1 += y.sum(axis=0)
        s2 += (y**2).sum(axis=0)
        s3 += (y**3).sum(axis=0)
        # cyclically adjacent pairs; pooling over all pairs would be fixed by the centering
        cross += (y * np.roll(y, 1, axis=1)).sum(axis=(0, 1))
        if m == 1:
            agree += int(_sign_agreement(x, y).sum())
        while census_done < census_draws and census_done - done < k:
            i = census_done - done
            primal = enumerate_separations(PointCloud(x[i]))
            dual = enumerate_separations(PointCloud(y[i]), check_general_position=False)
            census_ok += primal.radon == dual.linear
            census_done += 1
        done += k
    mean = s1 / draws
    var = s2 / draws - mean**2
    third = s3 / draws - 3 * mean * s2 / draws + 2 * mean**3
    # the true mean is 0, so second moments about the origin estimate variance and covariance
    coord_var = (s2 / draws).mean(axis=0)
    coord_cov = cross / (draws * n)
    skew = (third / var**1.5).mean(axis=0)
    return CouplingReport(
        n=n,
        d=d,
        draws=draws,
        max_inner_product=max_inner,
        max_gram_error=max_gram,
        coordinate_variance=coord_var,
        cross_covariance=coord_cov,
        coordinate_skewness=skew,
        coordinate_mean=mean.mean(axis=0),
        sign_agreement=agree / draws if m == 1 else None,
        census_draws=census_done,
        census_pass_rate=census_ok / census_done if census_done else None,
    )


def dual_sign_pattern(pair: CoupledPair) -> SignPattern:
    """Canonical sign pattern of a one-dimensional dual."""
    if pair.dual.dim != 1:
        raise ValueError("sign pattern is defined for a dual on the line (n = d + 2)")
    return SignPattern.from_vector(pair.dual.coords[:, 0])
