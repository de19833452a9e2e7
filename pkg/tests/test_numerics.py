import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radondemon.errors import DegenerateInputError, RankAmbiguityError
from radondemon.numerics import (
    RngStream,
    cofactor_kernel,
    gaussian_stream,
    haar_orthogonal,
    haar_orthogonal_batch,
    null_space,
)


def test_stream_is_deterministic():
    a = gaussian_stream(RngStream(7, 0), 100)
    b = gaussian_stream(RngStream(7, 0), 100)
    assert a.tobytes() == b.tobytes()


def test_stream_counter_advances():
    rng = RngStream(7, 0)
    start = rng.counter
    gaussian_stream(rng, 1000)
    assert rng.counter > start


def test_stream_prefix_does_not_depend_on_chunking():
    whole = gaussian_stream(RngStream(3, 5), 400)
    rng = RngStream(3, 5)
    pieces = np.concatenate([gaussian_stream(rng, 100) for _ in range(4)])
    np.testing.assert_array_equal(whole, pieces)


def test_stream_moments():
    z = gaussian_stream(RngStream(11, 0), 10**6)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1) < 0.01


def test_distinct_streams_uncorrelated():
    a = gaussian_stream(RngStream(11, 0), 10**5)
    b = gaussian_stream(RngStream(11, 1), 10**5)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_stream_rejects_bad_seed():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, 1 << 64)
    with pytest.raises(ValueError):
        gaussian_stream(RngStream(0), -1)


def test_null_space_axis_kernel():
    k = null_space([[1, 0, 0], [0, 1, 0]])
    assert k.shape == (3, 1)
    np.testing.assert_allclose(np.abs(k[:, 0]), [0, 0, 1], atol=1e-15)


def test_null_space_square_lifted():
    m = np.array([[0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 1, 1]], dtype=float)
    k = null_space(m)
    assert k.shape == (4, 1)
    v = k[:, 0] / k[0, 0]
    np.testing.assert_allclose(v, [1, -1, -1, 1], atol=1e-12)
    np.testing.assert_allclose(m @ k, 0, atol=1e-12)


def test_null_space_of_zero_matrix_is_everything():
    k = null_space(np.zeros((2, 3)))
    np.testing.assert_allclose(k.T @ k, np.eye(3), atol=1e-15)


def test_null_space_contract_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        r, c = rng.integers(1, 6), rng.integers(2, 9)
        m = rng.standard_normal((r, c))
        k = null_space(m)
        assert k.shape[1] == c - min(r, c)
        np.testing.assert_allclose(k.T @ k, np.eye(k.shape[1]), atol=1e-12)
        assert np.linalg.norm(m @ k, axis=0).max(initial=0) <= 1e-9 * np.linalg.norm(m, 2)


def test_null_space_flags_ambiguous_rank():
    m = np.diag([1.0, 1e-9])
    with pytest.raises(RankAmbiguityError):
        null_space(m)


def test_haar_dim_one_is_fair_sign():
    rng = RngStream(5)
    draws = haar_orthogonal_batch(1, 10**4, rng)[:, 0, 0]
    assert set(np.unique(draws)) <= {-1.0, 1.0}
    assert abs((draws > 0).mean() - 0.5) < 0.02


def test_haar_is_orthogonal():
    q = haar_orthogonal(5, RngStream(1))
    assert np.abs(q.T @ q - np.eye(5)).max() <= 1e-12
    assert abs(abs(np.linalg.det(q)) - 1) < 1e-9


def test_haar_moves_vector_uniformly():
    qs = haar_orthogonal_batch(3, 10**5, RngStream(2))
    u = np.array([1.0, 2.0, -0.5])
    u /= np.linalg.norm(u)
    images = qs @ u
    assert np.abs(images.mean(axis=0)).max() < 0.01
    # uniform on the sphere: each squared coordinate has mean 1/3
    assert np.abs((images**2).mean(axis=0) - 1 / 3).max() < 0.01


def test_haar_entries_are_sign_symmetric():
    # LAPACK's QR alone fixes the sign of R's diagonal and would skew Q[0, 0] negative
    qs = haar_orthogonal_batch(2, 10**4, RngStream(9))
    assert abs((qs[:, 0, 0] > 0).mean() - 0.5) < 0.02


def test_cofactor_kernel_square():
    v = cofactor_kernel([[0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 1, 1]])
    np.testing.assert_allclose(v / v[0], [1, -1, -1, 1], atol=1e-12)


def test_cofactor_kernel_repeated_point_is_degenerate():
    with pytest.raises(DegenerateInputError):
        cofactor_kernel([[0, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]])


def test_cofactor_kernel_shape_check():
    with pytest.raises(ValueError):
        cofactor_kernel(np.ones((3, 3)))


@settings(max_examples=200, deadline=None)
@given(d=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_cofactor_kernel_matches_null_space(d, seed):
    rng = np.random.default_rng(seed)
    m = np.vstack([rng.standard_normal((d, d + 2)), np.ones(d + 2)])
    v = cofactor_kernel(m)
    assert abs(v.sum()) <= 1e-9 * np.abs(v).max()
    assert np.linalg.norm(m @ v) <= 1e-9 * np.linalg.norm(m, 2) * np.linalg.norm(v)
    k = null_space(m)[:, 0]
    cosine = abs(v @ k) / np.linalg.norm(v)
    assert cosine > 1 - 1e-9
