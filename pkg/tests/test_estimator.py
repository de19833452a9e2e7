import math

import pytest

from radondemon.errors import DimensionMismatchError
from radondemon.estimator import (
    BLOCK_SIZE,
    TABLE1,
    compare_distributions,
    estimate_pnk,
    estimate_xd_demon,
    estimate_xd_geometric,
    wilson_ci,
)
from radondemon.youden import SplitDistribution

P42 = 0.649040687816356


def test_wilson_reference_value():
    # mpmath evaluation of the Wilson formula with z = sqrt(2) erfinv(0.95)
    lo, hi = wilson_ci(649, 1000, 0.95)
    assert lo == pytest.approx(0.618899203959046, abs=1e-12)
    assert hi == pytest.approx(0.677960422012259, abs=1e-12)


def test_wilson_boundaries():
    assert wilson_ci(0, 100, 0.95)[0] == 0.0
    assert wilson_ci(100, 100, 0.95)[1] == 1.0
    with pytest.raises(ValueError):
        wilson_ci(5, 4, 0.95)
    with pytest.raises(ValueError):
        wilson_ci(1, 4, 1.0)


@pytest.mark.parametrize("count", [0, 1, 17, 500, 999, 1000])
def test_wilson_contains_point_estimate(count):
    lo, hi = wilson_ci(count, 1000, 0.9)
    assert 0 <= lo <= count / 1000 <= hi <= 1


def test_compare_distributions():
    a = SplitDistribution(2, {1: 0.34, 2: 0.66}, 1000)
    b = SplitDistribution(2, {1: 0.35, 2: 0.65}, 1000)
    tv, chi2 = compare_distributions(a, b)
    assert tv == pytest.approx(0.01)
    assert chi2 == pytest.approx(10**2 / 350 + 10**2 / 650)
    assert compare_distributions(a, a) == (0.0, 0.0)
    p1 = SplitDistribution(2, {1: 1.0}, 10)
    p2 = SplitDistribution(2, {2: 1.0}, 10)
    assert compare_distributions(p1, p2)[0] == 1.0
    assert math.isinf(compare_distributions(p1, p2)[1])
    with pytest.raises(DimensionMismatchError):
        compare_distributions(a, SplitDistribution(3, {1: 1.0}))


def test_geometric_counts_and_ci():
    res = estimate_xd_geometric(3, 5000, seed=1)
    assert sum(res.counts.values()) == res.samples == 5000
    assert res.method == "geometric"
    assert abs(sum(res.mass.values()) - 1) < 1e-9
    for k, (lo, hi) in res.ci.items():
        assert lo <= res.mass[k] <= hi


@pytest.mark.parametrize("estimator", [estimate_xd_geometric, estimate_xd_demon])
def test_worker_invariance(estimator):
    samples = 2 * BLOCK_SIZE + 1234
    runs = [estimator(4, samples, seed=9, workers=w) for w in (1, 2, 8)]
    assert runs[0].counts == runs[1].counts == runs[2].counts


def test_seed_changes_result():
    a = estimate_xd_geometric(2, 20000, seed=1)
    b = estimate_xd_geometric(2, 20000, seed=2)
    assert a.counts != b.counts


def test_methods_use_independent_streams():
    # same seed for both methods must not reuse the same normals
    geo = estimate_xd_geometric(2, 20000, seed=5)
    dem = estimate_xd_demon(2, 20000, seed=5)
    assert geo.counts != dem.counts


def test_geometric_d2_value():
    res = estimate_xd_geometric(2, 10**6, seed=21)
    assert abs(res.mass[2] - P42) < 0.002


def test_geometric_d5_near_table():
    res = estimate_xd_geometric(5, 10**5, seed=22)
    for k, published in TABLE1[5].items():
        assert abs(res.mass[k] - published) < 0.05


def test_demon_and_geometric_agree_d4():
    geo = estimate_xd_geometric(4, 10**6, seed=23)
    dem = estimate_xd_demon(4, 10**6, seed=23)
    tv, _ = compare_distributions(geo.distribution, dem.distribution)
    assert tv < 0.005


def test_demon_d6_matches_table_and_geometry():
    dem = estimate_xd_demon(6, 10**5, seed=24)
    geo = estimate_xd_geometric(6, 10**5, seed=24)
    assert abs(dem.mass[4] - 0.451) < 0.05
    p, q = dem.mass[4], geo.mass[4]
    se = math.sqrt((p * (1 - p) + q * (1 - q)) / 10**5)
    assert abs(p - q) < 4 * se


def test_pnk_sums_to_one():
    est = estimate_pnk(5, 10**4, seed=1)
    assert sum(est.counts.values()) == 10**4
    assert set(est.counts) == {1, 2, 3, 4}


@pytest.mark.parametrize("bad", [dict(d=1, samples=10), dict(d=2, samples=0), dict(d=2, samples=10, workers=0)])
def test_argument_validation(bad):
    with pytest.raises(ValueError):
        estimate_xd_geometric(**bad)


def test_throughput():
    # cofactor fast path: at least 1e5 samples/s for d = 6 on one worker
    res = estimate_xd_geometric(6, 2 * 10**5, seed=0)
    assert res.samples / res.wall_time >= 1e5
