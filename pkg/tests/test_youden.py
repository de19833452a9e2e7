import math

import mpmath
import numpy as np
import pytest

from radondemon.errors import InvalidDistributionError, UnknownIdentifierError
from radondemon.estimator import estimate_pnk
from radondemon.numerics import RngStream
from radondemon.youden import (
    SplitDistribution,
    above_mean_count,
    asymptotic_pnk,
    asymptotic_xd_tail,
    closed_form,
    demon_count,
    demon_counts,
    xd_law_from_demon,
)

# closed forms evaluated to 15 places; re-derived with mpmath in the first test
P42 = 0.649040687816356
P52 = 0.451076558137916
X3_CONVEX = 0.902153116275831


def mp_asymptotic(n, k):
    """Independent big-float evaluation of the asymptotic formula, no logs."""
    with mpmath.workdps(50):
        n, k = mpmath.mpf(n), mpmath.mpf(k)
        num = k ** (n - k - 1) * mpmath.e ** (n - 2 * k)
        den = 2 * mpmath.factorial(k) ** 2 * n ** (n - 3 * k - 1) * (2 * mpmath.pi) ** (n - k)
        return mpmath.sqrt(num / den)


def test_frozen_constants_match_mpmath():
    with mpmath.workdps(30):
        assert abs(6 / mpmath.pi * mpmath.asin(mpmath.mpf(1) / 3) - P42) < 1e-14
        assert abs(mpmath.mpf(1) / 4 + 5 / (2 * mpmath.pi) * mpmath.asin(mpmath.mpf(1) / 4) - P52) < 1e-14


@pytest.mark.parametrize("values, expected", [((1, 2, 3, 10), 1), ((-1, 1), 1), ((0, 0, 1), 1), ((5, 4, 4, 4), 1)])
def test_above_mean_count(values, expected):
    assert above_mean_count(values) == expected


def test_demon_count_range():
    rng = RngStream(4)
    for n in (2, 3, 7):
        out = demon_count(n, rng)
        assert out.n == n and 1 <= out.above_mean <= n - 1


def test_demon_counts_never_extreme():
    counts = demon_counts(6, 10**5, RngStream(1))
    assert counts.min() >= 1 and counts.max() <= 5


def test_demon_frequency_n4():
    est = estimate_pnk(4, 10**6, seed=2)
    assert abs(est.frequency[2] - P42) < 0.002
    assert sum(est.counts.values()) == 10**6


def test_demon_symmetry():
    n, samples = 7, 10**6
    est = estimate_pnk(n, samples, seed=3)
    for k in range(1, n):
        p, q = est.frequency[k], est.frequency[n - k]
        se = math.sqrt((p * (1 - p) + q * (1 - q)) / samples)
        assert abs(p - q) < 4 * se + 1e-12


def test_closed_forms():
    assert closed_form("P42").value == pytest.approx(P42, abs=1e-12)
    assert closed_form("P52").value == pytest.approx(P52, abs=1e-12)
    x3 = closed_form("X3_CONVEX")
    assert x3.value == pytest.approx(X3_CONVEX, abs=1e-12)
    assert x3.value == pytest.approx(2 * closed_form("P52").value, abs=1e-12)
    assert round(closed_form("P42").value, 3) == 0.649
    assert round(closed_form("P52").value, 3) == 0.451
    assert round(x3.value, 3) == 0.902
    assert "arcsin" in x3.closed_form


def test_closed_form_unknown():
    with pytest.raises(UnknownIdentifierError):
        closed_form("P63")


def test_asymptotic_small_case():
    assert asymptotic_pnk(4, 1) == pytest.approx(math.sqrt(math.e**2 / (2 * (2 * math.pi) ** 3)), rel=1e-12)
    assert asymptotic_pnk(4, 1) == pytest.approx(0.12204, abs=5e-6)


def test_asymptotic_against_bigfloat():
    assert asymptotic_pnk(20, 2) == pytest.approx(float(mp_asymptotic(20, 2)), rel=1e-10)


def test_asymptotic_monotone_in_n():
    values = [asymptotic_pnk(n, 1) for n in range(10, 51)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_asymptotic_finite_far_out():
    for n in range(2, 201):
        for k in range(1, min(n, 6)):
            v = asymptotic_pnk(n, k)
            assert math.isfinite(v) and v >= 0


def test_asymptotic_range_check():
    with pytest.raises(ValueError):
        asymptotic_pnk(5, 0)
    with pytest.raises(ValueError):
        asymptotic_pnk(5, 5)


def test_tail_is_twice_pnk():
    for d in (2, 10, 50):
        assert asymptotic_xd_tail(d) == pytest.approx(2 * asymptotic_pnk(d + 2, 1))


def test_law_d2():
    tail = (1 - P42) / 2
    law = xd_law_from_demon(2, {1: tail, 2: P42, 3: tail})
    assert law[1] == pytest.approx(1 - P42, abs=1e-12)
    assert law[2] == pytest.approx(P42, abs=1e-12)
    assert law[1] == pytest.approx(0.350959, abs=1e-6)


def test_law_d3_doubles():
    rest = (1 - 2 * P52) / 2
    law = xd_law_from_demon(3, {1: rest, 2: P52, 3: P52, 4: rest})
    assert law[2] == pytest.approx(X3_CONVEX, abs=1e-12)


def test_law_even_split_counts_once():
    p = {1: 0.05, 2: 0.1, 3: 0.15, 4: 0.4, 5: 0.15, 6: 0.1, 7: 0.05}
    law = xd_law_from_demon(6, p)
    assert law[4] == pytest.approx(0.4)
    assert law[1] == pytest.approx(0.1)
    assert sum(law.mass.values()) == pytest.approx(1.0, abs=1e-12)


def test_law_rejects_bad_input():
    with pytest.raises(InvalidDistributionError):
        xd_law_from_demon(2, {1: 0.5, 2: 0.6})
    with pytest.raises(InvalidDistributionError):
        xd_law_from_demon(2, {1: 0.5, 4: 0.5})


def test_law_support_sizes():
    rng = np.random.default_rng(0)
    for d in range(1, 12):
        p = rng.random(d + 1)
        p /= p.sum()
        law = xd_law_from_demon(d, dict(enumerate(p, start=1)))
        assert list(law.mass) == list(range(1, (d + 2) // 2 + 1))
        assert abs(sum(law.mass.values()) - 1) < 1e-9


def test_split_distribution_validation():
    with pytest.raises(InvalidDistributionError):
        SplitDistribution(2, {1: 0.3, 2: 0.3})
    with pytest.raises(InvalidDistributionError):
        SplitDistribution(2, {3: 1.0})
    assert SplitDistribution(4, {2: 1.0}).mass == {1: 0.0, 2: 1.0, 3: 0.0}
