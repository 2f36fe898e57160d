import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dpseedkit.bitgen import PCG64
from dpseedkit.dispatch import GeneratorHandle
from dpseedkit.seedseq import SeedSequence
from dpseedkit.stattests import chi_square_uniform
from dpseedkit.transform import bounded_int, laplace_inverse_cdf, next_double

from conftest import REFERENCE_DOUBLE, REFERENCE_ENTROPY


class Scripted:
    """Replays fixed 64-bit words."""

    def __init__(self, words):
        self.words = list(words)
        self.calls = 0

    def next_u64(self):
        self.calls += 1
        return self.words.pop(0)


def _pcg(seed=0):
    return PCG64.from_seed_sequence(SeedSequence(seed))


def test_reference_double():
    assert next_double(_pcg(REFERENCE_ENTROPY)) == REFERENCE_DOUBLE


def test_next_double_extremes():
    assert next_double(Scripted([0])) == 0.0
    assert next_double(Scripted([(1 << 11) - 1])) == 0.0
    top = next_double(Scripted([2**64 - 1]))
    assert top < 1.0 and top == 1.0 - 2.0**-53


def test_next_double_grid_and_range():
    gen = _pcg(5)
    for _ in range(2000):
        u = next_double(gen)
        assert 0.0 <= u < 1.0
        assert (u * 2**53).is_integer()


def test_next_double_mean():
    words = _pcg(6).random_raw(1_000_000)
    u = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
    # 4 sigma of the mean: 4 / sqrt(12 * 1e6) ~ 0.00115
    assert abs(u.mean() - 0.5) < 0.002


def test_bounded_degenerate_and_errors():
    gen = _pcg(1)
    assert all(bounded_int(gen, 5, 5) == 5 for _ in range(10))
    with pytest.raises(ValueError):
        bounded_int(gen, 3, 2)


def test_bounded_full_range_returns_raw_word():
    assert bounded_int(Scripted([123456789]), 0, 2**64 - 1) == 123456789
    assert bounded_int(Scripted([2**64 - 1]), 10, 10 + 2**64 - 1) == 10 + 2**64 - 1


def test_bounded_rejects_biased_region():
    # span 3: threshold = 2**64 mod 3 = 1, so a low product half of 0 is rejected
    src = Scripted([0, 2**63])
    assert bounded_int(src, 0, 2) == (2**63 * 3) >> 64
    assert src.calls == 2


def test_bounded_coin_balance():
    handle = GeneratorHandle(_pcg(7))
    ones = sum(bounded_int(handle, 0, 1) for _ in range(1_000_000))
    # binomial(1e6, 1/2): 4 sigma = 2000
    assert abs(ones - 500_000) <= 2000


@pytest.mark.parametrize("k", [3, 7, 10, 16])
def test_bounded_small_ranges_chi_square(k):
    gen = _pcg(100 + k)
    samples = [bounded_int(gen, 0, k - 1) for _ in range(1_000_000)]
    assert chi_square_uniform(samples, k, alpha=0.001).passed


def test_bounded_wide_range():
    gen = _pcg(3)
    lo, hi = -(2**100), 2**130
    values = [bounded_int(gen, lo, hi) for _ in range(200)]
    assert all(lo <= v <= hi for v in values)
    assert max(values) > 2**128  # top of the range is actually reached


def test_laplace_closed_forms():
    assert laplace_inverse_cdf(0.5, 1.0) == 0.0
    assert laplace_inverse_cdf(0.75, 1.0) == pytest.approx(math.log(2), rel=0, abs=1e-15)
    assert laplace_inverse_cdf(0.75, 1.0) == 0.6931471805599453
    assert laplace_inverse_cdf(0.25, 2.0) == -2 * math.log(2)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_laplace_domain(u):
    with pytest.raises(ValueError):
        laplace_inverse_cdf(u, 1.0)


def test_laplace_scale_domain():
    with pytest.raises(ValueError):
        laplace_inverse_cdf(0.3, 0.0)


@given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
def test_laplace_antisymmetry(u):
    assume(1.0 - (1.0 - u) == u)
    assert laplace_inverse_cdf(u, 1.0) == -laplace_inverse_cdf(1.0 - u, 1.0)


@given(
    st.floats(min_value=1e-9, max_value=1 - 1e-9),
    st.floats(min_value=1e-9, max_value=1 - 1e-9),
)
def test_laplace_monotone(u1, u2):
    if u1 < u2:
        assert laplace_inverse_cdf(u1, 1.5) <= laplace_inverse_cdf(u2, 1.5)
