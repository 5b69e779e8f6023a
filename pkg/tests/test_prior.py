import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lascat.prior import PriorSpec, RoughPriorWarning, prior_logdensity, sample_prior


def test_seed_determinism():
    spec = PriorSpec("qb", 10)
    assert np.array_equal(sample_prior(spec, 5), sample_prior(spec, 5))
    assert sample_prior(spec, 5).shape == (21,)


def test_moments():
    spec = PriorSpec("qb", 10)
    rng = np.random.default_rng(99)
    draws = np.array([sample_prior(spec, rng) for _ in range(100_000)])
    assert -0.02 < draws[:, 1].mean() < 0.02
    # b3 sits at index N + 3
    assert 0.97 < draws[:, 13].var() < 1.03


def test_logdensity_values():
    spec = PriorSpec("qa", 3)
    assert prior_logdensity(spec, np.zeros(7)) == 0.0
    c = np.zeros(7)
    c[0] = 1.0
    assert prior_logdensity(spec, c) == -0.5


@given(c=arrays(np.float64, 9, elements=st.floats(-5, 5)))
def test_logdensity_is_quadratic(c):
    spec = PriorSpec("qb", 4)
    assert prior_logdensity(spec, 2 * c) == pytest.approx(4 * prior_logdensity(spec, c), rel=1e-12, abs=1e-300)


def test_length_mismatch():
    with pytest.raises(ValueError, match="21"):
        prior_logdensity(PriorSpec("qb", 10), np.zeros(20))


def test_validation_and_rough_prior_warning():
    with pytest.raises(ValueError):
        PriorSpec("qb", 0)
    with pytest.raises(ValueError):
        PriorSpec("qz", 3)
    with pytest.warns(RoughPriorWarning):
        PriorSpec("qc", 10)
