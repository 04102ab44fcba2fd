import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnrsim import stats
from pnrsim.errors import ConfigurationError, DegenerateInputError


def test_poisson_vacuum():
    s = stats.poisson(0.0, 10)
    assert s.probs[0] == 1.0
    assert np.all(s.probs[1:] == 0.0)
    assert s.tail_mass == 0.0


def test_poisson_closed_form_first_term():
    s = stats.poisson(1.0)
    assert s.probs[0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_poisson_mu2_normalization():
    s = stats.poisson(2.0, 30)
    assert s.probs[0] == pytest.approx(0.1353352832366127, abs=1e-12)
    assert abs(s.probs.sum() - 1.0) <= 1e-12


def test_thermal_vacuum():
    s = stats.thermal(0.0, 5)
    assert s.probs[0] == 1.0


def test_thermal_geometric_closed_form():
    s = stats.thermal(1.0, 200)
    assert s.probs[0] == pytest.approx(0.5, abs=1e-12)
    assert s.probs[1] == pytest.approx(0.25, abs=1e-12)


def test_thermal_truncated_mean_oracle():
    # independent oracle: direct geometric sums of the truncated distribution
    mu, m_max = 0.1, 20
    q = mu / (1.0 + mu)
    terms = [(1 - q) * q**m for m in range(m_max + 1)]
    total = sum(terms)
    expected_mean = sum(m * t for m, t in enumerate(terms)) / total
    s = stats.thermal(mu, m_max)
    assert stats.mean(s) == pytest.approx(expected_mean, abs=1e-14)
    assert stats.mean(s) == pytest.approx(0.1, abs=1e-9)


def test_thermal_mean_large_truncation():
    s = stats.thermal(2.0, 200)
    assert stats.mean(s) == pytest.approx(2.0, abs=1e-6)


def test_mean_trivial_cases():
    assert stats.mean(stats.poisson(0.0, 5)) == 0.0
    assert stats.mean(stats.poisson(1.0, 40)) == pytest.approx(1.0, abs=1e-9)


def test_negative_parameters_rejected():
    with pytest.raises(ConfigurationError):
        stats.poisson(-0.5)
    with pytest.raises(ConfigurationError):
        stats.poisson(1.0, -1)
    with pytest.raises(ConfigurationError):
        stats.thermal(-2.0)


def test_renormalize_thermal_closed_form():
    # S0=0.5, S1=0.25, S2=0.125 -> S2' = 0.125 / 0.25 = 0.5
    s = stats.renormalize_multiphoton(stats.thermal(1.0, 60))
    assert s.probs[0] == 0.0 and s.probs[1] == 0.0
    assert s.probs[2] == pytest.approx(0.5, rel=1e-12)
    assert s.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_renormalize_already_conditioned():
    s = stats.from_probs([0.0, 0.0, 1.0, 0.0])
    out = stats.renormalize_multiphoton(s)
    assert np.array_equal(out.probs, s.probs)


def test_renormalize_degenerate():
    with pytest.raises(DegenerateInputError):
        stats.renormalize_multiphoton(stats.from_probs([0.5, 0.5, 0.0]))


def test_renormalize_preserves_ratios():
    s = stats.thermal(0.7, 40)
    out = stats.renormalize_multiphoton(s)
    for i in range(2, 12):
        for j in range(i + 1, 12):
            expected = s.probs[i] / s.probs[j]
            got = out.probs[i] / out.probs[j]
            assert got == pytest.approx(expected, rel=5e-16)


@settings(max_examples=60, deadline=None)
@given(
    mu=st.floats(min_value=0.0, max_value=10.0, allow_nan=False),
    m_max=st.integers(min_value=0, max_value=120),
)
def test_constructors_normalized(mu, m_max):
    for build in (stats.poisson, stats.thermal):
        s = build(mu, m_max)
        assert abs(s.probs.sum() - 1.0) <= 1e-12
        assert np.all(s.probs >= 0.0)
        assert 0.0 <= s.tail_mass < 1.0


@settings(max_examples=40, deadline=None)
@given(mu=st.floats(min_value=0.01, max_value=8.0, allow_nan=False))
def test_tail_mass_monotone_in_truncation(mu):
    for build in (stats.poisson, stats.thermal):
        bounds = [4, 8, 16, 32, 64]
        tails = [build(mu, b).tail_mass for b in bounds]
        assert all(a >= b for a, b in zip(tails, tails[1:]))


def test_default_m_max_rule():
    assert stats.default_m_max(0.0) == 20
    assert stats.default_m_max(1.0) == 24
    assert stats.poisson(10.0).tail_mass < 1e-12


def test_serialization_round_trip(tmp_path):
    s = stats.poisson(1.7, 25)
    path = tmp_path / "dist.txt"
    stats.write_distribution(s, path)
    back = stats.read_distribution(path)
    assert back.m_max == s.m_max
    assert back.mu == pytest.approx(s.mu)
    assert back.tail_mass == pytest.approx(s.tail_mass)
    np.testing.assert_allclose(back.probs, s.probs, rtol=0, atol=1e-16)
    header = path.read_text().splitlines()[0]
    assert header.startswith("# mu=") and "m_max=25" in header and "tail_mass=" in header


def test_from_probs_rejects_bad_vectors():
    with pytest.raises(ConfigurationError):
        stats.from_probs([])
    with pytest.raises(ConfigurationError):
        stats.from_probs([0.2, -0.1])
    with pytest.raises(ConfigurationError):
        stats.from_probs([0.0, 0.0])
