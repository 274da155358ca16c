import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldpcqubo.channel import (
    ChannelConfig,
    ReceivedVector,
    bpsk,
    posterior,
    read_samples,
    sigma_to_snr,
    snr_to_sigma,
    transmit,
)


@pytest.mark.parametrize(
    "snr_db, sigma",
    [(0.0, 1.0), (10.0, 0.31622776601683794), (20.0, 0.1), (-3.0, 1.4125375446227544)],
)
def test_snr_to_sigma(snr_db, sigma):
    assert snr_to_sigma(snr_db) == pytest.approx(sigma, rel=1e-14)
    assert sigma_to_snr(sigma) == pytest.approx(snr_db, abs=1e-12)


def test_snr_10db_variance():
    assert snr_to_sigma(10.0) ** 2 == pytest.approx(0.1, rel=1e-14)


def test_bpsk_mapping():
    np.testing.assert_array_equal(bpsk([0, 1, 1, 0]), [1.0, -1.0, -1.0, 1.0])


@pytest.mark.parametrize(
    "r, sigma, expected",
    [
        (0.0, 1.0, 0.5),
        (-1.0, 1.0, 0.8807970779778823),  # 1 / (1 + e^-2)
        (1.0, 1.0, 0.11920292202211755),
        (0.5, 0.5, 0.01798620996209156),  # 2r/sigma^2 = 4 -> 1/(1+e^4)
    ],
)
def test_posterior_values(r, sigma, expected):
    # reference evaluated straight from the defining formula
    assert expected == pytest.approx(1.0 / (1.0 + math.exp(2 * r / sigma**2)), rel=1e-15)
    assert posterior(r, sigma) == pytest.approx(expected, rel=1e-14)


def test_posterior_extremes_are_finite_and_open():
    hi = posterior(1000.0, 1.0)
    lo = posterior(-1000.0, 1.0)
    assert 0.0 < hi < 1e-300
    assert 0.5 < lo < 1.0
    p = posterior(np.array([-1e6, 1e6]), 1e-3)
    assert np.isfinite(p).all() and (p > 0).all() and (p < 1).all()


def test_posterior_rejects_bad_sigma():
    with pytest.raises(ValueError):
        posterior(0.1, 0.0)


@given(st.floats(-50, 50), st.floats(0.05, 5))
def test_posterior_symmetry(r, sigma):
    assert posterior(r, sigma) + posterior(-r, sigma) == pytest.approx(1.0, abs=2 * np.finfo(float).eps)


@given(st.floats(-10, 10), st.floats(1e-3, 1), st.floats(0.3, 3))
def test_posterior_strictly_decreasing(r, dr, sigma):
    # strictness holds where the logistic is representable (|2r/sigma^2| well below 700)
    a, b = r * sigma**2, (r + dr) * sigma**2
    assert posterior(a, sigma) > posterior(b, sigma)


@given(st.floats(-20, 20).filter(lambda x: abs(x) > 1e-9), st.floats(0.1, 3))
def test_posterior_sign_agreement(r, sigma):
    assert (posterior(r, sigma) > 0.5) == (r < 0)


def test_transmit_noiseless_limit():
    c = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    rx = transmit(c, ChannelConfig(300.0), np.random.default_rng(0))
    np.testing.assert_allclose(rx.samples, bpsk(c), atol=1e-12)
    np.testing.assert_allclose(rx.posteriors, c, atol=1e-12)
    np.testing.assert_array_equal(rx.hard_decision(), c)


def test_transmit_moments_at_10db():
    n = 100_000
    rx = transmit(np.zeros(n, dtype=np.uint8), ChannelConfig(10.0), np.random.default_rng(2024))
    sigma = snr_to_sigma(10.0)
    assert abs(rx.samples.mean() - 1.0) < 3 * sigma / math.sqrt(n)
    assert rx.samples.var() == pytest.approx(0.1, rel=0.05)


def test_transmit_deterministic():
    c = np.ones(32, dtype=np.uint8)
    a = transmit(c, ChannelConfig(3.0), np.random.default_rng(9))
    b = transmit(c, ChannelConfig(3.0), np.random.default_rng(9))
    assert a.samples.tobytes() == b.samples.tobytes()


def test_received_vector_is_read_only_and_consistent():
    rx = ReceivedVector.from_samples([0.3, -1.2, 0.0], snr_to_sigma(4.0))
    with pytest.raises(ValueError):
        rx.samples[0] = 1.0
    np.testing.assert_allclose(rx.posteriors, posterior(rx.samples, rx.sigma))
    np.testing.assert_allclose(rx.llr, np.log((1 - rx.posteriors) / rx.posteriors), rtol=1e-12, atol=1e-12)
    assert rx.snr_db == pytest.approx(4.0)


@pytest.mark.parametrize("fmt", ["csv", "plain", "commas"])
def test_read_samples_formats(fmt):
    rx = ReceivedVector.from_samples([0.25, -1.5, 2.0], 1.0)
    text = {
        "csv": rx.to_csv(),
        "plain": "0.25 -1.5\n2.0\n",
        "commas": "# r\n0.25, -1.5, 2.0\n",
    }[fmt]
    np.testing.assert_array_equal(read_samples(text), rx.samples)
