import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import norm

from polarvlc import (ChannelParams, OOKChannel, ParameterError, construct, decode_batch,
                      demodulate_llr, ebn0_to_snr, hard_decision, snr_to_sigma, transmit,
                      uncoded_ber)
from polarvlc.channel import q_function, snr_to_ebn0
from polarvlc.codec import encode_batch


def test_q_function_oracle():
    assert q_function(1.0) == pytest.approx(norm.sf(1.0), rel=1e-12)
    assert q_function(1.0) == pytest.approx(0.158655, abs=1e-6)
    assert q_function(3.0) == pytest.approx(1.3499e-3, rel=1e-3)


def test_sigma_calibration():
    assert snr_to_sigma(0.0) == 0.5
    assert snr_to_sigma(10 * math.log10(9)) == pytest.approx(0.5 / 3)
    assert snr_to_sigma(0.0, amplitude=2.0) == 1.0
    assert snr_to_sigma(300.0) < 1e-14
    with pytest.raises(ParameterError):
        snr_to_sigma(float("nan"))


def _uncoded_mc_ber(snr_db, n, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n, dtype=np.uint8)
    params = ChannelParams(snr_db, rng_seed=seed + 1)
    llr = demodulate_llr(transmit(bits, params), params)
    return np.count_nonzero((llr < 0) != bits) / n


def test_uncoded_ber_at_0db():
    assert _uncoded_mc_ber(0.0, 10**6, 1) == pytest.approx(uncoded_ber(0.0), rel=0.02)


@pytest.mark.slow
def test_uncoded_ber_at_snr_9():
    assert _uncoded_mc_ber(10 * math.log10(9), 10**7, 2) == pytest.approx(q_function(3.0), rel=0.05)


def test_high_snr_limit():
    assert uncoded_ber(200.0) == 0.0
    assert _uncoded_mc_ber(40.0, 10**5, 3) == 0.0


def test_noiseless_samples():
    bits = np.array([0, 1, 1, 0])
    np.testing.assert_allclose(transmit(bits, ChannelParams(300.0, rng_seed=0)), bits, atol=1e-12)


def test_seed_determinism():
    bits = np.random.default_rng(0).integers(0, 2, 500)
    p = ChannelParams(3.0, rng_seed=42)
    np.testing.assert_array_equal(transmit(bits, p), transmit(bits, p))
    a, b = OOKChannel(p), OOKChannel(p)
    np.testing.assert_array_equal(a.transmit(bits), b.transmit(bits))
    assert not np.array_equal(transmit(bits, p), transmit(bits, ChannelParams(3.0, rng_seed=43)))


def test_all_ones_mean():
    p = ChannelParams(0.0, rng_seed=5)
    s = transmit(np.ones(100000), p)
    assert abs(s.mean() - 1.0) < 3 * p.noise_sigma / math.sqrt(s.size)


def test_llr_examples():
    p = ChannelParams(0.0)  # A = 1, sigma = 0.5
    assert p.noise_sigma == 0.5
    assert demodulate_llr(0.8, p) == pytest.approx(-1.2)
    assert demodulate_llr(0.5, p) == 0.0
    assert demodulate_llr(1.0, ChannelParams(40.0)) < -1e3


@given(st.floats(-5, 5), st.floats(-10, 30))
def test_llr_hard_decision_is_threshold(sample, snr_db):
    p = ChannelParams(snr_db)
    llr = float(demodulate_llr(sample, p))
    if sample != 0.5:
        assert hard_decision(llr) == (1 if sample > 0.5 else 0)


@pytest.mark.parametrize("ebn0,rate,snr", [(7.9, 0.5, 4.9), (10.0, 0.25, 3.98)])
def test_ebn0_to_snr_examples(ebn0, rate, snr):
    assert round(ebn0_to_snr(ebn0, rate), 2 if snr == 3.98 else 1) == snr


def test_ebn0_identity_and_errors():
    assert ebn0_to_snr(6.3, 1.0) == 6.3
    assert snr_to_ebn0(ebn0_to_snr(6.3, 0.3), 0.3) == pytest.approx(6.3)
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ParameterError):
            ebn0_to_snr(5.0, bad)


def test_high_snr_llrs_decode_cleanly():
    spec = construct(256, 128)
    rng = np.random.default_rng(9)
    msgs = rng.integers(0, 2, (200, 128), dtype=np.uint8)
    p = ChannelParams(30.0, rng_seed=1)
    llrs = demodulate_llr(transmit(encode_batch(spec, msgs), p), p)
    np.testing.assert_array_equal(decode_batch(spec, llrs), msgs)
