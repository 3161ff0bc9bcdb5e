"""
OOK intensity link over additive white Gaussian noise.

Symbols take amplitudes 0 and ``A``; the hard-decision threshold sits at
``A/2``. Noise is scaled so the uncoded bit error rate is ``Q(sqrt(SNR))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import ParameterError


def q_function(x):
    """Standard normal upper tail probability."""
    return ndtr(-np.asarray(x, dtype=float))


def snr_to_sigma(snr_db: float, amplitude: float = 1.0) -> float:
    """Noise standard deviation ``(A/2) / sqrt(SNR)`` for a received SNR in dB."""
    if not math.isfinite(snr_db):
        raise ParameterError(f"snr_db must be finite, got {snr_db}")
    return (amplitude / 2.0) / math.sqrt(10.0 ** (snr_db / 10.0))


def ebn0_to_snr(ebn0_db: float, rate: float) -> float:
    """Received SNR in dB from Eb/N0 in dB, using ``Eb/N0 = SNR / R``."""
    if not 0.0 < rate <= 1.0:
        raise ParameterError(f"code rate must lie in (0, 1], got {rate}")
    return ebn0_db + 10.0 * math.log10(rate)


def snr_to_ebn0(snr_db: float, rate: float) -> float:
    if not 0.0 < rate <= 1.0:
        raise ParameterError(f"code rate must lie in (0, 1], got {rate}")
    return snr_db - 10.0 * math.log10(rate)


def uncoded_ber(snr_db) -> np.ndarray:
    """Closed-form hard-decision OOK bit error rate ``Q(sqrt(SNR))``."""
    return q_function(np.sqrt(10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)))


@dataclass
class ChannelParams:
    snr_db: float
    rate: float = 1.0
    rng_seed: int | None = None
    amplitude: float = 1.0

    @property
    def noise_sigma(self) -> float:
        return snr_to_sigma(self.snr_db, self.amplitude)


@dataclass
class OOKChannel:
    """
    Seeded AWGN channel. Holds its own generator, so one instance must not
    be shared between workers; give each worker its own seed.
    """

    params: ChannelParams
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.params.rng_seed)

    @classmethod
    def from_rng(cls, params: ChannelParams, rng: np.random.Generator) -> "OOKChannel":
        ch = cls(params)
        ch.rng = rng
        return ch

    def transmit(self, frame) -> np.ndarray:
        return transmit(frame, self.params, self.rng)

    def demodulate_llr(self, samples) -> np.ndarray:
        return demodulate_llr(samples, self.params)


def transmit(frame, params: ChannelParams, rng: np.random.Generator | None = None) -> np.ndarray:
    """
    Received samples ``A * bit + noise``.

    Without ``rng`` a fresh generator is seeded from ``params.rng_seed``,
    so repeated calls return the same samples.
    """
    bits = np.asarray(frame)
    if bits.size == 0:
        raise ParameterError("frame must be non-empty")
    if rng is None:
        rng = np.random.default_rng(params.rng_seed)
    A = params.amplitude
    return A * bits + rng.normal(0.0, params.noise_sigma, size=bits.shape)


def demodulate_llr(samples, params: ChannelParams) -> np.ndarray:
    """Exact per-sample LLR ``(A^2 - 2 A s) / (2 sigma^2)``; positive favours bit 0."""
    s = np.asarray(samples, dtype=float)
    A, sigma = params.amplitude, params.noise_sigma
    return (A * A - 2.0 * A * s) / (2.0 * sigma * sigma)
