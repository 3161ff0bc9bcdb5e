"""Experiment statistics: weight histograms, BER/FER ledgers, efficiency tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError, UndefinedStatisticError
from .frame import plan_dimming


@dataclass
class WeightHistogram:
    """
    Histogram of codeword Hamming weights for length-``n_bits`` codewords.

    Mean and variance are also tracked incrementally (Welford) so they can
    be cross-checked against the values recomputed from ``counts``.
    """

    n_bits: int
    counts: np.ndarray = None
    samples: int = 0
    _mean: float = 0.0
    _m2: float = 0.0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.n_bits + 1, dtype=np.int64)

    def add_weight(self, w: int) -> None:
        self.counts[w] += 1
        self.samples += 1
        delta = w - self._mean
        self._mean += delta / self.samples
        self._m2 += delta * (w - self._mean)

    def record(self, codeword) -> "WeightHistogram":
        cw = np.asarray(codeword)
        if cw.shape[-1] != self.n_bits:
            raise ParameterError(f"codeword length must be {self.n_bits}, got {cw.shape[-1]}")
        for w in np.atleast_2d(cw).sum(axis=1, dtype=np.int64).tolist():
            self.add_weight(w)
        return self

    @property
    def mean(self) -> float:
        if self.samples == 0:
            raise UndefinedStatisticError("empty weight histogram")
        w = np.arange(self.n_bits + 1)
        return float(w @ self.counts) / self.samples

    @property
    def std(self) -> float:
        """Population standard deviation."""
        m = self.mean
        w = np.arange(self.n_bits + 1)
        return math.sqrt(float(((w - m) ** 2) @ self.counts) / self.samples)

    @property
    def incremental_mean(self) -> float:
        return self._mean

    @property
    def incremental_std(self) -> float:
        return math.sqrt(self._m2 / self.samples) if self.samples else 0.0

    def fraction_in(self, lo: int, hi: int) -> float:
        """Fraction of samples whose weight lies in ``[lo, hi]``."""
        if self.samples == 0:
            raise UndefinedStatisticError("empty weight histogram")
        return float(self.counts[lo:hi + 1].sum()) / self.samples

    def merge(self, other: "WeightHistogram") -> "WeightHistogram":
        if other.n_bits != self.n_bits:
            raise ParameterError("cannot merge histograms of different lengths")
        n = self.samples + other.samples
        out = WeightHistogram(self.n_bits, self.counts + other.counts, n)
        if n:
            delta = other._mean - self._mean
            out._mean = self._mean + delta * other.samples / n
            out._m2 = self._m2 + other._m2 + delta * delta * self.samples * other.samples / n
        return out


def record_codeword(hist: WeightHistogram, codeword) -> WeightHistogram:
    return hist.record(codeword)


@dataclass(frozen=True)
class TrialLedger:
    """Monte Carlo error counts at one operating point."""

    rate: float
    dimming: float
    axis: str = "snr"
    axis_db: float = 0.0
    bits_sent: int = 0
    bit_errors: int = 0
    blocks_sent: int = 0
    block_errors: int = 0

    def __post_init__(self):
        if self.bit_errors > self.bits_sent or self.block_errors > self.blocks_sent:
            raise ParameterError("error count exceeds sent count")

    def record(self, bit_errors: int, bits: int, block_errors: int, blocks: int) -> "TrialLedger":
        return replace(self,
                       bits_sent=self.bits_sent + int(bits),
                       bit_errors=self.bit_errors + int(bit_errors),
                       blocks_sent=self.blocks_sent + int(blocks),
                       block_errors=self.block_errors + int(block_errors))

    def merge(self, other: "TrialLedger") -> "TrialLedger":
        if (self.rate, self.dimming, self.axis, self.axis_db) != (
                other.rate, other.dimming, other.axis, other.axis_db):
            raise ParameterError("cannot merge ledgers of different operating points")
        return self.record(other.bit_errors, other.bits_sent,
                           other.block_errors, other.blocks_sent)

    __add__ = merge


def summarize_ber(ledger: TrialLedger) -> tuple[float, float, float]:
    """
    Returns
    -------
    (ber, fer, half_width)
        ``half_width`` is the 95% Wald half-width ``1.96 sqrt(p (1 - p) / n)``.
    """
    if ledger.bits_sent <= 0:
        raise UndefinedStatisticError("BER undefined: no bits sent")
    ber = ledger.bit_errors / ledger.bits_sent
    fer = ledger.block_errors / ledger.blocks_sent if ledger.blocks_sent else float("nan")
    half = 1.96 * math.sqrt(ber * (1.0 - ber) / ledger.bits_sent)
    return ber, fer, half


# Cited literature values: dimming group -> (code rate, coding efficiency).
BASELINE_EFFICIENCY = {
    "RM": {0.5: (0.156, 0.156), 0.25: (0.25, 0.125), 0.125: (0.375, 0.093)},
    "LDPC": {0.5: (0.5, 0.24), 0.25: (0.5, 0.12), 0.125: (0.5, 0.06)},
}


def _baseline_group(d: float):
    # 25% and 75% share a table row, as do 12.5% and 87.5%
    key = round(min(d, 1.0 - d), 6)
    return key if key in (0.5, 0.25, 0.125) else None


def overall_efficiency(rate: float, dimming: float, n_code: int = 1024) -> float:
    """``R_c N / (N + n_cs)`` for the compensation plan at ``dimming``."""
    plan = plan_dimming(n_code, dimming)
    return rate * n_code / plan.frame_len


def efficiency_table(rates, dimmings, n_code: int = 1024) -> list[tuple]:
    """
    Rows ``(dimming, scheme, code_rate, efficiency)``.

    The proposed polar scheme gets one row per rate. RM and LDPC rows are the
    cited constants and appear only for dimming levels that have them.
    """
    rows = []
    for d in dimmings:
        group = _baseline_group(d)
        if group is not None:
            for scheme, table in BASELINE_EFFICIENCY.items():
                rc, eff = table[group]
                rows.append((d, scheme, rc, eff))
        for rc in rates:
            if not 0.0 < rc <= 1.0:
                raise ParameterError(f"code rate must lie in (0, 1], got {rc}")
            rows.append((d, "polar", rc, overall_efficiency(rc, d, n_code)))
    return rows
