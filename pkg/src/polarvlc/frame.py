"""
VLC transmit framing: dimming compensation, interleaving, run statistics.

A frame is the codeword followed by a contiguous tail of compensation
symbols (CSs). The interleaver then spreads codeword and CS positions
across the frame. OOK maps bit 1 to LED on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DimmingRangeError, ParameterError

MAX_FRAME_LEN = 1 << 24


@dataclass(frozen=True)
class DimmingPlan:
    target_d: float
    n_code: int
    n_cs: int
    cs_value: int

    @property
    def frame_len(self) -> int:
        return self.n_code + self.n_cs

    @property
    def nominal_d(self) -> float:
        """ON ratio for a codeword of the nominal weight ``n_code / 2``."""
        return (self.n_code / 2 + self.n_cs * self.cs_value) / self.frame_len

    def efficiency(self, k_bits: int) -> float:
        """Information bits per transmitted symbol, ``K / frame_len``."""
        return k_bits / self.frame_len


def plan_dimming(n_code: int, target_d: float) -> DimmingPlan:
    """
    Number of compensation symbols that moves a balanced codeword to ``target_d``.

    Above 50% the CSs are ON and ``n_cs = round(N (d - 1/2) / (1 - d))``;
    below 50% they are OFF and ``n_cs = round(N (1/2 - d) / d)``.
    """
    if n_code < 2:
        raise ParameterError(f"n_code must be >= 2, got {n_code}")
    if not 0.0 < target_d < 1.0:
        raise ParameterError(f"dimming ratio must lie in (0, 1), got {target_d}")
    if target_d >= 0.5:
        n_cs, cs_value = n_code * (target_d - 0.5) / (1.0 - target_d), 1
    else:
        n_cs, cs_value = n_code * (0.5 - target_d) / target_d, 0
    if n_code + n_cs > MAX_FRAME_LEN:
        raise DimmingRangeError(
            f"dimming {target_d} needs about {n_cs:.0f} compensation symbols for "
            f"{n_code} code bits; frames are limited to {MAX_FRAME_LEN} symbols")
    n_cs = int(round(n_cs))
    if n_cs == 0:
        cs_value = 1 if target_d > 0.5 else 0
    return DimmingPlan(float(target_d), int(n_code), n_cs, cs_value)


def assemble_frame(codeword, plan: DimmingPlan) -> np.ndarray:
    """Append ``n_cs`` copies of the CS value after the codeword.

    Works on a single codeword or a (B, N) batch.
    """
    cw = np.asarray(codeword, dtype=np.uint8)
    if cw.shape[-1] != plan.n_code:
        raise ParameterError(f"codeword length must be {plan.n_code}, got {cw.shape[-1]}")
    tail = np.full(cw.shape[:-1] + (plan.n_cs,), plan.cs_value, dtype=np.uint8)
    return np.concatenate([cw, tail], axis=-1)


def disassemble_frame(frame, plan: DimmingPlan) -> np.ndarray:
    """Return the codeword region of a frame (or of a batch of frames)."""
    fr = np.asarray(frame)
    if fr.shape[-1] != plan.frame_len:
        raise ParameterError(f"frame length must be {plan.frame_len}, got {fr.shape[-1]}")
    return fr[..., :plan.n_code]


@dataclass(frozen=True)
class InterleaverMap:
    """
    Position permutation of a frame: ``out[p] = frame[permutation[p]]``.

    ``kind`` is ``"none"``, ``"rowcol"`` or ``"seeded"``; ``params`` holds
    ``(rows, cols)`` or ``(seed,)`` respectively.
    """

    permutation: np.ndarray
    kind: str = "none"
    params: tuple = ()

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.intp)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ParameterError("interleaver map is not a permutation")
        perm.flags.writeable = False
        object.__setattr__(self, "permutation", perm)

    @property
    def length(self) -> int:
        return self.permutation.size

    @property
    def spec(self) -> str:
        """Config-file form, e.g. ``rowcol:32x64``."""
        if self.kind == "rowcol":
            return f"rowcol:{self.params[0]}x{self.params[1]}"
        if self.kind == "seeded":
            return f"seeded:{self.params[0]}"
        return "none"

    @classmethod
    def identity(cls, length: int) -> "InterleaverMap":
        return cls(np.arange(length), "none", ())

    @classmethod
    def row_column(cls, length: int, rows: int, cols: int | None = None) -> "InterleaverMap":
        """
        Block interleaver: write row by row into a rows x cols array, read
        column by column. Cells past ``length`` are skipped on read, so any
        ``rows * cols >= length`` works.
        """
        if rows < 1:
            raise ParameterError(f"rows must be >= 1, got {rows}")
        if cols is None:
            cols = -(-length // rows)
        if rows * cols < length:
            raise ParameterError(f"{rows}x{cols} block cannot hold {length} symbols")
        grid = np.arange(rows * cols).reshape(rows, cols)
        order = grid.T.ravel()
        return cls(order[order < length], "rowcol", (int(rows), int(cols)))

    @classmethod
    def seeded(cls, length: int, seed: int) -> "InterleaverMap":
        rng = np.random.default_rng(seed)
        return cls(rng.permutation(length), "seeded", (int(seed),))

    @classmethod
    def from_spec(cls, text: str, length: int) -> "InterleaverMap":
        """
        Build a map for a ``length``-symbol frame from ``rowcol:RxC``,
        ``seeded:S`` or ``none``.

        For ``rowcol`` the row count is kept and the column count is
        recomputed when ``R * C`` does not equal ``length``, so one config
        line serves frames of every dimming level.
        """
        kind, _, arg = text.strip().partition(":")
        if kind == "none" and not arg:
            return cls.identity(length)
        if kind == "rowcol":
            try:
                rows, cols = (int(v) for v in arg.lower().split("x"))
            except ValueError:
                raise ParameterError(f"bad row-column shape {arg!r}") from None
            if rows * cols != length:
                cols = None
            return cls.row_column(length, rows, cols)
        if kind == "seeded":
            try:
                seed = int(arg)
            except ValueError:
                raise ParameterError(f"bad interleaver seed {arg!r}") from None
            return cls.seeded(length, seed)
        raise ParameterError(f"unknown interleaver {text!r}")


def interleave(frame, imap: InterleaverMap) -> np.ndarray:
    fr = np.asarray(frame)
    if fr.shape[-1] != imap.length:
        raise ParameterError(f"frame length {fr.shape[-1]} != interleaver length {imap.length}")
    return fr[..., imap.permutation]


def deinterleave(frame, imap: InterleaverMap) -> np.ndarray:
    fr = np.asarray(frame)
    if fr.shape[-1] != imap.length:
        raise ParameterError(f"frame length {fr.shape[-1]} != interleaver length {imap.length}")
    out = np.empty_like(fr)
    out[..., imap.permutation] = fr
    return out


def run_lengths(frame) -> np.ndarray:
    """Lengths of the maximal runs of equal symbols, in order."""
    fr = np.asarray(frame).ravel()
    if fr.size == 0:
        return np.zeros(0, dtype=np.intp)
    edges = np.flatnonzero(fr[1:] != fr[:-1]) + 1
    bounds = np.concatenate([[0], edges, [fr.size]])
    return np.diff(bounds)


def run_length_histogram(frame) -> dict:
    """Map run length -> number of maximal runs of that length."""
    return dict(sorted(Counter(run_lengths(frame).tolist()).items()))


def run_length_counts(frames, max_len: int | None = None) -> np.ndarray:
    """
    Run-length histogram summed over the rows of a (B, L) batch.

    Entry ``l`` of the result counts runs of length ``l``; runs never span
    two rows.
    """
    fr = np.asarray(frames)
    if fr.ndim != 2 or fr.shape[1] == 0:
        raise ParameterError("frames must be a non-empty 2-D array")
    B, L = fr.shape
    change = np.ones((B, L + 1), dtype=bool)
    change[:, 1:L] = fr[:, 1:] != fr[:, :-1]
    starts = np.flatnonzero(change.ravel())
    # each row contributes its run starts plus a sentinel at column L
    lengths = np.diff(starts)
    lengths = lengths[(starts[:-1] % (L + 1)) != L]
    size = (max_len if max_len is not None else L) + 1
    return np.bincount(lengths, minlength=size)[:size]
