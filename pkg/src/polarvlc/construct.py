"""
Polar code construction by Bhattacharyya-parameter recursion.

Each coordinate channel of the polar transform is scored by an upper bound
on its error probability; the K best-scored coordinates carry message bits
and the rest are frozen to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

DEFAULT_Z0 = 0.5
MAX_STAGES = 24


@dataclass(frozen=True)
class ReliabilityProfile:
    """Unreliability score of every coordinate channel, indexed like ``u``."""

    n: int
    z: np.ndarray
    design_param: float

    @property
    def N(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class CodeSpec:
    """
    Identity of one polar code.

    Parameters
    ----------
    n_bits : int
        Block length N, a power of two.
    k_bits : int
        Message length K.
    info_set : tuple of int
        Sorted coordinate indices of ``u`` that carry message bits.
    frozen_value : int
        Bit placed in every frozen coordinate. Always 0.
    """

    n_bits: int
    k_bits: int
    info_set: tuple
    frozen_value: int = 0
    _mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        N, K = self.n_bits, self.k_bits
        if N < 2 or N & (N - 1):
            raise ParameterError(f"block length must be a power of two >= 2, got {N}")
        if not 1 <= K <= N:
            raise ParameterError(f"message length must be in [1, {N}], got {K}")
        info = tuple(int(i) for i in self.info_set)
        if len(info) != K:
            raise ParameterError(f"info_set has {len(info)} indices, expected {K}")
        if any(b <= a for a, b in zip(info, info[1:])):
            raise ParameterError("info_set must be strictly increasing")
        if info[0] < 0 or info[-1] >= N:
            raise ParameterError(f"info_set indices must lie in [0, {N})")
        if self.frozen_value != 0:
            raise ParameterError("frozen_value must be 0")
        object.__setattr__(self, "info_set", info)
        mask = np.zeros(N, dtype=bool)
        mask[list(info)] = True
        mask.flags.writeable = False
        object.__setattr__(self, "_mask", mask)

    @property
    def n_stages(self) -> int:
        return self.n_bits.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.k_bits / self.n_bits

    @property
    def info_mask(self) -> np.ndarray:
        """Boolean mask over ``u``; True marks an information coordinate."""
        return self._mask

    @property
    def frozen_set(self) -> tuple:
        return tuple(np.flatnonzero(~self._mask).tolist())

    def to_text(self) -> str:
        """Two-line text form: ``N K frozen_value`` then the info indices."""
        return (f"{self.n_bits} {self.k_bits} {self.frozen_value}\n"
                + " ".join(str(i) for i in self.info_set) + "\n")

    @classmethod
    def from_text(cls, text: str) -> "CodeSpec":
        lines = text.strip("\n").split("\n")
        if len(lines) != 2:
            raise ParameterError("CodeSpec text must have exactly two lines")
        try:
            N, K, frozen = (int(t) for t in lines[0].split())
            info = tuple(int(t) for t in lines[1].split())
        except ValueError as exc:
            raise ParameterError(f"malformed CodeSpec text: {exc}") from None
        return cls(N, K, info, frozen)


def compute_reliability(n: int, z0: float = DEFAULT_Z0) -> ReliabilityProfile:
    """
    Run the Bhattacharyya recursion for ``n`` stages from seed ``z0``.

    A parent score z splits into ``2z - z**2`` (the channel decided first)
    and ``z**2`` (the channel decided second). The children of coordinate
    ``j`` land at ``2j`` and ``2j + 1``, which is the natural order of the
    message vector ``u`` for the generator ``B_N F^{(x)n}``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ParameterError(f"stage count must be an integer, got {n!r}")
    if not 1 <= n <= MAX_STAGES:
        raise ParameterError(f"stage count must be in [1, {MAX_STAGES}], got {n}")
    if not 0.0 < z0 < 1.0:
        raise ParameterError(f"z0 must lie in (0, 1), got {z0}")

    z = np.array([float(z0)])
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    z.flags.writeable = False
    return ReliabilityProfile(int(n), z, float(z0))


def select_info_set(profile: ReliabilityProfile, k: int) -> CodeSpec:
    """Pick the ``k`` lowest-score coordinates; ties go to the lower index."""
    N = profile.N
    if not 1 <= k <= N:
        raise ParameterError(f"k must be in [1, {N}], got {k}")
    # stable sort keeps lower indices first among equal scores
    order = np.argsort(profile.z, kind="stable")
    info = np.sort(order[:k])
    return CodeSpec(N, int(k), tuple(info.tolist()), 0)


def construct(N: int, K: int, z0: float = DEFAULT_Z0) -> CodeSpec:
    """Shorthand for :func:`compute_reliability` followed by :func:`select_info_set`."""
    if N < 2 or N & (N - 1):
        raise ParameterError(f"block length must be a power of two >= 2, got {N}")
    return select_info_set(compute_reliability(N.bit_length() - 1, z0), K)
