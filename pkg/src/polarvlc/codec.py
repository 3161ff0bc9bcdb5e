"""
Polar encoding and successive-cancellation (SC) decoding.

Codewords are ``x = u B_N F^{(x)n}``. Since the bit-reversal ``B_N`` commutes
with the Kronecker power, the encoder runs the XOR butterfly on ``u`` and
bit-reverses the result; the decoder undoes the permutation on the channel
LLRs and walks the butterfly tree depth first.

LLR sign convention: positive means bit 0 is more likely.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .construct import CodeSpec
from .errors import ParameterError

LLR_CLAMP = 40.0

_BITREV_CACHE: dict = {}


def bit_reversal(n_bits: int) -> np.ndarray:
    """Permutation ``p`` with ``p[i]`` equal to ``i`` with its log2(N) bits reversed."""
    perm = _BITREV_CACHE.get(n_bits)
    if perm is None:
        n = n_bits.bit_length() - 1
        idx = np.arange(n_bits)
        perm = np.zeros(n_bits, dtype=np.intp)
        for b in range(n):
            perm |= ((idx >> b) & 1) << (n - 1 - b)
        perm.flags.writeable = False
        _BITREV_CACHE[n_bits] = perm
    return perm


def hard_decision(llr: float) -> int:
    """0 when ``llr >= 0``, else 1. A zero LLR decides 0."""
    return 0 if llr >= 0 else 1


def _butterfly(u: np.ndarray) -> np.ndarray:
    """In-place ``u F^{(x)n}`` on the last axis of a 2-D uint8 array."""
    B, N = u.shape
    h = 1
    while h < N:
        blocks = u.reshape(B, N // (2 * h), 2, h)
        blocks[:, :, 0, :] ^= blocks[:, :, 1, :]
        h *= 2
    return u


def _check_bits(bits, length, what):
    arr = np.asarray(bits)
    if arr.shape[-1] != length:
        raise ParameterError(f"{what} length must be {length}, got {arr.shape[-1]}")
    if arr.dtype != np.uint8:
        if np.any((arr != 0) & (arr != 1)):
            raise ParameterError(f"{what} must contain only 0 and 1")
        arr = arr.astype(np.uint8)
    return arr


def encode_batch(spec: CodeSpec, messages) -> np.ndarray:
    """Encode a (B, K) array of messages into a (B, N) array of codewords."""
    msgs = _check_bits(messages, spec.k_bits, "message")
    if msgs.ndim != 2:
        raise ParameterError("messages must be a 2-D array")
    u = np.zeros((msgs.shape[0], spec.n_bits), dtype=np.uint8)
    u[:, spec.info_mask] = msgs
    _butterfly(u)
    return u[:, bit_reversal(spec.n_bits)]


def encode(spec: CodeSpec, message) -> np.ndarray:
    """
    Encode one K-bit message.

    Message bits fill the information coordinates of ``u`` in ascending
    index order; frozen coordinates are 0. Work is N log2 N XORs.

    Returns
    -------
    ndarray of uint8, shape (N,)
    """
    msg = _check_bits(message, spec.k_bits, "message")
    if msg.ndim != 1:
        raise ParameterError("message must be 1-D")
    return encode_batch(spec, msg[None, :])[0]


def f_node(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Check-node LLR update ``2 atanh(tanh(a/2) tanh(b/2))``.

    Evaluated as ``sgn(a) sgn(b) min(|a|, |b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|)``,
    the same function without the tanh saturation near +-1.
    """
    s = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    return s + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def g_node(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Variable-node LLR update ``b + (1 - 2u) a`` given the partial sum ``u``."""
    return b + (1.0 - 2.0 * u) * a


def _sc(L, info, counter, leaf_llrs, offset):
    # L: (B, M) LLRs of a length-M sub-codeword; info: (M,) bool slice of the mask.
    M = L.shape[1]
    if M == 1:
        if leaf_llrs is not None:
            leaf_llrs[:, offset] = L[:, 0]
        if info[0]:
            bit = (L[:, 0] < 0).astype(np.uint8)
        else:
            bit = np.zeros(L.shape[0], dtype=np.uint8)
        return bit[:, None], bit[:, None]
    h = M // 2
    a, b = L[:, :h], L[:, h:]
    la = np.clip(f_node(a, b), -LLR_CLAMP, LLR_CLAMP)
    u_left, x_left = _sc(la, info[:h], counter, leaf_llrs, offset)
    lb = np.clip(g_node(a, b, x_left), -LLR_CLAMP, LLR_CLAMP)
    u_right, x_right = _sc(lb, info[h:], counter, leaf_llrs, offset + h)
    if counter is not None:
        counter["f"] += h
        counter["g"] += h
    return (np.concatenate([u_left, u_right], axis=1),
            np.concatenate([x_left ^ x_right, x_right], axis=1))


def _check_llrs(spec, llrs):
    L = np.asarray(llrs, dtype=np.float64)
    if L.shape[-1] != spec.n_bits:
        raise ParameterError(f"LLR length must be {spec.n_bits}, got {L.shape[-1]}")
    if not np.all(np.isfinite(L)):
        raise ParameterError("channel LLRs must be finite")
    return L


def decode_batch(spec: CodeSpec, llrs, *, counter: Counter | None = None,
                 return_u: bool = False, leaf_llrs: np.ndarray | None = None):
    """
    SC-decode a (B, N) array of channel LLRs.

    Parameters
    ----------
    spec : CodeSpec
    llrs : array_like, shape (B, N)
        Channel LLRs in codeword order. Clamped to +-40.
    counter : Counter, optional
        Receives the number of scalar ``f`` and ``g`` evaluations.
    return_u : bool
        Also return the full decided ``u`` (frozen coordinates included).
    leaf_llrs : ndarray, shape (B, N), optional
        Filled with the decision LLR of every coordinate of ``u``.

    Returns
    -------
    ndarray of uint8, shape (B, K)
        Decoded message bits, or ``(messages, u)`` when ``return_u``.
    """
    L = _check_llrs(spec, llrs)
    if L.ndim != 2:
        raise ParameterError("llrs must be a 2-D array")
    L = np.clip(L[:, bit_reversal(spec.n_bits)], -LLR_CLAMP, LLR_CLAMP)
    u, _ = _sc(L, spec.info_mask, counter, leaf_llrs, 0)
    msgs = u[:, spec.info_mask]
    return (msgs, u) if return_u else msgs


def decode(spec: CodeSpec, channel_llrs) -> np.ndarray:
    """SC-decode one block of N channel LLRs into its K message bits."""
    L = _check_llrs(spec, channel_llrs)
    if L.ndim != 1:
        raise ParameterError("channel_llrs must be 1-D")
    return decode_batch(spec, L[None, :])[0]


def bits_to_hex(bits) -> str:
    """Pack bits into hex text, index 0 as the most significant bit."""
    arr = np.asarray(bits, dtype=np.uint8)
    pad = (-arr.size) % 4
    arr = np.concatenate([arr, np.zeros(pad, dtype=np.uint8)])
    nibbles = arr.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    return "".join("0123456789abcdef"[v] for v in nibbles)


def hex_to_bits(text: str, length: int) -> np.ndarray:
    """Inverse of :func:`bits_to_hex` for a block of ``length`` bits."""
    if len(text) != -(-length // 4):
        raise ParameterError(f"{len(text)} hex digits cannot hold exactly {length} bits")
    vals = np.array([int(c, 16) for c in text], dtype=np.uint8)
    bits = ((vals[:, None] >> np.array([3, 2, 1, 0])) & 1).astype(np.uint8).ravel()
    if np.any(bits[length:]):
        raise ParameterError("nonzero padding bits in hex text")
    return bits[:length]
