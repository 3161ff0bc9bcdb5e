"""Independent reference computations used to check the main implementation.

Nothing here imports from polarvlc; each oracle works from first principles.
"""

from fractions import Fraction
from itertools import product

import numpy as np


def bitrev_matrix(N):
    n = N.bit_length() - 1
    B = np.zeros((N, N), dtype=np.uint8)
    for i in range(N):
        r = int(format(i, f"0{n}b")[::-1], 2) if n else 0
        B[i, r] = 1
    return B


def generator_matrix(N):
    """Dense ``B_N F^{(x)n}`` as a 0/1 matrix."""
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    K = np.ones((1, 1), dtype=np.uint8)
    while K.shape[0] < N:
        K = np.kron(K, F)
    return (bitrev_matrix(N).astype(int) @ K.astype(int) % 2).astype(np.uint8)


def matrix_encode(u):
    u = np.asarray(u, dtype=int)
    return (u @ generator_matrix(u.size).astype(int) % 2).astype(np.uint8)


def tree_walk_scores(n, z0):
    """Score of coordinate i: apply the split for each bit of i, MSB first."""
    out = []
    for i in range(1 << n):
        z = z0
        for b in format(i, f"0{n}b"):
            z = 2 * z - z * z if b == "0" else z * z
        out.append(z)
    return out


def _gf2_rank(rows):
    rows = [int("".join(map(str, r)), 2) for r in rows if any(r)]
    rank = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
        rows = [r for r in rows if r]
        rank += 1
    return rank


def bec_erasure_probabilities(N, eps=Fraction(1, 2)):
    """
    Exact erasure probability of every SC coordinate channel on a BEC(eps),
    by enumerating all erasure patterns. For the BEC this equals the
    Bhattacharyya parameter.
    """
    G = generator_matrix(N)
    probs = [Fraction(0)] * N
    for pattern in product((0, 1), repeat=N):
        keep = [j for j in range(N) if not pattern[j]]
        w = eps ** sum(pattern) * (1 - eps) ** (N - sum(pattern))
        Gs = G[:, keep]
        for i in range(N):
            later = [Gs[j] for j in range(i + 1, N)]
            if _gf2_rank(later + [Gs[i]]) == _gf2_rank(later):
                probs[i] += w
    return probs


def _lr(y, i, u):
    # y: channel LRs W(y|0)/W(y|1); i: 1-based coordinate; u: decided u_1..u_{i-1}
    N = len(y)
    if N == 1:
        return y[0]
    j = (i + 1) // 2
    prev = u[:2 * j - 2]
    uo, ue = prev[0::2], prev[1::2]
    a = _lr(y[:N // 2], j, [p ^ q for p, q in zip(uo, ue)])
    b = _lr(y[N // 2:], j, ue)
    if i % 2:
        return (a * b + 1) / (a + b)
    return a ** (1 - 2 * u[2 * j - 2]) * b


def lr_sc_decode(channel_llrs, info_set):
    """
    Literal LR-domain SC decoder built from the two textbook recursions.

    Returns (u_hat, decision_lrs), both indexed from 0.
    """
    y = [float(np.exp(v)) for v in channel_llrs]
    u, lrs = [], []
    for i in range(len(y)):
        L = _lr(y, i + 1, u)
        lrs.append(L)
        u.append((0 if L >= 1 else 1) if i in info_set else 0)
    return u, lrs


def brute_run_histogram(bits):
    hist = {}
    i = 0
    while i < len(bits):
        j = i
        while j < len(bits) and bits[j] == bits[i]:
            j += 1
        hist[j - i] = hist.get(j - i, 0) + 1
        i = j
    return hist
