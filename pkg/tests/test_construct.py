from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bec_erasure_probabilities, tree_walk_scores
from polarvlc import CodeSpec, ParameterError, compute_reliability, construct, select_info_set


def test_one_stage_split():
    prof = compute_reliability(1, 0.5)
    assert sorted(prof.z) == [0.25, 0.75]


def test_near_perfect_channel_stays_perfect():
    prof = compute_reliability(1, 1e-12)
    assert np.all(prof.z < 1e-11)


# Frozen from the tree-walk oracle; the exact BEC enumeration agrees.
N8_SCORES = [Fraction(v, 256) for v in (255, 225, 207, 81, 175, 49, 31, 1)]


def test_three_stage_scores_frozen():
    np.testing.assert_array_equal(compute_reliability(3, 0.5).z, [float(v) for v in N8_SCORES])


def test_oracles_agree_on_index_order():
    assert tree_walk_scores(3, Fraction(1, 2)) == N8_SCORES
    assert bec_erasure_probabilities(8) == N8_SCORES


@pytest.mark.parametrize("n", [2, 5, 8])
def test_matches_tree_walk(n):
    np.testing.assert_allclose(compute_reliability(n, 0.3).z, tree_walk_scores(n, 0.3), rtol=1e-12)


def test_select_n1():
    spec = select_info_set(compute_reliability(1, 0.5), 1)
    assert spec.info_set == (1,)


def test_select_all_is_rate_one():
    spec = select_info_set(compute_reliability(4, 0.5), 16)
    assert spec.info_set == tuple(range(16))
    assert spec.frozen_set == ()


def test_select_512_of_1024_matches_oracle():
    scores = tree_walk_scores(10, 0.5)
    expected = sorted(sorted(range(1024), key=lambda i: (scores[i], i))[:512])
    assert list(construct(1024, 512).info_set) == expected


def test_ties_go_to_lower_index():
    prof = compute_reliability(2, 0.5)
    tied = type(prof)(2, np.array([0.5, 0.1, 0.1, 0.9]), 0.5)
    assert select_info_set(tied, 2).info_set == (1, 2)
    assert select_info_set(tied, 1).info_set == (1,)


@pytest.mark.parametrize("n,z0", [(0, 0.5), (-1, 0.5), (99, 0.5), (3, 0.0), (3, 1.0), (3, 1.5)])
def test_bad_parameters(n, z0):
    with pytest.raises(ParameterError):
        compute_reliability(n, z0)


@pytest.mark.parametrize("k", [0, 9, -1])
def test_bad_k(k):
    with pytest.raises(ParameterError):
        select_info_set(compute_reliability(3, 0.5), k)


def test_deterministic():
    a, b = construct(1024, 300), construct(1024, 300)
    assert a == b
    np.testing.assert_array_equal(compute_reliability(10, 0.5).z, compute_reliability(10, 0.5).z)


def test_polarization_trend():
    def polarized(n):
        z = compute_reliability(n, 0.5).z
        return np.mean((z < 0.01) | (z > 0.99))
    fractions = [polarized(n) for n in range(4, 11)]
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))


@given(st.integers(1, 12), st.floats(0.001, 0.999))
def test_split_conserves_sum(n, z0):
    parent = compute_reliability(n, z0).z
    child = compute_reliability(n + 1, z0).z
    np.testing.assert_allclose(child[0::2] + child[1::2], 2 * parent, rtol=1e-12)


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 1 << n))))
def test_rate_identity(nk):
    n, k = nk
    spec = construct(1 << n, k)
    assert len(spec.info_set) / spec.n_bits == k / (1 << n)
    assert set(spec.info_set).isdisjoint(spec.frozen_set)
    assert len(spec.info_set) + len(spec.frozen_set) == spec.n_bits


def test_codespec_invariants():
    with pytest.raises(ParameterError):
        CodeSpec(6, 2, (0, 1))
    with pytest.raises(ParameterError):
        CodeSpec(8, 2, (1, 1))
    with pytest.raises(ParameterError):
        CodeSpec(8, 2, (3, 1))
    with pytest.raises(ParameterError):
        CodeSpec(8, 1, (8,))
    with pytest.raises(ParameterError):
        CodeSpec(8, 1, (7,), frozen_value=1)


@pytest.mark.parametrize("N,K", [(2, 1), (64, 17), (1024, 512)])
def test_text_round_trip(N, K):
    spec = construct(N, K)
    text = spec.to_text()
    first, second = text.splitlines()
    assert first == f"{N} {K} 0"
    assert second.split() == [str(i) for i in spec.info_set]
    assert CodeSpec.from_text(text) == spec
    assert CodeSpec.from_text(text).to_text() == text


def test_text_rejects_garbage():
    with pytest.raises(ParameterError):
        CodeSpec.from_text("8 2 0\n1 x\n")
    with pytest.raises(ParameterError):
        CodeSpec.from_text("8 2 0\n")
