from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ajtlab.ajt import (
    MatrixVerdict,
    Monomial,
    find_good_vector,
    is_counterexample,
    monomial_invariant,
    nowhere_zero_vectors,
    random_nonsingular,
    transform,
    verdict,
)
from ajtlab.matrix import MatrixFp, SingularMatrixError


def brute_force_good_vector(M):
    p, n = M.p, M.n
    for x in itertools.product(range(1, p), repeat=n):
        y = [sum(a * b for a, b in zip(row, x)) % p for row in M.rows]
        if all(y):
            return x
    return None


def test_counterexample_at_p3():
    v = verdict(MatrixFp.from_rows(3, [[1, 1], [1, 2]]))
    assert v.fp_identity and v.z_identity
    assert v.ajt_witness is None
    assert v.counterexample and v.consistent and not v.violates_conjecture


def test_identity_at_p2_violates():
    v = verdict(MatrixFp.identity(2, 2))
    assert v.fp_identity and not v.z_identity
    assert v.violates_conjecture
    assert v.ajt_witness == (1, 1)


def test_identity_at_p5():
    v = verdict(MatrixFp.identity(5, 2))
    assert not v.fp_identity and not v.z_identity
    assert v.ajt_witness == (1, 1)
    assert not v.counterexample


def test_singular_rejected():
    with pytest.raises(SingularMatrixError):
        verdict(MatrixFp.from_rows(5, [[1, 2], [2, 4]]))


def test_nowhere_zero_vectors_order_and_count():
    X = nowhere_zero_vectors(3, 2)
    assert X.tolist() == [[1, 1], [2, 1], [1, 2], [2, 2]]
    assert nowhere_zero_vectors(5, 3).shape == (64, 3)
    assert nowhere_zero_vectors(2, 4).tolist() == [[1, 1, 1, 1]]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)]), st.integers(0, 10**6))
def test_witness_matches_brute_force_and_z_identity(size, seed):
    M = random_nonsingular(*size, np.random.default_rng(seed))
    expected = brute_force_good_vector(M)
    found = find_good_vector(M)
    assert (found is None) == (expected is None)
    if found is not None:
        assert all(found)
        assert all((np.array(M.rows) @ np.array(found)) % M.p)
    v = verdict(M)
    assert v.consistent
    assert v.z_identity == is_counterexample(M)


def test_verdict_round_trip():
    v = verdict(MatrixFp.identity(3, 2))
    assert MatrixVerdict.from_dict(v.to_dict()) == v
    w = verdict(MatrixFp.from_rows(3, [[1, 1], [1, 2]]))
    assert w.to_dict()["ajt_witness"] is None
    assert MatrixVerdict.from_dict(w.to_dict()) == w


def test_monomial_matrix_and_transform():
    m = Monomial((1, 0), (2, 1))
    assert m.matrix(3).tolist() == [[0, 1], [2, 0]]
    M = MatrixFp.from_rows(3, [[1, 1], [1, 2]])
    ident = Monomial((0, 1), (1, 1))
    assert transform(M, ident, ident) == M
    swapped = transform(M, Monomial((1, 0), (1, 1)), ident)
    assert swapped.rows == ((1, 2), (1, 1))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (5, 2), (3, 3)]), st.integers(0, 10**6))
def test_monomial_invariance(size, seed):
    rng = np.random.default_rng(seed)
    p, n = size
    M = random_nonsingular(p, n, rng)
    assert monomial_invariant(M, Monomial.random(p, n, rng), Monomial.random(p, n, rng))
