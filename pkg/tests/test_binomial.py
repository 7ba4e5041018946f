from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ajtlab.ajt import random_nonsingular
from ajtlab.binomial import (
    BinomialProduct,
    dense_product,
    derivation,
    fp_identity_test,
    good_x_witness,
    standard_product,
    t_decompose,
    truncated_factor,
    truncated_mul,
    z_identity_holds,
)
from ajtlab.group_ring import GroupContext, GroupRingElement, binomial, monomial, mul_binomial, mul_general
from ajtlab.matrix import MatrixFp, SingularMatrixError


@st.composite
def products(draw, sizes=((2, 2), (3, 2), (5, 2), (2, 3), (3, 3), (5, 1))):
    p, n = draw(st.sampled_from(sizes))
    vec = st.tuples(*[st.integers(0, p - 1)] * n)
    factors = draw(st.lists(vec, max_size=7))
    return BinomialProduct(GroupContext(p, n), tuple(factors))


@st.composite
def fp_elements(draw, sizes=((2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2))):
    p, n = draw(st.sampled_from(sizes))
    ctx = GroupContext(p, n)
    coeffs = draw(st.lists(st.integers(0, p - 1), min_size=ctx.order, max_size=ctx.order))
    return GroupRingElement(ctx, "Fp", coeffs)


def brute_force_witness_exists(bp):
    p, n = bp.ctx.p, bp.ctx.n
    for x in itertools.product(range(p), repeat=n):
        if all(sum(a * b for a, b in zip(x, v)) % p for v in bp.factors):
            return True
    return False


@settings(max_examples=150, deadline=None)
@given(products())
def test_character_criterion_matches_dense_product(bp):
    dense = dense_product(bp)
    assert z_identity_holds(bp) == dense.is_zero()
    assert z_identity_holds(bp) == (not brute_force_witness_exists(bp))
    assert dense.l1() <= 2 ** len(bp)


@settings(max_examples=100, deadline=None)
@given(products())
def test_witness_is_valid(bp):
    p = bp.ctx.p
    x = good_x_witness(bp)
    if x is None:
        assert z_identity_holds(bp)
    else:
        assert all(sum(a * b for a, b in zip(x, v)) % p for v in bp.factors)
    y = good_x_witness(bp, randomized=True, samples=64, rng=np.random.default_rng(1))
    if y is not None:
        assert all(sum(a * b for a, b in zip(y, v)) % p for v in bp.factors)


def test_known_products():
    M = MatrixFp.from_rows(3, [[1, 1], [1, 2]])
    bp = standard_product(M)
    assert bp.factors == ((1, 0), (0, 1), (1, 1), (1, 2))
    assert z_identity_holds(bp)
    assert good_x_witness(bp) is None
    assert not z_identity_holds(standard_product(MatrixFp.identity(5, 2)))
    assert good_x_witness(standard_product(MatrixFp.identity(5, 2))) == (1, 1)
    # the empty product is 1
    assert not z_identity_holds(BinomialProduct(GroupContext(3, 2), ()))


@pytest.mark.parametrize(
    "p,rows,expected",
    [
        (3, [[1, 1], [1, 2]], True),
        (5, [[1, 0], [0, 1]], False),
        (2, [[1, 0], [0, 1]], True),
        (2, [[1, 1], [1, 0]], True),
        (7, [[1, 2], [3, 4]], False),
    ],
)
def test_fp_identity_examples(p, rows, expected):
    M = MatrixFp.from_rows(p, rows)
    assert fp_identity_test(M, "full") is expected
    assert fp_identity_test(M, "reduced") is expected


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (5, 2), (7, 2), (2, 3), (3, 3), (5, 3)]), st.integers(0, 10**6))
def test_fp_modes_agree(size, seed):
    M = random_nonsingular(*size, np.random.default_rng(seed))
    assert fp_identity_test(M, "full") == fp_identity_test(M, "reduced")


def test_fp_identity_rejects_singular_and_unknown_mode():
    with pytest.raises(SingularMatrixError):
        fp_identity_test(MatrixFp.from_rows(3, [[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        fp_identity_test(MatrixFp.identity(3, 2), "sparse")


def test_p2_reduced_table_is_trivial():
    for M in [MatrixFp.identity(2, 3), MatrixFp.from_rows(2, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])]:
        assert fp_identity_test(M, "reduced")


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (5, 2), (3, 3)])
def test_truncated_model_is_a_homomorphism(p, n):
    rng = np.random.default_rng(p * 10 + n)
    for _ in range(20):
        u = tuple(int(c) for c in rng.integers(0, p, size=n))
        v = tuple(int(c) for c in rng.integers(0, p, size=n))
        w = tuple((a + b) % p for a, b in zip(u, v))
        fu, fv, fw = (truncated_factor(x, p, p) for x in (u, v, w))
        # 1 - g^{u+v} = (1 - g^u) + (1 - g^v) - (1 - g^u)(1 - g^v)
        assert np.array_equal(fw, (fu + fv - truncated_mul(fu, fv, p)) % p)


def test_truncated_factor_of_basis_vector_is_t():
    f = truncated_factor((0, 1, 0), 5, 5)
    expected = np.zeros((5, 5, 5), dtype=np.int64)
    expected[0, 1, 0] = 1
    assert np.array_equal(f, expected)
    assert not truncated_factor((0, 0), 3, 3).any()


@settings(max_examples=80, deadline=None)
@given(fp_elements(), st.data())
def test_t_decomposition_reconstructs(x, data):
    i = data.draw(st.integers(0, x.ctx.n - 1))
    dec = t_decompose(x, i)
    assert len(dec.parts) == x.ctx.p
    assert dec.reconstruct() == x
    for b in dec.parts:
        assert all(v[i] == 0 for v in b.support())


def test_t_decomposition_of_powers():
    ctx = GroupContext(5, 2)
    t2 = mul_binomial(binomial(ctx, (0, 1), "Fp"), (0, 1))
    dec = t_decompose(t2, 1)
    assert [b.is_zero() for b in dec.parts] == [True, True, False, True, True]
    assert dec.component(2) == GroupRingElement.one(GroupContext(5, 1), "Fp")
    g = monomial(ctx, (2, 3), "Fp")
    comp0 = t_decompose(g, 1).component(0)
    assert comp0 == monomial(GroupContext(5, 1), (2,), "Fp")


@settings(max_examples=80, deadline=None)
@given(fp_elements(), st.integers(0, 10**6), st.data())
def test_leibniz_rule(x, seed, data):
    i = data.draw(st.integers(0, x.ctx.n - 1))
    rng = np.random.default_rng(seed)
    y = GroupRingElement(x.ctx, "Fp", rng.integers(0, x.ctx.p, size=x.ctx.order))
    lhs = derivation(mul_general(x, y), i)
    rhs = mul_general(derivation(x, i), y) + mul_general(x, derivation(y, i))
    assert lhs == rhs


def test_derivation_values():
    ctx = GroupContext(3, 2)
    g = monomial(ctx, (2, 1), "Fp")
    assert derivation(g, 0) == g.scale(2)
    assert derivation(g, 1) == g
    assert derivation(GroupRingElement.one(ctx, "Fp"), 0).is_zero()
    with pytest.raises(ValueError):
        derivation(monomial(ctx, (1, 1)), 0)
