from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ajtlab.ajt import random_nonsingular
from ajtlab.binomial import BinomialProduct, z_identity_holds
from ajtlab.group_ring import GroupContext, GroupRingElement
from ajtlab.lemma import (
    FeasibilityError,
    b1_direct,
    b1_via_decomposition,
    build_vprime,
    check_all,
    check_factorization,
    check_feasible,
    derivation_cascade,
    expansion_check,
    is_good_point,
    kernel_equivalence_check,
    kernel_predicates,
    lemma_budget,
    split_rows,
    ut_identities,
    verify_bases,
    vprime_dimension,
    xprime_search,
)
from ajtlab.matrix import MatrixFp, SingularMatrixError
from ajtlab.suites import coset_sum_multiple, random_element

CEX3 = MatrixFp.from_rows(3, [[1, 1], [1, 2]])
M2 = MatrixFp.from_rows(2, [[1, 1], [1, 0]])

UNCONDITIONAL_CORE = ["expansion_check", "b1_routes_agree", "b1_vanishes", "verify_bases", "ut_identities", "factorization"]


def test_dimension_and_budget(monkeypatch):
    assert [vprime_dimension(n) for n in (1, 2, 3)] == [1, 6, 15]
    check_feasible(3, 2)
    check_feasible(2, 3)
    with pytest.raises(FeasibilityError, match=r"3\^15 = 14348907 coefficients.*--allow-large"):
        check_feasible(3, 3)
    check_feasible(3, 3, allow_large=True)
    with pytest.raises(FeasibilityError) as err:
        check_feasible(5, 3, allow_large=True)
    assert "--allow-large" not in str(err.value)
    with pytest.raises(FeasibilityError):
        check_feasible(5, 2, budget=1000)
    assert lemma_budget(budget=10**9) == 3**15
    monkeypatch.setenv("AJTLAB_LEMMA_BUDGET", "100")
    with pytest.raises(FeasibilityError):
        check_feasible(3, 2)
    assert lemma_budget() == 100


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (5, 2), (2, 3), (3, 3)]), st.integers(0, 10**6), st.data())
def test_split_and_expansion(size, seed, data):
    M = random_nonsingular(*size, np.random.default_rng(seed))
    i = data.draw(st.integers(0, M.n - 1))
    split = split_rows(M, i)
    assert split.reconstruct(M.p) == M.rows
    assert all(a[i] == 0 for a in split.a_prime)
    assert expansion_check(M, i)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (5, 2), (2, 3), (3, 3)]), st.integers(0, 10**6), st.data())
def test_b1_routes_agree(size, seed, data):
    M = random_nonsingular(*size, np.random.default_rng(seed))
    i = data.draw(st.integers(0, M.n - 1))
    assert b1_direct(M, i) == b1_via_decomposition(M, i)


@pytest.mark.parametrize("M", [CEX3, M2], ids=["p3", "p2"])
@pytest.mark.parametrize("i", [0, 1])
def test_vprime_construction(M, i):
    c = build_vprime(M, i)
    assert c.dim == 6 and c.big_ctx.order == M.p**6
    assert len(c.B1) == len(c.B2) == 6
    assert verify_bases(c)
    assert all(ut_identities(c))
    assert check_factorization(c)
    assert b1_direct(M, i).is_zero()
    assert sorted(c.permutation) == list(range(M.n))
    assert set(c.block_coords(0)) | set(c.block_coords(1)) | set(range(M.n)) <= set(range(c.dim))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2)]), st.integers(0, 10**6))
def test_bases_always_span(size, seed):
    M = random_nonsingular(*size, np.random.default_rng(seed))
    assert verify_bases(build_vprime(M, 0))


def test_xprime_search_agrees_with_brute_force():
    for M in [CEX3, M2, MatrixFp.identity(3, 2), MatrixFp.identity(2, 2)]:
        c = build_vprime(M, 0)
        found = xprime_search(c)
        if found is not None:
            assert is_good_point(c, found)
        ctx = c.big_ctx
        exists = any(is_good_point(c, ctx.vector(k)) for k in range(ctx.order))
        assert (found is not None) == exists


def test_pipeline_on_p3_counterexample():
    for i in (0, 1):
        r = check_all(CEX3, i)
        assert r.unconditional_ok
        for name in UNCONDITIONAL_CORE:
            assert r.steps[name].status == "holds", name
        assert r.steps["fp_identity"].status == "holds"
        # the counterexample refutes the lemma's conclusion at p = 3
        assert r.steps["lemma_conclusion"].status == "fails"
        assert r.steps["lemma_conclusion"].conditional


def test_pipeline_on_p2():
    r = check_all(M2, 0)
    assert r.unconditional_ok
    for name in UNCONDITIONAL_CORE:
        assert r.steps[name].status == "holds", name
    assert r.to_dict()["kind"] == "lemma"


def test_pipeline_gating_when_fp_fails():
    r = check_all(MatrixFp.identity(5, 2), 0)
    assert r.steps["fp_identity"].status == "fails"
    for name in ("b1_vanishes", "ut_identities", "factorization", "u_vanishes", "submatrix_identity"):
        assert r.steps[name].status == "skipped"
    assert r.unconditional_ok


def test_pipeline_input_errors():
    with pytest.raises(SingularMatrixError):
        check_all(MatrixFp.from_rows(3, [[1, 1], [2, 2]]), 0)
    with pytest.raises(ValueError):
        check_all(CEX3, 2)
    with pytest.raises(FeasibilityError):
        check_all(MatrixFp.identity(3, 3), 0)


def test_derivation_cascade_statuses():
    steps = derivation_cascade(M2)
    assert all(s.status == "holds" for s in steps.values())
    steps = derivation_cascade(CEX3)
    assert steps["derivation_expansion"].status == "holds"
    assert steps["reduced_identity"].status == "fails"
    assert all(s.status == "skipped" for s in derivation_cascade(MatrixFp.identity(5, 2)).values())


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)])
def test_kernel_predicates(p, n):
    ctx = GroupContext(p, n)
    rng = np.random.default_rng(p * 7 + n)
    for _ in range(30):
        i = int(rng.integers(0, n))
        x = random_element(ctx, "Z", rng)
        assert kernel_equivalence_check(x, i)
        member = coset_sum_multiple(x, i)
        assert kernel_predicates(member, i) == (True, True, True)
        # a single perturbation leaves the kernel
        bumped = member + GroupRingElement.one(ctx)
        assert kernel_predicates(bumped, i) == (False, False, False)


def test_crosscheck_with_character_criterion():
    # x' exists in V' exactly when the product over B_1 and B_2 is nonzero over Z
    for M in [CEX3, M2]:
        r = check_all(M, 0)
        c = build_vprime(M, 0)
        z = z_identity_holds(BinomialProduct(c.big_ctx, c.B1 + c.B2))
        assert r.steps["xprime_crosscheck"].status == "holds"
        assert r.steps["xprime_crosscheck"].detail["z_identity"] == z
        assert (r.steps["xprime_search"].status == "holds") == (not z)
