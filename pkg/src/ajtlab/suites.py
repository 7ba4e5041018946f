"""Seeded self-check suites run by ``ajtlab selftest``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ajt import random_nonsingular
from .binomial import BinomialProduct, dense_product, derivation, fp_identity_test, z_identity_holds
from .group_ring import GroupContext, GroupRingElement, Ring, mul_general
from .lemma import kernel_predicates
from .scanner import monomial_invariance_suite

DEFAULT_SEED = 20240611

SMALL_CONTEXTS = [(p, n) for p in (2, 3, 5) for n in (1, 2)]
FP_MODE_SIZES = [(2, 2), (3, 2), (5, 2), (7, 2), (2, 3), (3, 3), (5, 3)]
INVARIANCE_SIZES = [(2, 2), (3, 2), (5, 2)]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def random_element(ctx: GroupContext, ring: Ring, rng: np.random.Generator, bound: int = 3) -> GroupRingElement:
    if ring == "Fp":
        return GroupRingElement(ctx, ring, rng.integers(0, ctx.p, size=ctx.order))
    return GroupRingElement(ctx, ring, rng.integers(-bound, bound + 1, size=ctx.order))


def coset_sum_multiple(y: GroupRingElement, i: int) -> GroupRingElement:
    """y * (1 + g^{e_i} + ... + g^{(p-1)e_i}); constant along e_i-cosets."""
    grid = y.grid.sum(axis=i, keepdims=True)
    full = np.broadcast_to(grid, y.grid.shape)
    return GroupRingElement(y.ctx, y.ring, full.reshape(-1, order="F"))


def nonzero_vectors(p: int, n: int) -> list[tuple[int, ...]]:
    return [v for v in itertools.product(range(p), repeat=n) if any(v)]


def oracle_equivalence_z(seed: int, max_size: int = 6, random_cases: int = 1000) -> SuiteResult:
    passed = total = 0
    for p in (2, 3):
        ctx = GroupContext(p, 2)
        vecs = nonzero_vectors(p, 2)
        for m in range(max_size + 1):
            for combo in itertools.combinations_with_replacement(vecs, m):
                bp = BinomialProduct(ctx, combo)
                total += 1
                passed += z_identity_holds(bp) == dense_product(bp).is_zero()
    rng = np.random.default_rng(seed)
    for _ in range(random_cases):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 9))
        ctx = GroupContext(5, n)
        bp = BinomialProduct(ctx, tuple(tuple(int(c) for c in rng.integers(0, 5, size=n)) for _ in range(m)))
        total += 1
        passed += z_identity_holds(bp) == dense_product(bp).is_zero()
    return SuiteResult("oracle_equivalence_z", passed, total)


def fp_modes(seed: int, cases: int = 500) -> SuiteResult:
    rng = np.random.default_rng(seed)
    passed = 0
    for k in range(cases):
        p, n = FP_MODE_SIZES[k % len(FP_MODE_SIZES)]
        M = random_nonsingular(p, n, rng)
        passed += fp_identity_test(M, "full") == fp_identity_test(M, "reduced")
    return SuiteResult("fp_modes", passed, cases)


def leibniz(seed: int, pairs: int = 500) -> SuiteResult:
    rng = np.random.default_rng(seed)
    passed = total = 0
    for p, n in SMALL_CONTEXTS:
        ctx = GroupContext(p, n)
        for _ in range(pairs):
            x, y = random_element(ctx, "Fp", rng), random_element(ctx, "Fp", rng)
            i = int(rng.integers(0, n))
            lhs = derivation(mul_general(x, y), i)
            rhs = mul_general(derivation(x, i), y) + mul_general(x, derivation(y, i))
            total += 1
            passed += lhs == rhs
    return SuiteResult("leibniz", passed, total)


def kernel(seed: int, random_cases: int = 200, constructed: int = 50) -> SuiteResult:
    rng = np.random.default_rng(seed)
    passed = total = 0
    for p, n in SMALL_CONTEXTS:
        ctx = GroupContext(p, n)
        for k in range(random_cases + constructed):
            i = int(rng.integers(0, n))
            x = random_element(ctx, "Z", rng)
            if k >= random_cases:
                x = coset_sum_multiple(x, i)
            a, b, c = kernel_predicates(x, i)
            total += 1
            passed += a == b == c and (k < random_cases or a)
    return SuiteResult("kernel", passed, total)


def monomial_invariance(seed: int, cases: int = 200) -> SuiteResult:
    passed = total = 0
    for p, n in INVARIANCE_SIZES:
        ok, count = monomial_invariance_suite(p, n, cases, seed)
        passed += ok
        total += count
    return SuiteResult("monomial_invariance", passed, total)


def run_all(seed: int = DEFAULT_SEED, quick: bool = False) -> list[SuiteResult]:
    div = 10 if quick else 1
    runs: list[Callable[[], SuiteResult]] = [
        lambda: oracle_equivalence_z(seed, 4 if quick else 6, 1000 // div),
        lambda: fp_modes(seed, 500 // div),
        lambda: leibniz(seed, 500 // div),
        lambda: kernel(seed, 200 // div, 50 // div),
        lambda: monomial_invariance(seed, 200 // div),
    ]
    return [run() for run in runs]


def format_table(results: list[SuiteResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'suite':<{width}}  result  passed/total"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.ok else 'FAIL':<6}  {r.passed}/{r.total}")
    return "\n".join(lines)
