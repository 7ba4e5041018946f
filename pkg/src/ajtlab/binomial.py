"""Products of binomials (1 - g^v) and the tools used to test them.

Three ways of looking at a product  P = prod_j (1 - g^{v_j}):

* densely, as a coefficient table in Z[G] or F_p[G];
* through characters: over Z the product vanishes iff every x in F_p^n is
  orthogonal (mod p) to some v_j, because the character attached to x sends
  P to prod_j (1 - w^{<x, v_j>}) with w a primitive p-th root of unity;
* through the truncated polynomial model F_p[G] = F_p[t_1..t_n]/(t_i^p),
  t_i = 1 - g^{e_i}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Literal, Sequence

import numpy as np

from .group_ring import (
    GroupContext,
    GroupRingElement,
    Ring,
    Vector,
    mul_binomial,
    restrict_to_hyperplane,
)
from .matrix import MatrixFp

FpMode = Literal["full", "reduced"]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class BinomialProduct:
    ctx: GroupContext
    factors: tuple[Vector, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.ctx.validate(v) for v in self.factors))

    def __len__(self) -> int:
        return len(self.factors)

    def with_factors(self, extra: Sequence[Sequence[int]]) -> BinomialProduct:
        return BinomialProduct(self.ctx, self.factors + tuple(tuple(v) for v in extra))


def standard_product(M: MatrixFp) -> BinomialProduct:
    """prod_i (1 - g^{e_i}) * prod_i (1 - g^{a_i}) for the rows a_i of M."""
    ctx = M.ctx
    basis = [ctx.basis(i) for i in range(ctx.n)]
    return BinomialProduct(ctx, tuple(basis) + M.rows)


def dense_product(bp: BinomialProduct, ring: Ring = "Z") -> GroupRingElement:
    acc = GroupRingElement.one(bp.ctx, ring)
    for v in bp.factors:
        acc = mul_binomial(acc, v)
    if ring == "Z":
        # each factor at most doubles the L1 norm
        assert acc.l1() <= 2 ** len(bp.factors), "L1 bound violated"
    return acc


def _first_good(bp: BinomialProduct) -> int | None:
    """Index of the first x that is non-orthogonal to every factor."""
    ctx = bp.ctx
    V = np.array(bp.factors, dtype=np.int64).reshape(len(bp.factors), ctx.n)
    for start in range(0, ctx.order, _CHUNK):
        stop = min(start + _CHUNK, ctx.order)
        X = ctx.coords_range(start, stop)
        hits = np.flatnonzero(np.all((X @ V.T) % ctx.p != 0, axis=1))
        if hits.size:
            return start + int(hits[0])
    return None


def z_identity_holds(bp: BinomialProduct) -> bool:
    """True iff prod_j (1 - g^{v_j}) == 0 in Z[G].

    Character criterion: the product vanishes exactly when every x in F_p^n
    satisfies <x, v_j> = 0 (mod p) for at least one factor.
    """
    return _first_good(bp) is None


def good_x_witness(
    bp: BinomialProduct,
    *,
    randomized: bool = False,
    samples: int = 4096,
    rng: np.random.Generator | None = None,
) -> Vector | None:
    """Smallest x (in index order) with <x, v_j> != 0 for every factor.

    With ``randomized=True`` only ``samples`` random points are tried, so
    ``None`` then means "not found" rather than "does not exist".
    """
    ctx = bp.ctx
    if randomized:
        rng = rng if rng is not None else np.random.default_rng(0)
        V = np.array(bp.factors, dtype=np.int64).reshape(len(bp.factors), ctx.n)
        X = rng.integers(0, ctx.p, size=(samples, ctx.n))
        good = np.flatnonzero(np.all((X @ V.T) % ctx.p != 0, axis=1))
        return tuple(int(c) for c in X[good[0]]) if good.size else None
    first = _first_good(bp)
    return None if first is None else ctx.vector(first)


# --- truncated polynomial model -------------------------------------------


def _binomial_power_series(a: int, p: int, d: int) -> np.ndarray:
    """Coefficients of (1 - t)^a mod p up to degree d-1."""
    return np.array([(comb(a, m) * (-1) ** m) % p for m in range(d)], dtype=np.int64)


def truncated_factor(v: Sequence[int], p: int, d: int) -> np.ndarray:
    """1 - g^v written in t_k = 1 - g^{e_k}, kept modulo (t_k^d)."""
    out = np.ones((1,) * 0, dtype=np.int64)
    for a in v:
        out = np.multiply.outer(out, _binomial_power_series(int(a), p, d))
    out = (-out) % p
    out[(0,) * len(v)] = (out[(0,) * len(v)] + 1) % p
    return out


def truncated_mul(f: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    """Product in F_p[t_1..t_n]/(t_k^d) for dense arrays of shape (d,)*n."""
    d = f.shape[0] if f.ndim else 1
    out = np.zeros_like(g)
    for u in np.argwhere(f):
        src = tuple(slice(0, d - int(c)) for c in u)
        dst = tuple(slice(int(c), d) for c in u)
        out[dst] = (out[dst] + int(f[tuple(u)]) * g[src]) % p
    return out


def fp_identity_test(M: MatrixFp, mode: FpMode = "reduced") -> bool:
    """Does prod (1 - g^{e_i}) * prod (1 - g^{a_i}) vanish in F_p[G]?

    ``full`` multiplies out densely in F_p[G].  ``reduced`` uses the
    truncated polynomial model: the e_i-part is t_1...t_n, so the identity
    holds iff prod (1 - g^{a_i}) is 0 modulo (t_k^{p-1}), a table of
    (p-1)^n entries.
    """
    M.require_nonsingular()
    if mode == "full":
        return dense_product(standard_product(M), "Fp").is_zero()
    if mode != "reduced":
        raise ValueError(f"unknown mode {mode!r}")
    p, n = M.p, M.n
    d = p - 1
    acc = np.zeros((d,) * n, dtype=np.int64)
    acc[(0,) * n] = 1
    for row in M.rows:
        acc = truncated_mul(truncated_factor(row, p, d), acc, p)
        if not acc.any():
            return True
    return not acc.any()


# --- t-adic decomposition and the derivation ------------------------------


@dataclass(frozen=True)
class TDecomposition:
    """x = sum_k (1 - g^{e_i})^k * b_k with every b_k supported on {v_i = 0}."""

    direction: int
    parts: tuple[GroupRingElement, ...]

    def reconstruct(self) -> GroupRingElement:
        i = self.direction
        e_i = self.parts[0].ctx.basis(i)
        acc = self.parts[-1]
        for b in reversed(self.parts[:-1]):
            acc = mul_binomial(acc, e_i) + b
        return acc

    def component(self, k: int) -> GroupRingElement:
        """b_k as an element of the group ring of the complementary subgroup."""
        return restrict_to_hyperplane(self.parts[k], self.direction)


def _change_of_basis(p: int) -> np.ndarray:
    # g^j = (1 - t)^j = sum_k C(j, k) (-1)^k t^k
    return np.array(
        [[(comb(j, k) * (-1) ** k) % p for j in range(p)] for k in range(p)],
        dtype=np.int64,
    )


def t_decompose(x: GroupRingElement, i: int) -> TDecomposition:
    if x.ring != "Fp":
        raise ValueError("t_decompose works in F_p[G]")
    ctx = x.ctx
    p = ctx.p
    along = np.moveaxis(x.grid, i, 0)
    coeffs = np.tensordot(_change_of_basis(p), along, axes=(1, 0)) % p
    parts = []
    for k in range(p):
        grid = np.zeros(ctx.shape, dtype=np.int64)
        sl = [slice(None)] * ctx.n
        sl[i] = 0
        grid[tuple(sl)] = coeffs[k]
        parts.append(GroupRingElement(ctx, "Fp", grid.reshape(-1, order="F")))
    return TDecomposition(i, tuple(parts))


def derivation(x: GroupRingElement, i: int) -> GroupRingElement:
    """The derivation x_v g^v -> v_i x_v g^v on F_p[G]."""
    if x.ring != "Fp":
        raise ValueError("derivation is defined on F_p[G]")
    ctx = x.ctx
    weights = np.arange(ctx.p, dtype=np.int64).reshape(
        tuple(ctx.p if k == i else 1 for k in range(ctx.n))
    )
    return GroupRingElement(ctx, "Fp", ((x.grid * weights) % ctx.p).reshape(-1, order="F"))
