"""Dense group rings Z[G] and F_p[G] for the elementary abelian group G = F_p^n.

Elements are stored as a flat coefficient table of length p^n.  The vector
``v = (v_1, ..., v_n)`` lives at ``index(v) = v_1 + v_2*p + ... + v_n*p^(n-1)``,
so reshaping the table in Fortran order gives an n-dimensional grid whose
axis ``k`` is coordinate ``v_{k+1}``.

Integer coefficients are held in int64 while every entry stays below 2**62 in
magnitude and are promoted to Python ints (object arrays) otherwise, so no
operation ever wraps silently.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np

Ring = Literal["Z", "Fp"]
Vector = tuple[int, ...]

RINGS = ("Z", "Fp")
MAX_ORDER_ENV = "AJTLAB_MAX_ORDER"
DEFAULT_MAX_ORDER = 1 << 25

# int64 entries below this bound can be added or subtracted without overflow.
_SAFE = 1 << 62


class ContextError(ValueError):
    """Invalid (p, n) or a context that would not fit the memory budget."""


class RingMismatchError(ValueError):
    """Operands live in different contexts or coefficient rings."""


class IdealMembershipError(ValueError):
    """An element is not divisible by the requested binomial."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def max_order() -> int:
    """Largest admissible p^n; overridable through ``AJTLAB_MAX_ORDER``."""
    raw = os.environ.get(MAX_ORDER_ENV)
    if raw is None:
        return DEFAULT_MAX_ORDER
    try:
        return int(raw)
    except ValueError as exc:
        raise ContextError(f"{MAX_ORDER_ENV}={raw!r} is not an integer") from exc


@dataclass(frozen=True)
class GroupContext:
    """The group G = F_p^n together with its mixed-radix index map."""

    p: int
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ContextError(f"{self.p} is not prime")
        if not isinstance(self.n, int) or self.n < 1:
            raise ContextError(f"dimension must be >= 1, got {self.n}")
        if self.p**self.n > max_order():
            raise ContextError(
                f"p^n = {self.p}^{self.n} = {self.p**self.n} coefficients exceeds "
                f"the budget of {max_order()} (set {MAX_ORDER_ENV} to override)"
            )

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.p,) * self.n

    @cached_property
    def radix(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    @cached_property
    def coords(self) -> np.ndarray:
        """``coords[index(v)] == v`` for every v, as an (order, n) array."""
        idx = np.arange(self.order, dtype=np.int64)
        out = (idx[:, None] // self.radix[None, :]) % self.p
        out.flags.writeable = False
        return out

    def coords_range(self, start: int, stop: int) -> np.ndarray:
        """Rows ``start:stop`` of :attr:`coords` without materialising the full table."""
        idx = np.arange(start, stop, dtype=np.int64)
        return (idx[:, None] // self.radix[None, :]) % self.p

    def validate(self, v: Sequence[int]) -> Vector:
        v = tuple(int(c) for c in v)
        if len(v) != self.n:
            raise ContextError(f"vector {v} has length {len(v)}, expected {self.n}")
        if any(c < 0 or c >= self.p for c in v):
            raise ContextError(f"vector {v} has coordinates outside [0, {self.p - 1}]")
        return v

    def index(self, v: Sequence[int]) -> int:
        return int(sum(c * self.p**k for k, c in enumerate(self.validate(v))))

    def vector(self, index: int) -> Vector:
        return tuple(int(c) for c in self.coords[index])

    def basis(self, i: int) -> Vector:
        """The standard basis vector e_{i+1} (``i`` is 0-based)."""
        if not 0 <= i < self.n:
            raise ContextError(f"direction {i} outside [0, {self.n - 1}]")
        return tuple(1 if k == i else 0 for k in range(self.n))

    def indices_of(self, vectors: np.ndarray) -> np.ndarray:
        """Vectorised index map for an array of shape (..., n)."""
        return (np.asarray(vectors, dtype=np.int64) % self.p) @ self.radix


def make_context(p: int, n: int) -> GroupContext:
    return GroupContext(p, n)


def _check_ring(ring: str) -> None:
    if ring not in RINGS:
        raise RingMismatchError(f"unknown ring {ring!r}; expected one of {RINGS}")


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(c)) for c in a)
    return int(np.abs(a).max())


def _normalize_z(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        if _maxabs(a) < _SAFE:
            return a.astype(np.int64)
        return a
    if a.dtype != np.int64:
        a = a.astype(np.int64)
    return a


class GroupRingElement:
    """An element of Z[G] or F_p[G] as a read-only dense coefficient table."""

    __slots__ = ("ctx", "ring", "coeffs")

    def __init__(self, ctx: GroupContext, ring: Ring, coeffs: Iterable[int] | np.ndarray):
        _check_ring(ring)
        arr = np.array(coeffs, copy=True)
        if arr.shape != (ctx.order,):
            arr = arr.reshape(-1) if arr.size == ctx.order else arr
        if arr.shape != (ctx.order,):
            raise ContextError(f"expected {ctx.order} coefficients, got shape {arr.shape}")
        if ring == "Fp":
            if arr.dtype == object:
                arr = np.array([int(c) % ctx.p for c in arr], dtype=np.int64)
            else:
                arr = arr.astype(np.int64) % ctx.p
        else:
            if arr.dtype.kind == "f":
                raise TypeError("integer coefficients required")
            if arr.dtype != object and arr.dtype.kind == "u" and arr.dtype.itemsize >= 8:
                arr = arr.astype(object)
            arr = _normalize_z(arr)
        arr.flags.writeable = False
        self.ctx = ctx
        self.ring = ring
        self.coeffs = arr

    # --- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ctx: GroupContext, ring: Ring = "Z") -> GroupRingElement:
        return cls(ctx, ring, np.zeros(ctx.order, dtype=np.int64))

    @classmethod
    def one(cls, ctx: GroupContext, ring: Ring = "Z") -> GroupRingElement:
        return monomial(ctx, (0,) * ctx.n, ring)

    # --- views ------------------------------------------------------------

    @property
    def grid(self) -> np.ndarray:
        return self.coeffs.reshape(self.ctx.shape, order="F")

    def coefficient(self, v: Sequence[int]) -> int:
        return int(self.coeffs[self.ctx.index(v)])

    def support(self) -> list[Vector]:
        return [self.ctx.vector(int(k)) for k in np.flatnonzero(self.coeffs != 0)]

    def l1(self) -> int:
        if self.coeffs.dtype == object:
            return sum(abs(int(c)) for c in self.coeffs)
        return int(np.abs(self.coeffs).sum(dtype=object))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def tolist(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    # --- arithmetic -------------------------------------------------------

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        return add(self, other)

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return add(self, -other)

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.ctx, self.ring, -self.coeffs)

    def __mul__(self, other: GroupRingElement) -> GroupRingElement:
        return mul_general(self, other)

    def scale(self, c: int) -> GroupRingElement:
        if self.ring == "Fp":
            return GroupRingElement(self.ctx, "Fp", (self.coeffs * (c % self.ctx.p)) % self.ctx.p)
        if _maxabs(self.coeffs) * abs(c) >= _SAFE:
            return GroupRingElement(self.ctx, "Z", self.coeffs.astype(object) * c)
        return GroupRingElement(self.ctx, "Z", self.coeffs * c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.ring == other.ring
            and bool(np.all(self.coeffs == other.coeffs))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        terms = []
        for k in np.flatnonzero(self.coeffs != 0)[:8]:
            terms.append(f"{int(self.coeffs[k])}*g^{self.ctx.vector(int(k))}")
        more = " + ..." if np.count_nonzero(self.coeffs) > 8 else ""
        body = " + ".join(terms) + more if terms else "0"
        return f"<{self.ring}[F_{self.ctx.p}^{self.ctx.n}] {body}>"


def _same_space(x: GroupRingElement, y: GroupRingElement) -> None:
    if x.ctx != y.ctx:
        raise RingMismatchError(f"context mismatch: {x.ctx} vs {y.ctx}")
    if x.ring != y.ring:
        raise RingMismatchError(f"ring mismatch: {x.ring} vs {y.ring}")


def monomial(ctx: GroupContext, v: Sequence[int], ring: Ring = "Z") -> GroupRingElement:
    """The group element g^v."""
    coeffs = np.zeros(ctx.order, dtype=np.int64)
    coeffs[ctx.index(v)] = 1
    return GroupRingElement(ctx, ring, coeffs)


def binomial(ctx: GroupContext, v: Sequence[int], ring: Ring = "Z") -> GroupRingElement:
    """The element 1 - g^v."""
    return mul_binomial(GroupRingElement.one(ctx, ring), v)


def add(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    _same_space(x, y)
    if x.ring == "Fp":
        return GroupRingElement(x.ctx, "Fp", (x.coeffs + y.coeffs) % x.ctx.p)
    a, b = x.coeffs, y.coeffs
    if a.dtype == object or b.dtype == object or _maxabs(a) >= _SAFE or _maxabs(b) >= _SAFE:
        a, b = a.astype(object), b.astype(object)
    return GroupRingElement(x.ctx, "Z", a + b)


def shift(x: GroupRingElement, v: Sequence[int]) -> GroupRingElement:
    """Multiply by g^v: the coefficient at w moves to w + v."""
    v = x.ctx.validate(v)
    grid = x.grid
    for axis, step in enumerate(v):
        if step:
            grid = np.roll(grid, step, axis=axis)
    return GroupRingElement(x.ctx, x.ring, grid.reshape(-1, order="F"))


def mul_binomial(x: GroupRingElement, v: Sequence[int]) -> GroupRingElement:
    """Multiply by (1 - g^v) in O(p^n): returns x - g^v * x."""
    shifted = shift(x, v)
    if x.ring == "Fp":
        return GroupRingElement(x.ctx, "Fp", (x.coeffs - shifted.coeffs) % x.ctx.p)
    a, b = x.coeffs, shifted.coeffs
    if a.dtype == object or _maxabs(a) >= _SAFE:
        a, b = a.astype(object), b.astype(object)
    return GroupRingElement(x.ctx, "Z", a - b)


def mul_general(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    """Full group convolution; the O(p^{2n}) reference multiplication.

    Uses explicit coordinate addition rather than the roll-based shift, so it
    can serve as an oracle for :func:`mul_binomial`.
    """
    _same_space(x, y)
    ctx = x.ctx
    coords = ctx.coords
    if x.ring == "Fp":
        out = np.zeros(ctx.order, dtype=np.int64)
    elif x.l1() * _maxabs(y.coeffs) < _SAFE and y.coeffs.dtype != object:
        out = np.zeros(ctx.order, dtype=np.int64)
    else:
        out = np.zeros(ctx.order, dtype=object)
    ycoef = y.coeffs.astype(out.dtype)
    for w in np.flatnonzero(x.coeffs != 0):
        target = ctx.indices_of(coords + coords[w])
        # target is a permutation, so fancy-index accumulation is safe
        out[target] += int(x.coeffs[w]) * ycoef
        if x.ring == "Fp":
            out %= ctx.p
    return GroupRingElement(ctx, x.ring, out)


def reduce_mod_p(x: GroupRingElement) -> GroupRingElement:
    if x.ring != "Z":
        raise RingMismatchError("reduce_mod_p expects an element of Z[G]")
    if x.coeffs.dtype == object:
        return GroupRingElement(x.ctx, "Fp", [int(c) % x.ctx.p for c in x.coeffs])
    return GroupRingElement(x.ctx, "Fp", x.coeffs % x.ctx.p)


def is_zero(x: GroupRingElement) -> bool:
    return x.is_zero()


def coset_sums(x: GroupRingElement, i: int) -> np.ndarray:
    """Sum of coefficients along every e_i-coset (axis ``i`` collapsed)."""
    grid = x.grid
    if x.coeffs.dtype == object:
        sums = grid.sum(axis=i)
    else:
        sums = grid.sum(axis=i, dtype=object)
    if x.ring == "Fp":
        sums = np.vectorize(lambda c: int(c) % x.ctx.p, otypes=[object])(sums)
    return np.asarray(sums)


def divide_by_binomial(Q: GroupRingElement, i: int) -> GroupRingElement:
    """Return q with q * (1 - g^{e_i}) == Q.

    ``Q`` must lie in the principal ideal generated by 1 - g^{e_i}, i.e. its
    coefficients must sum to zero on each e_i-coset.  The quotient is only
    defined up to elements constant along e_i-cosets; the returned q is the
    one whose coefficient at i-th coordinate p-1 vanishes on every coset,
    which makes q the running sum of Q along the e_i direction.
    """
    ctx = Q.ctx
    if not 0 <= i < ctx.n:
        raise ContextError(f"direction {i} outside [0, {ctx.n - 1}]")
    sums = coset_sums(Q, i)
    if any(int(s) != 0 for s in np.ravel(sums)):
        raise IdealMembershipError(f"element is not in the ideal generated by 1 - g^e_{i + 1}")
    grid = Q.grid
    if Q.ring == "Fp":
        q = np.cumsum(grid, axis=i) % ctx.p
    elif grid.dtype == object or _maxabs(Q.coeffs) * ctx.p >= _SAFE:
        q = np.cumsum(grid.astype(object), axis=i)
    else:
        q = np.cumsum(grid, axis=i)
    return GroupRingElement(ctx, Q.ring, q.reshape(-1, order="F"))


def hyperplane_context(ctx: GroupContext) -> GroupContext:
    """Context for the coordinate subgroup spanned by all e_k with k != i."""
    return GroupContext(ctx.p, ctx.n - 1)


def restrict_to_hyperplane(x: GroupRingElement, i: int) -> GroupRingElement:
    """Read off the part of x supported on {v : v_i = 0} as an element of F_p^{n-1}."""
    small = hyperplane_context(x.ctx)
    part = np.take(x.grid, 0, axis=i)
    return GroupRingElement(small, x.ring, np.asarray(part).reshape(-1, order="F"))


def extend_from_hyperplane(y: GroupRingElement, ctx: GroupContext, i: int) -> GroupRingElement:
    """Inverse of :func:`restrict_to_hyperplane`: embed along v_i = 0."""
    if y.ctx != hyperplane_context(ctx):
        raise RingMismatchError(f"{y.ctx} is not the i-hyperplane of {ctx}")
    grid = np.zeros(ctx.shape, dtype=y.coeffs.dtype)
    sl = [slice(None)] * ctx.n
    sl[i] = 0
    grid[tuple(sl)] = y.grid
    return GroupRingElement(ctx, y.ring, grid.reshape(-1, order="F"))


def drop_coordinate(v: Sequence[int], i: int) -> Vector:
    return tuple(int(c) for k, c in enumerate(v) if k != i)
