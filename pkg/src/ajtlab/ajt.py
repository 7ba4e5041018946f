"""The AJT predicate for a single matrix and the three-way verdict."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .binomial import fp_identity_test, standard_product, z_identity_holds
from .group_ring import Vector
from .matrix import MatrixFp


@dataclass(frozen=True)
class MatrixVerdict:
    fp_identity: bool
    z_identity: bool
    ajt_witness: Vector | None
    consistent: bool

    @property
    def counterexample(self) -> bool:
        return self.ajt_witness is None

    @property
    def violates_conjecture(self) -> bool:
        """F_p identity holds but the Z identity does not."""
        return self.fp_identity and not self.z_identity

    def to_dict(self) -> dict:
        return {
            "fp_identity": self.fp_identity,
            "z_identity": self.z_identity,
            "ajt_witness": list(self.ajt_witness) if self.ajt_witness is not None else None,
            "consistent": self.consistent,
        }

    @classmethod
    def from_dict(cls, d: dict) -> MatrixVerdict:
        w = d["ajt_witness"]
        return cls(d["fp_identity"], d["z_identity"], tuple(w) if w is not None else None, d["consistent"])


def nowhere_zero_vectors(p: int, n: int) -> np.ndarray:
    """All x in (F_p^*)^n, in mixed-radix order (first coordinate fastest)."""
    grids = itertools.product(range(1, p), repeat=n)
    return np.array([tuple(reversed(g)) for g in grids], dtype=np.int64).reshape(-1, n)


def find_good_vector(M: MatrixFp) -> Vector | None:
    """Smallest nowhere-zero x with Mx nowhere-zero, or None."""
    M.require_nonsingular()
    X = nowhere_zero_vectors(M.p, M.n)
    good = np.all((X @ M.array.T) % M.p != 0, axis=1)
    hits = np.flatnonzero(good)
    return tuple(int(c) for c in X[hits[0]]) if hits.size else None


def is_counterexample(M: MatrixFp) -> bool:
    return find_good_vector(M) is None


def verdict(M: MatrixFp, fp_mode: str = "reduced") -> MatrixVerdict:
    M.require_nonsingular()
    fp = fp_identity_test(M, fp_mode)
    z = z_identity_holds(standard_product(M))
    witness = find_good_vector(M)
    return MatrixVerdict(fp, z, witness, consistent=(z == (witness is None)))


# --- monomial transforms ----------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """The monomial matrix sending e_k to scales[k] * e_{perm[k]}."""

    perm: tuple[int, ...]
    scales: tuple[int, ...]

    def matrix(self, p: int) -> np.ndarray:
        n = len(self.perm)
        out = np.zeros((n, n), dtype=np.int64)
        for k, (j, s) in enumerate(zip(self.perm, self.scales)):
            out[j, k] = s % p
        return out

    @classmethod
    def random(cls, p: int, n: int, rng: np.random.Generator) -> Monomial:
        perm = tuple(int(c) for c in rng.permutation(n))
        scales = tuple(int(c) for c in rng.integers(1, p, size=n))
        return cls(perm, scales)


def transform(M: MatrixFp, left: Monomial, right: Monomial) -> MatrixFp:
    """left * M * right^T, i.e. rows permuted and scaled, coordinates permuted and scaled."""
    p = M.p
    out = (left.matrix(p) @ M.array @ right.matrix(p).T) % p
    return MatrixFp.from_rows(p, out.tolist())


def random_nonsingular(p: int, n: int, rng: np.random.Generator) -> MatrixFp:
    while True:
        M = MatrixFp.from_rows(p, rng.integers(0, p, size=(n, n)).tolist())
        if M.det_nonzero:
            return M


def verdict_booleans(v: MatrixVerdict) -> tuple[bool, bool, bool]:
    return v.fp_identity, v.z_identity, v.counterexample


def monomial_invariant(M: MatrixFp, left: Monomial, right: Monomial) -> bool:
    return verdict_booleans(verdict(M)) == verdict_booleans(verdict(transform(M, left, right)))

