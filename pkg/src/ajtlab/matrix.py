"""Square matrices over F_p, stored as rows a_1..a_n."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .group_ring import GroupContext, Vector, is_prime
from .linalg import rank_mod_p


class MatrixInputError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixFp:
    p: int
    rows: tuple[Vector, ...]

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]]) -> MatrixFp:
        if not is_prime(p):
            raise MatrixInputError(f"{p} is not prime")
        rows = tuple(tuple(int(c) % p for c in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise MatrixInputError(f"matrix must be square and nonempty, got {rows}")
        return cls(p, rows)

    @classmethod
    def parse(cls, text: str, p: int) -> MatrixFp:
        """Parse ``"1,1;1,2"``: rows split on ``;``, entries on ``,``."""
        rows = []
        for chunk in text.strip().split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                rows.append([int(tok) for tok in re.split(r"\s*,\s*", chunk)])
            except ValueError as exc:
                raise MatrixInputError(f"cannot parse matrix row {chunk!r}") from exc
        return cls.from_rows(p, rows)

    @classmethod
    def identity(cls, p: int, n: int) -> MatrixFp:
        return cls.from_rows(p, np.eye(n, dtype=int).tolist())

    @property
    def n(self) -> int:
        return len(self.rows)

    @cached_property
    def ctx(self) -> GroupContext:
        return GroupContext(self.p, self.n)

    @cached_property
    def det_nonzero(self) -> bool:
        return rank_mod_p(self.rows, self.p) == self.n

    def require_nonsingular(self) -> None:
        if not self.det_nonzero:
            raise SingularMatrixError(f"matrix {self.text()} is singular mod {self.p}")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def entry(self, k: int, i: int) -> int:
        return self.rows[k][i]

    def permute_rows(self, order: Sequence[int]) -> MatrixFp:
        return MatrixFp(self.p, tuple(self.rows[k] for k in order))

    def text(self) -> str:
        return ";".join(",".join(str(c) for c in row) for row in self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return f"[{self.text()}] mod {self.p}"

