"""Gaussian elimination over F_p on small integer matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _as_matrix(rows: Sequence[Sequence[int]] | np.ndarray, p: int) -> np.ndarray:
    a = np.array(rows, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    return a % p


def row_echelon(rows, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    a = _as_matrix(rows, p)
    m, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        for other in range(m):
            if other != r and a[other, c]:
                a[other] = (a[other] - a[other, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod_p(rows, p: int) -> int:
    a = _as_matrix(rows, p)
    if a.size == 0:
        return 0
    return len(row_echelon(a, p)[1])


def det_mod_p(rows, p: int) -> int:
    a = _as_matrix(rows, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    det = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        k = c + int(nz[0])
        if k != c:
            a[[c, k]] = a[[k, c]]
            det = -det
        piv = int(a[c, c])
        det = (det * piv) % p
        inv = pow(piv, -1, p)
        for r in range(c + 1, n):
            if a[r, c]:
                a[r] = (a[r] - (a[r, c] * inv % p) * a[c]) % p
    return det % p


def inverse_mod_p(rows, p: int) -> np.ndarray:
    a = _as_matrix(rows, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    red, pivots = row_echelon(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return red[:, n:] % p
