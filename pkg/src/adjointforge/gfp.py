"""Linear algebra over a prime field GF(p)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def row_reduce(matrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod ``p`` and the pivot columns."""
    mat = np.array(matrix, dtype=np.int64) % p
    if mat.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    m, n = mat.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(mat[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            mat[[row, piv]] = mat[[piv, row]]
        inv = pow(int(mat[row, col]), p - 2, p)
        mat[row] = (mat[row] * inv) % p
        others = np.nonzero(mat[:, col])[0]
        for r in others:
            if r != row:
                mat[r] = (mat[r] - mat[r, col] * mat[row]) % p
        pivots.append(col)
        row += 1
    return mat, pivots


def rank_mod_p(matrix, p: int) -> int:
    mat = np.asarray(matrix)
    if mat.size == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def nullspace_mod_p(matrix, p: int) -> np.ndarray:
    """Basis of the right kernel, one vector per row."""
    mat = np.asarray(matrix, dtype=np.int64)
    n = mat.shape[1]
    rref, pivots = row_reduce(mat, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-rref[i, f]) % p
    return basis


@dataclass(frozen=True)
class GFMatrix:
    """A matrix over GF(p); column ``j`` represents ground element ``j``."""

    p: int
    rows: np.ndarray

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"field size {self.p} is not prime")
        arr = np.array(self.rows, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        arr = arr % self.p
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def ncols(self) -> int:
        return self.rows.shape[1]

    @property
    def nrows(self) -> int:
        return self.rows.shape[0]

    def columns(self, idx) -> np.ndarray:
        return self.rows[:, list(idx)]

    def rank(self, idx=None) -> int:
        if idx is None:
            return rank_mod_p(self.rows, self.p)
        idx = list(idx)
        if not idx:
            return 0
        return rank_mod_p(self.rows[:, idx], self.p)

    def to_json(self) -> dict:
        return {"field": self.p, "matrix": self.rows.tolist()}
