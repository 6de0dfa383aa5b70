"""Minimal CSR storage for the symmetric positive definite color systems."""
from __future__ import annotations

import numpy as np


class SparseSpdMatrix:
    """CSR matrix with sorted column indices per row.

    Assembly guarantees structural symmetry with exactly matching values
    (`check_symmetric` verifies both).  Kept deliberately small: the solvers
    only need the raw CSR triplet, the diagonal, and a dense export.
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, data: np.ndarray):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr has wrong length")
        if self.indices.shape != self.data.shape:
            raise ValueError("indices and data lengths differ")

    @property
    def nnz(self) -> int:
        return len(self.data)

    def diagonal(self) -> np.ndarray:
        diag = np.zeros(self.n)
        for i in range(self.n):
            row = slice(self.indptr[i], self.indptr[i + 1])
            hit = np.nonzero(self.indices[row] == i)[0]
            if len(hit):
                diag[i] = self.data[row][hit[0]]
        return diag

    def matvec(self, x: np.ndarray, backend=None) -> np.ndarray:
        from .backends import get_backend

        be = backend or get_backend()
        return be.csr_matvec(self.indptr, self.indices, self.data, np.asarray(x, dtype=np.float64))

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            row = slice(self.indptr[i], self.indptr[i + 1])
            out[i, self.indices[row]] = self.data[row]
        return out

    def check_symmetric(self) -> bool:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        fwd = np.lexsort((self.indices, rows))
        rev = np.lexsort((rows, self.indices))
        return (
            np.array_equal(rows[fwd], self.indices[rev])
            and np.array_equal(self.indices[fwd], rows[rev])
            and np.array_equal(self.data[fwd], self.data[rev])
        )

    def dump(self, path) -> None:
        """Write 'row col value' lines, 0-based, sorted row-major."""
        with open(path, "w", encoding="ascii") as fh:
            for i in range(self.n):
                for k in range(self.indptr[i], self.indptr[i + 1]):
                    fh.write(f"{i} {self.indices[k]} {self.data[k]:.17g}\n")


def csr_from_coo(n: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> SparseSpdMatrix:
    """Build CSR with rows ascending and columns sorted within each row."""
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return SparseSpdMatrix(n, indptr, cols.astype(np.int64), vals.astype(np.float64))
