"""Sparse row-major feature matrix.

The design matrix is stored CSR-style as three flat numpy arrays so the
compiled kernels can walk it without conversion. Absent entries are
implicit zeros; a row with no stored entries is an "empty" row (a review
whose text  was entirely stopwords) and is excluded from model fitting by
the callers that build models.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FeatureMatrix:
    indptr: np.ndarray   # int64, length rows+1
    indices: np.ndarray  # int64, column of each stored entry
    data: np.ndarray     # float64, stored values
    shape: tuple[int, int]
    row_sq_norms: np.ndarray = field(default=None)  # cached squared Euclidean row norms

    def __post_init__(self):
        self.indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.row_sq_norms is None:
            self.row_sq_norms = self._compute_sq_norms()
        self.row_sq_norms = np.ascontiguousarray(self.row_sq_norms, dtype=np.float64)

    def _compute_sq_norms(self) -> np.ndarray:
        sq = np.zeros(self.shape[0])
        np.add.at(sq, self.nnz_row_ids(), self.data * self.data)
        return sq

    @property
    def n_rows(self) -> int:
        return self.shape[0]

    @property
    def n_cols(self) -> int:
        return self.shape[1]

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(column indices, values) of row ``i``."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def row_dense(self, i: int) -> np.ndarray:
        out = np.zeros(self.n_cols)
        idx, vals = self.row(i)
        out[idx] = vals
        return out

    def nnz_row_ids(self) -> np.ndarray:
        """Row id of every stored entry, in storage order."""
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.indptr))

    def empty_rows(self) -> np.ndarray:
        return np.flatnonzero(np.diff(self.indptr) == 0)

    def nonempty_rows(self) -> np.ndarray:
        return np.flatnonzero(np.diff(self.indptr) > 0)

    def take_rows(self, rows: np.ndarray) -> "FeatureMatrix":
        """Submatrix of the given rows, in the given order."""
        rows = np.asarray(rows, dtype=np.int64)
        lengths = self.indptr[rows + 1] - self.indptr[rows]
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        data = np.empty(indptr[-1])
        for out_i, r in enumerate(rows):
            lo, hi = self.indptr[r], self.indptr[r + 1]
            indices[indptr[out_i]:indptr[out_i + 1]] = self.indices[lo:hi]
            data[indptr[out_i]:indptr[out_i + 1]] = self.data[lo:hi]
        return FeatureMatrix(indptr, indices, data, (len(rows), self.n_cols),
                             self.row_sq_norms[rows])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.nnz_row_ids(), self.indices] = self.data
        return out

    @classmethod
    def from_dense(cls, arr) -> "FeatureMatrix":
        """Build from a dense array; exact zeros become implicit."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        mask = arr != 0.0
        lengths = mask.sum(axis=1)
        indptr = np.zeros(arr.shape[0] + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        rows, cols = np.nonzero(mask)
        return cls(indptr, cols.astype(np.int64), arr[rows, cols], arr.shape)

    @classmethod
    def from_rows(cls, rows: list[tuple[np.ndarray, np.ndarray]], n_cols: int) -> "FeatureMatrix":
        """Build from per-row (indices, values) pairs; indices must be sorted."""
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(idx) for idx, _ in rows], out=indptr[1:])
        if len(rows):
            indices = np.concatenate([np.asarray(idx, dtype=np.int64) for idx, _ in rows])
            data = np.concatenate([np.asarray(v, dtype=np.float64) for _, v in rows])
        else:
            indices = np.empty(0, dtype=np.int64)
            data = np.empty(0)
        return cls(indptr, indices, data, (len(rows), n_cols))
