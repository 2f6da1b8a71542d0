"""Sparse patterns, permutations and cyclic-diagonal statistics.

Diagonal ``k`` of an ``n x n`` matrix holds the entries ``a[i, (i + k) % n]``;
an entry ``a[i, j]`` therefore lives on diagonal ``(j - i) % n``.  Under a
row permutation ``pr`` and column permutation ``pc`` the entry moves to
diagonal ``(pc.forward[j] - pr.forward[i]) % n``.
"""

from __future__ import annotations

import os
from typing import Iterable, Optional, Sequence

import numpy as np


class DiagPackError(Exception):
    """Base class for errors raised by this package."""


class MatrixMarketError(DiagPackError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PermutationError(DiagPackError, ValueError):
    pass


class InvariantError(DiagPackError, AssertionError):
    """An internal consistency check failed."""


# ---------------------------------------------------------------------------
# Permutation
# ---------------------------------------------------------------------------


class Permutation:
    """Bijection on ``{0, ..., n-1}``.

    ``forward[i]`` is the new position of old index ``i`` and
    ``inverse[p]`` the old index sitting at position ``p``.
    """

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: Sequence[int], inverse: Optional[Sequence[int]] = None):
        fwd = np.array(forward, dtype=np.int64).reshape(-1)
        n = fwd.size
        if n and (fwd.min() < 0 or fwd.max() >= n):
            raise PermutationError("not a bijection: entry out of range")
        inv = np.full(n, -1, dtype=np.int64)
        inv[fwd] = np.arange(n, dtype=np.int64)
        if n and (inv < 0).any():
            raise PermutationError("not a bijection: repeated position")
        if inverse is not None and not np.array_equal(inv, np.asarray(inverse)):
            raise PermutationError("inverse does not match forward map")
        fwd.setflags(write=False)
        inv.setflags(write=False)
        self.forward = fwd
        self.inverse = inv

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """Build from a vertex ordering, ``order[pos] = old index``."""
        order = np.asarray(order, dtype=np.int64)
        return cls(Permutation(order).inverse)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))

    @property
    def n(self) -> int:
        return int(self.forward.size)

    def inv(self) -> "Permutation":
        return Permutation(self.inverse)

    def compose(self, other: "Permutation") -> "Permutation":
        """Permutation applying ``other`` first, then ``self``."""
        if other.n != self.n:
            raise PermutationError("size mismatch in composition")
        return Permutation(self.forward[other.forward])

    def order(self) -> np.ndarray:
        return self.inverse.copy()

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.forward, other.forward)

    def __hash__(self) -> int:
        return hash(self.forward.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.forward.tolist()})"


# ---------------------------------------------------------------------------
# PatternMatrix
# ---------------------------------------------------------------------------


class PatternMatrix:
    """Immutable square sparse pattern with row- and column-wise adjacency.

    Stored as two compressed index structures (CSR for rows, CSC for
    columns).  ``values``, when present, is aligned with the row structure.
    """

    def __init__(self, n, row_ptr, row_idx, col_ptr, col_idx, values=None):
        self.n = int(n)
        self.row_ptr = row_ptr
        self.row_idx = row_idx
        self.col_ptr = col_ptr
        self.col_idx = col_idx
        self.values = values
        for arr in (row_ptr, row_idx, col_ptr, col_idx, values):
            if arr is not None:
                arr.setflags(write=False)
        self._row_adj = None
        self._col_adj = None
        self._coo = None

    @classmethod
    def from_coo(cls, n: int, rows, cols, values=None, *, drop_zeros: bool = False) -> "PatternMatrix":
        """Build from coordinates.  Duplicates are merged (values summed)."""
        n = int(n)
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        if rows.shape != cols.shape:
            raise ValueError("rows and cols differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
            raise ValueError("coordinate out of range")
        vals = None if values is None else np.asarray(values, dtype=np.float64).reshape(-1)
        if vals is not None and vals.shape != rows.shape:
            raise ValueError("values differ in length from coordinates")

        key = rows * n + cols
        uniq, first, inv = np.unique(key, return_index=True, return_inverse=True)
        if vals is not None:
            merged = np.zeros(uniq.size, dtype=np.float64)
            np.add.at(merged, inv, vals)
            vals = merged
            if drop_zeros:
                keep = vals != 0.0
                uniq, vals = uniq[keep], vals[keep]
        r = uniq // n
        c = uniq % n
        # uniq is sorted by (row, col): already row-major
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=n), out=row_ptr[1:])
        row_idx = c.copy()

        corder = np.lexsort((r, c))
        col_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(c, minlength=n), out=col_ptr[1:])
        col_idx = r[corder]
        return cls(n, row_ptr, row_idx, col_ptr, col_idx, vals)

    @classmethod
    def from_dense(cls, dense, *, keep_values: bool = True) -> "PatternMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError("dense input must be square")
        r, c = np.nonzero(dense)
        vals = dense[r, c].astype(np.float64) if keep_values else None
        return cls.from_coo(dense.shape[0], r, c, vals)

    # -- basic views -------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.row_idx.size)

    @property
    def has_values(self) -> bool:
        return self.values is not None

    def coo(self):
        """Return ``(rows, cols)`` in row-major order."""
        if self._coo is None:
            rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_ptr))
            self._coo = (rows, self.row_idx)
        return self._coo

    def row(self, i: int) -> np.ndarray:
        return self.row_idx[self.row_ptr[i]:self.row_ptr[i + 1]]

    def col(self, j: int) -> np.ndarray:
        return self.col_idx[self.col_ptr[j]:self.col_ptr[j + 1]]

    @property
    def row_adj(self) -> list:
        """Per-row sorted column lists (plain Python ints)."""
        if self._row_adj is None:
            self._row_adj = [self.row(i).tolist() for i in range(self.n)]
        return self._row_adj

    @property
    def col_adj(self) -> list:
        if self._col_adj is None:
            self._col_adj = [self.col(j).tolist() for j in range(self.n)]
        return self._col_adj

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_degrees(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    def max_degree(self) -> int:
        """Largest row or column degree, a lower bound on any diagonal count."""
        if self.n == 0:
            return 0
        return int(max(self.row_degrees().max(), self.col_degrees().max()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.float64)
        rows, cols = self.coo()
        out[rows, cols] = self.values if self.values is not None else 1.0
        return out

    def to_scipy(self):
        from scipy.sparse import csr_matrix

        data = self.values if self.values is not None else np.ones(self.nnz)
        return csr_matrix((data, self.row_idx, self.row_ptr), shape=(self.n, self.n))

    def entries(self) -> set:
        rows, cols = self.coo()
        return set(zip(rows.tolist(), cols.tolist()))

    def pattern_only(self) -> "PatternMatrix":
        if self.values is None:
            return self
        return PatternMatrix(self.n, self.row_ptr, self.row_idx, self.col_ptr, self.col_idx)

    def transpose(self) -> "PatternMatrix":
        rows, cols = self.coo()
        return PatternMatrix.from_coo(self.n, cols, rows, self.values)

    def check(self) -> None:
        """Raise :class:`InvariantError` if the two adjacency views disagree."""
        for ptr, idx in ((self.row_ptr, self.row_idx), (self.col_ptr, self.col_idx)):
            if ptr[-1] != idx.size:
                raise InvariantError("pointer array does not cover index array")
            for a in range(self.n):
                seg = idx[ptr[a]:ptr[a + 1]]
                if seg.size > 1 and (np.diff(seg) <= 0).any():
                    raise InvariantError(f"adjacency list {a} is not strictly increasing")
        rows, cols = self.coo()
        crows = self.col_idx
        ccols = np.repeat(np.arange(self.n), np.diff(self.col_ptr))
        if set(zip(rows.tolist(), cols.tolist())) != set(zip(crows.tolist(), ccols.tolist())):
            raise InvariantError("row and column adjacency describe different nonzero sets")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        same = (
            self.n == other.n
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.row_idx, other.row_idx)
        )
        if not same:
            return False
        if (self.values is None) != (other.values is None):
            return False
        return self.values is None or np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        kind = "valued" if self.has_values else "pattern"
        return f"PatternMatrix(n={self.n}, nnz={self.nnz}, {kind})"


# ---------------------------------------------------------------------------
# DiagState
# ---------------------------------------------------------------------------


class DiagState:
    """Histogram of nonzeros per cyclic diagonal with O(1) derived statistics.

    ``occupancy[v]`` counts the diagonals holding exactly ``v`` nonzeros, which
    keeps ``min_nnz`` current under single-entry updates without rescanning
    the histogram.
    """

    __slots__ = ("n", "diag_nnz", "num_diags", "min_nnz", "occupancy")

    def __init__(self, diag_nnz: Iterable[int]):
        hist = [int(v) for v in diag_nnz]
        self.n = len(hist)
        self.diag_nnz = hist
        occ = [0] * (max(hist, default=0) + 2)
        for v in hist:
            if v > 0:
                occ[v] += 1
        # a diagonal of a real matrix never holds more than n entries
        occ.extend([0] * max(0, self.n + 2 - len(occ)))
        self.occupancy = occ
        self.num_diags = sum(1 for v in hist if v > 0)
        self.min_nnz = min((v for v in hist if v > 0), default=0)

    @property
    def min_nnz_count(self) -> int:
        return self.occupancy[self.min_nnz] if self.min_nnz > 0 else 0

    @property
    def nnz(self) -> int:
        return sum(self.diag_nnz)

    def support(self) -> list:
        return [k for k, v in enumerate(self.diag_nnz) if v > 0]

    def increment(self, k: int) -> bool:
        """Add one nonzero to diagonal ``k``; True if the diagonal was empty."""
        v = self.diag_nnz[k]
        self.diag_nnz[k] = v + 1
        occ = self.occupancy
        if v + 1 >= len(occ):
            occ.append(0)
        occ[v + 1] += 1
        if v == 0:
            self.num_diags += 1
            self.min_nnz = 1
            return True
        occ[v] -= 1
        if v == self.min_nnz and occ[v] == 0:
            self.min_nnz = v + 1
        return False

    def decrement(self, k: int) -> bool:
        """Remove one nonzero from diagonal ``k``; True if it became empty."""
        v = self.diag_nnz[k]
        if v <= 0:
            raise InvariantError(f"diagonal {k} is already empty")
        self.diag_nnz[k] = v - 1
        occ = self.occupancy
        occ[v] -= 1
        if v > 1:
            occ[v - 1] += 1
            if v - 1 < self.min_nnz:
                self.min_nnz = v - 1
            return False
        self.num_diags -= 1
        if occ[1] == 0:
            if self.num_diags == 0:
                self.min_nnz = 0
            else:
                m = 2
                while occ[m] == 0:
                    m += 1
                self.min_nnz = m
        return True

    def stats(self) -> tuple:
        return (self.num_diags, self.min_nnz, self.min_nnz_count)

    def copy(self) -> "DiagState":
        new = DiagState.__new__(DiagState)
        new.n = self.n
        new.diag_nnz = list(self.diag_nnz)
        new.num_diags = self.num_diags
        new.min_nnz = self.min_nnz
        new.occupancy = list(self.occupancy)
        return new

    def check(self) -> None:
        fresh = DiagState(self.diag_nnz)
        if fresh.stats() != self.stats():
            raise InvariantError(f"derived statistics {self.stats()} != recomputed {fresh.stats()}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagState):
            return NotImplemented
        return self.diag_nnz == other.diag_nnz and self.stats() == other.stats()

    def __repr__(self) -> str:
        return (
            f"DiagState(num_diags={self.num_diags}, min_nnz={self.min_nnz}, "
            f"min_nnz_count={self.min_nnz_count})"
        )


def _check_sizes(A: PatternMatrix, pr: Permutation, pc: Permutation) -> None:
    if pr.n != A.n or pc.n != A.n:
        raise ValueError(f"permutation sizes ({pr.n}, {pc.n}) do not match matrix order {A.n}")


def diagonal_indices(A: PatternMatrix, pr: Optional[Permutation] = None, pc: Optional[Permutation] = None) -> np.ndarray:
    """Diagonal index of every stored nonzero (row-major order)."""
    rows, cols = A.coo()
    if pr is None and pc is None:
        return (cols - rows) % A.n if A.n else cols
    pr = pr if pr is not None else Permutation.identity(A.n)
    pc = pc if pc is not None else Permutation.identity(A.n)
    _check_sizes(A, pr, pc)
    return (pc.forward[cols] - pr.forward[rows]) % A.n


def count_diagonals(A: PatternMatrix, pr: Optional[Permutation] = None, pc: Optional[Permutation] = None) -> DiagState:
    """Per-diagonal histogram of ``A`` under the given row/column permutations."""
    k = diagonal_indices(A, pr, pc)
    return DiagState(np.bincount(k, minlength=A.n).tolist())


def num_diagonals(A: PatternMatrix, pr: Optional[Permutation] = None, pc: Optional[Permutation] = None) -> int:
    """Count of non-empty cyclic diagonals; cheaper than :func:`count_diagonals`."""
    if A.nnz == 0:
        return 0
    k = diagonal_indices(A, pr, pc)
    return int(np.count_nonzero(np.bincount(k, minlength=A.n)))


def apply_permutations(A: PatternMatrix, pr: Permutation, pc: Permutation) -> PatternMatrix:
    """Return ``P_pr A Q_pc^T``: entry ``(i, j)`` moves to ``(pr[i], pc[j])``."""
    _check_sizes(A, pr, pc)
    rows, cols = A.coo()
    return PatternMatrix.from_coo(A.n, pr.forward[rows], pc.forward[cols], A.values)


# ---------------------------------------------------------------------------
# Matrix Market
# ---------------------------------------------------------------------------

_MM_FIELDS = {"real", "double", "integer", "complex", "pattern"}
_MM_SYMMETRY = {"general", "symmetric", "skew-symmetric", "hermitian"}


def load_matrix_market(path, mode: str = "pattern") -> PatternMatrix:
    """Read a coordinate Matrix Market file.

    ``mode`` is ``"pattern"`` (default, values discarded) or ``"valued"``.
    Symmetric, skew-symmetric and hermitian storage is expanded; duplicate
    coordinates are merged and explicitly stored zeros are dropped.
    """
    if mode not in ("pattern", "valued"):
        raise ValueError(f"unknown mode {mode!r}")
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise MatrixMarketError("malformed header, expected '%%MatrixMarket matrix ...'", 1)
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt != "coordinate":
        raise MatrixMarketError(f"unsupported format {fmt!r}; only 'coordinate' is accepted", 1)
    if field not in _MM_FIELDS:
        raise MatrixMarketError(f"unknown field {field!r}", 1)
    if symmetry not in _MM_SYMMETRY:
        raise MatrixMarketError(f"unknown symmetry {symmetry!r}", 1)

    lineno = 1
    size_line = None
    for lineno in range(2, len(lines) + 1):
        text = lines[lineno - 1].strip()
        if text and not text.startswith("%"):
            size_line = text
            break
    if size_line is None:
        raise MatrixMarketError("missing size line", lineno)
    try:
        nrows, ncols, declared = (int(t) for t in size_line.split())
    except ValueError:
        raise MatrixMarketError(f"malformed size line {size_line!r}", lineno) from None
    if nrows != ncols:
        raise MatrixMarketError(f"matrix is not square ({nrows} x {ncols})", lineno)
    n = nrows

    want_vals = field != "pattern"
    ntok = 2 + (2 if field == "complex" else 1 if want_vals else 0)
    rows, cols, vals = [], [], []
    size_lineno = lineno
    seen = 0
    for lineno in range(size_lineno + 1, len(lines) + 1):
        text = lines[lineno - 1].strip()
        if not text or text.startswith("%"):
            continue
        toks = text.split()
        if len(toks) < ntok:
            raise MatrixMarketError(f"expected {ntok} fields, got {len(toks)}", lineno)
        try:
            i, j = int(toks[0]) - 1, int(toks[1]) - 1
            v = float(toks[2]) if want_vals else 1.0
        except ValueError:
            raise MatrixMarketError(f"malformed entry {text!r}", lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise MatrixMarketError(f"index ({i + 1}, {j + 1}) outside declared {n} x {n}", lineno)
        seen += 1
        if seen > declared:
            raise MatrixMarketError(f"more entries than the {declared} declared", lineno)
        rows.append(i)
        cols.append(j)
        vals.append(v)
        if symmetry != "general" and i != j:
            rows.append(j)
            cols.append(i)
            vals.append(-v if symmetry == "skew-symmetric" else v)
    if seen != declared:
        raise MatrixMarketError(f"found {seen} entries, size line declares {declared}", size_lineno)

    # values are read even in pattern mode so the nonzero set does not depend on mode
    A = PatternMatrix.from_coo(n, rows, cols, vals, drop_zeros=True)
    return A if mode == "valued" else A.pattern_only()


def write_matrix_market(A: PatternMatrix, path, *, comment: Optional[str] = None) -> None:
    field = "real" if A.has_values else "pattern"
    rows, cols = A.coo()
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {A.nnz}\n")
        if A.has_values:
            for i, j, v in zip(rows.tolist(), cols.tolist(), A.values.tolist()):
                fh.write(f"{i + 1} {j + 1} {v!r}\n")
        else:
            for i, j in zip(rows.tolist(), cols.tolist()):
                fh.write(f"{i + 1} {j + 1}\n")


# ---------------------------------------------------------------------------
# permutation files
# ---------------------------------------------------------------------------


def write_permutations(pr: Permutation, pc: Permutation, path) -> None:
    """Write ``n``, the row forward map and the column forward map, one per line."""
    if pr.n != pc.n:
        raise PermutationError("row and column permutations differ in size")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{pr.n}\n")
        fh.write(" ".join(map(str, pr.forward.tolist())) + "\n")
        fh.write(" ".join(map(str, pc.forward.tolist())) + "\n")
    os.replace(tmp, path)


def read_permutations(path) -> tuple:
    with open(path, "r") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 3:
        raise PermutationError(f"expected 3 lines, found {len(lines)}")
    try:
        n = int(lines[0])
        row = [int(t) for t in lines[1].split()]
        col = [int(t) for t in lines[2].split()]
    except ValueError:
        raise PermutationError("non-integer content in permutation file") from None
    if len(row) != n or len(col) != n:
        raise PermutationError(f"expected {n} entries per line")
    return Permutation(row), Permutation(col)
