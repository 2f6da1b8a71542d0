"""Undirected graphs built from a general sparsity pattern.

Two constructions are supported:

``pattern``
    vertices are the ``n`` row/column indices, with an edge ``{i, j}`` whenever
    ``a[i, j]`` or ``a[j, i]`` is stored (``B + B^T``).
``bipartite``
    ``2n`` vertices, rows first then columns, with an edge ``{i, n + j}`` for
    every stored ``a[i, j]`` (the block matrix ``[[0, B], [B^T, 0]]``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PatternMatrix, Permutation, PermutationError

MODES = ("pattern", "bipartite")


@dataclass(frozen=True, eq=False)
class SymmetrizedGraph:
    mode: str
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    origin_n: int
    _adj: list = field(default=None, repr=False, compare=False)

    @property
    def adj(self) -> list:
        """Sorted neighbour lists as Python lists."""
        if self._adj is None:
            lists = [self.indices[self.indptr[v]:self.indptr[v + 1]].tolist() for v in range(self.m)]
            object.__setattr__(self, "_adj", lists)
        return self._adj

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def edges(self) -> set:
        out = set()
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    out.add((u, v))
        return out

    def adjacency_matrix(self):
        """Unit-weight symmetric adjacency as a scipy CSR matrix."""
        from scipy.sparse import csr_matrix

        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.m, self.m))

    def is_symmetric(self) -> bool:
        adj = [set(a) for a in self.adj]
        return all(u in adj[v] and u != v for u in range(self.m) for v in adj[u])


def _from_edges(mode: str, m: int, u: np.ndarray, v: np.ndarray, origin_n: int) -> SymmetrizedGraph:
    keep = u != v
    u, v = u[keep], v[keep]
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    key = np.unique(src * m + dst) if src.size else np.zeros(0, dtype=np.int64)
    src, dst = key // max(m, 1), key % max(m, 1)
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=m), out=indptr[1:])
    return SymmetrizedGraph(mode, m, indptr, dst.astype(np.int64), origin_n)


def symmetrize(A: PatternMatrix, mode: str = "pattern") -> SymmetrizedGraph:
    """Build the undirected graph of ``A`` under ``mode`` (self-loops dropped)."""
    rows, cols = A.coo()
    if mode == "pattern":
        return _from_edges(mode, A.n, rows, cols, A.n)
    if mode == "bipartite":
        return _from_edges(mode, 2 * A.n, rows, cols + A.n, A.n)
    raise ValueError(f"unknown symmetrization {mode!r}; expected one of {MODES}")


def split_bipartite_order(order, n: int) -> tuple:
    """Split an ordering of the ``2n`` bipartite vertices into ``(pr, pc)``.

    Rows and columns keep their relative order within ``order``.
    """
    order = np.asarray(order, dtype=np.int64)
    if order.size != 2 * n or not np.array_equal(np.sort(order), np.arange(2 * n)):
        raise PermutationError(f"ordering is not a bijection on {2 * n} vertices")
    row_order = order[order < n]
    col_order = order[order >= n] - n
    return Permutation.from_order(row_order), Permutation.from_order(col_order)
