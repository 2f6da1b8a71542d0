"""Plaintext emulation of diagonal-wise encrypted matrix-vector products.

A product ``A @ x`` is written as ``sum_k d_k * rot(x, k)`` over the
non-empty cyclic diagonals ``d_k`` of ``A``, where ``rot(x, k)`` rotates
``x`` left by ``k`` slots.  Each term costs one ciphertext multiplication
and, for ``k != 0``, one rotation; the emulator performs the same
arithmetic on plain vectors and counts the operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import PatternMatrix, Permutation, apply_permutations
from .elimination import CostModel, EliminationPlan


@dataclass
class DiagonalDecomposition:
    n: int
    entries: dict  # k -> length-n vector with d_k[i] = a[i, (i + k) % n]

    @property
    def support(self) -> list:
        return sorted(self.entries)

    def entry(self, i: int, j: int) -> float:
        k = (j - i) % self.n
        d = self.entries.get(k)
        return 0.0 if d is None else float(d[i])


@dataclass(frozen=True)
class OpCount:
    mults: int
    rots: int
    rots_incl_zero: int
    adds: int

    def to_json(self) -> dict:
        return {"mults": self.mults, "rots": self.rots, "rots_incl_zero": self.rots_incl_zero, "adds": self.adds}


def decompose(A: PatternMatrix) -> DiagonalDecomposition:
    """Split a valued matrix into its non-empty cyclic diagonals."""
    if A.values is None:
        raise ValueError("decomposition needs a valued matrix")
    n = A.n
    rows, cols = A.coo()
    k = (cols - rows) % n if n else cols
    entries = {}
    for kk in np.unique(k).tolist():
        d = np.zeros(n, dtype=np.float64)
        sel = k == kk
        d[rows[sel]] = A.values[sel]
        entries[kk] = d
    return DiagonalDecomposition(n, entries)


def hs_spmv(D: DiagonalDecomposition, x) -> tuple:
    """``y = sum_k d_k * roll(x, -k)`` with the operation counts of the encrypted version."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (D.n,):
        raise ValueError(f"x must have length {D.n}, got shape {x.shape}")
    y = np.zeros(D.n, dtype=np.float64)
    for k in D.support:
        y += D.entries[k] * np.roll(x, -k)
    s = len(D.entries)
    rots = sum(1 for k in D.entries if k != 0)
    return y, OpCount(s, rots, s, max(s - 1, 0))


def permuted_pipeline(A: PatternMatrix, pr: Permutation, pc: Permutation, x) -> tuple:
    """Permute ``x``, multiply by the permuted matrix, and un-permute the result."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise ValueError(f"x must have length {A.n}, got shape {x.shape}")
    xp = np.empty_like(x)
    xp[pc.forward] = x
    yp, ops = hs_spmv(decompose(apply_permutations(A, pr, pc)), xp)
    return yp[pr.forward], ops


def estimate_time(num_diags: int, n: int, cm: CostModel = CostModel(), plan: Optional[EliminationPlan] = None) -> float:
    """Modeled encrypted SpMV time in microseconds.

    Additions and plaintext multiplications are ignored.
    """
    t = num_diags * cm.ciphertexts(n) * cm.per_diagonal
    if plan is not None:
        t += plan.overhead_us
    return t
