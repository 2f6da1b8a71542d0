"""Dense row/column elimination under a CKKS operation-cost model.

A handful of nearly full rows or columns forces every ordering to keep
many diagonals, since a row with ``d`` nonzeros always touches ``d`` of
them.  Removing those rows and columns from the core matrix and handling
them separately costs one encrypted inner product per row (a
multiplication plus a rotation-based reduction) and one multiplication per
column.  The plan is worth it when the diagonals saved outweigh that
overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import PatternMatrix


@dataclass(frozen=True)
class CostModel:
    """Per-operation timings in microseconds for ring dimension 8192."""

    t_cmult: float = 3814.3
    t_rot: float = 11073.3
    slots: int = 4096
    t_add: float = 119.4
    t_pmult: float = 203.1

    def __post_init__(self):
        for name in ("t_cmult", "t_rot", "t_add", "t_pmult"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.slots < 1 or self.slots & (self.slots - 1):
            raise ValueError("slots must be a power of two")

    def ciphertexts(self, n: int) -> int:
        """Ciphertexts needed to hold a length-``n`` vector."""
        return max(1, math.ceil(n / self.slots))

    @property
    def per_diagonal(self) -> float:
        return self.t_cmult + self.t_rot


def overhead(dr_size: int, dc_size: int, n: int, cm: CostModel = CostModel()) -> float:
    """Modeled cost of handling ``dr_size`` rows and ``dc_size`` columns outside the core."""
    if n < 1:
        raise ValueError("n must be >= 1")
    reduction_steps = math.ceil(math.log2(n)) if n > 1 else 0
    return dr_size * (cm.t_cmult + reduction_steps * cm.t_rot) + dc_size * cm.t_cmult


def gain(delta_elim: int, cm: CostModel = CostModel(), n: int = 1, *, split: bool = True) -> float:
    """Modeled time saved by ``delta_elim`` fewer diagonals.

    With ``split`` each diagonal costs once per ciphertext needed for ``n`` slots.
    """
    if delta_elim < 0:
        raise ValueError("delta_elim must be >= 0")
    factor = cm.ciphertexts(n) if split else 1
    return delta_elim * factor * cm.per_diagonal


def dissect(A: PatternMatrix, dr, dc) -> PatternMatrix:
    """``A`` with every nonzero in rows ``dr`` or columns ``dc`` removed."""
    dr = np.asarray(sorted(set(int(i) for i in dr)), dtype=np.int64)
    dc = np.asarray(sorted(set(int(j) for j in dc)), dtype=np.int64)
    for idx in (dr, dc):
        if idx.size and (idx.min() < 0 or idx.max() >= A.n):
            raise ValueError("eliminated index out of range")
    rows, cols = A.coo()
    keep = ~(np.isin(rows, dr) | np.isin(cols, dc))
    vals = None if A.values is None else A.values[keep]
    return PatternMatrix.from_coo(A.n, rows[keep], cols[keep], vals)


def assemble_result(core_y, A: PatternMatrix, x, dr, dc) -> np.ndarray:
    """Recover ``A @ x`` from the core product plus the eliminated rows and columns.

    A nonzero lying in both an eliminated row and an eliminated column is
    counted once, by the row's inner product.
    """
    core_y = np.asarray(core_y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if core_y.shape != (A.n,) or x.shape != (A.n,):
        raise ValueError(f"vectors must have length {A.n}")
    out = core_y.copy()
    vals = A.values if A.values is not None else np.ones(A.nnz)
    rset = set(int(i) for i in dr)
    for j in sorted(set(int(j) for j in dc)):
        for i in A.col(j).tolist():
            if i not in rset:
                out[i] += _entry(A, vals, i, j) * x[j]
    for i in sorted(rset):
        lo, hi = A.row_ptr[i], A.row_ptr[i + 1]
        out[i] = float(vals[lo:hi] @ x[A.row_idx[lo:hi]])
    return out


def _entry(A: PatternMatrix, vals, i: int, j: int) -> float:
    lo, hi = A.row_ptr[i], A.row_ptr[i + 1]
    t = lo + int(np.searchsorted(A.row_idx[lo:hi], j))
    return float(vals[t])


@dataclass
class EliminationPlan:
    dense_rows: list
    dense_cols: list
    core: PatternMatrix
    diags_before: int
    diags_after: int
    overhead_us: float
    gain_us: float
    gain_us_no_split: float
    profitable: bool
    core_result: object = field(default=None, repr=False)

    @property
    def delta(self) -> int:
        return self.diags_before - self.diags_after

    @property
    def profit_us(self) -> float:
        return self.gain_us - self.overhead_us

    def to_json(self) -> dict:
        return {
            "dense_rows": list(self.dense_rows),
            "dense_cols": list(self.dense_cols),
            "diags_before": self.diags_before,
            "diags_after": self.diags_after,
            "overhead_us": round(self.overhead_us, 6),
            "gain_us": round(self.gain_us, 6),
            "gain_us_no_split": round(self.gain_us_no_split, 6),
            "profitable": self.profitable,
        }


def _plan(A, cm, dr, dc, core, before, after, result) -> EliminationPlan:
    delta = max(0, before - after)
    ov = overhead(len(dr), len(dc), A.n, cm)
    g = gain(delta, cm, A.n)
    return EliminationPlan(
        sorted(dr), sorted(dc), core, before, after, ov, g,
        gain(delta, cm, A.n, split=False), (len(dr) + len(dc) > 0) and ov <= g, result,
    )


def elimination_candidates(A: PatternMatrix) -> list:
    """``(kind, index)`` pairs, highest degree first; rows before columns on ties."""
    rdeg = A.row_degrees()
    cdeg = A.col_degrees()
    cands = [(-int(rdeg[i]), 0, i) for i in range(A.n)] + [(-int(cdeg[j]), 1, j) for j in range(A.n)]
    cands.sort()
    return [("row" if kind == 0 else "col", idx) for _, kind, idx in cands]


def select_and_plan(
    A: PatternMatrix,
    cm: CostModel = CostModel(),
    optimize: Optional[Callable] = None,
    patience: int = 10,
    *,
    final_optimize: Optional[Callable] = None,
    max_k: Optional[int] = None,
) -> EliminationPlan:
    """Greedy search over how many of the densest rows/columns to eliminate.

    ``optimize(core)`` must return an object with a ``final_diags`` field.
    The ``k`` densest entities are removed for ``k = 0, 1, ...``; the search
    stops after ``patience`` consecutive values of ``k`` that fail to beat
    the best profit, or once the next candidate's degree in the current core
    drops below the core's average degree.  ``final_optimize``, when given,
    re-optimizes the chosen core (typically with a larger budget).
    """
    if patience < 1:
        raise ValueError("patience must be >= 1")
    if optimize is None:
        from .pipeline import Pipeline

        optimize = Pipeline()
    base = optimize(A)
    before = base.final_diags
    best = _plan(A, cm, [], [], A, before, before, base)
    if A.nnz == 0:
        return best
    cands = elimination_candidates(A)
    limit = len(cands) if max_k is None else min(max_k, len(cands))
    dr: list = []
    dc: list = []
    core = A
    stale = 0
    for kind, idx in cands[:limit]:
        if core.nnz == 0:
            break
        cur_deg = len(core.row(idx)) if kind == "row" else len(core.col(idx))
        if cur_deg < core.nnz / core.n:
            break
        (dr if kind == "row" else dc).append(idx)
        core = dissect(A, dr, dc)
        res = optimize(core)
        plan = _plan(A, cm, dr, dc, core, before, res.final_diags, res)
        if plan.profit_us > best.profit_us:
            best = plan
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
    if final_optimize is not None and (best.dense_rows or best.dense_cols):
        res = final_optimize(best.core)
        if res.final_diags <= best.diags_after:
            best = _plan(A, cm, best.dense_rows, best.dense_cols, best.core, before, res.final_diags, res)
    return best
