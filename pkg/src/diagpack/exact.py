"""Optimal diagonal counts for small matrices, and an ILP model export.

Shifting every row position by the same constant shifts every diagonal
index by that constant and leaves the count unchanged.  The search
therefore pins one row to position 0 and enumerates the remaining row
placements for each of the ``n!`` column permutations, pruning any
partial row placement whose diagonals already reach the incumbent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import PatternMatrix, Permutation, num_diagonals

DEFAULT_LIMIT = 8
BRUTE_FORCE_LIMIT = 6


@dataclass
class ExactResult:
    optimum: int
    pr: Permutation
    pc: Permutation
    nodes_explored: int
    method: str

    def to_json(self) -> dict:
        return {
            "optimum": self.optimum,
            "pr": self.pr.forward.tolist(),
            "pc": self.pc.forward.tolist(),
            "nodes_explored": self.nodes_explored,
            "method": self.method,
        }


def exact_cbs2d(A: PatternMatrix, limit: int = DEFAULT_LIMIT, method: str = "branch-and-bound") -> ExactResult:
    """Minimum number of non-empty cyclic diagonals over all row/column permutations.

    ``method="brute-force"`` enumerates every permutation pair without
    pruning or symmetry breaking (``n <= 6``); it serves as an oracle.
    """
    if A.n > limit:
        raise ValueError(f"n={A.n} exceeds the exact-search limit {limit}")
    if method == "brute-force":
        return _brute_force(A)
    if method != "branch-and-bound":
        raise ValueError(f"unknown method {method!r}")
    return _branch_and_bound(A)


class _Search:
    def __init__(self, A: PatternMatrix):
        n = A.n
        self.n = n
        rdeg = A.row_degrees()
        # densest rows first: they commit the most diagonals early
        self.rows = sorted((i for i in range(n) if rdeg[i] > 0), key=lambda i: (-int(rdeg[i]), i))
        self.empty_rows = [i for i in range(n) if rdeg[i] == 0]
        self.row_cols = [A.row_adj[i] for i in self.rows]
        self.lower = A.max_degree()
        self.best = num_diagonals(A)
        self.best_pr = list(range(n))
        self.best_pc = list(range(n))
        self.nodes = 0
        self.placement = [0] * len(self.rows)

    def row_masks(self, pc) -> list:
        """``masks[t][p]``: bitmask of diagonals hit by ``rows[t]`` at position ``p``."""
        n = self.n
        out = []
        for cols in self.row_cols:
            targets = [pc[j] for j in cols]
            out.append([sum({1 << ((q - p) % n) for q in targets}) for p in range(n)])
        return out

    def dfs(self, t: int, used: int, diag: int, masks, pc) -> None:
        if t == len(self.rows):
            count = bin(diag).count("1")
            if count < self.best:
                self._record(count, used, pc)
            return
        mrow = masks[t]
        for p in range(self.n):
            if (used >> p) & 1:
                continue
            nd = diag | mrow[p]
            self.nodes += 1
            if bin(nd).count("1") >= self.best:
                continue
            self.placement[t] = p
            self.dfs(t + 1, used | (1 << p), nd, masks, pc)
            if self.best == self.lower:
                return

    def _record(self, count: int, used: int, pc) -> None:
        n = self.n
        pr = [0] * n
        for t, r in enumerate(self.rows):
            pr[r] = self.placement[t]
        free = [p for p in range(n) if not (used >> p) & 1]
        for r, p in zip(self.empty_rows, free):
            pr[r] = p
        self.best = count
        self.best_pr = pr
        self.best_pc = list(pc)


def _branch_and_bound(A: PatternMatrix) -> ExactResult:
    n = A.n
    s = _Search(A)
    if A.nnz and n:
        for pc in itertools.permutations(range(n)):
            if s.best == s.lower:
                break
            masks = s.row_masks(pc)
            s.placement[0] = 0
            s.nodes += 1
            s.dfs(1, 1, masks[0][0], masks, pc)
    else:
        s.best = 0
    return ExactResult(s.best, Permutation(s.best_pr), Permutation(s.best_pc), s.nodes, "branch-and-bound")


def _brute_force(A: PatternMatrix) -> ExactResult:
    n = A.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_LIMIT}")
    ident = Permutation.identity(n)
    if A.nnz == 0 or n == 0:
        return ExactResult(0, ident, ident, 0, "brute-force")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    rows, cols = A.coo()
    row_pos = perms[:, rows]  # (n!, nnz)
    bits = np.int64(1) << np.arange(n, dtype=np.int64)
    best = None
    for b, pc in enumerate(perms):
        k = (pc[cols][None, :] - row_pos) % n
        masks = np.bitwise_or.reduce(bits[k], axis=1)
        counts = np.array([bin(int(m)).count("1") for m in masks])
        a = int(np.argmin(counts))
        if best is None or counts[a] < best[0]:
            best = (int(counts[a]), a, b)
    count, a, b = best
    return ExactResult(count, Permutation(perms[a]), Permutation(perms[b]), len(perms) ** 2, "brute-force")


# ---------------------------------------------------------------------------
# ILP export
# ---------------------------------------------------------------------------


def ilp_sizes(A: PatternMatrix) -> dict:
    n = A.n
    return {"variables": 2 * n * n + n, "activation_constraints": A.nnz * n * n, "assignment_constraints": 4 * n}


def export_ilp(A: PatternMatrix, path) -> dict:
    """Write the binary program in LP format; returns its size summary.

    ``p_i_a = 1`` puts row ``i`` at position ``a``, ``q_j_b = 1`` puts column
    ``j`` at position ``b`` and ``z_k`` marks diagonal ``k`` as used.
    """
    n = A.n
    lines = [f"\\ cyclic diagonal packing, n={n}, nnz={A.nnz}", "Minimize"]
    lines.append(" obj: " + (" + ".join(f"z_{k}" for k in range(n)) or "0"))
    lines.append("Subject To")
    for i in range(n):
        lines.append(f" row_{i}: " + " + ".join(f"p_{i}_{a}" for a in range(n)) + " = 1")
    for a in range(n):
        lines.append(f" rpos_{a}: " + " + ".join(f"p_{i}_{a}" for i in range(n)) + " = 1")
    for j in range(n):
        lines.append(f" col_{j}: " + " + ".join(f"q_{j}_{b}" for b in range(n)) + " = 1")
    for b in range(n):
        lines.append(f" cpos_{b}: " + " + ".join(f"q_{j}_{b}" for j in range(n)) + " = 1")
    rows, cols = A.coo()
    for i, j in zip(rows.tolist(), cols.tolist()):
        for a in range(n):
            for b in range(n):
                k = (b - a) % n
                lines.append(f" act_{i}_{j}_{a}_{b}: z_{k} - p_{i}_{a} - q_{j}_{b} >= -1")
    if n:
        lines.append(" fix: p_0_0 = 1")
    lines.append("Binary")
    names = [f"p_{i}_{a}" for i in range(n) for a in range(n)]
    names += [f"q_{j}_{b}" for j in range(n) for b in range(n)]
    names += [f"z_{k}" for k in range(n)]
    for t in range(0, len(names), 10):
        lines.append(" " + " ".join(names[t:t + 10]))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return ilp_sizes(A)
