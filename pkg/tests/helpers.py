"""Shared fixtures: small hand-drawn matrices, graph builders and oracles."""

from __future__ import annotations

import itertools

import numpy as np

from diagpack.core import PatternMatrix, Permutation
from diagpack.symmetrize import SymmetrizedGraph, _from_edges


def toy_7x7(values: bool = False) -> PatternMatrix:
    """Full main diagonal plus entries (0,2), (2,4), (4,6), (6,1): two diagonals."""
    rows = list(range(7)) + [0, 2, 4, 6]
    cols = list(range(7)) + [2, 4, 6, 1]
    return PatternMatrix.from_coo(7, rows, cols, np.ones(11) if values else None)


def _from_one_based(pairs, n=6, values=False) -> PatternMatrix:
    r = [a - 1 for a, _ in pairs]
    c = [b - 1 for _, b in pairs]
    return PatternMatrix.from_coo(n, r, c, np.ones(len(r)) if values else None)


# two-row exchange: rows 1 and 3 (0-based) swap, 3 -> 2 diagonals
SWAP2_BEFORE = [(1, 2), (2, 5), (4, 5), (4, 3), (5, 6)]
SWAP2_AFTER = [(1, 2), (4, 5), (2, 5), (2, 3), (5, 6)]
SWAP2_ROWS = (1, 3)

# three-row rotation on rows 1, 2, 4 (0-based)
ROT3_BEFORE = [(1, 1), (1, 5), (5, 2), (5, 6), (2, 3), (2, 1), (3, 5), (3, 3), (6, 3)]
ROT3_AFTER = [(1, 1), (1, 5), (2, 2), (2, 6), (3, 3), (3, 1), (5, 5), (5, 3), (6, 3)]
# row 1 -> position 2, row 2 -> position 4, row 4 -> position 1
ROT3_CYCLE = (1, 2, 4)


def swap2_before(values=False):
    return _from_one_based(SWAP2_BEFORE, values=values)


def swap2_after(values=False):
    return _from_one_based(SWAP2_AFTER, values=values)


def rot3_before(values=False):
    return _from_one_based(ROT3_BEFORE, values=values)


def rot3_after(values=False):
    return _from_one_based(ROT3_AFTER, values=values)


def signed_offsets(A: PatternMatrix) -> int:
    """Number of distinct ``j - i`` values (no wrap-around)."""
    rows, cols = A.coo()
    return len(set((cols - rows).tolist()))


def random_pattern(rng: np.random.Generator, n: int, density: float, values: bool = False) -> PatternMatrix:
    mask = rng.random((n, n)) < density
    r, c = np.nonzero(mask)
    vals = rng.standard_normal(r.size) + 3.0 if values else None
    return PatternMatrix.from_coo(n, r, c, vals)


def residue_count_oracle(A: PatternMatrix, pr: Permutation, pc: Permutation) -> list:
    n = A.n
    hist = [0] * n
    for i in range(n):
        for j in A.row_adj[i]:
            hist[(int(pc.forward[j]) - int(pr.forward[i])) % n] += 1
    return hist


def graph(m: int, edges) -> SymmetrizedGraph:
    e = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
    return _from_edges("pattern", m, e[:, 0], e[:, 1], m)


def path_graph(m: int) -> SymmetrizedGraph:
    return graph(m, [(i, i + 1) for i in range(m - 1)])


def cycle_graph(m: int) -> SymmetrizedGraph:
    return graph(m, [(i, (i + 1) % m) for i in range(m)])


def grid_graph(rows: int, cols: int) -> SymmetrizedGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return graph(rows * cols, edges)


def star_graph(leaves: int) -> SymmetrizedGraph:
    return graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def width(G: SymmetrizedGraph, order) -> int:
    """Largest ``|pos(u) - pos(v)|`` over the edges, for ``order[pos] = vertex``."""
    pos = {v: p for p, v in enumerate(order)}
    return max((abs(pos[u] - pos[v]) for u, v in G.edges()), default=0)


def min_width_brute(G: SymmetrizedGraph) -> int:
    return min(width(G, order) for order in itertools.permutations(range(G.m)))


def is_bijection(order, m: int) -> bool:
    return sorted(int(v) for v in order) == list(range(m))
