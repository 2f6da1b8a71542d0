"""Initial row/column orderings.

Every graph ordering returns a list ``order`` with ``order[pos] = vertex``.
Disconnected graphs are handled component by component: the component of
the requested root comes first, the remaining ones follow in decreasing size
(ties by smallest vertex id), each rooted at its own pseudo-peripheral node.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import PatternMatrix, Permutation, num_diagonals
from .lanczos import lanczos_largest
from .symmetrize import SymmetrizedGraph, split_bipartite_order, symmetrize

ORDERINGS = ("natural", "rcm", "mp", "lbs", "eigen")
DEFAULT_PATIENCE = 5


@dataclass
class BfsLevels:
    root: int
    levels: list

    @property
    def depth(self) -> int:
        return len(self.levels)

    def vertices(self) -> list:
        return [v for level in self.levels for v in level]


def bfs_levels(G: SymmetrizedGraph, root: int) -> BfsLevels:
    """Level sets of a BFS from ``root``; each level sorted by vertex id."""
    adj = G.adj
    seen = {root}
    levels = [[root]]
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        nxt.sort()
        levels.append(nxt)
        frontier = nxt
    return BfsLevels(root, levels)


def pseudo_peripheral_node(
    G: SymmetrizedGraph,
    start: Optional[int] = None,
    patience: int = DEFAULT_PATIENCE,
    rng: Optional[random.Random] = None,
) -> int:
    """Chase farthest BFS levels until the depth stalls for ``patience`` rounds.

    With ``rng`` given, the start (when ``None``) and the pick inside the
    farthest level are random; otherwise the smallest vertex id is used.
    """
    if G.m == 0:
        raise ValueError("empty graph")
    if patience < 1:
        raise ValueError("patience must be >= 1")
    if start is None:
        start = rng.randrange(G.m) if rng is not None else 0
    u = start
    best_depth = 0
    streak = 0
    while streak < patience:
        lv = bfs_levels(G, u)
        if lv.depth > best_depth:
            best_depth = lv.depth
            streak = 0
        else:
            streak += 1
        far = lv.levels[-1]
        u = rng.choice(far) if rng is not None else far[0]
    return u


def eccentricity(G: SymmetrizedGraph, v: int) -> int:
    return bfs_levels(G, v).depth - 1


def components(G: SymmetrizedGraph) -> list:
    """Connected components, largest first, ties by smallest vertex."""
    seen = np.zeros(G.m, dtype=bool)
    comps = []
    for v in range(G.m):
        if not seen[v]:
            comp = bfs_levels(G, v).vertices()
            seen[comp] = True
            comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def _by_component(G, root, one_component: Callable, patience: int, rng) -> list:
    order = []
    done = np.zeros(G.m, dtype=bool)
    if root is not None:
        part = one_component(G, root)
        order.extend(part)
        done[part] = True
    for comp in components(G):
        if done[comp[0]]:
            continue
        r = pseudo_peripheral_node(G, comp[0], patience, rng)
        part = one_component(G, r)
        order.extend(part)
        done[part] = True
    return order


def _cm_component(G: SymmetrizedGraph, root: int) -> list:
    adj = G.adj
    deg = G.degrees()
    seen = {root}
    queue = [root]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        fresh = [w for w in adj[v] if w not in seen]
        fresh.sort(key=lambda w: (deg[w], w))
        seen.update(fresh)
        queue.extend(fresh)
    queue.reverse()
    return queue


def _mp_component(G: SymmetrizedGraph, root: int) -> list:
    levels = bfs_levels(G, root).levels
    return [v for lv in levels[0::2] for v in lv] + [v for lv in levels[1::2] for v in lv]


def _lbs_component(G: SymmetrizedGraph, root: int) -> list:
    levels = bfs_levels(G, root).levels
    size = sum(len(lv) for lv in levels)
    adj = G.adj
    labelled = {root}
    order = [root]
    flag = {}
    sweep = 0
    while len(order) < size:
        sweep += 1
        for lv in levels[1:]:
            for v in lv:
                if v in labelled or flag.get(v) == sweep:
                    continue
                labelled.add(v)
                order.append(v)
                for w in adj[v]:
                    if w not in labelled:
                        flag[w] = sweep
    return order


def rcm_order(G: SymmetrizedGraph, root: Optional[int] = None, *, patience: int = DEFAULT_PATIENCE, rng=None) -> list:
    """Reverse Cuthill-McKee: BFS with neighbours queued by increasing degree, reversed."""
    return _by_component(G, root, _cm_component, patience, rng)


def mp_order(G: SymmetrizedGraph, root: Optional[int] = None, *, patience: int = DEFAULT_PATIENCE, rng=None) -> list:
    """Miller-Pritikin parity blocks: even BFS levels, then odd ones."""
    return _by_component(G, root, _mp_component, patience, rng)


def lbs_order(G: SymmetrizedGraph, root: Optional[int] = None, *, patience: int = DEFAULT_PATIENCE, rng=None) -> list:
    """Level-based sweep.

    Repeated sweeps over levels ``1..d-1``; labelling a vertex flags its
    unlabelled neighbours, which are then skipped for the rest of the sweep.
    """
    return _by_component(G, root, _lbs_component, patience, rng)


_GRAPH_ORDERINGS = {"rcm": rcm_order, "mp": mp_order, "lbs": lbs_order}


def graph_ordering(G: SymmetrizedGraph, method: str, *, patience: int = DEFAULT_PATIENCE, seed: Optional[int] = None) -> list:
    """Run ``method`` rooted at a pseudo-peripheral node of the largest component."""
    if G.m == 0:
        return []
    rng = random.Random(seed) if seed is not None else None
    first = components(G)[0]
    start = rng.choice(first) if rng is not None else first[0]
    root = pseudo_peripheral_node(G, start, patience, rng)
    return _GRAPH_ORDERINGS[method](G, root, patience=patience, rng=rng)


def order_to_permutations(order, G: SymmetrizedGraph) -> tuple:
    """Turn a vertex ordering into ``(pr, pc)`` according to the graph mode."""
    if G.mode == "bipartite":
        return split_bipartite_order(order, G.origin_n)
    p = Permutation.from_order(order)
    return p, p


def initial_permutations(
    A: PatternMatrix,
    ordering: str = "rcm",
    sym: str = "pattern",
    *,
    patience: int = DEFAULT_PATIENCE,
    seed: Optional[int] = None,
    nev: int = 50,
) -> tuple:
    """``(pr, pc)`` produced by ``ordering`` under symmetrization ``sym``."""
    if ordering == "natural":
        ident = Permutation.identity(A.n)
        return ident, ident
    if ordering == "eigen":
        pr, pc, _ = eigen_order(A, sym, nev, seed=0 if seed is None else seed)
        return pr, pc
    if ordering not in _GRAPH_ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    G = symmetrize(A, sym)
    order = graph_ordering(G, ordering, patience=patience, seed=seed)
    return order_to_permutations(order, G)


# ---------------------------------------------------------------------------
# spectral ordering
# ---------------------------------------------------------------------------


def top_eigenvectors(G: SymmetrizedGraph, nev: int, *, tol: float = 1e-6, seed: int = 0):
    """Eigenpairs of the adjacency with the ``nev`` largest algebraic eigenvalues."""
    return lanczos_largest(G.adjacency_matrix(), nev, tol=tol, seed=seed)


def angular_order(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vertices sorted by ``atan2(y, x)``, ties by vertex id."""
    ang = np.arctan2(y, x)
    return np.lexsort((np.arange(ang.size), ang))


def eigen_order(A: PatternMatrix, mode: str = "pattern", nev: int = 50, *, tol: float = 1e-6, seed: int = 0) -> tuple:
    """Best angular ordering over all pairs of the top ``nev`` eigenvectors.

    Returns ``(pr, pc, num_diags)``.
    """
    G = symmetrize(A, mode)
    if nev < 2 or nev > G.m:
        raise ValueError(f"nev must lie in [2, {G.m}]")
    _, U = top_eigenvectors(G, nev, tol=tol, seed=seed)
    n = A.n
    rows, cols = A.coo()
    best = None
    pos = np.empty(G.m, dtype=np.int64)
    ar = np.arange(G.m, dtype=np.int64)
    for i in range(nev):
        for j in range(i + 1, nev):
            order = angular_order(U[:, i], U[:, j])
            if mode == "bipartite":
                ro = order[order < n]
                co = order[order >= n] - n
                pr_f = np.empty(n, dtype=np.int64)
                pc_f = np.empty(n, dtype=np.int64)
                pr_f[ro] = ar[:n]
                pc_f[co] = ar[:n]
                k = (pc_f[cols] - pr_f[rows]) % n
            else:
                pos[order] = ar
                k = (pos[cols] - pos[rows]) % n
            count = int(np.count_nonzero(np.bincount(k, minlength=n)))
            if best is None or count < best[0]:
                best = (count, order.copy())
    count, order = best
    pr, pc = order_to_permutations(order, G)
    return pr, pc, count


def spectral_coordinates(A: PatternMatrix, mode: str = "pattern", pair=(1, 2), *, seed: int = 0) -> np.ndarray:
    """Per-vertex 2D coordinates from two eigenvectors (0-based, by decreasing eigenvalue)."""
    G = symmetrize(A, mode)
    _, U = top_eigenvectors(G, max(pair) + 1, seed=seed)
    return np.column_stack([U[:, pair[0]], U[:, pair[1]]])
