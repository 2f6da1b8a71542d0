"""Iterative improvement of a row/column permutation pair.

Moves exchange the positions of two rows (or two columns), or rotate the
positions of three.  A move is evaluated exactly by lifting the moving
entities' nonzeros out of the diagonal histogram, reinserting them at their
new positions, reading off which diagonals emptied or filled, and restoring
the histogram if the move is rejected.  Since the nonzeros of one row (or
column) always lie on pairwise distinct diagonals, a lift never empties the
same diagonal twice and the counts are exact.

A move is accepted when it

* removes at least one diagonal, or
* keeps the count but lowers the occupancy of the sparsest diagonal, or
* keeps both but makes more diagonals share that minimum occupancy.

The last two rules steer the search towards histograms with a few nearly
empty diagonals, which later moves can clear.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .core import DiagState, InvariantError, PatternMatrix, Permutation, count_diagonals

ROW, COL = "row", "col"


@dataclass(frozen=True)
class OptimizerConfig:
    max_passes: int = 100
    slack: int = 3
    time_budget: float = 3600.0
    seed: int = 0
    enable_3opt: bool = True
    rng_partner_cap: int = 64

    def __post_init__(self):
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.slack < 0:
            raise ValueError("slack must be >= 0")
        if not self.time_budget > 0:
            raise ValueError("time_budget must be > 0")
        if self.rng_partner_cap < 1:
            raise ValueError("rng_partner_cap must be >= 1")


@dataclass
class MoveDelta:
    """Outcome of a probed move.

    ``gain`` is the decrease in the diagonal count; ``leaves`` and
    ``arrivals`` list the diagonals that emptied and filled on the way.
    """

    gain: int
    leaves: list
    arrivals: list
    secondary_effect: tuple  # (min_nnz, min_nnz_count) after the move
    before: tuple  # (num_diags, min_nnz, min_nnz_count) before the move


def accept_rule(delta: MoveDelta, state: Optional[DiagState] = None) -> bool:
    """Decide on a probed move; ``state`` overrides the recorded pre-move stats."""
    if state is not None:
        min_before, count_before = state.min_nnz, state.min_nnz_count
    else:
        _, min_before, count_before = delta.before
    if delta.gain > 0:
        return True
    if delta.gain < 0:
        return False
    min_after, count_after = delta.secondary_effect
    if min_after < min_before:
        return True
    return min_after == min_before and count_after > count_before


class SearchState:
    """Live permutations plus the diagonal histogram they induce.

    ``pos[side][u]`` is the position of row/column ``u`` and ``at[side][p]``
    the entity sitting at position ``p``.
    """

    def __init__(self, A: PatternMatrix, pr: Permutation, pc: Permutation):
        if pr.n != A.n or pc.n != A.n:
            raise ValueError("permutation sizes do not match matrix order")
        self.A = A
        self.n = A.n
        self.adj = {ROW: A.row_adj, COL: A.col_adj}
        self.pos = {ROW: pr.forward.tolist(), COL: pc.forward.tolist()}
        self.at = {ROW: pr.inverse.tolist(), COL: pc.inverse.tolist()}
        self.diag = count_diagonals(A, pr, pc)

    # -- elementary histogram updates --------------------------------------

    def _residues(self, side: str, u: int, p: int) -> list:
        n = self.n
        if side == ROW:
            pc = self.pos[COL]
            return [(pc[j] - p) % n for j in self.adj[ROW][u]]
        pr = self.pos[ROW]
        return [(p - pr[i]) % n for i in self.adj[COL][u]]

    def lift(self, side: str, u: int, out: list) -> None:
        """Remove ``u``'s nonzeros at its current position; emptied diagonals go to ``out``."""
        dec = self.diag.decrement
        for k in self._residues(side, u, self.pos[side][u]):
            if dec(k):
                out.append(k)

    def place(self, side: str, u: int, q: int, out: list) -> None:
        """Insert ``u``'s nonzeros at position ``q``; newly filled diagonals go to ``out``."""
        inc = self.diag.increment
        for k in self._residues(side, u, q):
            if inc(k):
                out.append(k)
        self.pos[side][u] = q
        self.at[side][q] = u

    # -- moves -----------------------------------------------------------------

    def cycle(self, side: str, entities, leaves: list, arrivals: list) -> None:
        """Move ``entities[t]`` to the position of ``entities[t+1]`` (cyclically)."""
        pos = self.pos[side]
        targets = [pos[e] for e in entities[1:]] + [pos[entities[0]]]
        for e in entities:
            self.lift(side, e, leaves)
        for e, q in zip(entities, targets):
            self.place(side, e, q, arrivals)

    def undo_cycle(self, side: str, entities) -> None:
        pos = self.pos[side]
        back = [pos[entities[-1]]] + [pos[e] for e in entities[:-1]]
        sink: list = []
        for e in entities:
            self.lift(side, e, sink)
        for e, q in zip(entities, back):
            self.place(side, e, q, sink)

    def try_cycle(self, side: str, entities, keep=None) -> tuple:
        """Apply a cyclic move, evaluate it, and keep it only if ``keep(delta)``.

        ``keep=None`` always rolls back.  Returns ``(delta, kept)``.
        """
        d = self.diag
        before = (d.num_diags, d.min_nnz, d.min_nnz_count)
        leaves: list = []
        arrivals: list = []
        self.cycle(side, entities, leaves, arrivals)
        delta = MoveDelta(
            len(leaves) - len(arrivals), leaves, arrivals, (d.min_nnz, d.min_nnz_count), before
        )
        kept = keep is not None and keep(delta)
        if not kept:
            self.undo_cycle(side, entities)
        return delta, kept

    # -- views ----------------------------------------------------------------

    def permutations(self) -> tuple:
        return Permutation(self.pos[ROW]), Permutation(self.pos[COL])

    def check(self) -> None:
        pr, pc = self.permutations()
        fresh = count_diagonals(self.A, pr, pc)
        if fresh != self.diag:
            raise InvariantError("incremental histogram diverged from a full recount")


# ---------------------------------------------------------------------------
# function-style interface
# ---------------------------------------------------------------------------


def init_stats(A: PatternMatrix, pr: Permutation, pc: Permutation) -> SearchState:
    return SearchState(A, pr, pc)


def leave_count(state: SearchState, side: str, u: int, p: Optional[int] = None) -> tuple:
    """Diagonals that would empty if ``u`` (sitting at ``p``) were lifted out."""
    p = state.pos[side][u] if p is None else p
    hist = state.diag.diag_nnz
    ks = [k for k in state._residues(side, u, p) if hist[k] == 1]
    return len(ks), ks


def arrive_count(state: SearchState, side: str, u: int, q: int) -> tuple:
    """Diagonals that would fill if ``u`` were lifted out and reinserted at ``q``."""
    hist = state.diag.diag_nnz
    own = state._residues(side, u, state.pos[side][u])
    for k in own:
        hist[k] -= 1
    ks = [k for k in state._residues(side, u, q) if hist[k] == 0]
    for k in own:
        hist[k] += 1
    return len(ks), ks


def probe_2opt(state: SearchState, c1: int, c2: int, side: str) -> MoveDelta:
    if c1 == c2:
        raise ValueError("2OPT needs two distinct entities")
    return state.try_cycle(side, (c1, c2))[0]


def probe_3opt(state: SearchState, c1: int, c2: int, c3: int, side: str) -> MoveDelta:
    """Probe ``c1 -> pos(c2)``, ``c2 -> pos(c3)``, ``c3 -> pos(c1)``."""
    if len({c1, c2, c3}) != 3:
        raise ValueError("3OPT needs three distinct entities")
    return state.try_cycle(side, (c1, c2, c3))[0]


def refresh_candidates(state: SearchState, slack: int, rng: Optional[random.Random] = None) -> tuple:
    """Rows and columns touching a diagonal with ``0 < nnz <= min_nnz + slack``."""
    A = state.A
    if A.nnz == 0:
        return [], []
    rows, cols = A.coo()
    pr = np.asarray(state.pos[ROW], dtype=np.int64)
    pc = np.asarray(state.pos[COL], dtype=np.int64)
    k = (pc[cols] - pr[rows]) % state.n
    hist = np.asarray(state.diag.diag_nnz)
    hot = hist[k] <= state.diag.min_nnz + slack
    qr = np.unique(rows[hot]).tolist()
    qc = np.unique(cols[hot]).tolist()
    if rng is not None:
        rng.shuffle(qr)
        rng.shuffle(qc)
    return qr, qc


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


class RunResult(NamedTuple):
    pr: Permutation
    pc: Permutation
    state: DiagState
    trace: list


class _Sweeper:
    def __init__(self, st: SearchState, cfg: OptimizerConfig, rng: random.Random, deadline: float, bound: int):
        self.st = st
        self.cfg = cfg
        self.rng = rng
        self.deadline = deadline
        self.bound = bound
        self.stopped = False

    def _done(self) -> bool:
        if self.st.diag.num_diags <= self.bound or time.perf_counter() >= self.deadline:
            self.stopped = True
        return self.stopped

    def _worth_probing(self, side: str, c1: int) -> bool:
        # a move without c1 emptying a diagonal can only win via the secondary rules,
        # which need c1 on a diagonal close to the minimum occupancy
        st = self.st
        hist = st.diag.diag_nnz
        limit = st.diag.min_nnz + 1
        return any(hist[k] <= limit for k in st._residues(side, c1, st.pos[side][c1]))

    def _partners(self, exclude: set) -> list:
        n = self.st.n
        cap = self.cfg.rng_partner_cap
        pool = self.rng.sample(range(n), min(n, cap + len(exclude) + 1))
        out = [v for v in pool if v not in exclude]
        return out[:cap]

    def sweep_2opt(self, side: str, queue: list) -> int:
        st = self.st
        marked: set = set()
        accepted = 0
        for c1 in queue:
            if self._done():
                break
            if c1 in marked or not self._worth_probing(side, c1):
                continue
            for c2 in self._partners(marked | {c1}):
                _, kept = st.try_cycle(side, (c1, c2), accept_rule)
                if kept:
                    marked.update((c1, c2))
                    accepted += 1
                    break
        return accepted

    def sweep_3opt(self, side: str, queue: list) -> int:
        st = self.st
        n = st.n
        marked: set = set()
        accepted = 0
        if n < 3:
            return 0
        for c1 in queue:
            if self._done():
                break
            if c1 in marked or not self._worth_probing(side, c1):
                continue
            seconds = [c for c in queue if c != c1 and c not in marked]
            if not seconds:
                continue
            for _ in range(self.cfg.rng_partner_cap):
                c2 = seconds[self.rng.randrange(len(seconds))]
                c3 = self.rng.randrange(n)
                if c3 in marked or c3 == c1 or c3 == c2:
                    continue
                _, kept = st.try_cycle(side, (c1, c2, c3), accept_rule)
                if kept:
                    marked.update((c1, c2, c3))
                    accepted += 1
                    break
        return accepted


def run(
    A: PatternMatrix,
    pr0: Optional[Permutation] = None,
    pc0: Optional[Permutation] = None,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> RunResult:
    """Improve ``(pr0, pc0)`` by 2OPT/3OPT sweeps until no pass makes progress.

    Each pass refreshes the candidate queues, sweeps rows then columns with
    2OPT, refreshes again and sweeps rows then columns with 3OPT.  The run
    also stops when the diagonal count reaches the maximum degree (nothing
    can beat it), when ``cfg.max_passes`` passes are done, or when the time
    budget runs out.
    """
    pr0 = pr0 if pr0 is not None else Permutation.identity(A.n)
    pc0 = pc0 if pc0 is not None else Permutation.identity(A.n)
    st = SearchState(A, pr0, pc0)
    start = time.perf_counter()
    rng = random.Random(cfg.seed)
    sw = _Sweeper(st, cfg, rng, start + cfg.time_budget, A.max_degree())
    trace = []
    if A.nnz and A.n > 1:
        for pass_no in range(1, cfg.max_passes + 1):
            if sw._done():
                break
            qr, qc = refresh_candidates(st, cfg.slack, rng)
            acc2 = sw.sweep_2opt(ROW, qr)
            acc2 += sw.sweep_2opt(COL, qc)
            acc3 = 0
            if cfg.enable_3opt and not sw.stopped:
                qr, qc = refresh_candidates(st, cfg.slack, rng)
                acc3 = sw.sweep_3opt(ROW, qr)
                acc3 += sw.sweep_3opt(COL, qc)
            trace.append(
                {
                    "pass": pass_no,
                    "num_diags": st.diag.num_diags,
                    "min_nnz": st.diag.min_nnz,
                    "accepted_2opt": acc2,
                    "accepted_3opt": acc3,
                    "elapsed_ms": round(1000.0 * (time.perf_counter() - start), 3),
                }
            )
            if acc2 + acc3 == 0:
                break
    pr, pc = st.permutations()
    return RunResult(pr, pc, st.diag.copy(), trace)


def write_trace(trace: list, path) -> None:
    with open(path, "w") as fh:
        for rec in trace:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
