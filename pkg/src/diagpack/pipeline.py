"""Ordering followed by local search, the unit of work shared by every front end."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .core import PatternMatrix, Permutation, num_diagonals
from .optimizer import OptimizerConfig, run
from .orderings import initial_permutations

OPT_LEVELS = ("none", "2opt", "3opt")
GRAPH_ORDERINGS = ("rcm", "mp", "lbs", "eigen")
SYMMETRIZATIONS = ("pattern", "bipartite")


@dataclass
class PipelineResult:
    pr: Permutation
    pc: Permutation
    init_diags: int
    final_diags: int
    ordering: str
    sym: str
    opt: str
    elapsed_s: float
    trace: list = field(default_factory=list)


@dataclass
class Pipeline:
    """Callable ``A -> PipelineResult`` for one (ordering, symmetrization, level) triple.

    ``nev`` is clamped to the graph size for small matrices.
    """

    ordering: str = "rcm"
    sym: str = "pattern"
    opt: str = "3opt"
    config: OptimizerConfig = field(default_factory=OptimizerConfig)
    nev: int = 50
    seed: Optional[int] = None

    def __post_init__(self):
        if self.opt not in OPT_LEVELS:
            raise ValueError(f"unknown optimization level {self.opt!r}; expected one of {OPT_LEVELS}")

    def with_budget(self, seconds: float) -> "Pipeline":
        return replace(self, config=replace(self.config, time_budget=seconds))

    def __call__(self, A: PatternMatrix) -> PipelineResult:
        t0 = time.perf_counter()
        pr, pc = self._initial(A)
        init = num_diagonals(A, pr, pc)
        trace: list = []
        if self.opt != "none":
            cfg = replace(self.config, enable_3opt=self.opt == "3opt")
            pr, pc, state, trace = run(A, pr, pc, cfg)
            final = state.num_diags
        else:
            final = init
        return PipelineResult(pr, pc, init, final, self.ordering, self.sym, self.opt, time.perf_counter() - t0, trace)

    def _initial(self, A: PatternMatrix) -> tuple:
        if self.ordering == "eigen":
            m = A.n * (2 if self.sym == "bipartite" else 1)
            if m < 2:
                ident = Permutation.identity(A.n)
                return ident, ident
            return initial_permutations(A, "eigen", self.sym, nev=min(self.nev, m), seed=self.seed)
        return initial_permutations(A, self.ordering, self.sym, seed=self.seed)


def best_of(A: PatternMatrix, pipelines) -> tuple:
    """Run every pipeline; return ``(best, all_results)`` with the lowest final count first.

    Ties keep the earliest pipeline.
    """
    results = [p(A) for p in pipelines]
    best = min(results, key=lambda r: r.final_diags)
    return best, results


def singleton_pipelines(opt: str = "3opt", config: Optional[OptimizerConfig] = None, *, nev: int = 50,
                        orderings=GRAPH_ORDERINGS, syms=SYMMETRIZATIONS, include_natural: bool = True) -> list:
    config = config or OptimizerConfig()
    out = [Pipeline("natural", "pattern", opt, config, nev)] if include_natural else []
    for sym in syms:
        for ordering in orderings:
            out.append(Pipeline(ordering, sym, opt, config, nev))
    return out
