"""Row/column reordering of sparse matrices into few cyclic diagonals."""

from .core import (
    DiagPackError,
    DiagState,
    InvariantError,
    MatrixMarketError,
    PatternMatrix,
    Permutation,
    PermutationError,
    apply_permutations,
    count_diagonals,
    load_matrix_market,
    num_diagonals,
    read_permutations,
    write_matrix_market,
    write_permutations,
)
from .elimination import CostModel, EliminationPlan, assemble_result, dissect, gain, overhead, select_and_plan
from .emulator import DiagonalDecomposition, OpCount, decompose, estimate_time, hs_spmv, permuted_pipeline
from .exact import ExactResult, exact_cbs2d, export_ilp
from .lanczos import EigenSolverError, lanczos_largest
from .optimizer import MoveDelta, OptimizerConfig, accept_rule, run
from .orderings import bfs_levels, eigen_order, lbs_order, mp_order, pseudo_peripheral_node, rcm_order
from .pipeline import Pipeline, PipelineResult
from .symmetrize import SymmetrizedGraph, split_bipartite_order, symmetrize
from .synth import SynthSpec, chebyshev_like, generate

__version__ = "0.1.0"
