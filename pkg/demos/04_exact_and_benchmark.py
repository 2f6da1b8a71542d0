"""Exact optima for tiny matrices and a miniature variant comparison.

Run:  python3 demos/04_exact_and_benchmark.py
"""

import tempfile

import numpy as np

from diagpack import PatternMatrix, write_matrix_market
from diagpack.exact import exact_cbs2d
from diagpack.harness import HarnessConfig, Variant, leaderboard, run_batch
from diagpack.optimizer import OptimizerConfig, run
from diagpack.synth import SynthSpec, generate

rng = np.random.default_rng(3)
gaps = []
for _ in range(20):
    A = PatternMatrix.from_dense(rng.random((6, 6)) < 0.35)
    if A.nnz:
        gaps.append(run(A).state.num_diags - exact_cbs2d(A).optimum)
print(f"local search vs optimum on 6x6 matrices: mean gap {np.mean(gaps):.2f}, worst {max(gaps)}")

with tempfile.TemporaryDirectory() as tmp:
    paths = []
    for s in range(3):
        A, _, _ = generate(SynthSpec(200, 6, 0.02, s))
        paths.append(f"{tmp}/synth{s}.mtx")
        write_matrix_market(A, paths[-1])
    variants = [Variant("-", "natural", "3OPT")] + [
        Variant(sym, o, "3OPT") for sym in ("pattern", "bipartite") for o in ("rcm", "mp", "lbs")
    ]
    results = run_batch(paths, tmp + "/out", variants, HarnessConfig(OptimizerConfig(time_budget=10)), workers=1)
    for row in sorted(leaderboard(results), key=lambda r: r.avg_rank):
        print(f"{row.variant:<18} wins {row.wins}  avg rank {row.avg_rank:.2f}")
