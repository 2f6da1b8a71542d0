"""Counting cyclic diagonals and improving a layout with exchange moves.

Run:  python3 demos/01_counting_and_moves.py
"""

import numpy as np

from diagpack import PatternMatrix, Permutation, apply_permutations, count_diagonals
from diagpack.optimizer import ROW, accept_rule, init_stats, probe_2opt, probe_3opt, run
from diagpack.pipeline import Pipeline

# A 7x7 pattern: the main diagonal plus a ring of four entries that all sit
# two columns to the right of their row, modulo 7.
rows = list(range(7)) + [0, 2, 4, 6]
cols = list(range(7)) + [2, 4, 6, 1]
A = PatternMatrix.from_coo(7, rows, cols)
d = count_diagonals(A)
print(f"7x7 example: {d.num_diags} non-empty diagonals, occupancy {d.diag_nnz}")

# Exchanging two rows can merge diagonals.
B = PatternMatrix.from_coo(6, [0, 1, 3, 3, 4], [1, 4, 4, 2, 5])
st = init_stats(B, Permutation.identity(6), Permutation.identity(6))
delta = probe_2opt(st, 1, 3, ROW)
print(f"swapping rows 1 and 3: gain {delta.gain}, accepted={accept_rule(delta)}")

# Rotating three rows can do what no single exchange achieves.
C = PatternMatrix.from_coo(
    6, [0, 0, 4, 4, 1, 1, 2, 2, 5], [0, 4, 1, 5, 2, 0, 4, 2, 2]
)
st = init_stats(C, Permutation.identity(6), Permutation.identity(6))
delta = probe_3opt(st, 1, 2, 4, ROW)
print(f"rotating rows 1, 2, 4: {st.diag.num_diags} -> {st.diag.num_diags - delta.gain} diagonals")

# The full local search on a scrambled banded matrix.
rng = np.random.default_rng(0)
n = 80
band = PatternMatrix.from_coo(n, np.repeat(np.arange(n), 3), (np.repeat(np.arange(n), 3) + np.tile([0, 1, n - 1], n)) % n)
pr0, pc0 = Permutation.random(n, rng), Permutation.random(n, rng)
res = run(band, pr0, pc0)
print(f"scrambled 80x80 band: {count_diagonals(band, pr0, pc0).num_diags} -> {res.state.num_diags} diagonals "
      f"after {len(res.trace)} passes")

# Starting from a graph ordering instead of a random layout helps a lot.
scrambled = apply_permutations(band, pr0, pc0)
res = Pipeline("rcm", "bipartite", "3opt")(scrambled)
print(f"same matrix from a bipartite RCM start: {res.init_diags} -> {res.final_diags} diagonals")
