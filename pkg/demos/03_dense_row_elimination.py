"""Handling a few dense rows outside the diagonal product.

Four full rows force every layout to use all 261 diagonals.  Pulling them
out and computing those entries of the product as encrypted inner
products leaves a three-diagonal core; the cost model says whether the
trade pays off.

Run:  python3 demos/03_dense_row_elimination.py
"""

import numpy as np

from diagpack.elimination import CostModel, assemble_result, select_and_plan
from diagpack.emulator import estimate_time, permuted_pipeline
from diagpack.synth import chebyshev_like

cm = CostModel()
A = chebyshev_like(values=True)
plan = select_and_plan(A, cm)
print(f"rows removed {plan.dense_rows}, diagonals {plan.diags_before} -> {plan.diags_after}")
print(f"overhead {plan.overhead_us:,.1f} us, saving {plan.gain_us:,.1f} us, profitable={plan.profitable}")
print(f"modeled SpMV: {estimate_time(plan.diags_before, A.n, cm):,.0f} us before, "
      f"{estimate_time(plan.diags_after, A.n, cm, plan):,.0f} us after")

x = np.random.default_rng(1).standard_normal(A.n)
core = plan.core_result
core_y, ops = permuted_pipeline(plan.core, core.pr, core.pc, x)
y = assemble_result(core_y, A, x, plan.dense_rows, plan.dense_cols)
print(f"split product error {np.max(np.abs(y - A.to_dense() @ x)):.2e} using {ops.mults} diagonal products")
