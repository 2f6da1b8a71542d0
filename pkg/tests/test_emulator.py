import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagpack.core import PatternMatrix, Permutation, num_diagonals
from diagpack.elimination import CostModel, select_and_plan
from diagpack.emulator import decompose, estimate_time, hs_spmv, permuted_pipeline
from diagpack.synth import chebyshev_like
from helpers import random_pattern, toy_7x7


def test_toy_diagonals():
    A = toy_7x7(values=True)
    D = decompose(A)
    assert D.support == [0, 2]
    assert D.entries[2].tolist() == [1, 0, 1, 0, 1, 0, 1]
    assert D.entry(6, 1) == 1.0 and D.entry(1, 3) == 0.0


def test_product_and_op_counts():
    A = toy_7x7(values=True)
    x = np.arange(7.0)
    y, ops = hs_spmv(decompose(A), x)
    assert np.allclose(y, A.to_dense() @ x)
    assert (ops.mults, ops.rots, ops.rots_incl_zero, ops.adds) == (2, 1, 2, 1)


def test_pattern_matrix_rejected():
    with pytest.raises(ValueError):
        decompose(toy_7x7())


def test_length_check():
    with pytest.raises(ValueError):
        hs_spmv(decompose(toy_7x7(values=True)), np.ones(6))
    with pytest.raises(ValueError):
        permuted_pipeline(toy_7x7(values=True), Permutation.identity(7), Permutation.identity(7), np.ones(3))


@given(st.integers(1, 12), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_permuted_pipeline_reproduces_plain_product(n, seed):
    rng = np.random.default_rng(seed)
    A = random_pattern(rng, n, 0.4, values=True)
    pr, pc = Permutation.random(n, rng), Permutation.random(n, rng)
    x = rng.standard_normal(n)
    y, ops = permuted_pipeline(A, pr, pc, x)
    assert np.allclose(y, A.to_dense() @ x, atol=1e-9)
    assert ops.mults == num_diagonals(A, pr, pc)


def test_empty_matrix():
    A = PatternMatrix.from_coo(3, [], [], [])
    y, ops = hs_spmv(decompose(A), np.ones(3))
    assert (y == 0).all() and ops.mults == 0 and ops.adds == 0


def test_estimate_time_single_ciphertext():
    cm = CostModel()
    assert estimate_time(5, 261, cm) == pytest.approx(5 * (3814.3 + 11073.3))
    assert estimate_time(5, 261, cm) == pytest.approx(74438.0)


def test_estimate_time_splits_long_vectors():
    cm = CostModel()
    assert estimate_time(3, 4097, cm) == pytest.approx(6 * cm.per_diagonal)
    assert estimate_time(3, 4096, cm) == pytest.approx(3 * cm.per_diagonal)


def test_estimate_time_adds_plan_overhead():
    A = chebyshev_like(values=True)
    plan = select_and_plan(A)
    t = estimate_time(plan.diags_after, A.n, plan=plan)
    assert t == pytest.approx(plan.diags_after * CostModel().per_diagonal + plan.overhead_us)
