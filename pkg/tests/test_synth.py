import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagpack.core import apply_permutations, load_matrix_market, num_diagonals, read_permutations
from diagpack.synth import (
    SynthSpec,
    chebyshev_like,
    circulant,
    generate,
    negation_closed_residues,
    symmetric_thinning,
    write_instance,
)


@given(st.integers(1, 60), st.data())
@settings(max_examples=80, deadline=None)
def test_residue_sets_are_closed_and_sized(n, data):
    ell = data.draw(st.integers(1, n))
    rng = np.random.default_rng(data.draw(st.integers(0, 1000)))
    res = negation_closed_residues(n, ell, rng)
    assert len(res) == ell
    assert {(-k) % n for k in res} == set(res)


def test_circulant_counts():
    A = circulant(10, [0, 3, 7])
    assert A.nnz == 30
    assert num_diagonals(A) == 3
    assert (A.to_dense() == A.to_dense().T).all()


def test_thinning_keeps_symmetry_and_rate():
    rng = np.random.default_rng(0)
    A = circulant(400, [0, 1, 399, 5, 395])
    B = symmetric_thinning(A, 0.3, rng)
    D = B.to_dense()
    assert (D == D.T).all()
    assert 0.6 < B.nnz / A.nnz < 0.8
    assert B.entries() <= A.entries()
    assert symmetric_thinning(A, 0.0, rng) is A


def test_generate_hides_a_known_solution():
    inst = generate(SynthSpec(200, 6, 0.0, 3))
    A, P, true = inst
    assert true == 6 == len(inst.residues)
    back = apply_permutations(A, P.inv(), P.inv())
    assert num_diagonals(back) == 6
    assert num_diagonals(A, P.inv(), P.inv()) == 6
    assert (A.to_dense() == A.to_dense().T).all()


def test_generate_is_seeded():
    a = generate(SynthSpec(80, 4, 0.1, 9))
    b = generate(SynthSpec(80, 4, 0.1, 9))
    assert a.matrix == b.matrix and a.hidden == b.hidden


def test_noise_can_only_lower_true_count():
    inst = generate(SynthSpec(50, 10, 0.9, 1))
    assert inst.true_diags <= 10


def test_scrambling_destroys_structure():
    A, _, true = generate(SynthSpec(1000, 10, 0.0, 0))
    assert num_diagonals(A) > 50 * true


@pytest.mark.parametrize("kw", [{"n": 0, "ell": 1}, {"n": 5, "ell": 6}, {"n": 5, "ell": 1, "noise_p": 1.0}, {"n": 5, "ell": 1, "symmetric": False}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SynthSpec(**kw)


def test_chebyshev_shape():
    A = chebyshev_like()
    assert A.n == 261
    assert num_diagonals(A) == 261
    assert A.row_degrees()[:4].tolist() == [261] * 4
    assert (A.row_degrees()[4:] == 3).all()


def test_chebyshev_scrambled_keeps_degrees():
    A = chebyshev_like(seed=2)
    assert sorted(A.row_degrees().tolist()) == sorted(chebyshev_like().row_degrees().tolist())


def test_write_instance(tmp_path):
    spec = SynthSpec(30, 3, 0.2, 4)
    inst = generate(spec)
    meta = write_instance(inst, spec, tmp_path)
    stem = meta["matrix_file"][:-4]
    assert load_matrix_market(tmp_path / meta["matrix_file"]) == inst.matrix
    pr, pc = read_permutations(tmp_path / meta["hidden_permutation_file"])
    assert pr == pc == inst.hidden
    side = json.loads((tmp_path / f"{stem}.json").read_text())
    assert side["true_diags"] == inst.true_diags
    assert side["spec"]["noise_p"] == 0.2
