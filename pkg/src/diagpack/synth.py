"""Synthetic benchmark instances.

``generate`` builds a symmetric circulant with a fixed number of full
diagonals, thins it with symmetric noise and hides it behind one random
symmetric relabelling.  ``chebyshev_like`` builds a near-banded circulant
core topped by a few completely full rows, the shape that makes dense-row
elimination pay off.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import (
    PatternMatrix,
    Permutation,
    apply_permutations,
    num_diagonals,
    write_matrix_market,
    write_permutations,
)


@dataclass(frozen=True)
class SynthSpec:
    n: int
    ell: int
    noise_p: float = 0.0
    seed: int = 0
    symmetric: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.ell <= self.n:
            raise ValueError(f"ell must lie in [1, {self.n}]")
        if not 0.0 <= self.noise_p < 1.0:
            raise ValueError("noise_p must lie in [0, 1)")
        if not self.symmetric:
            raise ValueError("only symmetric instances are generated")


@dataclass
class SynthInstance:
    matrix: PatternMatrix
    hidden: Permutation
    true_diags: int
    residues: list

    def __iter__(self):
        # allows ``A, P, true = generate(spec)``
        return iter((self.matrix, self.hidden, self.true_diags))


def negation_closed_residues(n: int, ell: int, rng: np.random.Generator) -> list:
    """``ell`` residues mod ``n`` forming a set closed under ``k -> -k``.

    Self-paired residues (0, and ``n/2`` for even ``n``) contribute one
    element; every other residue comes with its mirror.
    """
    singles = [0] + ([n // 2] if n % 2 == 0 and n > 1 else [])
    pairs_available = (n - 1) // 2
    s = ell % 2
    if (ell - s) // 2 > pairs_available:
        s = 2
    if s > len(singles) or (ell - s) // 2 > pairs_available:
        raise ValueError(f"no negation-closed residue set of size {ell} mod {n}")
    chosen_singles = rng.choice(singles, size=s, replace=False).tolist() if s else []
    half = rng.choice(np.arange(1, pairs_available + 1), size=(ell - s) // 2, replace=False).tolist()
    out = set(int(k) for k in chosen_singles)
    for k in half:
        out.add(int(k))
        out.add(int(n - k))
    return sorted(out)


def circulant(n: int, residues, values: bool = False) -> PatternMatrix:
    """Full circulant pattern with the given diagonal residues."""
    res = np.asarray(sorted(set(int(k) % n for k in residues)), dtype=np.int64)
    rows = np.repeat(np.arange(n, dtype=np.int64), res.size)
    cols = (rows + np.tile(res, n)) % n
    vals = np.ones(rows.size) if values else None
    return PatternMatrix.from_coo(n, rows, cols, vals)


def symmetric_thinning(A: PatternMatrix, p: float, rng: np.random.Generator) -> PatternMatrix:
    """Drop each unordered pair ``{(i,j),(j,i)}`` with probability ``p``."""
    rows, cols = A.coo()
    if p == 0.0 or A.nnz == 0:
        return A
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    key = lo * A.n + hi
    uniq, inv = np.unique(key, return_inverse=True)
    keep_pair = rng.random(uniq.size) >= p
    keep = keep_pair[inv]
    vals = None if A.values is None else A.values[keep]
    return PatternMatrix.from_coo(A.n, rows[keep], cols[keep], vals)


def generate(spec: SynthSpec, *, values: bool = False) -> SynthInstance:
    """Scrambled noisy symmetric circulant.

    The returned ``true_diags`` is the diagonal count of the thinned matrix
    before scrambling; ``hidden`` maps original indices to scrambled ones
    for rows and columns alike.
    """
    rng = np.random.default_rng(spec.seed)
    residues = negation_closed_residues(spec.n, spec.ell, rng)
    base = symmetric_thinning(circulant(spec.n, residues, values), spec.noise_p, rng)
    hidden = Permutation.random(spec.n, rng)
    scrambled = apply_permutations(base, hidden, hidden)
    return SynthInstance(scrambled, hidden, num_diagonals(base), residues)


def chebyshev_like(
    n: int = 261,
    dense_rows: int = 4,
    residues=(0, 1, -1),
    *,
    seed: Optional[int] = None,
    values: bool = False,
) -> PatternMatrix:
    """Circulant core whose first ``dense_rows`` rows are completely full.

    With ``seed`` set, rows and columns are scrambled independently.
    """
    if not 0 <= dense_rows <= n:
        raise ValueError("dense_rows out of range")
    core = circulant(n, residues)
    rows, cols = core.coo()
    keep = rows >= dense_rows
    full_r = np.repeat(np.arange(dense_rows, dtype=np.int64), n)
    full_c = np.tile(np.arange(n, dtype=np.int64), dense_rows)
    r = np.concatenate([rows[keep], full_r])
    c = np.concatenate([cols[keep], full_c])
    vals = np.ones(r.size) if values else None
    A = PatternMatrix.from_coo(n, r, c, vals)
    if seed is not None:
        rng = np.random.default_rng(seed)
        A = apply_permutations(A, Permutation.random(n, rng), Permutation.random(n, rng))
    return A


def write_instance(inst: SynthInstance, spec: SynthSpec, out_dir, stem: Optional[str] = None) -> dict:
    """Write ``<stem>.mtx``, ``<stem>.perm`` and a ``<stem>.json`` sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    stem = stem or f"circ_n{spec.n}_l{spec.ell}_p{spec.noise_p:g}_s{spec.seed}"
    mtx = os.path.join(out_dir, stem + ".mtx")
    perm = os.path.join(out_dir, stem + ".perm")
    side = os.path.join(out_dir, stem + ".json")
    write_matrix_market(inst.matrix, mtx, comment=f"synthetic circulant {stem}")
    write_permutations(inst.hidden, inst.hidden, perm)
    meta = {
        "spec": asdict(spec),
        "true_diags": inst.true_diags,
        "residues": inst.residues,
        "matrix_file": os.path.basename(mtx),
        "hidden_permutation_file": os.path.basename(perm),
    }
    with open(side, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta
