"""Batch evaluation of ordering/optimization variants over a matrix collection.

Each variant is a (symmetrization, ordering, optimization level) triple.
For every matrix the harness also synthesizes one combined ``*`` row per
optimization level, holding the best result over the singleton graph
orderings at that level.  Scoring follows the usual conventions for
comparing heuristics on a test set: a variant *wins* on a matrix when it
attains the lowest diagonal count there (ties all win), ranks use standard
competition ranking, and normalized performance is the per-matrix ratio
``baseline / variant`` averaged arithmetically.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .core import PatternMatrix, load_matrix_market, num_diagonals
from .elimination import CostModel
from .emulator import estimate_time
from .optimizer import OptimizerConfig
from .pipeline import GRAPH_ORDERINGS, OPT_LEVELS, SYMMETRIZATIONS, Pipeline

LEVEL_NAMES = {"none": "NoOPT", "2opt": "2OPT", "3opt": "3OPT"}
LEVEL_CODES = {v: k for k, v in LEVEL_NAMES.items()}
COMBINED = "*"


@dataclass(frozen=True)
class Variant:
    symmetrization: str
    ordering: str
    opt_level: str  # NoOPT | 2OPT | 3OPT

    @property
    def key(self) -> str:
        if self.ordering == "natural":
            return f"Natural+{self.opt_level}"
        if self.ordering == COMBINED:
            return f"*+{self.opt_level}"
        sym = {"pattern": "Pat.", "bipartite": "Bpar."}.get(self.symmetrization, self.symmetrization)
        return f"{sym}-{self.ordering.upper()}+{self.opt_level}"


@dataclass
class VariantResult:
    matrix_id: str
    symmetrization: str
    ordering: str
    opt_level: str
    num_diags_init: int
    num_diags_final: int
    elapsed_s: float
    estimated_spmv_us: float
    error: Optional[str] = None

    @property
    def variant(self) -> Variant:
        return Variant(self.symmetrization, self.ordering, self.opt_level)

    @property
    def key(self) -> str:
        return self.variant.key

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_json(self) -> dict:
        return asdict(self)


def default_variants(include_natural: bool = True) -> list:
    out = []
    levels = [LEVEL_NAMES[c] for c in OPT_LEVELS]
    if include_natural:
        out += [Variant("-", "natural", lv) for lv in levels]
    for sym in SYMMETRIZATIONS:
        for ordering in GRAPH_ORDERINGS:
            for lv in levels:
                out.append(Variant(sym, ordering, lv))
    return out


@dataclass
class HarnessConfig:
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(time_budget=60.0))
    nev: int = 50
    cost: CostModel = field(default_factory=CostModel)


def run_variant(matrix_id: str, A: PatternMatrix, v: Variant, cfg: HarnessConfig) -> VariantResult:
    sym = "pattern" if v.ordering == "natural" else v.symmetrization
    pipe = Pipeline(v.ordering, sym, LEVEL_CODES[v.opt_level], cfg.optimizer, cfg.nev)
    try:
        r = pipe(A)
    except Exception as exc:  # recorded, the batch goes on
        return VariantResult(matrix_id, v.symmetrization, v.ordering, v.opt_level, -1, -1, 0.0, 0.0,
                             f"{type(exc).__name__}: {exc}")
    return VariantResult(matrix_id, v.symmetrization, v.ordering, v.opt_level, r.init_diags, r.final_diags,
                         r.elapsed_s, estimate_time(r.final_diags, A.n, cfg.cost))


def combined_rows(results: list) -> list:
    """One ``*`` row per (matrix, level): the best singleton graph ordering."""
    out = []
    groups: dict = {}
    for r in results:
        if r.ok and r.ordering not in ("natural", COMBINED):
            groups.setdefault((r.matrix_id, r.opt_level), []).append(r)
    for (mid, lv), rows in sorted(groups.items()):
        best = min(rows, key=lambda r: (r.num_diags_final, r.num_diags_init))
        out.append(VariantResult(mid, COMBINED, COMBINED, lv, best.num_diags_init, best.num_diags_final,
                                 sum(r.elapsed_s for r in rows), best.estimated_spmv_us))
    return out


def run_matrix(A: PatternMatrix, variants=None, cfg: Optional[HarnessConfig] = None, matrix_id: str = "matrix",
               skip=frozenset()) -> list:
    """Run ``variants`` (default: the full grid) on ``A`` and append the ``*`` rows.

    ``skip`` holds variant keys already computed.
    """
    cfg = cfg or HarnessConfig()
    variants = default_variants() if variants is None else variants
    results = [run_variant(matrix_id, A, v, cfg) for v in variants if v.key not in skip]
    return results + combined_rows(results)


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------


def _table(results: list) -> tuple:
    """``({matrix: {variant_key: final}}, variant keys in first-seen order)``."""
    table: dict = {}
    keys: list = []
    for r in results:
        if not r.ok:
            continue
        table.setdefault(r.matrix_id, {})[r.key] = r.num_diags_final
        if r.key not in keys:
            keys.append(r.key)
    return table, keys


@dataclass
class LeaderboardRow:
    variant: str
    wins: int
    win_pct: float
    avg_rank: float
    matrices: int
    perf_vs_natural_amean: Optional[float] = None
    perf_vs_natural_max: Optional[float] = None
    perf_vs_natural3_amean: Optional[float] = None
    perf_vs_natural3_max: Optional[float] = None


def _ratios(table: dict, baseline: str, key: str) -> list:
    out = []
    for row in table.values():
        if baseline in row and key in row and row[key] > 0:
            out.append(row[baseline] / row[key])
    return out


def leaderboard(results: list, variants: Optional[list] = None) -> list:
    """Per-variant wins, win percentage, average competition rank and normalized performance.

    Ranking is done per matrix over ``variants`` (default: every variant
    present).  A variant missing on a matrix gets the worst rank there.
    """
    table, keys = _table(results)
    keys = keys if variants is None else list(variants)
    nmat = len(table)
    base0 = "Natural+NoOPT"
    base3 = "Natural+3OPT"
    rows = []
    stats = {k: [0, 0.0] for k in keys}
    for row in table.values():
        present = {k: row[k] for k in keys if k in row}
        if not present:
            continue
        best = min(present.values())
        for k in keys:
            if k in present:
                v = present[k]
                stats[k][1] += 1 + sum(1 for w in present.values() if w < v)
                if v == best:
                    stats[k][0] += 1
            else:
                stats[k][1] += len(keys)
    for k in keys:
        wins, rank_sum = stats[k]
        r0 = _ratios(table, base0, k)
        r3 = _ratios(table, base3, k)
        rows.append(
            LeaderboardRow(
                k, wins, 100.0 * wins / nmat if nmat else 0.0, rank_sum / nmat if nmat else 0.0, nmat,
                sum(r0) / len(r0) if r0 else None, max(r0) if r0 else None,
                sum(r3) / len(r3) if r3 else None, max(r3) if r3 else None,
            )
        )
    return rows


def performance_profile(results: list, variants: Optional[list] = None, taus=(1.0, 1.05, 1.1, 1.25, 1.5, 2.0, 4.0)) -> dict:
    """``{variant: [fraction of matrices within tau * best, for each tau]}``.

    The per-matrix best is taken over ``variants``.
    """
    taus = list(taus)
    if any(t < 1 for t in taus):
        raise ValueError("tau values must be >= 1")
    table, keys = _table(results)
    keys = keys if variants is None else list(variants)
    nmat = len(table)
    out = {k: [0.0] * len(taus) for k in keys}
    for row in table.values():
        present = [row[k] for k in keys if k in row]
        if not present:
            continue
        best = min(present)
        for k in keys:
            if k not in row:
                continue
            for t_i, tau in enumerate(taus):
                if row[k] <= tau * best:
                    out[k][t_i] += 1
    for k in keys:
        out[k] = [c / nmat if nmat else 0.0 for c in out[k]]
    return {"taus": taus, "curves": out}


@dataclass
class FilterDecision:
    include: bool
    rule: str

    def __bool__(self) -> bool:
        return self.include


def dataset_filter(A: PatternMatrix, metadata: Optional[dict] = None) -> FilterDecision:
    """Keep matrices whose natural diagonal count leaves room for improvement.

    With ``metadata`` (keys ``n`` and ``sigma``, the average nonzeros per
    row) the size and density gates are applied too.
    """
    if metadata:
        n = metadata.get("n", A.n)
        if not 10000 <= n <= 50000:
            return FilterDecision(False, "size: n outside [10000, 50000]")
        sigma = metadata.get("sigma", A.nnz / max(A.n, 1))
        if not 3 <= sigma <= 20:
            return FilterDecision(False, "density: nnz/n outside [3, 20]")
    natural = num_diagonals(A)
    bound = A.max_degree()
    if natural > 4 * bound:
        return FilterDecision(True, f"natural count {natural} > 4 * max degree {bound}")
    return FilterDecision(False, f"natural count {natural} <= 4 * max degree {bound}")


# ---------------------------------------------------------------------------
# batch driver
# ---------------------------------------------------------------------------


def _load_done(path: str) -> list:
    done = []
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    done.append(VariantResult(**json.loads(line)))
    return done


def _matrix_job(args) -> list:
    path, matrix_id, variants, cfg, skip = args
    A = load_matrix_market(path)
    out = [run_variant(matrix_id, A, v, cfg) for v in variants if v.key not in skip]
    return out


def worker_count() -> int:
    env = os.environ.get("DIAGPACK_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def discover(source) -> list:
    """``.mtx`` paths from a directory, or from a manifest listing one path per line."""
    if os.path.isdir(source):
        return sorted(os.path.join(source, f) for f in os.listdir(source) if f.endswith(".mtx"))
    base = os.path.dirname(os.path.abspath(source))
    with open(source) as fh:
        items = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    return [p if os.path.isabs(p) else os.path.join(base, p) for p in items]


def run_batch(paths: list, out_dir, variants=None, cfg: Optional[HarnessConfig] = None, *,
              force: bool = False, workers: Optional[int] = None, taus=None) -> list:
    """Evaluate every matrix; write per-matrix JSON lines, ``leaderboard.csv`` and ``profile.csv``.

    Finished (matrix, variant) pairs are skipped on re-runs unless ``force``.
    Only the calling process writes files.
    """
    cfg = cfg or HarnessConfig()
    variants = default_variants() if variants is None else variants
    os.makedirs(out_dir, exist_ok=True)
    res_dir = os.path.join(out_dir, "results")
    os.makedirs(res_dir, exist_ok=True)
    jobs = []
    all_results: list = []
    for p in paths:
        mid = os.path.splitext(os.path.basename(p))[0]
        rpath = os.path.join(res_dir, mid + ".jsonl")
        if force and os.path.exists(rpath):
            os.remove(rpath)
        done = [r for r in _load_done(rpath) if r.ordering != COMBINED]
        all_results.extend(done)
        skip = frozenset(r.key for r in done if r.ok)
        jobs.append((p, mid, variants, cfg, skip))
    workers = workers or worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_matrix_job, jobs))
    else:
        outputs = [_matrix_job(j) for j in jobs]
    for (p, mid, *_), new in zip(jobs, outputs):
        rpath = os.path.join(res_dir, mid + ".jsonl")
        with open(rpath, "a") as fh:
            for r in new:
                fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
        all_results.extend(new)
    all_results = [r for r in all_results if r.ordering != COMBINED]
    all_results += combined_rows(all_results)
    with open(os.path.join(out_dir, "results.jsonl"), "w") as fh:
        for r in all_results:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    write_leaderboard_csv(leaderboard(all_results), os.path.join(out_dir, "leaderboard.csv"))
    prof = performance_profile(all_results, taus=taus) if taus else performance_profile(all_results)
    write_profile_csv(prof, os.path.join(out_dir, "profile.csv"))
    return all_results


def write_leaderboard_csv(rows: list, path) -> None:
    fields = list(asdict(rows[0]).keys()) if rows else ["variant"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow(asdict(r))


def write_profile_csv(profile: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant"] + [f"{t:g}" for t in profile["taus"]])
        for k, vals in profile["curves"].items():
            w.writerow([k] + [f"{v:.6f}" for v in vals])
